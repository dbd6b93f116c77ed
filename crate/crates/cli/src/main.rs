use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use avmod::module::ZooParams;
use avmod::rational::Rational;
use avmod::suite::RunConfig;
use avmod_cli::{cmd_annihilator, cmd_order, cmd_verify, CliError, Format, ReportEnvelope};

/// Exact checks of Omega identities, annihilators and Lie-map orders.
#[derive(Parser)]
#[command(name = "avmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity, representation and localization suites.
    Verify(VerifyArgs),
    /// Rank, Lie-map order and oracle order of a module.
    Order {
        #[command(flatten)]
        module: ModuleArgs,
        /// Largest order tried by the oracle (default: rank²).
        #[arg(long)]
        n_max: Option<u32>,
    },
    /// Minimal p with Ω_p(f, η) acting as zero on a module.
    Annihilator {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite names or groups (`all`, `identities`, `localize`), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    dims: Vec<usize>,
    /// Maximal degree of sampled polynomials.
    #[arg(long, default_value_t = 4)]
    degree: u32,
    #[arg(long, default_value_t = 10)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest p (and q) used by identity suites.
    #[arg(long, default_value_t = 4)]
    pmax: u32,
    /// Add a spurious nonzero term to every identity; all identity trials should fail.
    #[arg(long)]
    corrupt: bool,
}

#[derive(Args)]
struct ModuleArgs {
    /// `zoo:<name>` or a module-definition JSON file.
    #[arg(long)]
    module: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Jet order for `zoo:jets`.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Weight for `zoo:twist`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda: String,
}

impl ModuleArgs {
    fn params(&self) -> Result<ZooParams, String> {
        let lambda: Rational = self.lambda.parse().map_err(|e| format!("--lambda: {e}"))?;
        Ok(ZooParams { dim: self.dim, rank: self.rank, n: self.n, lambda })
    }
}

fn run(cli: &Cli) -> Result<ReportEnvelope, String> {
    let err = |e: CliError| e.to_string();
    match &cli.command {
        Command::Verify(a) => {
            let cfg = RunConfig {
                suites: a.suite.clone(),
                dims: a.dims.clone(),
                max_degree: a.degree,
                trials: a.trials,
                seed: a.seed,
                p_max: a.pmax,
                corrupt: a.corrupt,
            };
            cmd_verify(&cfg).map_err(err)
        }
        Command::Order { module, n_max } => cmd_order(&module.module, &module.params()?, *n_max).map_err(err),
        Command::Annihilator { module, f, eta } => {
            cmd_annihilator(&module.module, &module.params()?, f, eta).map_err(err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = match run(&cli) {
        Ok(env) => env,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = env.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write `{}`: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(env.exit_status as u8)
}
