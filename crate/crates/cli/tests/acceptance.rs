//! Acceptance suite: one line per criterion, all arithmetic exact.
//!
//! Runs without the test harness, so the criterion lines are always printed
//! and the identity sweep is timed on its own.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use avmod::localize::{Localization, LocalizedModuleElement};
use avmod::module::{
    annihilates, differential_forms, dual, exterior_power, jet_module, lie_map_order, min_annihilating_order,
    oracle_order, tangent_adjoint, tensor, trivial_dmodule, trivial_with_connection, twist, AVModule, ModuleElement,
    PolyMatrix,
};
use avmod::poly::{parse_derivation, parse_poly, Derivation, MultiIndex, Poly};
use avmod::rational::Rational;
use avmod::report::VerificationReport;
use avmod::sample::Sampler;
use avmod::smash::{omega, omega_closed_form, omega_multi};
use avmod::suite::{run_suites, RunConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20_240_601;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_pass(reports: &[VerificationReport]) -> Result<(), String> {
    match reports.iter().find(|r| !r.passed()) {
        None => Ok(()),
        Some(r) => Err(format!("{} failed on {:?}: {:?}", r.identity, r.inputs, r.witness)),
    }
}

fn p(s: &str, d: usize) -> Poly {
    parse_poly(s, d).unwrap()
}

fn r(n: i64) -> Rational {
    Rational::from(n)
}

fn line(g: &Poly) -> PolyMatrix {
    PolyMatrix::from_rows(g.dim(), vec![vec![g.clone()]]).unwrap()
}

/// Modules of rank at most six used by the order, annihilation and
/// exterior-power criteria.
fn zoo() -> Vec<AVModule> {
    let mut v = Vec::new();
    for d in 1..=3 {
        v.push(trivial_dmodule(d, 1).unwrap());
        v.push(differential_forms(d).unwrap());
        v.push(tangent_adjoint(d).unwrap());
    }
    v.push(trivial_dmodule(2, 2).unwrap());
    for n in 0..=3 {
        v.push(jet_module(1, n).unwrap());
    }
    for n in 0..=2 {
        v.push(jet_module(2, n).unwrap());
    }
    v.push(twist(1, Rational::new(1, 2)).unwrap());
    v.push(twist(2, r(-1)).unwrap());
    v.push(twist(3, r(2)).unwrap());
    // flat connection d + x2 dx1 + x1 dx2 on a line bundle
    v.push(trivial_with_connection(2, vec![line(&p("x2", 2)), line(&p("x1", 2))]).unwrap());
    v.push(tensor(&differential_forms(2).unwrap(), &jet_module(2, 1).unwrap()).unwrap());
    v.push(dual(&jet_module(1, 2).unwrap()).unwrap());
    v.push(exterior_power(&differential_forms(3).unwrap(), 2).unwrap());
    assert!(v.iter().all(|m| m.is_valid() && m.rank() <= 6));
    v
}

fn identity_config(suites: &[&str]) -> RunConfig {
    RunConfig {
        suites: suites.iter().map(|s| s.to_string()).collect(),
        dims: vec![1, 2, 3],
        max_degree: 4,
        trials: 100,
        seed: SEED,
        p_max: 4,
        corrupt: false,
    }
}

fn criterion_1() -> Outcome {
    let cfg = identity_config(&["identities"]);
    let start = Instant::now();
    let reports = run_suites(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    all_pass(&reports)?;
    ensure(reports.len() == 9 * 3 * 100, || format!("expected 2700 reports, got {}", reports.len()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} instances (9 identities x dims 1-3 x 100 samples, all p,q in 1..4) in {:.1?}", reports.len(), elapsed))
}

fn criterion_2() -> Outcome {
    let reports = run_suites(&identity_config(&["closed-form"])).map_err(|e| e.to_string())?;
    all_pass(&reports)?;
    ensure(reports.len() == 300, || format!("expected 300 reports, got {}", reports.len()))?;
    Ok(format!("{} samples, f,g,h x eta,mu, p in 0..4", reports.len()))
}

fn criterion_3() -> Outcome {
    let forms = differential_forms(1).unwrap();
    let n = min_annihilating_order(&forms, &p("x1", 1), &parse_derivation("d1", 1).unwrap()).map_err(|e| e.to_string())?;
    ensure(n == 2, || format!("min_annihilating_order(forms(1), x, d) = {n}"))?;

    let mut s = Sampler::new(SEED);
    for d in 1..=2 {
        let m = tangent_adjoint(d).unwrap();
        for _ in 0..30 {
            let (f, e) = (s.nonconstant_poly(d, 3), s.nonzero_derivation(d, 3));
            ensure(annihilates(&m, &omega(2, &f, &e).unwrap()).unwrap(), || format!("Ω_2({f},{e}) acts on adjoint({d})"))?;
        }
        let x = Poly::var(d, 0);
        let e = Derivation::coordinate(d, 0);
        ensure(!annihilates(&m, &omega(1, &x, &e).unwrap()).unwrap(), || "Ω_1(x1, d1) already annihilates".into())?;
    }
    for d in 1..=3 {
        for rank in 1..=2 {
            let o = lie_map_order(&trivial_dmodule(d, rank).unwrap()).unwrap();
            ensure(o == 0, || format!("lie_map_order(trivial({d},{rank})) = {o}"))?;
        }
    }
    Ok("min order 2 on forms(1); Ω_2 kills adjoint(1), adjoint(2); D-modules have order 0".into())
}

/// `∂(g∂)` on `J^n` in one variable, from `∂ᵏ(g h') = Σ_j C(k,j) g^{(j)} h^{(k+1−j)}`:
/// the entry for `∂^j g` sits at row `k`, column `k+1−j`.
fn jet_prolongation(n: u32) -> Vec<(u32, Vec<Vec<Rational>>)> {
    let size = n as usize + 1;
    (1..=n)
        .map(|j| {
            let mut m = vec![vec![Rational::ZERO; size]; size];
            for k in j..=n {
                m[k as usize][(k + 1 - j) as usize] = Rational::binomial(k, j);
            }
            (j, m)
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    let mut extra = zoo();
    // J³ in two variables has rank 10; it is listed alongside the zoo
    extra.push(jet_module(2, 3).unwrap());
    for m in &extra {
        let o = lie_map_order(m).unwrap();
        let bound = (m.rank() * m.rank()) as u32;
        let oracle = oracle_order(m, bound).unwrap();
        ensure(oracle.order == o && o <= bound, || {
            format!("{}: order {o}, oracle {:?}, rank^2 {bound}", m.label(), oracle)
        })?;
        checked += 1;
    }
    let mut table = Vec::new();
    for n in 0..=3u32 {
        let m = jet_module(1, n).unwrap();
        let o = lie_map_order(&m).unwrap();
        ensure(o == n && m.rank() == n as usize + 1, || format!("J^{n}: rank {}, order {o}", m.rank()))?;
        let expected = jet_prolongation(n);
        let nonzero: Vec<_> = m.terms().filter(|(_, _, m)| !m.is_zero()).collect();
        ensure(nonzero.len() == expected.len(), || format!("J^{n}: {} higher terms", nonzero.len()))?;
        for (j, rows) in expected {
            let mat = m.term(0, &MultiIndex::from_slice(&[j as u16]));
            for (k, row) in rows.iter().enumerate() {
                for (c, want) in row.iter().enumerate() {
                    let got = mat.map(|t| t.get(k, c).clone()).unwrap_or_else(|| Poly::zero(1));
                    ensure(got == Poly::constant(1, want.clone()), || format!("J^{n}: D_{j}[{k}][{c}] = {got}"))?;
                }
            }
        }
        table.push(format!("J{n}:({},{o})", m.rank()));
    }
    Ok(format!("{checked} modules with order = oracle <= rank^2; (rank, order) {}", table.join(" ")))
}

/// Quadratic `f` unless `(f(x) − f(y))^p` could exceed the term budget.
fn sample_degree(d: usize, p: u32) -> u32 {
    let vars = 2 * d as u64;
    let top = 2 * p as u64;
    let terms = (1..=vars).fold(1u64, |acc, k| acc * (top + k) / k);
    if terms <= 200_000 { 2 } else { 1 }
}

fn criterion_5() -> Outcome {
    let modules = zoo();
    let mut groups: Vec<(usize, usize, Vec<&AVModule>)> = Vec::new();
    for m in &modules {
        match groups.iter_mut().find(|(d, r, _)| *d == m.dim() && *r == m.rank()) {
            Some(g) => g.2.push(m),
            None => groups.push((m.dim(), m.rank(), vec![m])),
        }
    }
    let mut count = 0;
    for (d, rank, members) in &groups {
        let b = (rank * rank) as u32;
        let deg = sample_degree(*d, b + 3);
        let mut s = Sampler::fork(SEED, (*d as u64) << 8 | *rank as u64);
        for _ in 0..50 {
            let f = s.nonconstant_poly(*d, deg);
            let e = s.nonzero_derivation(*d, 2);
            for q in b + 1..=b + 3 {
                let single = omega_closed_form(q, &f, &e).unwrap();
                let fs = s.distinct_polys(q as usize, *d, 1);
                let multi = omega_multi(&fs, &e).unwrap();
                for m in members {
                    ensure(annihilates(m, &single).unwrap(), || format!("Ω_{q}({f},{e}) acts on {}", m.label()))?;
                    ensure(annihilates(m, &multi).unwrap(), || format!("Ω(({q} functions),{e}) acts on {}", m.label()))?;
                    count += 2;
                }
            }
        }
    }
    Ok(format!("{} modules, 50 samples each, {count} annihilation checks for rank^2 < p <= rank^2+3", modules.len()))
}

/// `f/g` with `g ≠ 0`, for the Lie-derivative oracle.
#[derive(Clone)]
struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    fn new(num: Poly, den: Poly) -> Self {
        Frac { num, den }
    }
    fn add(&self, o: &Frac) -> Frac {
        Frac::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac::new(&self.num * &o.num, &self.den * &o.den)
    }
    fn partial(&self, i: usize) -> Frac {
        let top = &(&self.num.partial(i) * &self.den) - &(&self.num * &self.den.partial(i));
        Frac::new(top, &self.den * &self.den)
    }
    fn equals(&self, num: &Poly, den: &Poly) -> bool {
        &self.num * den == num * &self.den
    }
}

/// `L_ξ ω` for `ξ = Σ ξⱼ∂ⱼ` and `ω = Σ aₖ dxₖ`: `(L_ξ ω)ₖ = ξ(aₖ) + Σⱼ aⱼ ∂ₖξⱼ`.
fn lie_derivative(xi: &[Frac], a: &[Frac]) -> Vec<Frac> {
    let d = xi.len();
    let zero = Frac::new(Poly::zero(d), Poly::one(d));
    (0..d)
        .map(|k| {
            let mut acc = zero.clone();
            for j in 0..d {
                acc = acc.add(&xi[j].mul(&a[k].partial(j))).add(&a[j].mul(&xi[j].partial(k)));
            }
            acc
        })
        .collect()
}

fn matches_oracle(got: &LocalizedModuleElement, want: &[Frac]) -> bool {
    let den = got.base().pow(got.denom_exp());
    got.numerator().entries().iter().zip(want).all(|(n, w)| w.equals(n, &den))
}

fn criterion_6() -> Outcome {
    let cfg = RunConfig {
        suites: vec!["localize".into()],
        dims: vec![1, 2],
        max_degree: 3,
        trials: 50,
        seed: SEED,
        p_max: 4,
        corrupt: false,
    };
    let reports = run_suites(&cfg).map_err(|e| e.to_string())?;
    all_pass(&reports)?;

    let forms = differential_forms(1).unwrap();
    let x = p("x1", 1);
    let ctx = Localization::new(&forms, x.clone()).unwrap();
    let dx = ctx.embed(ModuleElement::basis(1, 1, 0)).unwrap();
    let got = ctx.act(&ctx.derivation(parse_derivation("d1", 1).unwrap(), 1).unwrap(), &dx).unwrap();
    let one = Poly::one(1);
    let want = lie_derivative(&[Frac::new(one.clone(), x.clone())], &[Frac::new(one.clone(), one.clone())]);
    ensure(matches_oracle(&got, &want), || format!("act(d/x, dx) = {got}"))?;
    ensure(got.denom_exp() == 2 && got.numerator().entries()[0] == p("-1", 1), || format!("act(d/x, dx) = {got}"))?;

    let mut s = Sampler::new(SEED ^ 6);
    let mut oracle_checks = 0;
    for d in 1..=2 {
        let m = differential_forms(d).unwrap();
        for _ in 0..50 {
            let f = s.nonconstant_poly(d, 2);
            let ctx = Localization::new(&m, f.clone()).unwrap();
            let (k, l) = (s.rng_range(0, 3), s.rng_range(0, 2));
            let eta = s.derivation(d, 2);
            let a: Vec<Poly> = (0..d).map(|_| s.poly(d, 2)).collect();
            let got = ctx
                .act(&ctx.derivation(eta.clone(), k).unwrap(), &ctx.element(ModuleElement::new(d, a.clone()).unwrap(), l).unwrap())
                .unwrap();
            let xi: Vec<Frac> = eta.coeffs().iter().map(|g| Frac::new(g.clone(), f.pow(k))).collect();
            let af: Vec<Frac> = a.iter().map(|c| Frac::new(c.clone(), f.pow(l))).collect();
            ensure(matches_oracle(&got, &lie_derivative(&xi, &af)), || format!("forms({d}), f={f}, eta={eta}: {got}"))?;
            oracle_checks += 1;
        }
    }
    Ok(format!("{} localized checks on d<=2; act(d/x, dx) = -dx/x^2; {oracle_checks} Lie-derivative comparisons", reports.len()))
}

fn criterion_7() -> Outcome {
    let modules = zoo();
    for m in &modules {
        let r = m.rank();
        let top = exterior_power(m, r).map_err(|e| format!("{}: {e}", m.label()))?;
        ensure(!top.is_zero_module() && top.rank() == 1 && top.is_valid(), || format!("Λ^{r}({}) is degenerate", m.label()))?;
        let above = exterior_power(m, r + 1).map_err(|e| format!("{}: {e}", m.label()))?;
        ensure(above.is_zero_module(), || format!("Λ^{}({}) is nonzero", r + 1, m.label()))?;
    }
    Ok(format!("{} modules: top power is a valid line, next power vanishes", modules.len()))
}

fn criterion_8() -> Outcome {
    let cfg = RunConfig {
        suites: vec!["representation".into()],
        dims: vec![1, 2, 3],
        max_degree: 3,
        trials: 20,
        seed: SEED,
        p_max: 4,
        corrupt: false,
    };
    let reports = run_suites(&cfg).map_err(|e| e.to_string())?;
    all_pass(&reports)?;
    ensure(reports.len() >= 100, || format!("only {} samples", reports.len()))?;
    Ok(format!("{} bracket/commutator comparisons", reports.len()))
}

fn criterion_9() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_avmod"))
        .args(["verify", "--suite", "identities", "--dims", "1,2", "--trials", "2", "--degree", "3", "--corrupt", "--seed", "9"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1), || format!("corrupted run exited with {:?}", out.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let results = v["results"].as_array().cloned().unwrap_or_default();
    ensure(
        !results.is_empty() && results.iter().all(|r| r["status"] == "fail" && r["witness"].is_object()),
        || "a corrupted identity passed".into(),
    )?;

    // curvature ∂₁Γ₂ − ∂₂Γ₁ = −1: not a representation
    let curved = trivial_with_connection(2, vec![line(&p("x2", 2)), PolyMatrix::zero(2, 1, 1)]).unwrap();
    ensure(!curved.is_valid() && curved.validation().witness.is_some(), || "curved connection validated".into())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("curved.json");
    std::fs::write(&path, avmod::module::export_module(&curved)).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_avmod"))
        .args(["order", "--module", path.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || format!("curved module file exited with {:?}", out.status.code()))?;
    Ok(format!("{} corrupted instances fail (exit 1); curved connection rejected (exit 2)", results.len()))
}

trait RangeExt {
    fn rng_range(&mut self, lo: u32, hi: u32) -> u32;
}

impl RangeExt for Sampler {
    fn rng_range(&mut self, lo: u32, hi: u32) -> u32 {
        use rand::Rng;
        self.rng().gen_range(lo..=hi)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("identity suites", criterion_1),
        ("closed-form coherence", criterion_2),
        ("worked examples", criterion_3),
        ("order bound", criterion_4),
        ("uniform annihilation", criterion_5),
        ("localization", criterion_6),
        ("exterior powers", criterion_7),
        ("representation property", criterion_8),
        ("negative controls", criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match &outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{t:.1?}]", n + 1),
            Err(why) => {
                println!("criterion {} FAIL {name}: {why} [{t:.1?}]", n + 1);
                failed.push(n + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
