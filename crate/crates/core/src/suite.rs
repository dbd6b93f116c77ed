//! Seeded batch runs of the identity, closed-form, representation and
//! localization checks.
//!
//! Every trial draws its inputs from its own generator stream, keyed by the
//! suite family, the dimension and the trial index, so a result does not
//! depend on which other suites ran or in what order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localize::{verify_localized, CheckId, LocalizedBindings};
use crate::module::{differential_forms, jet_module, tangent_adjoint, trivial_dmodule, twist, AVModule};
use crate::poly::{Derivation, Poly};
use crate::rational::Rational;
use crate::report::{VerificationReport, Witness};
use crate::sample::Sampler;
use crate::smash::{omega, omega_closed_form, verify_identity_with, Bindings, IdentityId};

/// Largest polynomial degree used for localization inputs.
pub const LOCALIZED_MAX_DEGREE: u32 = 3;
/// Largest dimension used for localization inputs.
pub const LOCALIZED_MAX_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Identity(IdentityId),
    ClosedForm,
    Representation,
    Localized(CheckId),
}

impl Suite {
    pub fn all() -> Vec<Suite> {
        let mut v: Vec<Suite> = IdentityId::ALL.into_iter().map(Suite::Identity).collect();
        v.push(Suite::ClosedForm);
        v.push(Suite::Representation);
        v.extend(CheckId::ALL.into_iter().map(Suite::Localized));
        v
    }

    pub fn name(self) -> String {
        match self {
            Suite::Identity(id) => id.name().to_string(),
            Suite::ClosedForm => "closed-form".into(),
            Suite::Representation => "representation".into(),
            Suite::Localized(c) => format!("localize-{}", c.name()),
        }
    }

    /// Expands a suite name or group (`all`, `identities`, `localize`).
    pub fn parse_group(name: &str) -> Result<Vec<Suite>> {
        match name {
            "all" => Ok(Suite::all()),
            "identities" => Ok(IdentityId::ALL.into_iter().map(Suite::Identity).collect()),
            "localize" => Ok(CheckId::ALL.into_iter().map(Suite::Localized).collect()),
            other => other.parse().map(|s| vec![s]),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::all()
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// Parameters of a batch run.
///
/// With `corrupt` set, identity suites add a spurious nonzero term,
/// so every one of their trials is expected to fail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suites: Vec<String>,
    pub dims: Vec<usize>,
    pub max_degree: u32,
    pub trials: u32,
    pub seed: u64,
    pub p_max: u32,
    #[serde(default)]
    pub corrupt: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: vec!["all".into()],
            dims: vec![1, 2, 3],
            max_degree: 4,
            trials: 100,
            seed: 0,
            p_max: 4,
            corrupt: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<Vec<Suite>> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.max_degree == 0 {
            return bad("max_degree must be at least 1");
        }
        if self.p_max == 0 {
            return bad("p_max must be at least 1");
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d == 0 || d > 8) {
            return bad("dims must be a nonempty list of values in 1..=8");
        }
        if self.suites.is_empty() {
            return bad("no suite selected");
        }
        let mut out = Vec::new();
        for name in &self.suites {
            for s in Suite::parse_group(name)? {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }
}

fn stream(family: u64, d: usize, trial: u32) -> u64 {
    (family << 48) | ((d as u64) << 32) | u64::from(trial)
}

/// The random `(f, g, h, η, µ)` shared by identity and closed-form trials.
pub fn identity_sample(seed: u64, d: usize, trial: u32, max_degree: u32) -> Bindings {
    let mut s = Sampler::fork(seed, stream(0, d, trial));
    Bindings {
        f: Some(s.nonconstant_poly(d, max_degree)),
        g: Some(s.nonconstant_poly(d, max_degree)),
        h: Some(s.nonconstant_poly(d, max_degree)),
        eta: Some(s.nonzero_derivation(d, max_degree)),
        mu: Some(s.nonzero_derivation(d, max_degree)),
        p: None,
        q: None,
    }
}

/// Modules used by the representation and localization suites in dimension `d`.
pub fn suite_modules(d: usize) -> Result<Vec<AVModule>> {
    let mut v = vec![trivial_dmodule(d, 1)?, differential_forms(d)?, tangent_adjoint(d)?, jet_module(d, 1)?];
    if d <= 2 {
        v.push(jet_module(d, 2)?);
    }
    v.push(twist(d, Rational::new(-1, 2))?);
    Ok(v)
}

fn trial_inputs(report: &mut VerificationReport, d: usize, trial: u32) {
    report.inputs.insert("d".into(), d.to_string());
    report.inputs.insert("trial".into(), trial.to_string());
}

fn run_identity(id: IdentityId, cfg: &RunConfig, d: usize, trial: u32) -> Result<VerificationReport> {
    let mut b = identity_sample(cfg.seed, d, trial, cfg.max_degree);
    let qs: Vec<Option<u32>> = if id.uses_q() { (1..=cfg.p_max).map(Some).collect() } else { vec![None] };
    let mut last = None;
    for p in id.min_p()..=cfg.p_max {
        for &q in &qs {
            b.p = Some(p);
            b.q = q;
            let mut r = verify_identity_with(id, &b, cfg.corrupt)?;
            if !r.passed() {
                trial_inputs(&mut r, d, trial);
                return Ok(r);
            }
            last = Some(r);
        }
    }
    let mut r = last.expect("at least one (p, q)");
    r.inputs.insert("p".into(), format!("{}..{}", id.min_p(), cfg.p_max));
    if id.uses_q() {
        r.inputs.insert("q".into(), format!("1..{}", cfg.p_max));
    }
    trial_inputs(&mut r, d, trial);
    Ok(r)
}

fn run_closed_form(cfg: &RunConfig, d: usize, trial: u32) -> Result<VerificationReport> {
    let b = identity_sample(cfg.seed, d, trial, cfg.max_degree);
    let fields: [&Derivation; 2] = [b.eta.as_ref().expect("sampled"), b.mu.as_ref().expect("sampled")];
    let fs: [&Poly; 3] = [b.f.as_ref().expect("sampled"), b.g.as_ref().expect("sampled"), b.h.as_ref().expect("sampled")];
    let mut inputs = BTreeMap::new();
    for (f, name) in fs.iter().zip(["f", "g", "h"]) {
        inputs.insert(name.to_string(), f.to_string());
    }
    inputs.insert("eta".into(), fields[0].to_string());
    inputs.insert("mu".into(), fields[1].to_string());
    inputs.insert("p".into(), format!("0..{}", cfg.p_max));
    for f in fs {
        for e in fields {
            for p in 0..=cfg.p_max {
                let diff = omega(p, f, e)?.sub(&omega_closed_form(p, f, e)?);
                if !diff.is_zero() {
                    inputs.insert("p".into(), p.to_string());
                    inputs.insert("failing".into(), format!("f={f}, eta={e}"));
                    let mut r = VerificationReport::fail("closed-form", inputs, diff.to_witness());
                    trial_inputs(&mut r, d, trial);
                    return Ok(r);
                }
            }
        }
    }
    let mut r = VerificationReport::pass("closed-form", inputs);
    trial_inputs(&mut r, d, trial);
    Ok(r)
}

fn run_representation(cfg: &RunConfig, d: usize, trial: u32) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let mut s = Sampler::fork(cfg.seed, stream(2, d, trial));
    for m in suite_modules(d)? {
        let (u, v) = (s.smash(d, cfg.max_degree), s.smash(d, cfg.max_degree));
        let lhs = m.smash_operator(&u.bracket(&v)?);
        let rhs = m.smash_operator(&u).commutator(&m.smash_operator(&v));
        let diff = lhs.sub(&rhs);
        let mut inputs = BTreeMap::new();
        inputs.insert("module".into(), m.label());
        inputs.insert("u".into(), u.to_string());
        inputs.insert("v".into(), v.to_string());
        let witness = if !diff.symbol.is_zero() {
            Some(Witness::Text(format!("symbol differs by {}", diff.symbol)))
        } else if !diff.matrix.is_zero() {
            Some(Witness::Matrix(diff.matrix.to_strings()))
        } else {
            None
        };
        let mut r = VerificationReport::from_witness("representation", inputs, witness);
        trial_inputs(&mut r, d, trial);
        out.push(r);
    }
    Ok(out)
}

fn run_localized(id: CheckId, cfg: &RunConfig, d: usize, trial: u32) -> Result<Vec<VerificationReport>> {
    let deg = cfg.max_degree.min(LOCALIZED_MAX_DEGREE);
    let mut out = Vec::new();
    for (n, m) in suite_modules(d)?.into_iter().enumerate() {
        let mut s = Sampler::fork(cfg.seed, stream(1 + ((n as u64 + 2) << 8), d, trial));
        let f = s.nonconstant_poly(d, deg);
        let b = LocalizedBindings {
            eta: Some(s.nonzero_derivation(d, deg)),
            mu: Some(s.nonzero_derivation(d, deg)),
            a: Some(s.poly(d, deg)),
            g: Some(s.nonconstant_poly(d, deg)),
            ..Default::default()
        };
        let mut r = verify_localized(id.name(), &m, &f, &b)?;
        r.identity = Suite::Localized(id).name();
        trial_inputs(&mut r, d, trial);
        out.push(r);
    }
    Ok(out)
}

/// Runs one suite over every dimension and trial of `cfg`.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for &d in &cfg.dims {
        if matches!(suite, Suite::Localized(_)) && d > LOCALIZED_MAX_DIM {
            continue;
        }
        for trial in 0..cfg.trials {
            match suite {
                Suite::Identity(id) => out.push(run_identity(id, cfg, d, trial)?),
                Suite::ClosedForm => out.push(run_closed_form(cfg, d, trial)?),
                Suite::Representation => out.extend(run_representation(cfg, d, trial)?),
                Suite::Localized(id) => out.extend(run_localized(id, cfg, d, trial)?),
            }
        }
    }
    Ok(out)
}

/// Runs every selected suite; results are sorted by [`VerificationReport::sort_key`].
pub fn run_suites(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for suite in cfg.validate()? {
        out.extend(run_suite(suite, cfg)?);
    }
    out.sort_by_cached_key(VerificationReport::sort_key);
    Ok(out)
}
