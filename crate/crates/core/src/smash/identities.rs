//! Exact checks of the bracket identities satisfied by the `Ω_p`.
//!
//! Each identity is evaluated as `LHS − RHS` in canonical form; an instance
//! passes iff the difference is identically zero.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{omega_unchecked, SmashElement};
use crate::error::{Error, Result};
use crate::poly::{Derivation, Poly};
use crate::rational::Rational;
use crate::report::{VerificationReport, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    /// `[Ω_p(f,η), g#1] = 0`
    Lemma2CommuteA,
    /// `[Ω_p(f,η), Ω_q(f,µ)] = Ω_{p+q}(f,[η,µ]) + pΩ_{p+q−1}(f,µ(f)η) − qΩ_{p+q−1}(f,η(f)µ)`
    Lemma3Commutator,
    /// `[Ω_p(f,η), Ω_q(f,gµ)] − [Ω_p(f,gη), Ω_q(f,µ)] = Ω_{p+q}(f, η(g)µ + µ(g)η)`
    Lemma4Item1,
    /// `[Ω_p(f,η), Ω_q(f,ghη)] − [Ω_p(f,gη), Ω_q(f,hη)] = 2Ω_{p+q}(f, hη(g)η)`
    Lemma4Item2,
    /// `[Ω_p(f,η), Ω_q(f,gη)] − [Ω_p(f,gη), Ω_q(f,η)] = 2Ω_{p+q}(f, η(g)η)`
    Lemma4Item3,
    /// `[Ω_p(f,η), Ω_q(f,gη(h)η)] − [Ω_p(f,gη), Ω_q(f,η(h)η)] = 2Ω_{p+q}(f, η(g)η(h)η)`
    Lemma4Item4,
    /// `Ω_{p+q}(f, gη(η(h))η) = Ω_{p+q}(f, η(gη(h))η) − Ω_{p+q}(f, η(g)η(h)η)`
    Lemma4Item5,
    /// `[Ω_p(f,η), 1#µ] = Ω_p(f,[η,µ]) + pΩ_{p−1}(f,µ(f)η) − p·µ(f)Ω_{p−1}(f,η)`
    Lemma5DerivBracket,
    /// `Ω_p(f,fη) = fΩ_p(f,η) − Ω_{p+1}(f,η)`
    Lemma41Recurrence,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::Lemma2CommuteA,
        IdentityId::Lemma3Commutator,
        IdentityId::Lemma4Item1,
        IdentityId::Lemma4Item2,
        IdentityId::Lemma4Item3,
        IdentityId::Lemma4Item4,
        IdentityId::Lemma4Item5,
        IdentityId::Lemma5DerivBracket,
        IdentityId::Lemma41Recurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Lemma2CommuteA => "lemma2-commute-A",
            IdentityId::Lemma3Commutator => "lemma3-commutator",
            IdentityId::Lemma4Item1 => "lemma4-1",
            IdentityId::Lemma4Item2 => "lemma4-2",
            IdentityId::Lemma4Item3 => "lemma4-3",
            IdentityId::Lemma4Item4 => "lemma4-4",
            IdentityId::Lemma4Item5 => "lemma4-5",
            IdentityId::Lemma5DerivBracket => "lemma5-deriv-bracket",
            IdentityId::Lemma41Recurrence => "lemma4.1-recurrence",
        }
    }

    /// Symbols the identity reads from its bindings.
    pub fn symbols(self) -> &'static [&'static str] {
        match self {
            IdentityId::Lemma2CommuteA => &["f", "g", "eta", "p"],
            IdentityId::Lemma3Commutator => &["f", "eta", "mu", "p", "q"],
            IdentityId::Lemma4Item1 => &["f", "g", "eta", "mu", "p", "q"],
            IdentityId::Lemma4Item2 | IdentityId::Lemma4Item4 | IdentityId::Lemma4Item5 => {
                &["f", "g", "h", "eta", "p", "q"]
            }
            IdentityId::Lemma4Item3 => &["f", "g", "eta", "p", "q"],
            IdentityId::Lemma5DerivBracket => &["f", "eta", "mu", "p"],
            IdentityId::Lemma41Recurrence => &["f", "eta", "p"],
        }
    }

    /// Whether the identity reads `q`.
    pub fn uses_q(self) -> bool {
        self.symbols().contains(&"q")
    }

    /// Smallest admissible `p`.
    pub fn min_p(self) -> u32 {
        match self {
            IdentityId::Lemma41Recurrence => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// Values for the free symbols of an identity.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub f: Option<Poly>,
    pub g: Option<Poly>,
    pub h: Option<Poly>,
    pub eta: Option<Derivation>,
    pub mu: Option<Derivation>,
    pub p: Option<u32>,
    pub q: Option<u32>,
}

struct Bound<'a> {
    id: IdentityId,
    b: &'a Bindings,
}

impl<'a> Bound<'a> {
    fn missing(&self, symbol: &str) -> Error {
        Error::MissingBinding { identity: self.id.name().into(), symbol: symbol.into() }
    }
    fn poly(&self, name: &str, v: &'a Option<Poly>) -> Result<&'a Poly> {
        v.as_ref().ok_or_else(|| self.missing(name))
    }
    fn f(&self) -> Result<&'a Poly> {
        self.poly("f", &self.b.f)
    }
    fn g(&self) -> Result<&'a Poly> {
        self.poly("g", &self.b.g)
    }
    fn h(&self) -> Result<&'a Poly> {
        self.poly("h", &self.b.h)
    }
    fn eta(&self) -> Result<&'a Derivation> {
        self.b.eta.as_ref().ok_or_else(|| self.missing("eta"))
    }
    fn mu(&self) -> Result<&'a Derivation> {
        self.b.mu.as_ref().ok_or_else(|| self.missing("mu"))
    }
    fn p(&self) -> Result<u32> {
        let p = self.b.p.ok_or_else(|| self.missing("p"))?;
        if p < self.id.min_p() {
            return Err(Error::InvalidParameter(format!("{}: p must be >= {}", self.id, self.id.min_p())));
        }
        Ok(p)
    }
    fn q(&self) -> Result<u32> {
        let q = self.b.q.ok_or_else(|| self.missing("q"))?;
        if q < 1 {
            return Err(Error::InvalidParameter(format!("{}: q must be >= 1", self.id)));
        }
        Ok(q)
    }

    /// Checks presence of every symbol and agreement of dimensions.
    fn check(&self) -> Result<usize> {
        let mut dim = None;
        let mut see = |d: usize| -> Result<()> {
            match dim {
                None => {
                    dim = Some(d);
                    Ok(())
                }
                Some(e) if e == d => Ok(()),
                Some(e) => Err(Error::DimensionMismatch { expected: e, found: d }),
            }
        };
        for &s in self.id.symbols() {
            match s {
                "f" => see(self.f()?.dim())?,
                "g" => see(self.g()?.dim())?,
                "h" => see(self.h()?.dim())?,
                "eta" => see(self.eta()?.dim())?,
                "mu" => see(self.mu()?.dim())?,
                "p" => {
                    self.p()?;
                }
                "q" => {
                    self.q()?;
                }
                _ => unreachable!(),
            }
        }
        Ok(dim.expect("every identity binds at least one polynomial"))
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        for &s in self.id.symbols() {
            let v = match s {
                "f" => self.b.f.as_ref().map(|x| x.to_string()),
                "g" => self.b.g.as_ref().map(|x| x.to_string()),
                "h" => self.b.h.as_ref().map(|x| x.to_string()),
                "eta" => self.b.eta.as_ref().map(|x| x.to_string()),
                "mu" => self.b.mu.as_ref().map(|x| x.to_string()),
                "p" => self.b.p.map(|x| x.to_string()),
                "q" => self.b.q.map(|x| x.to_string()),
                _ => None,
            };
            if let Some(v) = v {
                m.insert(s.to_string(), v);
            }
        }
        m
    }
}

enum Value {
    Smash(SmashElement),
    Function(Poly),
}

fn int(n: u32) -> Rational {
    Rational::from(n)
}

fn br(u: &SmashElement, v: &SmashElement) -> SmashElement {
    u.bracket_unchecked(v)
}

/// Computes `(LHS, [RHS terms])` for an identity instance.
fn sides(bound: &Bound<'_>, corrupt: bool) -> Result<(Value, Vec<SmashElement>)> {
    let om = omega_unchecked;
    let id = bound.id;
    match id {
        IdentityId::Lemma2CommuteA => {
            let (f, g, eta, p) = (bound.f()?, bound.g()?, bound.eta()?, bound.p()?);
            let w = om(p, f, eta);
            Ok((Value::Function(w.symbol().apply(g)), vec![]))
        }
        IdentityId::Lemma3Commutator => {
            let (f, eta, mu, p, q) = (bound.f()?, bound.eta()?, bound.mu()?, bound.p()?, bound.q()?);
            let lhs = br(&om(p, f, eta), &om(q, f, mu));
            let rhs = vec![
                om(p + q, f, &eta.bracket(mu)),
                om(p + q - 1, f, &eta.mul_poly(&mu.apply(f))).scale(&int(p)),
                om(p + q - 1, f, &mu.mul_poly(&eta.apply(f))).scale(&-int(q)),
            ];
            Ok((Value::Smash(lhs), rhs))
        }
        IdentityId::Lemma4Item1 => {
            let (f, g, eta, mu, p, q) = (bound.f()?, bound.g()?, bound.eta()?, bound.mu()?, bound.p()?, bound.q()?);
            let lhs = br(&om(p, f, eta), &om(q, f, &mu.mul_poly(g)))
                .sub(&br(&om(p, f, &eta.mul_poly(g)), &om(q, f, mu)));
            let field = mu.mul_poly(&eta.apply(g)).add(&eta.mul_poly(&mu.apply(g)));
            Ok((Value::Smash(lhs), vec![om(p + q, f, &field)]))
        }
        IdentityId::Lemma4Item2 => {
            let (f, g, h, eta, p, q) = (bound.f()?, bound.g()?, bound.h()?, bound.eta()?, bound.p()?, bound.q()?);
            let lhs = br(&om(p, f, eta), &om(q, f, &eta.mul_poly(&(g * h))))
                .sub(&br(&om(p, f, &eta.mul_poly(g)), &om(q, f, &eta.mul_poly(h))));
            let field = eta.mul_poly(&(h * &eta.apply(g)));
            Ok((Value::Smash(lhs), vec![om(p + q, f, &field).scale(&int(2))]))
        }
        IdentityId::Lemma4Item3 => {
            let (f, g, eta, p, q) = (bound.f()?, bound.g()?, bound.eta()?, bound.p()?, bound.q()?);
            let lhs = br(&om(p, f, eta), &om(q, f, &eta.mul_poly(g)))
                .sub(&br(&om(p, f, &eta.mul_poly(g)), &om(q, f, eta)));
            let field = eta.mul_poly(&eta.apply(g));
            Ok((Value::Smash(lhs), vec![om(p + q, f, &field).scale(&int(2))]))
        }
        IdentityId::Lemma4Item4 => {
            let (f, g, h, eta, p, q) = (bound.f()?, bound.g()?, bound.h()?, bound.eta()?, bound.p()?, bound.q()?);
            let eh = eta.apply(h);
            let lhs = br(&om(p, f, eta), &om(q, f, &eta.mul_poly(&(g * &eh))))
                .sub(&br(&om(p, f, &eta.mul_poly(g)), &om(q, f, &eta.mul_poly(&eh))));
            let field = eta.mul_poly(&(&eta.apply(g) * &eh));
            Ok((Value::Smash(lhs), vec![om(p + q, f, &field).scale(&int(2))]))
        }
        IdentityId::Lemma4Item5 => {
            let (f, g, h, eta, p, q) = (bound.f()?, bound.g()?, bound.h()?, bound.eta()?, bound.p()?, bound.q()?);
            let eh = eta.apply(h);
            let lhs = om(p + q, f, &eta.mul_poly(&(g * &eta.apply(&eh))));
            let rhs = vec![
                om(p + q, f, &eta.mul_poly(&eta.apply(&(g * &eh)))),
                om(p + q, f, &eta.mul_poly(&(&eta.apply(g) * &eh))).neg(),
            ];
            Ok((Value::Smash(lhs), rhs))
        }
        IdentityId::Lemma5DerivBracket => {
            let (f, eta, mu, p) = (bound.f()?, bound.eta()?, bound.mu()?, bound.p()?);
            let d = f.dim();
            let lhs = br(&om(p, f, eta), &SmashElement::term(&Poly::one(d), mu));
            let mu_f = mu.apply(f);
            let rhs = vec![
                om(p, f, &eta.bracket(mu)),
                om(p - 1, f, &eta.mul_poly(&mu_f)).scale(&int(p)),
                om(p - 1, f, eta).left_mul(&mu_f).scale(&-int(p)),
            ];
            Ok((Value::Smash(lhs), rhs))
        }
        IdentityId::Lemma41Recurrence => {
            let (f, eta, p) = (bound.f()?, bound.eta()?, bound.p()?);
            let lhs = om(p, f, &eta.mul_poly(f));
            let rhs = vec![om(p, f, eta).left_mul(f), om(p + 1, f, eta).neg()];
            Ok((Value::Smash(lhs), rhs))
        }
    }
    .map(|(lhs, mut rhs)| {
        if !corrupt {
            return (lhs, rhs);
        }
        match lhs {
            Value::Function(v) => {
                let one = Poly::one(v.dim());
                (Value::Function(&v + &one), rhs)
            }
            Value::Smash(v) => {
                let d = v.dim();
                rhs.push(SmashElement::term(&Poly::one(d), &Derivation::coordinate(d, 0)));
                (Value::Smash(v), rhs)
            }
        }
    })
}

/// Verifies one instance of a named identity.
pub fn verify_identity(name: &str, bindings: &Bindings) -> Result<VerificationReport> {
    verify_identity_with(name.parse()?, bindings, false)
}

/// Like [`verify_identity`]; with `corrupt` set, the spurious term `1#∂₁`
/// is added to the right-hand side (`1` for `lemma2-commute-A`, whose value
/// is a function), so every instance must fail. Used as a negative control.
pub fn verify_identity_with(id: IdentityId, bindings: &Bindings, corrupt: bool) -> Result<VerificationReport> {
    let bound = Bound { id, b: bindings };
    let dim = bound.check()?;
    let inputs = bound.inputs();
    let (lhs, rhs) = sides(&bound, corrupt)?;
    let witness = match lhs {
        Value::Function(v) => {
            debug_assert!(rhs.is_empty());
            (!v.is_zero()).then(|| Witness::Function(v.to_string()))
        }
        Value::Smash(v) => {
            let diff = rhs.iter().fold(v, |acc, t| acc.sub(t));
            debug_assert_eq!(diff.dim(), dim);
            (!diff.is_zero()).then(|| diff.to_witness())
        }
    };
    Ok(VerificationReport::from_witness(id.name(), inputs, witness))
}
