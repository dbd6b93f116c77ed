//! Localization at a single nonzero `f`: fractions `a/fᵏ`, `η/fᵏ`, `m/fˡ`,
//! and the action of `V_f` on `M_f`
//!
//! ```text
//! (η/fᵏ)·m = Σ_{p=0}^{N} f^{−k(p+1)} Ω_p(fᵏ, η)·m
//! ```
//!
//! extended to `m/fˡ` by the Leibniz rule. Terms with `p > N` vanish, `N`
//! being the order of the module.

mod checks;

use std::fmt;

use serde::Serialize;

pub use checks::{verify_localized, CheckId, LocalizedBindings};

use crate::error::{Error, Result};
use crate::module::{omega_operators, AVModule, ModuleElement};
use crate::poly::{Derivation, Poly};
use crate::rational::Rational;

/// Divides every polynomial by `f` as long as all divisions are exact and
/// the exponent is positive.
fn cancel(base: &Poly, mut nums: Vec<Poly>, mut k: u32) -> (Vec<Poly>, u32) {
    if nums.iter().all(Poly::is_zero) {
        return (nums, 0);
    }
    while k > 0 {
        let quotients: Option<Vec<Poly>> = nums.iter().map(|p| p.div_exact(base)).collect();
        match quotients {
            Some(q) => {
                nums = q;
                k -= 1;
            }
            None => break,
        }
    }
    (nums, k)
}

fn check_base(base: &Poly) -> Result<()> {
    if base.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(())
}

fn same_base(a: &Poly, b: &Poly) -> Result<()> {
    if a != b {
        return Err(Error::BaseMismatch { expected: a.to_string(), found: b.to_string() });
    }
    Ok(())
}

/// `numerator / baseᵏ`, an element of `A_f`.
#[derive(Clone)]
pub struct LocalizedPoly {
    base: Poly,
    numerator: Poly,
    denom_exp: u32,
}

impl LocalizedPoly {
    /// Normal form of `a / fᵏ`.
    pub fn new(base: &Poly, numerator: Poly, denom_exp: u32) -> Result<Self> {
        Ok(Self::representative(base, numerator, denom_exp)?.reduce())
    }

    /// `a / fᵏ` exactly as given, without cancelling.
    pub fn representative(base: &Poly, numerator: Poly, denom_exp: u32) -> Result<Self> {
        check_base(base)?;
        if numerator.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: numerator.dim() });
        }
        Ok(LocalizedPoly { base: base.clone(), numerator, denom_exp })
    }

    pub fn from_poly(base: &Poly, a: Poly) -> Result<Self> {
        Self::representative(base, a, 0)
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Whether `f ∤ numerator` whenever the exponent is positive.
    pub fn is_normal(&self) -> bool {
        if self.numerator.is_zero() {
            return self.denom_exp == 0;
        }
        self.denom_exp == 0 || self.numerator.div_exact(&self.base).is_none()
    }

    pub fn reduce(&self) -> Self {
        let (mut n, k) = cancel(&self.base, vec![self.numerator.clone()], self.denom_exp);
        LocalizedPoly { base: self.base.clone(), numerator: n.pop().expect("one entry"), denom_exp: k }
    }

    /// Same value with denominator `f^e`, `e ≥ denom_exp`.
    pub(crate) fn raised(&self, e: u32) -> Poly {
        &self.numerator * &self.base.pow(e - self.denom_exp)
    }

    pub fn add(&self, other: &LocalizedPoly) -> Result<LocalizedPoly> {
        same_base(&self.base, &other.base)?;
        let e = self.denom_exp.max(other.denom_exp);
        LocalizedPoly::new(&self.base, &self.raised(e) + &other.raised(e), e)
    }

    pub fn sub(&self, other: &LocalizedPoly) -> Result<LocalizedPoly> {
        same_base(&self.base, &other.base)?;
        let e = self.denom_exp.max(other.denom_exp);
        LocalizedPoly::new(&self.base, &self.raised(e) - &other.raised(e), e)
    }

    pub fn mul(&self, other: &LocalizedPoly) -> Result<LocalizedPoly> {
        same_base(&self.base, &other.base)?;
        LocalizedPoly::new(&self.base, &self.numerator * &other.numerator, self.denom_exp + other.denom_exp)
    }

    /// `∂ᵢ(a/fʲ) = (f·∂ᵢa − j·a·∂ᵢf) / f^{j+1}` (zero-based `i`).
    pub fn partial(&self, i: usize) -> LocalizedPoly {
        self.apply_field(&Derivation::coordinate(self.base.dim(), i))
    }

    /// `η(a/fʲ)` for `η ∈ V`.
    fn apply_field(&self, eta: &Derivation) -> LocalizedPoly {
        let j = self.denom_exp;
        if j == 0 {
            return LocalizedPoly { base: self.base.clone(), numerator: eta.apply(&self.numerator), denom_exp: 0 };
        }
        let num = &(&self.base * &eta.apply(&self.numerator))
            - &(&self.numerator * &eta.apply(&self.base)).scale(&Rational::from(j));
        LocalizedPoly { base: self.base.clone(), numerator: num, denom_exp: j + 1 }.reduce()
    }

    /// `(η/fᵏ)(a/fʲ)`.
    pub fn derive(&self, ed: &LocalizedDerivation) -> Result<LocalizedPoly> {
        same_base(&self.base, &ed.base)?;
        let inner = self.apply_field(&ed.numerator);
        LocalizedPoly::new(&self.base, inner.numerator, inner.denom_exp + ed.denom_exp)
    }

    /// `a/fʲ ↦ a·gʲ/(fg)ʲ`.
    pub fn to_product_base(&self, g: &Poly) -> Result<LocalizedPoly> {
        let fg = &self.base * g;
        LocalizedPoly::new(&fg, &self.numerator * &g.pow(self.denom_exp), self.denom_exp)
    }
}

impl PartialEq for LocalizedPoly {
    /// Equality of values.
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let e = self.denom_exp.max(other.denom_exp);
        self.raised(e) == other.raised(e)
    }
}

impl Eq for LocalizedPoly {}

impl fmt::Display for LocalizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})^{}", self.numerator, self.base, self.denom_exp)
    }
}

impl fmt::Debug for LocalizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalizedPoly{self}")
    }
}

#[derive(Serialize)]
struct Wire<T: Serialize> {
    base: String,
    numerator: T,
    denom_exp: u32,
}

impl Serialize for LocalizedPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { base: self.base.to_string(), numerator: self.numerator.to_string(), denom_exp: self.denom_exp }.serialize(s)
    }
}

/// `η / fᵏ`, an element of `V_f`.
#[derive(Clone)]
pub struct LocalizedDerivation {
    base: Poly,
    numerator: Derivation,
    denom_exp: u32,
}

impl LocalizedDerivation {
    /// Normal form: `f` is cancelled while it divides every coefficient.
    pub fn new(base: &Poly, numerator: Derivation, denom_exp: u32) -> Result<Self> {
        Ok(Self::representative(base, numerator, denom_exp)?.reduce())
    }

    /// `η / fᵏ` exactly as given. The action does not depend on the choice
    /// of representative; keeping it lets that be checked.
    pub fn representative(base: &Poly, numerator: Derivation, denom_exp: u32) -> Result<Self> {
        check_base(base)?;
        if numerator.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: numerator.dim() });
        }
        Ok(LocalizedDerivation { base: base.clone(), numerator, denom_exp })
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn numerator(&self) -> &Derivation {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn reduce(&self) -> Self {
        let (n, k) = cancel(&self.base, self.numerator.coeffs().to_vec(), self.denom_exp);
        LocalizedDerivation { base: self.base.clone(), numerator: Derivation::new(n), denom_exp: k }
    }
}

impl PartialEq for LocalizedDerivation {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let e = self.denom_exp.max(other.denom_exp);
        let a = self.numerator.mul_poly(&self.base.pow(e - self.denom_exp));
        let b = other.numerator.mul_poly(&other.base.pow(e - other.denom_exp));
        a == b
    }
}

impl Eq for LocalizedDerivation {}

impl fmt::Display for LocalizedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})^{}", self.numerator, self.base, self.denom_exp)
    }
}

impl fmt::Debug for LocalizedDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalizedDerivation{self}")
    }
}

impl Serialize for LocalizedDerivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { base: self.base.to_string(), numerator: self.numerator.to_string(), denom_exp: self.denom_exp }.serialize(s)
    }
}

/// `m / fˡ`, an element of `M_f`.
#[derive(Clone)]
pub struct LocalizedModuleElement {
    base: Poly,
    numerator: ModuleElement,
    denom_exp: u32,
}

impl LocalizedModuleElement {
    pub fn new(base: &Poly, numerator: ModuleElement, denom_exp: u32) -> Result<Self> {
        Ok(Self::representative(base, numerator, denom_exp)?.reduce())
    }

    pub fn representative(base: &Poly, numerator: ModuleElement, denom_exp: u32) -> Result<Self> {
        check_base(base)?;
        if numerator.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: numerator.dim() });
        }
        Ok(LocalizedModuleElement { base: base.clone(), numerator, denom_exp })
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn numerator(&self) -> &ModuleElement {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_normal(&self) -> bool {
        let r = self.reduce();
        r.denom_exp == self.denom_exp
    }

    pub fn reduce(&self) -> Self {
        let d = self.base.dim();
        let (n, k) = cancel(&self.base, self.numerator.entries().to_vec(), self.denom_exp);
        LocalizedModuleElement {
            base: self.base.clone(),
            numerator: ModuleElement::new(d, n).expect("dimension preserved"),
            denom_exp: k,
        }
    }

    fn raised(&self, e: u32) -> ModuleElement {
        self.numerator.scale_poly(&self.base.pow(e - self.denom_exp))
    }

    pub fn add(&self, other: &LocalizedModuleElement) -> Result<Self> {
        same_base(&self.base, &other.base)?;
        let e = self.denom_exp.max(other.denom_exp);
        Self::new(&self.base, self.raised(e).add(&other.raised(e)), e)
    }

    pub fn sub(&self, other: &LocalizedModuleElement) -> Result<Self> {
        same_base(&self.base, &other.base)?;
        let e = self.denom_exp.max(other.denom_exp);
        Self::new(&self.base, self.raised(e).sub(&other.raised(e)), e)
    }

    /// `(a/fʲ)·(m/fˡ)`.
    pub fn scale(&self, a: &LocalizedPoly) -> Result<Self> {
        same_base(&self.base, &a.base)?;
        Self::new(&self.base, self.numerator.scale_poly(&a.numerator), self.denom_exp + a.denom_exp)
    }

    /// `m/fˡ ↦ m·gˡ/(fg)ˡ`.
    pub fn to_product_base(&self, g: &Poly) -> Result<Self> {
        let fg = &self.base * g;
        Self::new(&fg, self.numerator.scale_poly(&g.pow(self.denom_exp)), self.denom_exp)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.numerator
            .entries()
            .iter()
            .map(|p| format!("({p})/({})^{}", self.base, self.denom_exp))
            .collect()
    }
}

impl PartialEq for LocalizedModuleElement {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let e = self.denom_exp.max(other.denom_exp);
        self.raised(e) == other.raised(e)
    }
}

impl Eq for LocalizedModuleElement {}

impl fmt::Display for LocalizedModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/({})^{}", self.numerator, self.base, self.denom_exp)
    }
}

impl fmt::Debug for LocalizedModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalizedModuleElement{self}")
    }
}

impl Serialize for LocalizedModuleElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { base: self.base.to_string(), numerator: self.numerator.to_strings(), denom_exp: self.denom_exp }.serialize(s)
    }
}

/// The `A_f V_f`-module `M_f` for a validated module `M`.
#[derive(Debug, Clone)]
pub struct Localization<'a> {
    module: &'a AVModule,
    base: Poly,
}

impl<'a> Localization<'a> {
    pub fn new(module: &'a AVModule, base: Poly) -> Result<Self> {
        check_base(&base)?;
        if base.dim() != module.dim() {
            return Err(Error::DimensionMismatch { expected: module.dim(), found: base.dim() });
        }
        if module.is_zero_module() {
            return Err(Error::InvalidParameter("cannot localize the zero module".into()));
        }
        if !module.is_valid() {
            return Err(Error::Validation(format!("{} did not validate", module.label())));
        }
        Ok(Localization { module, base })
    }

    pub fn module(&self) -> &AVModule {
        self.module
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    /// `m/1`.
    pub fn embed(&self, m: ModuleElement) -> Result<LocalizedModuleElement> {
        self.element(m, 0)
    }

    pub fn element(&self, m: ModuleElement, l: u32) -> Result<LocalizedModuleElement> {
        if m.rank() != self.module.rank() {
            return Err(Error::RankMismatch { expected: self.module.rank(), found: m.rank() });
        }
        LocalizedModuleElement::new(&self.base, m, l)
    }

    pub fn derivation(&self, eta: Derivation, k: u32) -> Result<LocalizedDerivation> {
        LocalizedDerivation::representative(&self.base, eta, k)
    }

    /// `(η/fᵏ)·m` for `m ∈ M`, as the finite series, before reduction.
    fn series(&self, eta: &Derivation, k: u32, m: &ModuleElement) -> (ModuleElement, u32) {
        let n = self.module.order();
        let big_f = self.base.pow(k);
        let ops = omega_operators(self.module, n, &big_f, eta);
        let mut acc = ModuleElement::zero(m.dim(), m.rank());
        for (p, op) in ops.iter().enumerate() {
            let term = op.apply(m);
            if term.is_zero() {
                continue;
            }
            acc = acc.add(&term.scale_poly(&big_f.pow(n - p as u32)));
        }
        (acc, k * (n + 1))
    }

    /// Shared checks for elements entering the action.
    fn check_pair(&self, ed: &LocalizedDerivation, me: &LocalizedModuleElement) -> Result<()> {
        same_base(&self.base, &ed.base)?;
        same_base(&self.base, &me.base)?;
        if me.numerator.rank() != self.module.rank() {
            return Err(Error::RankMismatch { expected: self.module.rank(), found: me.numerator.rank() });
        }
        Ok(())
    }

    /// `(η/fᵏ)·(m/fˡ) = [(η/fᵏ)·m]/fˡ − l·η(f)·m / f^{k+l+1}`, reduced.
    pub fn act(&self, ed: &LocalizedDerivation, me: &LocalizedModuleElement) -> Result<LocalizedModuleElement> {
        self.check_pair(ed, me)?;
        let (k, l) = (ed.denom_exp, me.denom_exp);
        let (s, e) = self.series(&ed.numerator, k, &me.numerator);
        let main = LocalizedModuleElement { base: self.base.clone(), numerator: s, denom_exp: e + l };
        if l == 0 {
            return Ok(main.reduce());
        }
        let eta_f = ed.numerator.apply(&self.base).scale(&Rational::from(l));
        let correction = LocalizedModuleElement {
            base: self.base.clone(),
            numerator: me.numerator.scale_poly(&eta_f),
            denom_exp: k + l + 1,
        };
        main.sub(&correction)
    }
}

/// `(η/fᵏ)·(m/fˡ)` in `M_f`.
pub fn act_localized(
    ctx: &Localization<'_>,
    ed: &LocalizedDerivation,
    me: &LocalizedModuleElement,
) -> Result<LocalizedModuleElement> {
    ctx.act(ed, me)
}

#[cfg(test)]
mod tests;
