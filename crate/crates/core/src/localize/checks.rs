//! Exact checks of the localized action.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{Localization, LocalizedDerivation, LocalizedModuleElement, LocalizedPoly};
use crate::error::{Error, Result};
use crate::module::{AVModule, ModuleElement};
use crate::poly::{Derivation, Poly};
use crate::rational::Rational;
use crate::report::{VerificationReport, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    /// `((fʲη)/f^{k+j})·m = (η/fᵏ)·m`.
    WellDefined,
    /// `ξ·(a·m) = ξ(a)·m + a·(ξ·m)` for `ξ ∈ V_f`, `a ∈ A_f`.
    Leibniz,
    /// `[η/f, µ/f]·m = (µ(f)η/f³)·m − (η(f)µ/f³)·m + ([η,µ]/f²)·m`.
    Bracket,
    /// `(η/f²)·m = Σ_k (k+1) f^{−(k+2)} Ω_k(f,η)·m`.
    InverseSquare,
    /// `(η/f³)·m = Σ_k C(k+2,2) f^{−(k+3)} Ω_k(f,η)·m`.
    InverseCube,
    /// `fᵃτ/fᵃ ∈ V_f` and `gᵇτ/gᵇ ∈ V_g` act alike once both results are
    /// moved into `M_{fg}`, and agree with `(fᵃgᵃτ)/(fg)ᵃ` acting there.
    Restriction,
}

impl CheckId {
    pub const ALL: [CheckId; 6] = [
        CheckId::WellDefined,
        CheckId::Leibniz,
        CheckId::Bracket,
        CheckId::InverseSquare,
        CheckId::InverseCube,
        CheckId::Restriction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::WellDefined => "welldefined",
            CheckId::Leibniz => "leibniz",
            CheckId::Bracket => "bracket",
            CheckId::InverseSquare => "inverse-square",
            CheckId::InverseCube => "inverse-cube",
            CheckId::Restriction => "restriction",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// Inputs for [`verify_localized`]. `eta` is always required; `mu` for
/// `bracket`, `a` for `leibniz`, `g` for `restriction`.
///
/// `k` is the denominator exponent of the vector field (default 1, or 0 for
/// `welldefined`); `j` is the power of `f` used by `welldefined` (all of
/// 1, 2, 3 when unset), the exponent of `a` in `leibniz` (default 1) and the
/// exponent `b` in `restriction` (default 1). Besides elements of `M`, every
/// check also acts on their quotients by `fˡ` (default `l = 1`), except
/// `restriction`, whose two sides only share `M`.
#[derive(Debug, Clone, Default)]
pub struct LocalizedBindings {
    pub eta: Option<Derivation>,
    pub mu: Option<Derivation>,
    pub a: Option<Poly>,
    pub g: Option<Poly>,
    pub k: Option<u32>,
    pub j: Option<u32>,
    pub l: Option<u32>,
}

pub(super) struct Run<'c, 'm> {
    pub(super) id: CheckId,
    pub(super) ctx: &'c Localization<'m>,
    pub(super) inputs: BTreeMap<String, String>,
}

impl Run<'_, '_> {
    fn missing(&self, symbol: &str) -> Error {
        Error::MissingBinding { identity: self.id.name().into(), symbol: symbol.into() }
    }

    fn base(&self) -> &Poly {
        self.ctx.base()
    }

    /// Basis vectors and their `x_k`-multiples, over `1` and over `fˡ`.
    fn elements(&self, l: u32) -> Result<Vec<(String, LocalizedModuleElement)>> {
        let m = self.ctx.module();
        let (d, r) = (m.dim(), m.rank());
        let mut out = Vec::new();
        let exps: Vec<u32> = if l == 0 { vec![0] } else { vec![0, l] };
        for &e in &exps {
            for b in 0..r {
                let basis = ModuleElement::basis(d, r, b);
                let over = |s: String| if e == 0 { s } else { format!("{s}/f^{e}") };
                out.push((over(format!("e{}", b + 1)), self.ctx.element(basis.clone(), e)?));
                for k in 0..d {
                    let xm = basis.scale_poly(&Poly::var(d, k));
                    out.push((over(format!("x{}*e{}", k + 1, b + 1)), self.ctx.element(xm, e)?));
                }
            }
        }
        Ok(out)
    }

    fn compare(
        mut self,
        label: &str,
        lhs: &LocalizedModuleElement,
        rhs: &LocalizedModuleElement,
    ) -> std::result::Result<Self, VerificationReport> {
        if lhs == rhs {
            return Ok(self);
        }
        let diff = lhs.sub(rhs).expect("same base");
        self.inputs.insert("element".into(), label.into());
        Err(VerificationReport::fail(self.id.name(), self.inputs, Witness::Module(diff.to_strings())))
    }

    fn der(&self, eta: &Derivation, k: u32) -> Result<LocalizedDerivation> {
        LocalizedDerivation::representative(self.base(), eta.clone(), k)
    }

    /// `Ω_q(f,η)·me` from the definition, through the `V`-action on `M_f`.
    fn omega_on(&self, q: u32, eta: &Derivation, me: &LocalizedModuleElement) -> Result<LocalizedModuleElement> {
        let f = self.base();
        let mut acc = LocalizedModuleElement::new(f, ModuleElement::zero(f.dim(), me.numerator().rank()), 0)?;
        for j in 0..=q {
            let field = self.der(&eta.mul_poly(&f.pow(j)), 0)?;
            let c = Rational::binomial(q, j);
            let c = if j % 2 == 1 { -c } else { c };
            let scalar = LocalizedPoly::from_poly(f, f.pow(q - j).scale(&c))?;
            acc = acc.add(&self.ctx.act(&field, me)?.scale(&scalar)?)?;
        }
        Ok(acc)
    }

    /// `Σ_{q≤N} w(q) · f^{−(q+s)} · Ω_q(f,η)·me`.
    pub(super) fn weighted_series(
        &self,
        eta: &Derivation,
        me: &LocalizedModuleElement,
        shift: u32,
        weight: impl Fn(u32) -> Rational,
    ) -> Result<LocalizedModuleElement> {
        let f = self.base();
        let mut acc = LocalizedModuleElement::new(f, ModuleElement::zero(f.dim(), me.numerator().rank()), 0)?;
        for q in 0..=self.ctx.module().order() {
            let scalar = LocalizedPoly::new(f, Poly::constant(f.dim(), weight(q)), q + shift)?;
            acc = acc.add(&self.omega_on(q, eta, me)?.scale(&scalar)?)?;
        }
        Ok(acc)
    }
}

macro_rules! check {
    ($run:expr, $label:expr, $lhs:expr, $rhs:expr) => {
        match $run.compare($label, &$lhs, &$rhs) {
            Ok(r) => r,
            Err(report) => return Ok(report),
        }
    };
}

/// Runs one named check of the localized action on `M_f`.
pub fn verify_localized(
    name: &str,
    module: &AVModule,
    f: &Poly,
    bindings: &LocalizedBindings,
) -> Result<VerificationReport> {
    let id: CheckId = name.parse()?;
    let ctx = Localization::new(module, f.clone())?;
    let mut inputs = BTreeMap::new();
    inputs.insert("module".into(), module.label());
    inputs.insert("f".into(), f.to_string());
    let mut run = Run { id, ctx: &ctx, inputs };
    let eta = bindings.eta.clone().ok_or_else(|| run.missing("eta"))?;
    if eta.dim() != module.dim() {
        return Err(Error::DimensionMismatch { expected: module.dim(), found: eta.dim() });
    }
    run.inputs.insert("eta".into(), eta.to_string());
    let l = bindings.l.unwrap_or(1);
    run.inputs.insert("l".into(), l.to_string());
    let fp = f.clone();

    match id {
        CheckId::WellDefined => {
            let k = bindings.k.unwrap_or(0);
            let js: Vec<u32> = bindings.j.map_or(vec![1, 2, 3], |j| vec![j]);
            run.inputs.insert("k".into(), k.to_string());
            run.inputs.insert("j".into(), js.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
            let plain = run.der(&eta, k)?;
            for (label, me) in run.elements(l)? {
                let want = ctx.act(&plain, &me)?;
                for &j in &js {
                    let rep = run.der(&eta.mul_poly(&fp.pow(j)), k + j)?;
                    let got = ctx.act(&rep, &me)?;
                    run = check!(run, &format!("{label} (j={j})"), got, want);
                }
            }
        }
        CheckId::Leibniz => {
            let a = bindings.a.clone().ok_or_else(|| run.missing("a"))?;
            let (k, j) = (bindings.k.unwrap_or(1), bindings.j.unwrap_or(1));
            run.inputs.insert("a".into(), a.to_string());
            run.inputs.insert("k".into(), k.to_string());
            run.inputs.insert("j".into(), j.to_string());
            let xi = run.der(&eta, k)?;
            let a = LocalizedPoly::new(&fp, a, j)?;
            let xi_a = a.derive(&xi)?;
            for (label, me) in run.elements(l)? {
                let lhs = ctx.act(&xi, &me.scale(&a)?)?;
                let rhs = me.scale(&xi_a)?.add(&ctx.act(&xi, &me)?.scale(&a)?)?;
                run = check!(run, &label, lhs, rhs);
            }
        }
        CheckId::Bracket => {
            let mu = bindings.mu.clone().ok_or_else(|| run.missing("mu"))?;
            if mu.dim() != module.dim() {
                return Err(Error::DimensionMismatch { expected: module.dim(), found: mu.dim() });
            }
            run.inputs.insert("mu".into(), mu.to_string());
            let (ef, mf) = (run.der(&eta, 1)?, run.der(&mu, 1)?);
            let first = run.der(&eta.mul_poly(&mu.apply(&fp)), 3)?;
            let second = run.der(&mu.mul_poly(&eta.apply(&fp)), 3)?;
            let third = run.der(&eta.bracket(&mu), 2)?;
            for (label, me) in run.elements(l)? {
                let lhs = ctx.act(&ef, &ctx.act(&mf, &me)?)?.sub(&ctx.act(&mf, &ctx.act(&ef, &me)?)?)?;
                let rhs = ctx.act(&first, &me)?.sub(&ctx.act(&second, &me)?)?.add(&ctx.act(&third, &me)?)?;
                run = check!(run, &label, lhs, rhs);
            }
        }
        CheckId::InverseSquare | CheckId::InverseCube => {
            let (k, weight): (u32, fn(u32) -> Rational) = if id == CheckId::InverseSquare {
                (2, |q| Rational::from(q + 1))
            } else {
                (3, |q| Rational::binomial(q + 2, 2))
            };
            let xi = run.der(&eta, k)?;
            for (label, me) in run.elements(l)? {
                let lhs = ctx.act(&xi, &me)?;
                let rhs = run.weighted_series(&eta, &me, k, weight)?;
                run = check!(run, &label, lhs, rhs);
            }
        }
        CheckId::Restriction => {
            let g = bindings.g.clone().ok_or_else(|| run.missing("g"))?;
            if g.dim() != module.dim() {
                return Err(Error::DimensionMismatch { expected: module.dim(), found: g.dim() });
            }
            let (a, b) = (bindings.k.unwrap_or(1), bindings.j.unwrap_or(1));
            run.inputs.insert("g".into(), g.to_string());
            run.inputs.insert("a".into(), a.to_string());
            run.inputs.insert("b".into(), b.to_string());
            run.inputs.remove("l");
            let ctx_g = Localization::new(module, g.clone())?;
            let fg = &fp * &g;
            let ctx_fg = Localization::new(module, fg.clone())?;
            let over_f = run.der(&eta.mul_poly(&fp.pow(a)), a)?;
            let over_g = LocalizedDerivation::representative(&g, eta.mul_poly(&g.pow(b)), b)?;
            let over_fg = LocalizedDerivation::representative(&fg, eta.mul_poly(&fg.pow(a)), a)?;
            for (label, me) in run.elements(0)? {
                let m = me.numerator().clone();
                let via_f = ctx.act(&over_f, &me)?.to_product_base(&g)?;
                let via_g = ctx_g.act(&over_g, &ctx_g.embed(m.clone())?)?.to_product_base(&fp)?;
                let direct = ctx_fg.act(&over_fg, &ctx_fg.embed(m)?)?;
                run = check!(run, &format!("{label} (f vs g)"), via_f, via_g);
                run = check!(run, &format!("{label} (f vs fg)"), via_f, direct);
            }
        }
    }
    Ok(VerificationReport::pass(id.name(), run.inputs))
}
