//! The Lie algebra `A#V` in doubled-variable canonical form.
//!
//! An element `Σ f # (Σᵢ gᵢ ∂ᵢ)` is stored as `d` polynomials in `2d`
//! variables `(x₁..x_d; y₁..y_d)`, component `i` being `Σ f(x)·gᵢ(y)`. The
//! `x` block is the left `A` factor, the `y` block carries the coefficients of
//! the vector field. Since `A#V ≅ A ⊗ A ⊗ span{∂ᵢ}` as a vector space, two
//! elements are equal exactly when their components are.

mod identities;

use std::fmt;

use serde::Serialize;

pub use identities::{verify_identity, verify_identity_with, Bindings, IdentityId};

use crate::error::{Error, Result};
use crate::poly::{Accumulator, Derivation, MultiIndex, Poly};
use crate::rational::Rational;
use crate::report::Witness;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SmashElement {
    dim: usize,
    components: Vec<Poly>,
}

impl SmashElement {
    pub fn zero(dim: usize) -> Self {
        SmashElement { dim, components: vec![Poly::zero(2 * dim); dim] }
    }

    /// Wraps raw components; each must be a polynomial in `2d` variables.
    pub fn from_components(components: Vec<Poly>) -> Result<Self> {
        let dim = components.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("element of A#V needs d >= 1".into()));
        }
        if let Some(bad) = components.iter().find(|c| c.dim() != 2 * dim) {
            return Err(Error::DimensionMismatch { expected: 2 * dim, found: bad.dim() });
        }
        Ok(SmashElement { dim, components })
    }

    /// `f # η`, with component `i` equal to `f(x)·gᵢ(y)`.
    pub fn from_term(f: &Poly, e: &Derivation) -> Result<Self> {
        if f.dim() != e.dim() {
            return Err(Error::DimensionMismatch { expected: e.dim(), found: f.dim() });
        }
        Ok(Self::term(f, e))
    }

    pub(crate) fn term(f: &Poly, e: &Derivation) -> Self {
        SmashElement {
            dim: e.dim(),
            components: e.coeffs().iter().map(|g| f.tensor(g)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    fn check_dim(&self, other: &SmashElement) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    fn zip_with(&self, other: &SmashElement, op: impl Fn(&Poly, &Poly) -> Poly) -> SmashElement {
        assert_eq!(self.dim, other.dim, "A#V dimension mismatch");
        SmashElement {
            dim: self.dim,
            components: self.components.iter().zip(&other.components).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &SmashElement) -> SmashElement {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SmashElement) -> SmashElement {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> SmashElement {
        SmashElement {
            dim: self.dim,
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> SmashElement {
        self.scale(&Rational::from_int(-1))
    }

    /// The `A ⊗ A` action `(a⊗b)(f#η) = af # bη`: multiplies every component by
    /// `a(x)·b(y)`.
    pub fn tensor_act(&self, a: &Poly, b: &Poly) -> Result<SmashElement> {
        for p in [a, b] {
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
            }
        }
        Ok(self.mul_components(&a.tensor(b)))
    }

    /// Left multiplication by `a ∈ A`, i.e. the action of `a ⊗ 1`.
    pub fn left_mul(&self, a: &Poly) -> SmashElement {
        self.mul_components(&a.tensor(&Poly::one(self.dim)))
    }

    pub(crate) fn mul_components(&self, w: &Poly) -> SmashElement {
        SmashElement {
            dim: self.dim,
            components: self.components.iter().map(|c| c * w).collect(),
        }
    }

    /// `σᵢ = Pᵢ|_{y=x}`: the vector field obtained by multiplying out each term.
    pub fn symbol(&self) -> Derivation {
        Derivation::new(self.components.iter().map(Poly::diagonal).collect())
    }

    /// `[u, g#1]`, which lies in `A`: equals `Σ f·η(g)` over the terms `f#η`.
    pub fn commutator_with_function(&self, g: &Poly) -> Result<Poly> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.dim() });
        }
        Ok(self.symbol().apply(g))
    }

    /// Lie bracket, the bilinear extension of
    /// `[f#η, g#µ] = fg#[η,µ] + fη(g)#µ − gµ(f)#η`.
    ///
    /// In components, with `σ` the symbols,
    /// `[u,v]ⱼ = Σᵢ Pᵢ ∂_{yᵢ}Qⱼ − Qᵢ ∂_{yᵢ}Pⱼ + σᵖᵢ(x) ∂_{xᵢ}Qⱼ − σ^Qᵢ(x) ∂_{xᵢ}Pⱼ`.
    pub fn bracket(&self, other: &SmashElement) -> Result<SmashElement> {
        self.check_dim(other)?;
        Ok(self.bracket_unchecked(other))
    }

    pub(crate) fn bracket_unchecked(&self, other: &SmashElement) -> SmashElement {
        assert_eq!(self.dim, other.dim, "A#V dimension mismatch");
        let d = self.dim;
        let n = 2 * d;
        let lift_x = |p: Poly| p.lift(n, 0);
        let sym_p: Vec<Poly> = self.components.iter().map(|c| lift_x(c.diagonal())).collect();
        let sym_q: Vec<Poly> = other.components.iter().map(|c| lift_x(c.diagonal())).collect();
        let mut components = Vec::with_capacity(d);
        for j in 0..d {
            let mut acc = Accumulator::new(n);
            for i in 0..d {
                let (p_i, q_i) = (&self.components[i], &other.components[i]);
                let (p_j, q_j) = (&self.components[j], &other.components[j]);
                if !p_i.is_zero() && !q_j.is_zero() {
                    acc.add_product(p_i, &q_j.partial(d + i), false);
                    if !sym_p[i].is_zero() {
                        acc.add_product(&sym_p[i], &q_j.partial(i), false);
                    }
                }
                if !q_i.is_zero() && !p_j.is_zero() {
                    acc.add_product(q_i, &p_j.partial(d + i), true);
                    if !sym_q[i].is_zero() {
                        acc.add_product(&sym_q[i], &p_j.partial(i), true);
                    }
                }
            }
            components.push(acc.into_poly());
        }
        SmashElement { dim: d, components }
    }

    /// Splits into terms `c·x^a # y^b ∂ᵢ`.
    pub fn expand(&self) -> Vec<(Poly, Derivation)> {
        let d = self.dim;
        let mut out = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            for (m, c) in comp.terms() {
                let e = m.entries();
                let f = Poly::monomial(MultiIndex::from_slice(&e[..d]), c.clone());
                let g = Poly::monomial(MultiIndex::from_slice(&e[d..]), Rational::ONE);
                out.push((f, Derivation::single(i, g)));
            }
        }
        out
    }

    pub fn to_witness(&self) -> Witness {
        Witness::Smash(self.components.iter().map(render_doubled).collect())
    }
}

/// Prints a doubled-variable polynomial with `x1..x_d, y1..y_d` names.
pub fn render_doubled(p: &Poly) -> String {
    let d = p.dim() / 2;
    if p.is_zero() {
        return "0".into();
    }
    crate::poly::render_terms(
        p.terms(),
        &|k| if k < d { format!("x{}", k + 1) } else { format!("y{}", k - d + 1) },
        None,
    )
}

impl fmt::Display for SmashElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(render_doubled).collect();
        write!(f, "({})", parts.join("; "))
    }
}

impl fmt::Debug for SmashElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmashElement[{}]{}", self.dim, self)
    }
}

impl Serialize for SmashElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.components.iter().map(render_doubled).collect();
        parts.serialize(s)
    }
}

/// Fallible bracket.
pub fn smash_bracket(u: &SmashElement, v: &SmashElement) -> Result<SmashElement> {
    u.bracket(v)
}

/// `f # η`.
pub fn from_term(f: &Poly, e: &Derivation) -> Result<SmashElement> {
    SmashElement::from_term(f, e)
}

/// `(a⊗b)·u`.
pub fn tensor_act(a: &Poly, b: &Poly, u: &SmashElement) -> Result<SmashElement> {
    u.tensor_act(a, b)
}

/// `Ω_p(f,η) = Σ_k (−1)^k C(p,k) f^{p−k} # f^k η`, built term by term from the
/// defining alternating sum. `Ω_0(f,η) = 1#η`.
pub fn omega(p: u32, f: &Poly, e: &Derivation) -> Result<SmashElement> {
    if f.dim() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: f.dim() });
    }
    Ok(omega_unchecked(p, f, e))
}

pub(crate) fn omega_unchecked(p: u32, f: &Poly, e: &Derivation) -> SmashElement {
    let d = e.dim();
    let mut powers = vec![Poly::one(d)];
    for k in 1..=p as usize {
        let next = &powers[k - 1] * f;
        powers.push(next);
    }
    let mut acc: Vec<Accumulator> = (0..d).map(|_| Accumulator::new(2 * d)).collect();
    for k in 0..=p {
        let c = Rational::binomial(p, k);
        let c = if k % 2 == 1 { -c } else { c };
        let left = powers[(p - k) as usize].scale(&c).lift(2 * d, 0);
        for (slot, g) in acc.iter_mut().zip(e.coeffs()) {
            if !g.is_zero() {
                slot.add_product(&left, &(&powers[k as usize] * g).lift(2 * d, d), false);
            }
        }
    }
    SmashElement { dim: d, components: acc.into_iter().map(Accumulator::into_poly).collect() }
}

/// The closed form of `Ω_p(f,η)`: component `i` is `(f(x) − f(y))^p · gᵢ(y)`.
pub fn omega_closed_form(p: u32, f: &Poly, e: &Derivation) -> Result<SmashElement> {
    if f.dim() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: f.dim() });
    }
    let d = e.dim();
    let delta = difference(f);
    let base = SmashElement::term(&Poly::one(d), e);
    Ok(base.mul_components(&delta.pow(p)))
}

/// `f ⊗ 1 − 1 ⊗ f` as a polynomial in `(x; y)`.
pub(crate) fn difference(f: &Poly) -> Poly {
    let d = f.dim();
    f.lift(2 * d, 0) - f.lift(2 * d, d)
}

/// `Ω((f₁..f_p), η) = Π (fⱼ⊗1 − 1⊗fⱼ) · (1#η)`.
pub fn omega_multi(fs: &[Poly], e: &Derivation) -> Result<SmashElement> {
    if fs.is_empty() {
        return Err(Error::InvalidParameter("omega_multi needs at least one function".into()));
    }
    let d = e.dim();
    if let Some(bad) = fs.iter().find(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let weight = fs
        .iter()
        .fold(Poly::one(2 * d), |acc, f| &acc * &difference(f));
    Ok(SmashElement::term(&Poly::one(d), e).mul_components(&weight))
}
