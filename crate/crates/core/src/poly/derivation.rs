use std::fmt;

use super::{render_terms, Poly};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A polynomial vector field `η = Σ gᵢ ∂ᵢ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    dim: usize,
    coeffs: Vec<Poly>,
}

impl Derivation {
    /// Panics unless there is exactly one coefficient per variable.
    pub fn new(coeffs: Vec<Poly>) -> Self {
        Self::try_new(coeffs).expect("invalid derivation coefficients")
    }

    pub fn try_new(coeffs: Vec<Poly>) -> Result<Self> {
        let dim = coeffs.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("derivation needs at least one variable".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Derivation { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        Derivation { dim, coeffs: vec![Poly::zero(dim); dim] }
    }

    /// The coordinate field `∂_{i+1}` (zero-based `i`).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::single(i, Poly::one(dim))
    }

    /// `g ∂_{i+1}` (zero-based `i`).
    pub fn single(i: usize, g: Poly) -> Self {
        let dim = g.dim();
        assert!(i < dim);
        let mut coeffs = vec![Poly::zero(dim); dim];
        coeffs[i] = g;
        Derivation { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// `η(p) = Σ gᵢ ∂p/∂xᵢ`.
    pub fn apply(&self, p: &Poly) -> Poly {
        assert_eq!(self.dim, p.dim(), "derivation/polynomial dimension mismatch");
        let mut acc = Poly::zero(self.dim);
        for (i, g) in self.coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let dp = p.partial(i);
            if !dp.is_zero() {
                acc = &acc + &(g * &dp);
            }
        }
        acc
    }

    /// `[η, µ]` with components `η(µⱼ) − µ(ηⱼ)`.
    pub fn bracket(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.dim, other.dim, "derivation dimension mismatch");
        let coeffs = (0..self.dim)
            .map(|j| &self.apply(&other.coeffs[j]) - &other.apply(&self.coeffs[j]))
            .collect();
        Derivation { dim: self.dim, coeffs }
    }

    /// The derivation `g·η`.
    pub fn mul_poly(&self, g: &Poly) -> Derivation {
        Derivation {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| g * c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.dim, other.dim, "derivation dimension mismatch");
        Derivation {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.add(&other.scale(&Rational::from_int(-1)))
    }
}

/// Fallible `η(p)`.
pub fn apply_derivation(e: &Derivation, p: &Poly) -> Result<Poly> {
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), found: p.dim() });
    }
    Ok(e.apply(p))
}

/// Fallible `[e1, e2]`.
pub fn derivation_bracket(e1: &Derivation, e2: &Derivation) -> Result<Derivation> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch { expected: e1.dim(), found: e2.dim() });
    }
    Ok(e1.bracket(e2))
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, g) in self.coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let suffix = format!("d{}", i + 1);
            parts.push(render_terms(g.terms(), &|k| format!("x{}", k + 1), Some(&suffix)));
        }
        // Join component strings, folding a leading minus into the separator.
        let mut out = String::new();
        for (k, part) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(part);
            } else if let Some(rest) = part.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[{}]({})", self.dim, self)
    }
}

impl serde::Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
