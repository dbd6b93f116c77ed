//! The operator of `Ω_p(F, η)` on a module, via truncated Taylor series.
//!
//! Substituting `y = x + t`, the matrix coefficient `(∂_y^α Pᵢ)|_{y=x}` is
//! `α!` times the `t^α` coefficient of `(F(x) − F(x+t))^p gᵢ(x+t)`, and only
//! `|α| ≤ N` is ever read. This avoids forming `(F(x) − F(y))^p` in `2d`
//! variables, which matters when `F` is a power of a denominator.

use rustc_hash::FxHashMap;

use super::{AVModule, FirstOrderOp, PolyMatrix};
use crate::poly::{Derivation, MultiIndex, Poly};
use crate::rational::Rational;

/// Power series in `t` truncated above total degree `n`, coefficients in `A`.
struct Jet {
    n: u32,
    coeffs: FxHashMap<MultiIndex, Poly>,
}

impl Jet {
    /// `h(x+t) − [drop_constant]·h(x)` up to order `n`.
    fn taylor(h: &Poly, n: u32, drop_constant: bool) -> Jet {
        let d = h.dim();
        let mut coeffs = FxHashMap::default();
        for beta in MultiIndex::all_up_to(d, n) {
            if drop_constant && beta.is_zero() {
                continue;
            }
            let c = h.partial_multi(&beta);
            if !c.is_zero() {
                coeffs.insert(beta.clone(), c.scale(&beta.factorial().recip()));
            }
        }
        Jet { n, coeffs }
    }

    fn one(dim: usize, n: u32) -> Jet {
        let mut coeffs = FxHashMap::default();
        coeffs.insert(MultiIndex::zero(dim), Poly::one(dim));
        Jet { n, coeffs }
    }

    fn mul(&self, other: &Jet) -> Jet {
        let mut coeffs: FxHashMap<MultiIndex, Poly> = FxHashMap::default();
        for (a, p) in &self.coeffs {
            for (b, q) in &other.coeffs {
                if a.order() + b.order() > self.n {
                    continue;
                }
                let key = a.add(b);
                let prod = p * q;
                match coeffs.get_mut(&key) {
                    Some(v) => *v = &*v + &prod,
                    None => {
                        coeffs.insert(key, prod);
                    }
                }
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Jet { n: self.n, coeffs }
    }

    fn scale(&self, c: &Rational) -> Jet {
        Jet { n: self.n, coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect() }
    }

    fn pow(&self, dim: usize, p: u32) -> Jet {
        (0..p).fold(Jet::one(dim, self.n), |acc, _| acc.mul(self))
    }

    /// Coefficient of `t^α` in `self · other`.
    fn product_coefficient(&self, other: &Jet, alpha: &MultiIndex) -> Poly {
        let dim = alpha.len();
        let mut acc = Poly::zero(dim);
        for (a, p) in &self.coeffs {
            if let Some(rest) = alpha.checked_sub(a) {
                if let Some(q) = other.coeffs.get(&rest) {
                    acc = &acc + &(p * q);
                }
            }
        }
        acc
    }
}

/// The first-order operator by which `Ω_p(F, η)` acts on `module`.
///
/// Agrees with `module.smash_operator(&omega(p, F, η))`.
pub fn omega_operator(module: &AVModule, p: u32, big_f: &Poly, eta: &Derivation) -> FirstOrderOp {
    let (dim, rank, n) = (module.dim(), module.rank(), module.order());
    if p == 0 {
        return module.derivation_operator(eta);
    }
    let mut op = FirstOrderOp::zero(dim, rank);
    if p > n || big_f.is_constant() {
        return op;
    }
    let delta = Jet::taylor(big_f, n, true).scale(&Rational::from_int(-1)).pow(dim, p);
    if delta.coeffs.is_empty() {
        return op;
    }
    let mut by_direction: Vec<Option<Jet>> = (0..dim).map(|_| None).collect();
    let mut matrix = PolyMatrix::zero(dim, rank, rank);
    for (i, alpha, d) in module.terms() {
        let g = eta.coeff(i);
        if g.is_zero() || alpha.order() < p {
            continue;
        }
        let jet = by_direction[i].get_or_insert_with(|| Jet::taylor(g, n, false));
        let c = delta.product_coefficient(jet, alpha).scale(&alpha.factorial());
        matrix.add_scaled(&c, d);
    }
    op.matrix = matrix;
    op
}

/// `[Ω_0(F,η), …, Ω_{p_max}(F,η)]` as operators, sharing one Taylor expansion.
pub(crate) fn omega_operators(module: &AVModule, p_max: u32, big_f: &Poly, eta: &Derivation) -> Vec<FirstOrderOp> {
    let (dim, rank, n) = (module.dim(), module.rank(), module.order());
    let mut out = vec![module.derivation_operator(eta)];
    if p_max == 0 {
        return out;
    }
    let step = Jet::taylor(big_f, n, true).scale(&Rational::from_int(-1));
    let jets: Vec<Option<Jet>> = (0..dim)
        .map(|i| {
            let g = eta.coeff(i);
            (!g.is_zero()).then(|| Jet::taylor(g, n, false))
        })
        .collect();
    let mut delta = Jet::one(dim, n);
    for p in 1..=p_max {
        let mut op = FirstOrderOp::zero(dim, rank);
        if p <= n && !big_f.is_constant() {
            delta = delta.mul(&step);
            for (i, alpha, d) in module.terms() {
                let Some(jet) = &jets[i] else { continue };
                if alpha.order() < p {
                    continue;
                }
                let c = delta.product_coefficient(jet, alpha).scale(&alpha.factorial());
                op.matrix.add_scaled(&c, d);
            }
        }
        out.push(op);
    }
    out
}
