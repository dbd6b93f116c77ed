//! Exterior powers, tensor products and duals.

use std::collections::BTreeSet;

use super::{AVModule, PolyMatrix};
use crate::error::{Error, Result};
use crate::poly::MultiIndex;

fn keys(m: &AVModule) -> BTreeSet<(usize, MultiIndex)> {
    m.terms().map(|(i, a, _)| (i, a.clone())).collect()
}

/// Increasing `k`-subsets of `0..r` in lexicographic order.
fn subsets(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..r {
            cur.push(s);
            rec(s + 1, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Sorts a wedge word, returning the sign of the permutation, or `None` when
/// an index repeats.
fn normalize(word: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for a in 0..word.len() {
        for b in 0..word.len() - 1 - a {
            if word[b] > word[b + 1] {
                word.swap(b, b + 1);
                sign = -sign;
            } else if word[b] == word[b + 1] {
                return None;
            }
        }
    }
    if word.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// `Λᵏ M` with `ρ(η)(m₁∧…∧m_k) = Σ m₁∧…∧ρ(η)mᵢ∧…∧m_k`. For `k > rank` the
/// result is the rank-zero module.
pub fn exterior_power(module: &AVModule, k: usize) -> Result<AVModule> {
    if k < 1 {
        return Err(Error::InvalidParameter("exterior power needs k >= 1".into()));
    }
    module.require_valid()?;
    let (d, r) = (module.dim(), module.rank());
    let name = Some(format!("exterior_power({}, {k})", module.label()));
    if k > r {
        return Ok(AVModule::zero_module(d, name));
    }
    if k == 1 {
        return Ok(module.clone());
    }
    let basis = subsets(r, k);
    let position = |w: &[usize]| basis.iter().position(|b| b == w).expect("sorted subset");
    let mut terms = Vec::new();
    for (i, alpha, dm) in module.terms() {
        let mut out = PolyMatrix::zero(d, basis.len(), basis.len());
        for (col, word) in basis.iter().enumerate() {
            for slot in 0..k {
                let s = word[slot];
                for t in 0..r {
                    let c = dm.get(t, s);
                    if c.is_zero() {
                        continue;
                    }
                    let mut w = word.clone();
                    w[slot] = t;
                    if let Some(sign) = normalize(&mut w) {
                        let row = position(&w);
                        let entry = if sign < 0 { out.get(row, col) - c } else { out.get(row, col) + c };
                        out.set(row, col, entry);
                    }
                }
            }
        }
        terms.push(((i, alpha.clone()), out));
    }
    let m = AVModule::with_tight_order(name, d, basis.len(), terms)?;
    m.require_valid()?;
    Ok(m)
}

/// `M₁ ⊗ M₂` with `ρ(η)(m⊗m′) = ρ(η)m⊗m′ + m⊗ρ(η)m′`, basis `eₐ⊗f_b` at
/// index `a·r₂ + b`. The order is recomputed, so cancellations lower it.
pub fn tensor(m1: &AVModule, m2: &AVModule) -> Result<AVModule> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch { expected: m1.dim(), found: m2.dim() });
    }
    m1.require_valid()?;
    m2.require_valid()?;
    let d = m1.dim();
    let (r1, r2) = (m1.rank(), m2.rank());
    let (i1, i2) = (PolyMatrix::identity(d, r1), PolyMatrix::identity(d, r2));
    let mut all = keys(m1);
    all.extend(keys(m2));
    let terms: Vec<_> = all
        .into_iter()
        .map(|(i, alpha)| {
            let mut out = PolyMatrix::zero(d, r1 * r2, r1 * r2);
            if let Some(a) = m1.term(i, &alpha) {
                out = out.add(&a.kron(&i2));
            }
            if let Some(b) = m2.term(i, &alpha) {
                out = out.add(&i1.kron(b));
            }
            ((i, alpha), out)
        })
        .collect();
    let name = Some(format!("tensor({}, {})", m1.label(), m2.label()));
    let m = AVModule::with_tight_order(name, d, r1 * r2, terms)?;
    m.require_valid()?;
    Ok(m)
}

/// The contragredient `M*`: `(ρ*(η)φ)(m) = η(φ(m)) − φ(ρ(η)m)`, so
/// `D*_{i,α} = −D_{i,α}ᵀ` in the dual basis.
pub fn dual(module: &AVModule) -> Result<AVModule> {
    module.require_valid()?;
    let terms: Vec<_> = module.terms().map(|(i, a, m)| ((i, a.clone()), m.transpose().neg())).collect();
    let name = Some(format!("dual({})", module.label()));
    let m = AVModule::new(name, module.dim(), module.rank(), module.order(), terms)?;
    m.require_valid()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(normalize(&mut [0, 1]), Some(1));
        assert_eq!(normalize(&mut [1, 0]), Some(-1));
        assert_eq!(normalize(&mut [2, 0, 1]), Some(1));
        assert_eq!(normalize(&mut [1, 1]), None);
        assert_eq!(normalize(&mut [2, 0, 2]), None);
        assert_eq!(subsets(4, 2).len(), 6);
    }
}
