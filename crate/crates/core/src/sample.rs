//! Seeded generation of random polynomials and vector fields.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{Derivation, MultiIndex, Poly};
use crate::rational::Rational;
use crate::smash::SmashElement;

/// Deterministic source of sparse random inputs.
///
/// Polynomials have one to three terms of total degree at most `max_degree`,
/// with small nonzero rational coefficients.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Child sampler for an independent stream, stable under reordering of
    /// other streams.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn coefficient(&mut self) -> Rational {
        let mut num: i64 = self.rng.gen_range(1..=5);
        if self.rng.gen_bool(0.5) {
            num = -num;
        }
        let den: i64 = if self.rng.gen_bool(0.25) { self.rng.gen_range(2..=3) } else { 1 };
        Rational::new(num, den)
    }

    pub fn monomial(&mut self, dim: usize, max_degree: u32) -> MultiIndex {
        let total = self.rng.gen_range(0..=max_degree);
        let mut e = vec![0u16; dim];
        for _ in 0..total {
            e[self.rng.gen_range(0..dim)] += 1;
        }
        MultiIndex::from_slice(&e)
    }

    /// A possibly-zero sparse polynomial.
    pub fn poly(&mut self, dim: usize, max_degree: u32) -> Poly {
        let n = self.rng.gen_range(1..=3);
        let terms: Vec<_> = (0..n).map(|_| (self.monomial(dim, max_degree), self.coefficient())).collect();
        Poly::from_terms(dim, terms)
    }

    pub fn nonzero_poly(&mut self, dim: usize, max_degree: u32) -> Poly {
        loop {
            let p = self.poly(dim, max_degree);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A polynomial of positive degree (requires `max_degree >= 1`).
    pub fn nonconstant_poly(&mut self, dim: usize, max_degree: u32) -> Poly {
        assert!(max_degree >= 1);
        loop {
            let p = self.poly(dim, max_degree);
            if p.degree().unwrap_or(0) >= 1 {
                return p;
            }
        }
    }

    /// A vector field supported on a random nonempty set of directions.
    pub fn derivation(&mut self, dim: usize, max_degree: u32) -> Derivation {
        let mut coeffs = vec![Poly::zero(dim); dim];
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(&mut self.rng);
        let k = self.rng.gen_range(1..=dim);
        for &i in &idx[..k] {
            coeffs[i] = self.poly(dim, max_degree);
        }
        Derivation::new(coeffs)
    }

    pub fn nonzero_derivation(&mut self, dim: usize, max_degree: u32) -> Derivation {
        loop {
            let e = self.derivation(dim, max_degree);
            if !e.is_zero() {
                return e;
            }
        }
    }

    /// A sum of one to three terms `f # η`.
    pub fn smash(&mut self, dim: usize, max_degree: u32) -> SmashElement {
        let n = self.rng.gen_range(1..=3);
        (0..n).fold(SmashElement::zero(dim), |acc, _| {
            let f = self.poly(dim, max_degree);
            let e = self.derivation(dim, max_degree);
            acc.add(&SmashElement::term(&f, &e))
        })
    }

    /// `n` pairwise distinct nonconstant polynomials.
    pub fn distinct_polys(&mut self, n: usize, dim: usize, max_degree: u32) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::with_capacity(n);
        while out.len() < n {
            let p = self.nonconstant_poly(dim, max_degree);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Sampler::new(42);
        let mut b = Sampler::new(42);
        for _ in 0..20 {
            assert_eq!(a.poly(2, 4), b.poly(2, 4));
            assert_eq!(a.derivation(3, 2), b.derivation(3, 2));
        }
        let mut c = Sampler::fork(42, 1);
        let mut d = Sampler::fork(42, 2);
        let xs: Vec<_> = (0..5).map(|_| c.poly(2, 3)).collect();
        let ys: Vec<_> = (0..5).map(|_| d.poly(2, 3)).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn shape_limits() {
        let mut s = Sampler::new(1);
        for _ in 0..200 {
            let p = s.poly(3, 4);
            assert!(p.num_terms() <= 3);
            assert!(p.degree().unwrap_or(0) <= 4);
            assert!(s.nonconstant_poly(2, 2).degree().unwrap() >= 1);
            assert!(!s.nonzero_derivation(2, 1).is_zero());
        }
        let fs = s.distinct_polys(4, 1, 2);
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(fs[i], fs[j]);
            }
        }
    }
}
