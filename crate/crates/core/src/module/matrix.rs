use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{Derivation, Poly};
use crate::rational::Rational;

/// Dense matrix with entries in `A = 𝕜[x₁..x_d]`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(dim: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { dim, rows, cols, entries: vec![Poly::zero(dim); rows * cols] }
    }

    pub fn identity(dim: usize, n: usize) -> Self {
        let mut m = Self::zero(dim, n, n);
        for k in 0..n {
            m.set(k, k, Poly::one(dim));
        }
        m
    }

    /// Constant matrix from rational entries.
    pub fn constant(dim: usize, rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(dim, r, c);
        for (a, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (b, v) in row.iter().enumerate() {
                m.set(a, b, Poly::constant(dim, v.clone()));
            }
        }
        m
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Schema(format!("ragged matrix: row of length {} in a {c}-column matrix", row.len())));
            }
            for p in row {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { dim, rows: r, cols: c, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert_eq!(p.dim(), self.dim);
        self.entries[r * self.cols + c] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    fn zip(&self, other: &PolyMatrix, op: impl Fn(&Poly, &Poly) -> Poly) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        PolyMatrix {
            dim: self.dim,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn map(&self, op: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        PolyMatrix {
            dim: self.dim,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(op).collect(),
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|a| a.scale(c))
    }

    /// `p · self`.
    pub fn scale_poly(&self, p: &Poly) -> PolyMatrix {
        if p.is_zero() {
            return PolyMatrix::zero(self.dim, self.rows, self.cols);
        }
        self.map(|a| a * p)
    }

    /// `self += p · other`.
    pub fn add_scaled(&mut self, p: &Poly, other: &PolyMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        if p.is_zero() {
            return;
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if !b.is_zero() {
                *a = &*a + &(p * b);
            }
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = PolyMatrix::zero(self.dim, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * other.cols + c;
                        out.entries[idx] = &out.entries[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &PolyMatrix) -> PolyMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.dim, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Kronecker product, indexing `(a, b) ↦ a·other.rows + b`.
    pub fn kron(&self, other: &PolyMatrix) -> PolyMatrix {
        let (r2, c2) = (other.rows, other.cols);
        let mut out = PolyMatrix::zero(self.dim, self.rows * r2, self.cols * c2);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.get(r, c);
                if a.is_zero() {
                    continue;
                }
                for s in 0..r2 {
                    for t in 0..c2 {
                        let b = other.get(s, t);
                        if !b.is_zero() {
                            out.set(r * r2 + s, c * c2 + t, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Entrywise application of a vector field.
    pub fn derive(&self, e: &Derivation) -> PolyMatrix {
        self.map(|a| e.apply(a))
    }

    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(Poly::zero(self.dim), |acc, c| {
                    let a = self.get(r, c);
                    if a.is_zero() || v[c].is_zero() {
                        acc
                    } else {
                        &acc + &(a * &v[c])
                    }
                })
            })
            .collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_strings())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn m(rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::from_rows(
            1,
            rows.iter().map(|r| r.iter().map(|s| parse_poly(s, 1).unwrap()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn products_and_kron() {
        let a = m(&[&["x1", "1"], &["0", "2"]]);
        let b = m(&[&["1", "0"], &["x1", "1"]]);
        assert_eq!(a.mul(&b), m(&[&["2*x1", "1"], &["2*x1", "2"]]));
        assert_eq!(a.commutator(&a), PolyMatrix::zero(1, 2, 2));
        assert_eq!(PolyMatrix::identity(1, 2).kron(&a).rows(), 4);
        assert_eq!(a.kron(&PolyMatrix::identity(1, 1)), a);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.apply(&[Poly::one(1), Poly::one(1)]), vec![parse_poly("x1 + 1", 1).unwrap(), parse_poly("2", 1).unwrap()]);
    }

    #[test]
    fn ragged_rejected() {
        let rows = vec![vec![Poly::one(1)], vec![]];
        assert!(PolyMatrix::from_rows(1, rows).is_err());
    }
}
