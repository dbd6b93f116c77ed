use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::rational::Rational;

/// Exponent vector of a monomial, or the index `α` of an iterated partial `∂^α`.
///
/// Ordered graded-lexicographically with `x1 > x2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(SmallVec<[u16; 8]>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, len))
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut m = Self::zero(len);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(entries: &[u16]) -> Self {
        MultiIndex(SmallVec::from_slice(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u16] {
        &mut self.0
    }

    /// Total order `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(MultiIndex)
    }

    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `α! = Π αᵢ!`
    pub fn factorial(&self) -> Rational {
        self.0
            .iter()
            .fold(Rational::ONE, |acc, &e| &acc * &Rational::factorial(e as u32))
    }

    /// Every multi-index of length `len` with `|α| <= max_order`, in increasing
    /// graded-lex order.
    pub fn all_up_to(len: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for n in 0..=max_order {
            out.extend(Self::all_of_order(len, n));
        }
        out.sort();
        out
    }

    /// Every multi-index of length `len` with `|α| = order`.
    pub fn all_of_order(len: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(len: usize, pos: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == len {
                cur.push(left as u16);
                out.push(MultiIndex::from_slice(cur));
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e as u16);
                rec(len, pos + 1, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if len == 0 {
            if order == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        rec(len, 0, order, &mut Vec::with_capacity(len), &mut out);
        out
    }

    /// Every multi-index of length `len` whose entries are each `<= max_entry`.
    pub fn all_in_box(len: usize, max_entry: u16) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(len)];
        for i in 0..len {
            let mut next = Vec::with_capacity(out.len() * (max_entry as usize + 1));
            for m in &out {
                for e in 0..=max_entry {
                    let mut n = m.clone();
                    n.0[i] = e;
                    next.push(n);
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}
