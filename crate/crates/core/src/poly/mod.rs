//! Exact multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives in a fixed number of variables; arithmetic between
//! polynomials of different dimension is a programming error and panics.
//! Fallible, user-facing entry points (`partial_derivative`, parsing,
//! derivations) report [`Error`]s instead.

mod derivation;
mod multi_index;
mod parse;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

pub use derivation::{apply_derivation, derivation_bracket, Derivation};
pub use multi_index::MultiIndex;
pub use parse::{parse_derivation, parse_poly};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A polynomial in `dim` variables with exact rational coefficients.
///
/// Terms are kept sorted by descending graded-lex order of their exponents and
/// no stored coefficient is zero, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: Vec<(MultiIndex, Rational)>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: Vec::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::ONE)
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable {i} out of range for dimension {dim}");
        Self::monomial(MultiIndex::unit(dim, i), Rational::ONE)
    }

    pub fn monomial(exp: MultiIndex, c: Rational) -> Self {
        let dim = exp.len();
        if c.is_zero() {
            return Poly::zero(dim);
        }
        Poly { dim, terms: vec![(exp, c)] }
    }

    /// Collects arbitrary terms, merging repeated exponents and dropping zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut acc = Accumulator::new(dim);
        for (m, c) in terms {
            assert_eq!(m.len(), dim, "exponent length does not match dimension");
            acc.add_term(&m, &c);
        }
        acc.into_poly()
    }

    pub(crate) fn from_map(dim: usize, acc: FxHashMap<MultiIndex, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> &[(MultiIndex, Rational)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_zero())
    }

    /// The constant value, if this polynomial is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::ZERO),
            [(m, c)] if m.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.order())
    }

    pub fn leading_term(&self) -> Option<&(MultiIndex, Rational)> {
        self.terms.first()
    }

    pub fn coefficient(&self, exp: &MultiIndex) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m == exp)
            .map(|(_, c)| c.clone())
            .unwrap_or(Rational::ZERO)
    }

    fn check_dim(&self, other: &Poly) {
        assert_eq!(
            self.dim, other.dim,
            "polynomial dimension mismatch ({} vs {})",
            self.dim, other.dim
        );
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut result = Poly::one(self.dim);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `∂/∂x_{i+1}` (zero-based `i`). Panics when `i >= dim`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.dim, "variable {i} out of range for dimension {}", self.dim);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.entries_mut()[i] = e - 1;
            terms.push((n, c * &Rational::from(e as u32)));
        }
        // Lowering one exponent can reorder terms of equal degree.
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { dim: self.dim, terms }
    }

    /// Iterated partial `∂^α`.
    pub fn partial_multi(&self, alpha: &MultiIndex) -> Poly {
        assert_eq!(alpha.len(), self.dim);
        self.partial_block(alpha, 0)
    }

    /// Applies `∂^α` to the block of variables starting at `offset`.
    pub fn partial_block(&self, alpha: &MultiIndex, offset: usize) -> Poly {
        assert!(offset + alpha.len() <= self.dim);
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let mut n = m.clone();
            let mut coeff = c.clone();
            let mut vanishes = false;
            for (k, &a) in alpha.entries().iter().enumerate() {
                let e = n.get(offset + k);
                if e < a {
                    vanishes = true;
                    break;
                }
                for j in 0..a {
                    coeff = &coeff * &Rational::from((e - j) as u32);
                }
                n.entries_mut()[offset + k] = e - a;
            }
            if !vanishes {
                terms.push((n, coeff));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { dim: self.dim, terms }
    }

    /// Re-embeds into a ring of `nvars` variables, sending `x_k` to variable
    /// `offset + k`.
    pub fn lift(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.dim <= nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut n = MultiIndex::zero(nvars);
                n.entries_mut()[offset..offset + self.dim].copy_from_slice(m.entries());
                (n, c.clone())
            })
            .collect::<Vec<_>>();
        let mut p = Poly { dim: nvars, terms };
        p.terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        p
    }

    /// For a polynomial in `2d` variables `(x; y)`, substitutes `y = x`.
    pub fn diagonal(&self) -> Poly {
        assert!(self.dim.is_multiple_of(2), "diagonal needs an even number of variables");
        let d = self.dim / 2;
        Poly::from_terms(
            d,
            self.terms.iter().map(|(m, c)| {
                let e = m.entries();
                let exps: Vec<u16> = (0..d).map(|k| e[k] + e[d + k]).collect();
                (MultiIndex::from_slice(&exps), c.clone())
            }),
        )
    }

    /// For a polynomial `P(x, y)` in `2d` variables, returns `(∂_y^α P)|_{y=x}`.
    pub fn diagonal_y_derivative(&self, alpha: &MultiIndex) -> Poly {
        let d = self.dim / 2;
        assert_eq!(alpha.len(), d);
        let mut acc = Accumulator::new(d);
        let mut exps = MultiIndex::zero(d);
        'terms: for (m, c) in &self.terms {
            let e = m.entries();
            let mut falling: u64 = 1;
            for k in 0..d {
                let a = alpha.get(k);
                let b = e[d + k];
                if b < a {
                    continue 'terms;
                }
                for j in 0..a {
                    falling = falling.checked_mul(u64::from(b - j)).expect("derivative multiplier overflows u64");
                }
                exps.entries_mut()[k] = e[k] + b - a;
            }
            acc.add_scaled_term(&exps, c, falling);
        }
        acc.into_poly()
    }

    /// Exact quotient `self / divisor`, or `None` when `divisor` does not divide
    /// `self`. Single-divisor reduction on graded-lex leading terms.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        self.check_dim(divisor);
        let (lead_m, lead_c) = divisor.leading_term()?.clone();
        let mut rem = self.clone();
        let mut quot: Vec<(MultiIndex, Rational)> = Vec::new();
        while let Some((m, c)) = rem.leading_term().cloned() {
            let qm = m.checked_sub(&lead_m)?;
            let qc = &c / &lead_c;
            let step = divisor.mul_term(&qm, &qc);
            rem = &rem - &step;
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(self.dim, quot))
    }

    /// `a(x)·b(y)` in `2d` variables for `a`, `b` in `d` variables.
    pub fn tensor(&self, other: &Poly) -> Poly {
        self.check_dim(other);
        let d = self.dim;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut e: Vec<u16> = Vec::with_capacity(2 * d);
                e.extend_from_slice(ma.entries());
                e.extend_from_slice(mb.entries());
                terms.push((MultiIndex::from_slice(&e), ca * cb));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { dim: 2 * d, terms }
    }

    fn mul_term(&self, m: &MultiIndex, c: &Rational) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(n, a)| (n.add(m), a * c)).collect(),
        }
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.dim);
        let mut acc = Rational::ZERO;
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.entries()) {
                t = &t * &x.pow(e as u32);
            }
            acc += &t;
        }
        acc
    }

    /// Substitutes polynomials (all in a common ring) for each variable.
    pub fn compose(&self, values: &[Poly]) -> Poly {
        assert_eq!(values.len(), self.dim);
        let target = values.first().map(|v| v.dim).unwrap_or(0);
        let mut acc = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (v, &e) in values.iter().zip(m.entries()) {
                if e > 0 {
                    t = &t * &v.pow(e as u32);
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

/// Exact partial derivative with a 1-based variable index.
pub fn partial_derivative(p: &Poly, i: usize) -> Result<Poly> {
    if i == 0 || i > p.dim() {
        return Err(Error::VariableOutOfRange { index: i, dim: p.dim() });
    }
    Ok(p.partial(i - 1))
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs);
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            let (a, b) = (&self.terms[i], &rhs.terms[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => {
                    terms.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    terms.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a.1 + &b.1;
                    if !c.is_zero() {
                        terms.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&rhs.terms[j..]);
        Poly { dim: self.dim, terms }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_dim(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.dim);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return rhs.mul_term(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = &rhs.terms[0];
            return self.mul_term(m, c);
        }
        let mut acc = Accumulator::new(self.dim);
        acc.add_product(self, rhs, false);
        acc.into_poly()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Poly> for &'a Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Writes `x^m` as `*`-joined factors, nothing for the constant monomial.
pub(crate) fn write_monomial(out: &mut String, m: &MultiIndex, names: &dyn Fn(usize) -> String) {
    let mut first = true;
    for (k, &e) in m.entries().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(&names(k));
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

/// Renders `Σ c·x^m` (optionally followed by a suffix factor per term) in the
/// polynomial grammar.
pub(crate) fn render_terms<'a, I>(terms: I, names: &dyn Fn(usize) -> String, suffix: Option<&str>) -> String
where
    I: IntoIterator<Item = &'a (MultiIndex, Rational)>,
{
    let mut out = String::new();
    for (idx, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let bare = m.is_zero() && suffix.is_none();
        if !mag.is_one() || bare {
            out.push_str(&mag.to_string());
            if !bare {
                out.push('*');
            }
        }
        write_monomial(&mut out, m, names);
        if let Some(s) = suffix {
            if !m.is_zero() {
                out.push('*');
            }
            out.push_str(s);
        }
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        f.write_str(&render_terms(&self.terms, &|k| format!("x{}", k + 1), None))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.dim, self)
    }
}

impl serde::Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Running sum of terms and products in a fixed number of variables.
///
/// Up to eight variables, exponents are packed into a `u128` key (sixteen
/// bits each, first variable most significant), so hashing and monomial
/// multiplication are single integer operations. Coefficients are integer
/// numerators over one shared denominator: `i128` until something overflows,
/// then `BigInt`. Each coefficient is reduced once, in [`Accumulator::into_poly`].
pub(crate) struct Accumulator {
    dim: usize,
    store: Store,
}

enum Store {
    Int { den: i128, map: FxHashMap<u128, i128> },
    Big { den: BigInt, map: FxHashMap<u128, BigInt> },
    General(FxHashMap<MultiIndex, Rational>),
}

const PACKED_VARS: usize = 8;

fn pack(m: &MultiIndex) -> u128 {
    m.entries().iter().fold(0u128, |acc, &e| (acc << 16) | u128::from(e))
}

fn unpack(mut key: u128, dim: usize) -> MultiIndex {
    let mut m = MultiIndex::zero(dim);
    for slot in m.entries_mut().iter_mut().rev() {
        *slot = (key & 0xffff) as u16;
        key >>= 16;
    }
    m
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Integer numerators over a common denominator, if every coefficient is small.
fn integer_form(p: &Poly) -> Option<(i128, Vec<i64>)> {
    let mut den: i64 = 1;
    for (_, c) in &p.terms {
        let d = c.small_parts()?.1;
        den = (den / gcd_i128(den as i128, d as i128) as i64).checked_mul(d)?;
    }
    let nums = p
        .terms
        .iter()
        .map(|(_, c)| {
            let (n, d) = c.small_parts()?;
            n.checked_mul(den / d)
        })
        .collect::<Option<Vec<_>>>()?;
    Some((den as i128, nums))
}

fn big_parts(c: &Rational) -> (BigInt, BigInt) {
    let r = c.to_big();
    (r.numer().clone(), r.denom().clone())
}

fn big_integer_form(p: &Poly) -> (BigInt, Vec<BigInt>) {
    let parts: Vec<_> = p.terms.iter().map(|(_, c)| big_parts(c)).collect();
    let den = parts.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
    let nums = parts.into_iter().map(|(n, d)| n * (&den / d)).collect();
    (den, nums)
}

impl Accumulator {
    pub(crate) fn new(dim: usize) -> Self {
        let store = if dim <= PACKED_VARS {
            Store::Int { den: 1, map: FxHashMap::default() }
        } else {
            Store::General(FxHashMap::default())
        };
        Accumulator { dim, store }
    }

    fn promote(&mut self) {
        if let Store::Int { den, map } = &mut self.store {
            let den = BigInt::from(*den);
            let map = std::mem::take(map);
            self.store = Store::Big { den, map: map.into_iter().map(|(k, v)| (k, BigInt::from(v))).collect() };
        }
    }

    /// Makes the shared denominator a multiple of `d` and returns the factor
    /// new numerators over `d` must be multiplied by.
    fn common_denominator(&mut self, d: i128) -> Option<i128> {
        let Store::Int { den, map } = &mut self.store else { return None };
        let lcm = (*den / gcd_i128(*den, d)).checked_mul(d)?;
        if lcm != *den {
            let m = lcm / *den;
            if map.values().any(|v| v.checked_mul(m).is_none()) {
                return None;
            }
            map.values_mut().for_each(|v| *v *= m);
            *den = lcm;
        }
        Some(lcm / d)
    }

    /// Big-integer counterpart of [`Self::common_denominator`]; `None` means
    /// the factor is one.
    fn big_common_denominator(&mut self, d: &BigInt) -> Option<BigInt> {
        let Store::Big { den, map } = &mut self.store else { unreachable!("big store expected") };
        let (q, r) = den.div_rem(d);
        if r.is_zero() {
            return (!q.is_one()).then_some(q);
        }
        let lcm = den.lcm(d);
        let m = &lcm / &*den;
        map.values_mut().for_each(|v| *v *= &m);
        let factor = &lcm / d;
        *den = lcm;
        (!factor.is_one()).then_some(factor)
    }

    fn add_big(&mut self, key: u128, c: &Rational, k: u64) {
        let (mut n, d) = big_parts(c);
        if let Some(f) = self.big_common_denominator(&d) {
            n *= f;
        }
        if k != 1 {
            n *= k;
        }
        let Store::Big { map, .. } = &mut self.store else { unreachable!() };
        *map.entry(key).or_default() += n;
    }

    pub(crate) fn add_term(&mut self, m: &MultiIndex, c: &Rational) {
        self.add_scaled_term(m, c, 1);
    }

    /// Adds `k·c·xᵐ`.
    pub(crate) fn add_scaled_term(&mut self, m: &MultiIndex, c: &Rational, k: u64) {
        match &mut self.store {
            Store::General(map) => {
                let c = if k == 1 { c.clone() } else { c * &Rational::from_i128(k.into(), 1) };
                *map.entry(m.clone()).or_default() += &c;
                return;
            }
            Store::Big { .. } => {}
            Store::Int { .. } => {
                if let Some((n, d)) = c.small_parts() {
                    if let Some(factor) = self.common_denominator(d as i128) {
                        if let Store::Int { map, .. } = &mut self.store {
                            let e = map.entry(pack(m)).or_insert(0);
                            let v = (n as i128).checked_mul(factor).and_then(|v| v.checked_mul(k.into()));
                            if let Some(v) = v.and_then(|v| e.checked_add(v)) {
                                *e = v;
                                return;
                            }
                        }
                    }
                }
                self.promote();
            }
        }
        self.add_big(pack(m), c, k);
    }

    /// Adds `a·b`, or `−a·b` when `negate` is set.
    pub(crate) fn add_product(&mut self, a: &Poly, b: &Poly, negate: bool) {
        a.check_dim(b);
        assert_eq!(a.dim, self.dim, "accumulator dimension mismatch");
        if let Store::General(map) = &mut self.store {
            for (ma, ca) in &a.terms {
                let ca = if negate { -ca } else { ca.clone() };
                for (mb, cb) in &b.terms {
                    *map.entry(ma.add(mb)).or_default() += &(&ca * cb);
                }
            }
            return;
        }
        let ka: Vec<u128> = a.terms.iter().map(|(m, _)| pack(m)).collect();
        let kb: Vec<u128> = b.terms.iter().map(|(m, _)| pack(m)).collect();
        if let Store::Int { .. } = self.store {
            let ints = match (integer_form(a), integer_form(b)) {
                (Some((da, na)), Some((db, nb))) => {
                    da.checked_mul(db).and_then(|d| self.common_denominator(d)).map(|f| (na, nb, f))
                }
                _ => None,
            };
            if let Some((na, nb, factor)) = ints {
                if self.add_small_product(&ka, &na, &kb, &nb, factor, negate) {
                    return;
                }
            }
            self.promote();
        }
        let (da, na) = big_integer_form(a);
        let (db, nb) = big_integer_form(b);
        let mut factor = self.big_common_denominator(&(da * db));
        if negate {
            factor = Some(factor.map_or_else(|| -BigInt::one(), |f| -f));
        }
        let Store::Big { map, .. } = &mut self.store else { unreachable!() };
        for (i, x) in na.iter().enumerate() {
            let x = match &factor {
                Some(f) => x * f,
                None => x.clone(),
            };
            for (j, y) in nb.iter().enumerate() {
                *map.entry(ka[i] + kb[j]).or_default() += &x * y;
            }
        }
    }

    /// The `i128` part of [`Self::add_product`]. On overflow, everything added
    /// so far is undone and `false` is returned.
    fn add_small_product(&mut self, ka: &[u128], na: &[i64], kb: &[u128], nb: &[i64], factor: i128, negate: bool) -> bool {
        let Store::Int { map, .. } = &mut self.store else { unreachable!() };
        let mut done: Vec<(u128, i128)> = Vec::new();
        let mut ok = true;
        'outer: for (i, &x) in na.iter().enumerate() {
            for (j, &y) in nb.iter().enumerate() {
                let v = (x as i128 * y as i128).checked_mul(factor);
                let v = v.and_then(|v| if negate { v.checked_neg() } else { Some(v) });
                let key = ka[i] + kb[j];
                let e = map.entry(key).or_insert(0);
                match v.and_then(|v| e.checked_add(v)) {
                    Some(sum) => {
                        done.push((key, sum - *e));
                        *e = sum;
                    }
                    None => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if !ok {
            for (key, v) in done {
                *map.get_mut(&key).expect("entry was added") -= v;
            }
        }
        ok
    }

    pub(crate) fn into_poly(self) -> Poly {
        let dim = self.dim;
        let entries: Vec<(u128, Rational)> = match self.store {
            Store::General(map) => return Poly::from_map(dim, map),
            Store::Big { den, map } => map
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, Rational::from(BigRational::new(v, den.clone()))))
                .collect(),
            Store::Int { den, map } => {
                map.into_iter().filter(|&(_, v)| v != 0).map(|(k, v)| (k, Rational::from_i128(v, den))).collect()
            }
        };
        let mut terms: Vec<(u32, u128, Rational)> = entries
            .into_iter()
            .map(|(k, c)| {
                let mut deg = 0u32;
                let mut t = k;
                while t != 0 {
                    deg += (t & 0xffff) as u32;
                    t >>= 16;
                }
                (deg, k, c)
            })
            .collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse((t.0, t.1)));
        Poly { dim, terms: terms.into_iter().map(|(_, k, c)| (unpack(k, dim), c)).collect() }
    }
}
