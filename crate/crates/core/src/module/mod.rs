//! Finite AV-modules: free `A`-modules of rank `r` on which a vector field
//! `g∂ᵢ` acts by
//!
//! ```text
//! ρ(g∂ᵢ)(m) = g·∂ᵢ(m) + Σ_{|α|≤N} ∂^α(g)·D_{i,α}·m
//! ```
//!
//! with `∂ᵢ(m)` taken entrywise in the standard basis. The family of
//! `r×r` matrices `D_{i,α}` is the action tensor and `N` its order.

mod file;
mod functors;
mod matrix;
mod omega_op;
mod zoo;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use file::{export_module, import_module, ModuleFile, TermEntry};
pub use functors::{dual, exterior_power, tensor};
pub use matrix::PolyMatrix;
pub use omega_op::omega_operator;
pub(crate) use omega_op::omega_operators;
pub use zoo::{
    differential_forms, jet_module, tangent_adjoint, trivial_dmodule, trivial_with_connection, twist, zoo,
    ZooParams,
};

use crate::error::{Error, Result};
use crate::poly::{Derivation, MultiIndex, Poly};
use crate::report::{VerificationReport, Witness};
use crate::smash::{omega_multi, SmashElement};

/// An element `Σ aₖ eₖ` of the free module, stored by its coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    dim: usize,
    entries: Vec<Poly>,
}

impl ModuleElement {
    pub fn new(dim: usize, entries: Vec<Poly>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(ModuleElement { dim, entries })
    }

    pub fn zero(dim: usize, rank: usize) -> Self {
        ModuleElement { dim, entries: vec![Poly::zero(dim); rank] }
    }

    /// The `k`-th standard basis vector (zero-based).
    pub fn basis(dim: usize, rank: usize, k: usize) -> Self {
        let mut m = Self::zero(dim, rank);
        m.entries[k] = Poly::one(dim);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Poly> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        assert_eq!(self.rank(), other.rank());
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        ModuleElement { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        assert_eq!(self.rank(), other.rank());
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        ModuleElement { dim: self.dim, entries }
    }

    /// `a · m` for `a ∈ A`.
    pub fn scale_poly(&self, a: &Poly) -> ModuleElement {
        ModuleElement { dim: self.dim, entries: self.entries.iter().map(|p| a * p).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(Poly::to_string).collect()
    }

    pub fn to_witness(&self) -> Witness {
        Witness::Module(self.to_strings())
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join("; "))
    }
}

impl fmt::Debug for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleElement{self}")
    }
}

impl Serialize for ModuleElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// A first-order operator `m ↦ σ(m) + E·m` on the free module, where the
/// vector field `σ` acts entrywise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FirstOrderOp {
    pub symbol: Derivation,
    pub matrix: PolyMatrix,
}

impl FirstOrderOp {
    pub fn zero(dim: usize, rank: usize) -> Self {
        FirstOrderOp { symbol: Derivation::zero(dim), matrix: PolyMatrix::zero(dim, rank, rank) }
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_zero() && self.matrix.is_zero()
    }

    pub fn apply(&self, m: &ModuleElement) -> ModuleElement {
        let moved = self.matrix.apply(m.entries());
        let entries = m
            .entries()
            .iter()
            .zip(moved)
            .map(|(a, b)| &self.symbol.apply(a) + &b)
            .collect();
        ModuleElement { dim: m.dim(), entries }
    }

    pub fn add(&self, other: &FirstOrderOp) -> FirstOrderOp {
        FirstOrderOp { symbol: self.symbol.add(&other.symbol), matrix: self.matrix.add(&other.matrix) }
    }

    pub fn sub(&self, other: &FirstOrderOp) -> FirstOrderOp {
        FirstOrderOp { symbol: self.symbol.sub(&other.symbol), matrix: self.matrix.sub(&other.matrix) }
    }

    /// `[σ + E, τ + F] = [σ,τ] + σ(F) − τ(E) + [E,F]`.
    pub fn commutator(&self, other: &FirstOrderOp) -> FirstOrderOp {
        let matrix = other
            .matrix
            .derive(&self.symbol)
            .sub(&self.matrix.derive(&other.symbol))
            .add(&self.matrix.commutator(&other.matrix));
        FirstOrderOp { symbol: self.symbol.bracket(&other.symbol), matrix }
    }
}

type TensorKey = (usize, MultiIndex);

/// A finite AV-module given by its action tensor. The result of
/// [`validate_module`] is computed once, at construction.
#[derive(Clone)]
pub struct AVModule {
    name: Option<String>,
    dim: usize,
    rank: usize,
    order: u32,
    tensor: BTreeMap<TensorKey, PolyMatrix>,
    validation: VerificationReport,
}

impl PartialEq for AVModule {
    /// Names are labels only and do not take part in equality.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rank == other.rank && self.order == other.order && self.tensor == other.tensor
    }
}

impl Eq for AVModule {}

impl fmt::Debug for AVModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AVModule")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("rank", &self.rank)
            .field("order", &self.order)
            .field("tensor", &self.tensor)
            .field("valid", &self.validation.passed())
            .finish()
    }
}

impl AVModule {
    /// Builds a module from `((i, α), D_{i,α})` entries with zero-based `i`.
    ///
    /// Shape errors are returned; a bracket-incompatible tensor is accepted
    /// and recorded as a failed validation.
    pub fn new<I>(name: Option<String>, dim: usize, rank: usize, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorKey, PolyMatrix)>,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if rank == 0 {
            return Err(Error::InvalidParameter("rank must be positive".into()));
        }
        let mut tensor = BTreeMap::new();
        for ((i, alpha), m) in terms {
            if i >= dim {
                return Err(Error::Schema(format!("direction {} out of range for dimension {dim}", i + 1)));
            }
            if alpha.len() != dim {
                return Err(Error::Schema(format!("multi-index of length {} in dimension {dim}", alpha.len())));
            }
            if alpha.order() > order {
                return Err(Error::Schema(format!(
                    "entry (i={}, alpha={:?}) has |alpha| = {} above the declared order {order}",
                    i + 1,
                    alpha.entries(),
                    alpha.order()
                )));
            }
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::RankMismatch { expected: rank, found: if m.rows() != rank { m.rows() } else { m.cols() } });
            }
            let key = (i, alpha);
            if tensor.contains_key(&key) {
                return Err(Error::Schema(format!("duplicate entry for i={}, alpha={:?}", i + 1, key.1.entries())));
            }
            if !m.is_zero() {
                tensor.insert(key, m);
            }
        }
        let mut module = AVModule {
            name,
            dim,
            rank,
            order,
            tensor,
            validation: VerificationReport::pass("validate-module", BTreeMap::new()),
        };
        module.validation = module.run_validation();
        Ok(module)
    }

    /// Like [`AVModule::new`], but a failed validation is an error.
    pub fn validated<I>(name: Option<String>, dim: usize, rank: usize, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorKey, PolyMatrix)>,
    {
        let m = Self::new(name, dim, rank, order, terms)?;
        m.require_valid()?;
        Ok(m)
    }

    /// Rank-zero module, produced only by exterior powers above the rank.
    pub(crate) fn zero_module(dim: usize, name: Option<String>) -> Self {
        let mut inputs = BTreeMap::new();
        inputs.insert("rank".into(), "0".into());
        AVModule {
            name,
            dim,
            rank: 0,
            order: 0,
            tensor: BTreeMap::new(),
            validation: VerificationReport::pass("validate-module", inputs),
        }
    }

    /// Builds a module whose order is the largest `|α|` with a nonzero entry.
    pub(crate) fn with_tight_order<I>(name: Option<String>, dim: usize, rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorKey, PolyMatrix)>,
    {
        let terms: Vec<_> = terms.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        let order = terms.iter().map(|((_, a), _)| a.order()).max().unwrap_or(0);
        Self::new(name, dim, rank, order, terms)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "unnamed".into())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The declared order `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero_module(&self) -> bool {
        self.rank == 0
    }

    /// `D_{i,α}` for zero-based `i`, or `None` when it is zero.
    pub fn term(&self, i: usize, alpha: &MultiIndex) -> Option<&PolyMatrix> {
        self.tensor.get(&(i, alpha.clone()))
    }

    /// Nonzero tensor entries in key order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, &PolyMatrix)> {
        self.tensor.iter().map(|((i, a), m)| (*i, a, m))
    }

    pub fn is_valid(&self) -> bool {
        self.validation.passed()
    }

    pub fn validation(&self) -> &VerificationReport {
        &self.validation
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        if self.validation.passed() {
            return Ok(());
        }
        let detail = match &self.validation.witness {
            Some(Witness::Text(t)) => t.clone(),
            _ => format!("bracket defect at {:?}", self.validation.inputs),
        };
        Err(Error::Validation(format!("{}: {detail}", self.label())))
    }

    fn check_element(&self, m: &ModuleElement) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        if m.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: m.rank() });
        }
        Ok(())
    }

    /// `ρ(e)` as a first-order operator.
    pub fn derivation_operator(&self, e: &Derivation) -> FirstOrderOp {
        let mut matrix = PolyMatrix::zero(self.dim, self.rank, self.rank);
        for ((i, alpha), d) in &self.tensor {
            let c = e.coeff(*i);
            if !c.is_zero() {
                matrix.add_scaled(&c.partial_multi(alpha), d);
            }
        }
        FirstOrderOp { symbol: e.clone(), matrix }
    }

    /// The operator by which `u ∈ A#V` acts:
    /// `Σᵢ σᵢ∂ᵢ + Σ_{i,α} (∂_y^α Pᵢ)|_{y=x} D_{i,α}`.
    pub fn smash_operator(&self, u: &SmashElement) -> FirstOrderOp {
        let mut matrix = PolyMatrix::zero(self.dim, self.rank, self.rank);
        for ((i, alpha), d) in &self.tensor {
            let p = u.component(*i);
            if !p.is_zero() {
                matrix.add_scaled(&p.diagonal_y_derivative(alpha), d);
            }
        }
        FirstOrderOp { symbol: u.symbol(), matrix }
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut inputs = BTreeMap::new();
        inputs.insert("module".into(), self.label());
        inputs.insert("dim".into(), self.dim.to_string());
        inputs.insert("rank".into(), self.rank.to_string());
        inputs.insert("order".into(), self.order.to_string());
        inputs
    }

    /// Checks `[ρ(g∂ᵢ), ρ(h∂ⱼ)] = ρ([g∂ᵢ, h∂ⱼ])` as operators for monomials
    /// `g`, `h` of degree at most `N+2` in each variable.
    ///
    /// Both sides are first-order operators whose difference is `A`-linear,
    /// so comparing symbols and matrices is the same as comparing values on
    /// the basis and on the `x_k`-multiples of the basis. The defect is
    /// bilinear in `(g, h)` and only sees their partials up to order `N+1`;
    /// the chosen monomials realize every such jet.
    fn run_validation(&self) -> VerificationReport {
        let mut inputs = self.inputs();
        let top = self.tensor.keys().map(|(_, a)| a.order()).max().unwrap_or(0);
        if top != self.order {
            let w = Witness::Text(format!("declared order {} but the largest nonzero |alpha| is {top}", self.order));
            return VerificationReport::fail("validate-module", inputs, w);
        }
        let d = self.dim;
        let monomials = MultiIndex::all_in_box(d, (self.order + 2) as u16);
        let mut fields = Vec::with_capacity(d * monomials.len());
        for i in 0..d {
            for m in &monomials {
                let g = Poly::monomial(m.clone(), crate::rational::Rational::ONE);
                let e = Derivation::single(i, g);
                let op = self.derivation_operator(&e);
                fields.push((e, op));
            }
        }
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                let (ea, oa) = &fields[a];
                let (eb, ob) = &fields[b];
                let lhs = oa.commutator(ob);
                let rhs = self.derivation_operator(&ea.bracket(eb));
                let defect = lhs.sub(&rhs);
                if !defect.is_zero() {
                    inputs.insert("eta".into(), ea.to_string());
                    inputs.insert("mu".into(), eb.to_string());
                    return VerificationReport::fail("validate-module", inputs, Witness::Matrix(defect.matrix.to_strings()));
                }
            }
        }
        VerificationReport::pass("validate-module", inputs)
    }
}

/// `ρ(e)(m)`.
pub fn act_derivation(module: &AVModule, e: &Derivation, m: &ModuleElement) -> Result<ModuleElement> {
    module.require_valid()?;
    module.check_element(m)?;
    if e.dim() != module.dim {
        return Err(Error::DimensionMismatch { expected: module.dim, found: e.dim() });
    }
    Ok(module.derivation_operator(e).apply(m))
}

/// `u·m` for `u ∈ A#V`.
pub fn act_smash(module: &AVModule, u: &SmashElement, m: &ModuleElement) -> Result<ModuleElement> {
    module.require_valid()?;
    module.check_element(m)?;
    if u.dim() != module.dim {
        return Err(Error::DimensionMismatch { expected: module.dim, found: u.dim() });
    }
    Ok(module.smash_operator(u).apply(m))
}

/// The memoized bracket-compatibility report.
pub fn validate_module(module: &AVModule) -> VerificationReport {
    module.validation.clone()
}

/// Whether `u` acts as zero: its symbol vanishes and so does its matrix.
pub fn annihilates(module: &AVModule, u: &SmashElement) -> Result<bool> {
    module.require_valid()?;
    if u.dim() != module.dim {
        return Err(Error::DimensionMismatch { expected: module.dim, found: u.dim() });
    }
    Ok(module.smash_operator(u).is_zero())
}

/// Smallest `p ≥ 1` such that `Ω_q(f,e)` annihilates for every `q ≥ p`.
///
/// Every `q > N` annihilates, so only `q ≤ N` is examined and the result is
/// at most `N+1`.
pub fn min_annihilating_order(module: &AVModule, f: &Poly, e: &Derivation) -> Result<u32> {
    module.require_valid()?;
    for d in [f.dim(), e.dim()] {
        if d != module.dim {
            return Err(Error::DimensionMismatch { expected: module.dim, found: d });
        }
    }
    if f.is_constant() {
        return Ok(1);
    }
    for q in (1..=module.order).rev() {
        if !omega_operator(module, q, f, e).is_zero() {
            return Ok(q + 1);
        }
    }
    Ok(1)
}

/// `max{|α| : D_{i,α} ≠ 0}`; asserts the bound `rank²`.
pub fn lie_map_order(module: &AVModule) -> Result<u32> {
    module.require_valid()?;
    let n = module.tensor.keys().map(|(_, a)| a.order()).max().unwrap_or(0);
    let bound = (module.rank * module.rank) as u32;
    assert!(module.rank == 0 || n <= bound, "Lie map order {n} exceeds rank^2 = {bound}");
    Ok(n)
}

/// Result of the commutator-criterion order search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleOrder {
    pub order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Smallest `n ≤ n_max` such that `Ω((f₀..f_n), g∂ᵢ)` annihilates for all
/// coordinate functions `f_j`, all `i`, and all monomials `g` of degree at
/// most `order(M)+1`; `n_max+1` with a diagnostic when none qualifies.
pub fn oracle_order(module: &AVModule, n_max: u32) -> Result<OracleOrder> {
    module.require_valid()?;
    let d = module.dim;
    let g_degree = module.order.max(module.tensor.keys().map(|(_, a)| a.order()).max().unwrap_or(0)) + 1;
    let gs = MultiIndex::all_up_to(d, g_degree);
    let coords: Vec<Poly> = (0..d).map(|k| Poly::var(d, k)).collect();
    'n: for n in 0..=n_max {
        for beta in MultiIndex::all_of_order(d, n + 1) {
            let fs: Vec<Poly> = beta
                .entries()
                .iter()
                .enumerate()
                .flat_map(|(k, &e)| std::iter::repeat_n(coords[k].clone(), e as usize))
                .collect();
            for i in 0..d {
                for g in &gs {
                    let field = Derivation::single(i, Poly::monomial(g.clone(), crate::rational::Rational::ONE));
                    let u = omega_multi(&fs, &field)?;
                    if !module.smash_operator(&u).is_zero() {
                        continue 'n;
                    }
                }
            }
        }
        return Ok(OracleOrder { order: n, diagnostic: None });
    }
    Ok(OracleOrder {
        order: n_max + 1,
        diagnostic: Some(format!("no n <= {n_max} passes the commutator criterion")),
    })
}
