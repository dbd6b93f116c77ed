//! Named example modules.

use super::{AVModule, PolyMatrix};
use crate::error::{Error, Result};
use crate::poly::{MultiIndex, Poly};
use crate::rational::Rational;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    Ok(())
}

/// `Aʳ` with `ρ(η) = η` entrywise: a D-module, all `D_{i,α} = 0`.
pub fn trivial_dmodule(d: usize, r: usize) -> Result<AVModule> {
    check_dim(d)?;
    AVModule::validated(Some(format!("trivial_dmodule(d={d},r={r})")), d, r, 0, [])
}

/// `Aʳ` with `ρ(g∂ᵢ) = g(∂ᵢ + Γᵢ)`; valid exactly when the connection is flat.
/// The result is not required to validate.
pub fn trivial_with_connection(d: usize, gammas: Vec<PolyMatrix>) -> Result<AVModule> {
    check_dim(d)?;
    if gammas.len() != d {
        return Err(Error::InvalidParameter(format!("expected {d} connection matrices, got {}", gammas.len())));
    }
    let r = gammas[0].rows();
    let terms = gammas.into_iter().enumerate().map(|(i, g)| ((i, MultiIndex::zero(d)), g));
    AVModule::new(Some(format!("connection(d={d},r={r})")), d, r, 0, terms)
}

/// Differential one-forms `Ω¹` on the basis `dx₁..dx_d`, acting by Lie
/// derivative: `L_{g∂ᵢ}(dxⱼ) = δᵢⱼ Σₖ ∂ₖg dxₖ`.
pub fn differential_forms(d: usize) -> Result<AVModule> {
    check_dim(d)?;
    let mut terms = Vec::new();
    for i in 0..d {
        for k in 0..d {
            let mut m = PolyMatrix::zero(d, d, d);
            m.set(k, i, Poly::one(d));
            terms.push(((i, MultiIndex::unit(d, k)), m));
        }
    }
    AVModule::validated(Some(format!("differential_forms(d={d})")), d, d, 1, terms)
}

/// Vector fields `V` on the basis `∂₁..∂_d` with the adjoint action
/// `ρ(η)(τ) = [η, τ]`.
pub fn tangent_adjoint(d: usize) -> Result<AVModule> {
    check_dim(d)?;
    let mut terms = Vec::new();
    for i in 0..d {
        for k in 0..d {
            let mut m = PolyMatrix::zero(d, d, d);
            m.set(i, k, Poly::constant(d, Rational::from_int(-1)));
            terms.push(((i, MultiIndex::unit(d, k)), m));
        }
    }
    AVModule::validated(Some(format!("tangent_adjoint(d={d})")), d, d, 1, terms)
}

/// Jets of order `n`: coordinates `(∂^β h)_{|β|≤n}` in graded-lex order of
/// `β`, with `ρ(η)(jⁿh) = jⁿ(ηh)`, extended `A`-linearly.
///
/// Leibniz on `∂^β(g ∂ᵢh)` gives, for `γ ≠ 0`,
/// `D_{i,γ}[β][β'] = β'ᵢ · β! / (γ! β'!)` where `β = β' − eᵢ + γ`.
pub fn jet_module(d: usize, n: u32) -> Result<AVModule> {
    check_dim(d)?;
    let basis = MultiIndex::all_up_to(d, n);
    let rank = basis.len();
    let position = |b: &MultiIndex| basis.iter().position(|x| x == b);
    let mut terms = Vec::new();
    for i in 0..d {
        for gamma in MultiIndex::all_up_to(d, n) {
            if gamma.is_zero() {
                continue;
            }
            let mut m = PolyMatrix::zero(d, rank, rank);
            for (col, src) in basis.iter().enumerate() {
                if src.get(i) == 0 {
                    continue;
                }
                let lowered = src.checked_sub(&MultiIndex::unit(d, i)).expect("entry is positive");
                let target = lowered.add(&gamma);
                let Some(row) = position(&target) else { continue };
                let c = &(&Rational::from(src.get(i) as u32) * &target.factorial())
                    / &(&gamma.factorial() * &src.factorial());
                m.set(row, col, Poly::constant(d, c));
            }
            terms.push(((i, gamma), m));
        }
    }
    let module = AVModule::with_tight_order(Some(format!("jet_module(d={d},n={n})")), d, rank, terms)?;
    module.require_valid()?;
    Ok(module)
}

/// Rank-one densities of weight `λ`: `ρ(η)(a) = η(a) + λ·div(η)·a`, i.e.
/// `D_{i,eᵢ} = λ`. Weight 1 is `Ω¹` in dimension 1; weight 0 is the trivial
/// D-module.
pub fn twist(d: usize, lambda: Rational) -> Result<AVModule> {
    check_dim(d)?;
    if lambda.is_zero() {
        return trivial_dmodule(d, 1);
    }
    let name = format!("twist(d={d},lambda={lambda})");
    let terms = (0..d).map(|i| ((i, MultiIndex::unit(d, i)), PolyMatrix::constant(d, &[vec![lambda.clone()]])));
    AVModule::validated(Some(name), d, 1, 1, terms)
}

/// Parameters for [`zoo`]; fields a constructor does not use are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZooParams {
    pub dim: usize,
    pub rank: usize,
    pub n: u32,
    pub lambda: Rational,
}

impl Default for ZooParams {
    fn default() -> Self {
        ZooParams { dim: 1, rank: 1, n: 1, lambda: Rational::ONE }
    }
}

/// Constructs a named module. Names: `trivial_dmodule` (`dmodule`),
/// `differential_forms` (`forms`), `tangent_adjoint` (`adjoint`),
/// `jet_module` (`jets`), `twist`.
pub fn zoo(name: &str, params: &ZooParams) -> Result<AVModule> {
    match name {
        "trivial_dmodule" | "dmodule" | "trivial" => {
            if params.rank == 0 {
                return Err(Error::InvalidParameter("rank must be at least 1".into()));
            }
            trivial_dmodule(params.dim, params.rank)
        }
        "differential_forms" | "forms" => differential_forms(params.dim),
        "tangent_adjoint" | "adjoint" => tangent_adjoint(params.dim),
        "jet_module" | "jets" => jet_module(params.dim, params.n),
        "twist" => twist(params.dim, params.lambda.clone()),
        other => Err(Error::UnknownModule(other.to_string())),
    }
}
