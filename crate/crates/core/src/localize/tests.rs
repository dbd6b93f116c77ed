use proptest::prelude::*;

use super::*;
use crate::module::{differential_forms, jet_module, tangent_adjoint, trivial_dmodule, twist};
use crate::poly::{parse_derivation, parse_poly};
use rand::Rng;
use crate::sample::Sampler;

fn p(s: &str, d: usize) -> Poly {
    parse_poly(s, d).unwrap()
}
fn e(s: &str, d: usize) -> Derivation {
    parse_derivation(s, d).unwrap()
}

/// `(η/fᵏ)(m/fˡ)` from the tensor formula with rational coefficients:
/// `Σᵢ cᵢ ∂ᵢ(m/fˡ) + Σ_{i,α} ∂^α(cᵢ) D_{i,α} (m/fˡ)` where `cᵢ = ηᵢ/fᵏ`.
fn quotient_rule_action(
    module: &AVModule,
    f: &Poly,
    eta: &Derivation,
    k: u32,
    m: &ModuleElement,
    l: u32,
) -> LocalizedModuleElement {
    let d = module.dim();
    let r = module.rank();
    let zero = LocalizedPoly::from_poly(f, Poly::zero(d)).unwrap();
    let entries: Vec<LocalizedPoly> = m.entries().iter().map(|a| LocalizedPoly::new(f, a.clone(), l).unwrap()).collect();
    let coeffs: Vec<LocalizedPoly> = (0..d).map(|i| LocalizedPoly::new(f, eta.coeff(i).clone(), k).unwrap()).collect();
    let mut out = vec![zero.clone(); r];
    for (i, g) in coeffs.iter().enumerate() {
        for (slot, a) in out.iter_mut().zip(&entries) {
            *slot = slot.add(&g.mul(&a.partial(i)).unwrap()).unwrap();
        }
    }
    for (i, alpha, dm) in module.terms() {
        let mut c = coeffs[i].clone();
        for (var, &times) in alpha.entries().iter().enumerate() {
            for _ in 0..times {
                c = c.partial(var);
            }
        }
        for (row, slot) in out.iter_mut().enumerate() {
            for (col, m) in entries.iter().enumerate() {
                let entry = dm.get(row, col);
                if entry.is_zero() {
                    continue;
                }
                let t = c.mul(&LocalizedPoly::from_poly(f, entry.clone()).unwrap()).unwrap().mul(m).unwrap();
                *slot = slot.add(&t).unwrap();
            }
        }
    }
    let e = out.iter().map(LocalizedPoly::denom_exp).max().unwrap_or(0);
    let nums: Vec<Poly> = out.iter().map(|x| x.raised(e)).collect();
    LocalizedModuleElement::new(f, ModuleElement::new(d, nums).unwrap(), e).unwrap()
}

#[test]
fn reduce_examples() {
    let x = p("x1", 1);
    let dx2 = LocalizedModuleElement::new(&x, ModuleElement::new(1, vec![p("x1^2", 1)]).unwrap(), 2).unwrap();
    assert_eq!(dx2.denom_exp(), 0);
    assert_eq!(dx2.numerator().entries(), &[Poly::one(1)]);
    let kept = LocalizedPoly::new(&x, p("x1 + 1", 1), 1).unwrap();
    assert_eq!(kept.denom_exp(), 1);
    assert!(kept.is_normal());
    let zero = LocalizedPoly::new(&x, Poly::zero(1), 3).unwrap();
    assert_eq!(zero.denom_exp(), 0);
    let partial = LocalizedPoly::new(&x, p("x1^3 + x1^2", 1), 3).unwrap();
    assert_eq!((partial.numerator(), partial.denom_exp()), (&p("x1 + 1", 1), 1));
    assert!(LocalizedPoly::new(&Poly::zero(1), x.clone(), 1).is_err());
}

#[test]
fn forms_witness() {
    let m = differential_forms(1).unwrap();
    let x = p("x1", 1);
    let ctx = Localization::new(&m, x.clone()).unwrap();
    let dx = ctx.embed(ModuleElement::basis(1, 1, 0)).unwrap();
    let got = ctx.act(&ctx.derivation(e("d1", 1), 1).unwrap(), &dx).unwrap();
    // L_{x⁻¹∂}(dx) = d(x⁻¹) = −x⁻² dx
    let want = LocalizedModuleElement::new(&x, ModuleElement::new(1, vec![p("-1", 1)]).unwrap(), 2).unwrap();
    assert_eq!(got, want);
    assert_eq!((got.denom_exp(), got.numerator().entries()[0].clone()), (2, p("-1", 1)));
}

#[test]
fn embedding_and_representatives() {
    let m = jet_module(2, 1).unwrap();
    let f = p("x1*x2 + 1", 2);
    let ctx = Localization::new(&m, f.clone()).unwrap();
    let eta = e("x2^2*d1 - x1*d2", 2);
    let v = ModuleElement::new(2, vec![p("x1", 2), p("1", 2), p("x2^2", 2)]).unwrap();
    let got = ctx.act(&ctx.derivation(eta.clone(), 0).unwrap(), &ctx.embed(v.clone()).unwrap()).unwrap();
    let plain = crate::module::act_derivation(&m, &eta, &v).unwrap();
    assert_eq!(got, LocalizedModuleElement::new(&f, plain, 0).unwrap());
    let rep = ctx.derivation(eta.mul_poly(&f), 1).unwrap();
    assert_eq!(ctx.act(&rep, &ctx.embed(v.clone()).unwrap()).unwrap(), got);
    assert_eq!(rep.reduce().denom_exp(), 0);
    assert!(ctx.act(&ctx.derivation(eta, 0).unwrap(), &LocalizedModuleElement::new(&p("x1", 2), v, 0).unwrap()).is_err());
}

#[test]
fn check_examples() {
    let forms = differential_forms(1).unwrap();
    let x = p("x1", 1);
    let b = LocalizedBindings { eta: Some(e("d1", 1)), mu: Some(e("x1^2*d1", 1)), ..Default::default() };
    assert!(verify_localized("bracket", &forms, &x, &b).unwrap().passed());
    let jets = jet_module(1, 2).unwrap();
    let b = LocalizedBindings { eta: Some(e("d1", 1)), ..Default::default() };
    assert!(verify_localized("inverse-square", &jets, &p("x1 + 1", 1), &b).unwrap().passed());
    assert!(verify_localized("inverse-cube", &jets, &p("x1 + 1", 1), &b).unwrap().passed());
    assert!(verify_localized("welldefined", &jets, &p("x1 + 1", 1), &b).unwrap().passed());
    let b = LocalizedBindings { eta: Some(e("d1", 1)), g: Some(p("x1 + 1", 1)), ..Default::default() };
    assert!(verify_localized("restriction", &forms, &x, &b).unwrap().passed());
    let b = LocalizedBindings { eta: Some(e("d1", 1)), a: Some(p("x1^2 + 3", 1)), ..Default::default() };
    assert!(verify_localized("leibniz", &jets, &x, &b).unwrap().passed());
    assert!(matches!(verify_localized("nope", &forms, &x, &b), Err(Error::UnknownIdentity(_))));
    assert!(matches!(verify_localized("bracket", &forms, &x, &b), Err(Error::MissingBinding { .. })));
    assert!(matches!(verify_localized("bracket", &forms, &Poly::zero(1), &b), Err(Error::ZeroDenominator)));
}

#[test]
fn wrong_coefficients_are_caught() {
    // a (k+1)² weight in place of (k+1) breaks the 1/f² formula on J²
    let jets = jet_module(1, 2).unwrap();
    let f = p("x1 + 1", 1);
    let ctx = Localization::new(&jets, f.clone()).unwrap();
    let run = Run { id: CheckId::InverseSquare, ctx: &ctx, inputs: Default::default() };
    let eta = e("d1", 1);
    let me = ctx.embed(ModuleElement::basis(1, 3, 1)).unwrap();
    let good = run.weighted_series(&eta, &me, 2, |q| Rational::from(q + 1)).unwrap();
    let bad = run.weighted_series(&eta, &me, 2, |q| Rational::from((q + 1) * (q + 1))).unwrap();
    let lhs = ctx.act(&ctx.derivation(eta, 2).unwrap(), &me).unwrap();
    assert_eq!(lhs, good);
    assert_ne!(lhs, bad);
}

use super::checks::Run;

fn zoo_small() -> Vec<AVModule> {
    vec![
        trivial_dmodule(2, 1).unwrap(),
        differential_forms(1).unwrap(),
        differential_forms(2).unwrap(),
        tangent_adjoint(2).unwrap(),
        jet_module(1, 2).unwrap(),
        jet_module(2, 1).unwrap(),
        twist(1, Rational::new(-1, 2)).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn series_matches_quotient_rule(seed in any::<u64>(), k in 0u32..=3, l in 0u32..=2) {
        let mut s = Sampler::new(seed);
        for m in zoo_small() {
            let d = m.dim();
            let f = s.nonconstant_poly(d, 2);
            let ctx = Localization::new(&m, f.clone()).unwrap();
            let eta = s.derivation(d, 2);
            let v = ModuleElement::new(d, (0..m.rank()).map(|_| s.poly(d, 2)).collect()).unwrap();
            let got = ctx.act(&ctx.derivation(eta.clone(), k).unwrap(), &ctx.element(v.clone(), l).unwrap()).unwrap();
            prop_assert!(got.is_normal());
            prop_assert_eq!(got, quotient_rule_action(&m, &f, &eta, k, &v, l));
        }
    }

    #[test]
    fn checks_pass_on_random_inputs(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        for m in zoo_small() {
            let d = m.dim();
            let f = s.nonconstant_poly(d, 2);
            let b = LocalizedBindings {
                eta: Some(s.derivation(d, 2)),
                mu: Some(s.derivation(d, 2)),
                a: Some(s.poly(d, 2)),
                g: Some(s.nonconstant_poly(d, 2)),
                ..Default::default()
            };
            for id in CheckId::ALL {
                let r = verify_localized(id.name(), &m, &f, &b).unwrap();
                prop_assert!(r.passed(), "{} on {}: {:?}", id, m.label(), r);
            }
        }
    }

    #[test]
    fn reduce_preserves_value(seed in any::<u64>(), k in 0u32..=3) {
        let mut s = Sampler::new(seed);
        let f = s.nonconstant_poly(2, 2);
        let a = &s.poly(2, 2) * &f.pow(s.rng().gen_range(0..=3));
        let raw = LocalizedPoly::representative(&f, a, k).unwrap();
        let red = raw.reduce();
        prop_assert!(red.is_normal());
        prop_assert_eq!(red, raw);
    }
}

