//! Randomized structural properties of symbols, flow and branch search.

use caustica::branches::BranchSearch;
use caustica::cli::preset;
use caustica::flow::{flow, ray, ray_state, FlowOptions, FlowStatus, PhasePoint};
use caustica::symbols::{
    builtin_symbol, ExprField, HamiltonianSymbol, InitialData, Scenario, ScenarioDoc, SymbolParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn free() -> HamiltonianSymbol {
    builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap()
}

fn anharmonic() -> HamiltonianSymbol {
    let v = ExprField::parse("x^4/4 + cos(x)", 1).unwrap().into_field();
    builtin_symbol(
        "schrodinger_potential",
        &SymbolParams::dim(1).with_potential(v),
    )
    .unwrap()
}

fn symbols() -> Vec<HamiltonianSymbol> {
    vec![
        free(),
        anharmonic(),
        builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap(),
        builtin_symbol("airy_cubic", &SymbolParams::dim(1)).unwrap(),
        builtin_symbol(
            "eikonal",
            &SymbolParams::dim(2).with_coefficient(
                ExprField::parse("1 + x1^2/4 + x2^2/8", 2)
                    .unwrap()
                    .into_field(),
            ),
        )
        .unwrap(),
    ]
}

fn central(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for h in symbols() {
        let d = h.dim();
        for _ in 0..100 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(0.3..2.0)).collect();
            let gx = h.grad_x(&x, &xi).unwrap();
            let gxi = h.grad_xi(&x, &xi).unwrap();
            for k in 0..d {
                let shift = |v: &[f64], e: f64| {
                    let mut w = v.to_vec();
                    w[k] += e;
                    w
                };
                let fx = central(|e| h.h(&shift(&x, e), &xi).unwrap(), 1e-5);
                let fxi = central(|e| h.h(&x, &shift(&xi, e)).unwrap(), 1e-5);
                let scale = 1.0 + gx[k].abs() + gxi[k].abs();
                assert!(
                    (fx - gx[k]).abs() < 1e-6 * scale,
                    "{} ∂x {fx} vs {}",
                    h.label(),
                    gx[k]
                );
                assert!(
                    (fxi - gxi[k]).abs() < 1e-6 * scale,
                    "{} ∂ξ {fxi} vs {}",
                    h.label(),
                    gxi[k]
                );
            }
        }
    }
}

#[test]
fn flow_jacobian_is_symplectic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in symbols() {
        let d = h.dim();
        let mut omega = DMatrix::zeros(2 * d, 2 * d);
        for k in 0..d {
            omega[(k, d + k)] = 1.0;
            omega[(d + k, k)] = -1.0;
        }
        for _ in 0..20 {
            let p = PhasePoint::new(
                (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..d).map(|_| rng.gen_range(0.5..1.5)).collect(),
            );
            let t = rng.gen_range(0.05..0.3);
            let st = flow(&h, &p, t, &FlowOptions::tight()).unwrap();
            assert_eq!(st.status, FlowStatus::Ok);
            let defect = (st.jac.transpose() * &omega * &st.jac - &omega).abs().max();
            assert!(defect < 1e-8, "{}: {defect}", h.label());
        }
    }
}

#[test]
fn ray_determinant_matches_finite_differences() {
    let init = InitialData::new(
        ExprField::parse("exp(-x^2)", 1).unwrap().into_field(),
        ExprField::parse("-ln(cosh(x))", 1).unwrap().into_field(),
    );
    let h = anharmonic();
    let opts = FlowOptions::tight();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let x0 = rng.gen_range(-3.0..3.0);
        let t = rng.gen_range(0.1..2.0);
        let st = ray_state(&h, &init, &[x0], t, &opts).unwrap();
        let fd = central(|e| ray(&h, &init, &[x0 + e], t, &opts).unwrap().x[0], 1e-5);
        assert!(
            (st.det - fd).abs() < 1e-5 * (1.0 + fd.abs()),
            "{} vs {fd}",
            st.det
        );
        assert!((st.jacobian - st.det.abs()).abs() == 0.0);
    }
}

fn cusp() -> Scenario {
    let doc: ScenarioDoc = preset("ex_1_3_cusp_smooth").unwrap();
    doc.to_scenario().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn branch_rays_land_on_the_target(x in -4.0f64..4.0, t in 0.1f64..2.5) {
        let s = cusp();
        let set = BranchSearch::for_scenario(&s).find(&[x], t).unwrap();
        prop_assert!(!set.branches.is_empty());
        let opts = FlowOptions::tight();
        for b in &set.branches {
            let r = ray(&s.hamiltonian, &s.initial, &b.z, t, &opts).unwrap();
            prop_assert!((r.x[0] - x).abs() < 1e-6, "landed at {} not {}", r.x[0], x);
            prop_assert!((r.xi[0] - b.v[0]).abs() < 1e-6);
            prop_assert!((r.s - b.s).abs() < 1e-6);
        }
    }

    #[test]
    fn free_flow_is_a_shear(x in -10.0f64..10.0, xi in -10.0f64..10.0, t in -3.0f64..3.0) {
        let st = flow(&free(), &PhasePoint::scalar(x, xi), t, &FlowOptions::default()).unwrap();
        prop_assert!((st.point.x[0] - (x + t * xi)).abs() < 1e-8 * (1.0 + x.abs() + xi.abs()));
        prop_assert!((st.point.xi[0] - xi).abs() < 1e-12);
    }
}
