use super::{flow, FlowOptions, FlowState, FlowStatus, PhasePoint};
use crate::error::Result;
use crate::symbols::{HamiltonianSymbol, InitialData};

/// Position, momentum and phase carried along the ray from `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    /// S(x̂(t, x0), t) = S_I(x0) + accumulated action.
    pub s: f64,
    pub status: FlowStatus,
}

/// Full ray record: the flow state plus the ray Jacobian J = |det ∂x̂/∂x0|.
#[derive(Debug, Clone)]
pub struct RayState {
    pub x0: Vec<f64>,
    pub flow: FlowState,
    pub s: f64,
    /// Signed det ∂x̂/∂x0.
    pub det: f64,
    pub jacobian: f64,
}

impl RayState {
    pub fn point(&self) -> RayPoint {
        RayPoint {
            x: self.flow.point.x.clone(),
            xi: self.flow.point.xi.clone(),
            s: self.s,
            status: self.flow.status.clone(),
        }
    }
}

/// Integrate the ray seeded at `x0` with ξ(0) = ∇S_I(x0) and S(0) = S_I(x0).
pub fn ray_state(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x0: &[f64],
    t: f64,
    opts: &FlowOptions,
) -> Result<RayState> {
    let p0 = PhasePoint::new(x0.to_vec(), initial.grad_s_i(x0));
    let state = flow(h, &p0, t, opts)?;
    // chain rule through ξ(0) = ∇S_I(x0)
    let dxdz = state.dx_dx() + state.dx_dxi() * initial.hess_s_i(x0);
    let det = dxdz.determinant();
    Ok(RayState {
        x0: x0.to_vec(),
        s: initial.s_i(x0) + state.action,
        flow: state,
        det,
        jacobian: det.abs(),
    })
}

pub fn ray(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x0: &[f64],
    t: f64,
    opts: &FlowOptions,
) -> Result<RayPoint> {
    Ok(ray_state(h, initial, x0, t, opts)?.point())
}

/// J(x0, t) = |det(∂x̂(t, x0)/∂x0)|.
pub fn ray_jacobian(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x0: &[f64],
    t: f64,
    opts: &FlowOptions,
) -> Result<f64> {
    Ok(ray_state(h, initial, x0, t, opts)?.jacobian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, ExprField, SymbolParams};
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn data(n: &str, s: &str) -> InitialData {
        InitialData::new(
            ExprField::parse(n, 1).unwrap().into_field(),
            ExprField::parse(s, 1).unwrap().into_field(),
        )
    }

    #[test]
    fn rarefaction_ray() {
        let h = builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap();
        let init = data("exp(-x^2)", "x^2/2");
        let r = ray(&h, &init, &[1.0], 1.0, &FlowOptions::default()).unwrap();
        assert!((r.x[0] - 2.0).abs() < 1e-12);
        assert!((r.xi[0] - 1.0).abs() < 1e-12);
        assert!((r.s - 1.0).abs() < 1e-12);
        for x0 in [-2.0, 0.0, 0.7] {
            for t in [0.0, 0.5, 3.0] {
                let j = ray_jacobian(&h, &init, &[x0], t, &FlowOptions::default()).unwrap();
                assert!((j - (1.0 + t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn focusing_ray_jacobian_vanishes() {
        let h = builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap();
        let init = data("exp(-x^2)", "-x^2/2");
        for x0 in [-1.3, 0.2, 2.5] {
            let j = ray_jacobian(&h, &init, &[x0], 1.0, &FlowOptions::default()).unwrap();
            assert!(j < 1e-12);
        }
    }

    #[test]
    fn harmonic_ray_phase() {
        let h = builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap();
        let init = data("exp(-x^2)", "1*x");
        let t = FRAC_PI_4;
        let r = ray(&h, &init, &[0.0], t, &FlowOptions::default()).unwrap();
        assert!((r.x[0] - SQRT_2 / 2.0).abs() < 1e-8);
        assert!((r.xi[0] - SQRT_2 / 2.0).abs() < 1e-8);
        let x = r.x[0];
        let k = 1.0;
        let exact = -0.5 * (x * x + k * k) * t.tan() + k * x / t.cos();
        assert!((r.s - exact).abs() < 1e-8);
    }

    #[test]
    fn zero_time_ray() {
        let h = builtin_symbol("airy_variable", &SymbolParams::default()).unwrap();
        let init = data("1", "sin(x)");
        let r = ray(&h, &init, &[0.4], 0.0, &FlowOptions::default()).unwrap();
        assert_eq!(r.x, vec![0.4]);
        assert_eq!(r.xi, vec![0.4_f64.cos()]);
        assert_eq!(r.s, 0.4_f64.sin());
        let j = ray_jacobian(&h, &init, &[0.4], 0.0, &FlowOptions::default()).unwrap();
        assert!((j - 1.0).abs() < 1e-15);
    }
}
