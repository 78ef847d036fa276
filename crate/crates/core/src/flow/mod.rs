//! Bicharacteristics, rays, accumulated action and variational Jacobians.
//!
//! The Hamiltonian flow F_t(x, ξ) = (x̃, ξ̃) solves
//! dx̃/dt = ∇_ξH, dξ̃/dt = −∇_xH. Alongside it we integrate the action
//! dS/dt = ∇_ξH·ξ̃ − H and the variational matrix J̇ = A(t)J, J(0) = I, so
//! that ray Jacobians and branch determinants never need finite differences.

mod integrator;
mod ray;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::{HamiltonianSymbol, Tolerances};
use integrator::{rhs, verlet_step, Dopri, Layout};

pub use ray::{ray, ray_jacobian, ray_state, RayPoint, RayState};

/// Norm |x̃| + |ξ̃| beyond which the flow is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e8;
/// Relative step size below which the flow is declared singular.
pub const STEP_COLLAPSE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        Self { x, xi }
    }

    pub fn scalar(x: f64, xi: f64) -> Self {
        Self {
            x: vec![x],
            xi: vec![xi],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.xi).all(|v| v.is_finite())
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.xi.iter().zip(&other.xi))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupEvent {
    pub t_event: f64,
    pub last_point: PhasePoint,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlowStatus {
    Ok,
    BlownUp(BlowupEvent),
}

impl FlowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, FlowStatus::Ok)
    }
}

/// Result of integrating the flow. When the status is `BlownUp`, `point`,
/// `action` and `jac` hold the last state reached before the event.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub point: PhasePoint,
    pub action: f64,
    /// ∂(x̃, ξ̃)/∂(x, ξ), 2d × 2d.
    pub jac: DMatrix<f64>,
    pub t: f64,
    pub status: FlowStatus,
    pub steps: usize,
}

impl FlowState {
    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn blown_up(&self) -> Option<&BlowupEvent> {
        match &self.status {
            FlowStatus::BlownUp(ev) => Some(ev),
            FlowStatus::Ok => None,
        }
    }

    /// ∂x̃/∂x block.
    pub fn dx_dx(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.jac.view((0, 0), (d, d)).into_owned()
    }

    /// ∂x̃/∂ξ block.
    pub fn dx_dxi(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.jac.view((0, d), (d, d)).into_owned()
    }

    /// ∂ξ̃/∂x block.
    pub fn dxi_dx(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.jac.view((d, 0), (d, d)).into_owned()
    }

    /// ∂ξ̃/∂ξ block.
    pub fn dxi_dxi(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.jac.view((d, d), (d, d)).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Adaptive Dormand–Prince 5(4).
    DormandPrince,
    /// Fixed-step Störmer–Verlet; only valid for separable symbols.
    StormerVerlet { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub method: Method,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            method: Method::DormandPrince,
            max_steps: 2_000_000,
        }
    }
}

impl FlowOptions {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        Self {
            rel_tol: tol.ode_rel,
            abs_tol: tol.ode_abs,
            ..Self::default()
        }
    }

    pub fn tight() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..Self::default()
        }
    }
}

fn finish(layout: Layout, y: &[f64], t: f64, status: FlowStatus, steps: usize) -> FlowState {
    let d = layout.d;
    FlowState {
        point: PhasePoint::new(y[..d].to_vec(), y[d..2 * d].to_vec()),
        action: y[layout.action()],
        jac: layout.jacobian(y),
        t,
        status,
        steps,
    }
}

/// Integrate the Hamiltonian flow from `p0` over time `t` (negative `t` runs
/// the flow backwards).
///
/// Finite-time blow-up is not an error: the returned state carries
/// `FlowStatus::BlownUp` with the event time bracketed to well below 1e-6.
/// Non-finite symbol values at the starting point are reported as errors.
pub fn flow(
    h: &HamiltonianSymbol,
    p0: &PhasePoint,
    t: f64,
    opts: &FlowOptions,
) -> Result<FlowState> {
    let d = h.dim();
    if p0.dim() != d || p0.xi.len() != d {
        return Err(Error::Domain(format!(
            "phase point has dimension {} but symbol has d = {d}",
            p0.dim()
        )));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::Domain(
            "integration tolerances must be positive".into(),
        ));
    }
    if !t.is_finite() || !p0.is_finite() {
        return Err(Error::Domain("non-finite flow input".into()));
    }
    let layout = Layout { d };
    let y0 = layout.initial(&p0.x, &p0.xi);
    let mut dy0 = vec![0.0; layout.len()];
    if !rhs(h, layout, &y0, &mut dy0)? {
        return Err(Error::NonFinite(format!(
            "symbol `{}` at ({:?}, {:?})",
            h.label(),
            p0.x,
            p0.xi
        )));
    }
    if t == 0.0 {
        return Ok(finish(layout, &y0, 0.0, FlowStatus::Ok, 0));
    }
    match opts.method {
        Method::DormandPrince => integrate_dopri(h, layout, y0, dy0, t, opts),
        Method::StormerVerlet { step } => {
            if !h.is_separable() {
                return Err(Error::Domain(format!(
                    "Störmer–Verlet needs a separable symbol, `{}` is not",
                    h.label()
                )));
            }
            integrate_verlet(h, layout, y0, t, step)
        }
    }
}

fn initial_step(y: &[f64], dy: &[f64], opts: &FlowOptions, t: f64) -> f64 {
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let d0 = (0..y.len())
        .map(|i| (y[i] / scale(i)).powi(2))
        .sum::<f64>()
        .sqrt();
    let d1 = (0..y.len())
        .map(|i| (dy[i] / scale(i)).powi(2))
        .sum::<f64>()
        .sqrt();
    let guess = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    guess.min(t.abs()).max(1e-12 * t.abs())
}

fn integrate_dopri(
    h: &HamiltonianSymbol,
    layout: Layout,
    mut y: Vec<f64>,
    mut dy: Vec<f64>,
    t_end: f64,
    opts: &FlowOptions,
) -> Result<FlowState> {
    let dir = t_end.signum();
    let mut stepper = Dopri::new(h, layout, opts.rel_tol, opts.abs_tol);
    let mut t = 0.0_f64;
    let mut step = initial_step(&y, &dy, opts, t_end);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while (t_end - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            let ev = BlowupEvent {
                t_event: t,
                last_point: PhasePoint::new(
                    y[..layout.d].to_vec(),
                    y[layout.d..2 * layout.d].to_vec(),
                ),
                diagnostic: format!("step budget of {} exhausted", opts.max_steps),
            };
            return Ok(finish(layout, &y, t, FlowStatus::BlownUp(ev), steps));
        }
        let remaining = (t_end - t).abs();
        let mut h_try = step.min(remaining);
        if h_try < STEP_COLLAPSE * (1.0 + t.abs()) {
            if remaining <= STEP_COLLAPSE * (1.0 + t.abs()) {
                // close enough to the end point; take the final sliver
                h_try = remaining;
            } else {
                let ev = BlowupEvent {
                    t_event: t,
                    last_point: PhasePoint::new(
                        y[..layout.d].to_vec(),
                        y[layout.d..2 * layout.d].to_vec(),
                    ),
                    diagnostic: format!("adaptive step collapsed to {h_try:.3e} at t = {t}"),
                };
                return Ok(finish(layout, &y, t, FlowStatus::BlownUp(ev), steps));
            }
        }
        steps += 1;
        let outcome = stepper.step(&y, &dy, dir * h_try)?;
        let Some(out) = outcome else {
            step = h_try * 0.2;
            last_rejected = true;
            continue;
        };
        if out.err <= 1.0 {
            if layout.phase_norm(&out.y) > DIVERGENCE_NORM {
                let t_event = bracket_divergence(&mut stepper, layout, &y, &dy, t, dir * h_try)?;
                let ev = BlowupEvent {
                    t_event,
                    last_point: PhasePoint::new(
                        y[..layout.d].to_vec(),
                        y[layout.d..2 * layout.d].to_vec(),
                    ),
                    diagnostic: format!("|x| + |ξ| exceeded {DIVERGENCE_NORM:e}"),
                };
                return Ok(finish(layout, &y, t, FlowStatus::BlownUp(ev), steps));
            }
            t = if h_try == remaining {
                t_end
            } else {
                t + dir * h_try
            };
            y = out.y;
            dy = out.dy;
            let mut factor = if out.err == 0.0 {
                5.0
            } else {
                (0.9 * out.err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            step = h_try * factor;
            last_rejected = false;
        } else {
            step = h_try * (0.9 * out.err.powf(-0.2)).clamp(0.1, 0.9);
            last_rejected = true;
        }
    }
    Ok(finish(layout, &y, t_end, FlowStatus::Ok, steps))
}

/// Bisect the last step length for the first time at which the phase norm
/// exceeds the divergence threshold.
fn bracket_divergence(
    stepper: &mut Dopri<'_>,
    layout: Layout,
    y: &[f64],
    dy: &[f64],
    t: f64,
    signed_step: f64,
) -> Result<f64> {
    let mut lo = 0.0_f64;
    let mut hi = signed_step.abs();
    let dir = signed_step.signum();
    while hi - lo > 1e-12 * (1.0 + t.abs()) {
        let mid = 0.5 * (lo + hi);
        let inside = match stepper.step(y, dy, dir * mid)? {
            Some(out) => layout.phase_norm(&out.y) <= DIVERGENCE_NORM,
            None => false,
        };
        if inside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t + dir * hi)
}

fn integrate_verlet(
    h: &HamiltonianSymbol,
    layout: Layout,
    mut y: Vec<f64>,
    t_end: f64,
    step: f64,
) -> Result<FlowState> {
    if !(step > 0.0) {
        return Err(Error::Domain("Störmer–Verlet step must be positive".into()));
    }
    let n = (t_end.abs() / step).ceil().max(1.0) as usize;
    let dt = t_end / n as f64;
    for k in 0..n {
        let next = verlet_step(h, layout, &y, dt)?;
        if layout.phase_norm(&next) > DIVERGENCE_NORM || next.iter().any(|v| !v.is_finite()) {
            let t = k as f64 * dt;
            let ev = BlowupEvent {
                t_event: t + dt,
                last_point: PhasePoint::new(
                    y[..layout.d].to_vec(),
                    y[layout.d..2 * layout.d].to_vec(),
                ),
                diagnostic: "fixed-step integration diverged".into(),
            };
            return Ok(finish(layout, &y, t, FlowStatus::BlownUp(ev), k));
        }
        y = next;
    }
    Ok(finish(layout, &y, t_end, FlowStatus::Ok, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, SymbolParams};

    fn sym(name: &str) -> HamiltonianSymbol {
        builtin_symbol(name, &SymbolParams::dim(1)).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = sym("harmonic_oscillator");
        let s = flow(
            &h,
            &PhasePoint::scalar(0.3, -1.2),
            0.0,
            &FlowOptions::default(),
        )
        .unwrap();
        assert_eq!(s.point, PhasePoint::scalar(0.3, -1.2));
        assert_eq!(s.jac, DMatrix::identity(2, 2));
        assert_eq!(s.action, 0.0);
        assert!(s.status.is_ok());
    }

    #[test]
    fn free_flow_is_straight_line() {
        let h = sym("free_quadratic");
        for &(x, xi, t) in &[(0.5, 1.5, 2.0), (-1.0, 0.25, -3.0), (2.0, -2.0, 0.7)] {
            let s = flow(&h, &PhasePoint::scalar(x, xi), t, &FlowOptions::default()).unwrap();
            assert!((s.point.x[0] - (x + t * xi)).abs() < 1e-12);
            assert!((s.point.xi[0] - xi).abs() < 1e-14);
            // action of free motion: t·ξ²/2
            assert!((s.action - 0.5 * t * xi * xi).abs() < 1e-12);
            assert!((s.jac[(0, 1)] - t).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_flow_is_rotation() {
        let h = sym("harmonic_oscillator");
        for &(x, xi, t) in &[(1.0, 0.0, 1.3), (0.4, -2.0, 4.0), (-1.5, 0.5, -2.2)] {
            let s = flow(&h, &PhasePoint::scalar(x, xi), t, &FlowOptions::default()).unwrap();
            let (c, sn) = (t.cos(), t.sin());
            assert!((s.point.x[0] - (x * c + xi * sn)).abs() < 1e-8);
            assert!((s.point.xi[0] - (-x * sn + xi * c)).abs() < 1e-8);
        }
    }

    #[test]
    fn airy_variable_closed_form_and_blowup() {
        let h = sym("airy_variable");
        let (x, xi) = (0.8, 1.0);
        let t = 0.3;
        let s = flow(&h, &PhasePoint::scalar(x, xi), t, &FlowOptions::default()).unwrap();
        let r = 1.0 - 2.0 * xi * xi * t;
        assert!((s.point.x[0] - x * r.powf(1.5)).abs() < 1e-9);
        assert!((s.point.xi[0] - xi / r.sqrt()).abs() < 1e-9);

        let s = flow(&h, &PhasePoint::scalar(x, xi), 0.6, &FlowOptions::default()).unwrap();
        let ev = s.blown_up().expect("must blow up");
        assert!((ev.t_event - 0.5).abs() < 1e-6, "t_event = {}", ev.t_event);

        let s = flow(
            &h,
            &PhasePoint::scalar(x, 2.0),
            1.0,
            &FlowOptions::default(),
        )
        .unwrap();
        let ev = s.blown_up().expect("must blow up");
        assert!((ev.t_event - 0.125).abs() < 1e-6);
    }

    #[test]
    fn verlet_agrees_with_dopri_for_separable_symbol() {
        let h = sym("harmonic_oscillator");
        let p = PhasePoint::scalar(0.7, -0.3);
        let a = flow(&h, &p, 2.0, &FlowOptions::default()).unwrap();
        let opts = FlowOptions {
            method: Method::StormerVerlet { step: 1e-4 },
            ..FlowOptions::default()
        };
        let b = flow(&h, &p, 2.0, &opts).unwrap();
        assert!(a.point.distance(&b.point) < 1e-7);
        assert!((a.action - b.action).abs() < 1e-7);
        assert!((a.jac.clone() - b.jac.clone()).abs().max() < 1e-7);
        assert!((b.jac.determinant() - 1.0).abs() < 1e-12);

        let nonsep = sym("airy_variable");
        assert!(flow(&nonsep, &p, 0.1, &opts).is_err());
    }

    #[test]
    fn nan_symbol_is_an_error() {
        let v = crate::symbols::ExprField::parse("ln(x)", 1)
            .unwrap()
            .into_field();
        let h = builtin_symbol(
            "schrodinger_potential",
            &SymbolParams::dim(1).with_potential(v),
        )
        .unwrap();
        let r = flow(
            &h,
            &PhasePoint::scalar(-1.0, 0.0),
            1.0,
            &FlowOptions::default(),
        );
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
