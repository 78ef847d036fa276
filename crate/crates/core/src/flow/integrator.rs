//! Explicit integrators for the extended Hamiltonian system
//! (position, momentum, action, variational matrix).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symbols::HamiltonianSymbol;

/// Layout of the extended state vector for dimension `d`:
/// `[x (d), ξ (d), S (1), J (4d², column-major)]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub d: usize,
}

impl Layout {
    pub fn len(&self) -> usize {
        let n = 2 * self.d;
        n + 1 + n * n
    }
    pub fn action(&self) -> usize {
        2 * self.d
    }
    pub fn jac_start(&self) -> usize {
        2 * self.d + 1
    }
    pub fn phase_norm(&self, y: &[f64]) -> f64 {
        let d = self.d;
        let nx = y[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let nxi = y[d..2 * d].iter().map(|v| v * v).sum::<f64>().sqrt();
        nx + nxi
    }
    pub fn initial(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let d = self.d;
        let n = 2 * d;
        let mut y = vec![0.0; self.len()];
        y[..d].copy_from_slice(x);
        y[d..n].copy_from_slice(xi);
        for i in 0..n {
            y[self.jac_start() + i * n + i] = 1.0;
        }
        y
    }
    pub fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        let n = 2 * self.d;
        DMatrix::from_column_slice(n, n, &y[self.jac_start()..])
    }
}

/// Right-hand side of the extended system. `Ok(false)` when the result is non-finite.
pub(crate) fn rhs(
    h: &HamiltonianSymbol,
    layout: Layout,
    y: &[f64],
    out: &mut [f64],
) -> Result<bool> {
    let d = layout.d;
    let n = 2 * d;
    let (x, xi) = (&y[..d], &y[d..n]);
    let gx = h.grad_x(x, xi)?;
    let gxi = h.grad_xi(x, xi)?;
    let hv = h.h(x, xi)?;
    let sd = h.second_derivatives(x, xi)?;
    for i in 0..d {
        out[i] = gxi[i];
        out[d + i] = -gx[i];
    }
    out[layout.action()] = gxi.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() - hv;
    // A = [[H_ξx, H_ξξ], [−H_xx, −H_xξ]]
    let mut a = DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = sd.hess_mixed[(j, i)];
            a[(i, d + j)] = sd.hess_xi[(i, j)];
            a[(d + i, j)] = -sd.hess_x[(i, j)];
            a[(d + i, d + j)] = -sd.hess_mixed[(i, j)];
        }
    }
    let jac = layout.jacobian(y);
    let dj = a * jac;
    out[layout.jac_start()..].copy_from_slice(dj.as_slice());
    Ok(out.iter().all(|v| v.is_finite()))
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes c_i are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) struct Dopri<'a> {
    pub h: &'a HamiltonianSymbol,
    pub layout: Layout,
    pub rel: f64,
    pub abs: f64,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

pub(crate) struct StepOutcome {
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    pub err: f64,
}

impl<'a> Dopri<'a> {
    pub fn new(h: &'a HamiltonianSymbol, layout: Layout, rel: f64, abs: f64) -> Self {
        let n = layout.len();
        Self {
            h,
            layout,
            rel,
            abs,
            k: vec![vec![0.0; n]; 7],
            tmp: vec![0.0; n],
        }
    }

    /// One step of size `step`. `None` when a stage evaluation was non-finite.
    pub fn step(&mut self, y: &[f64], dy: &[f64], step: f64) -> Result<Option<StepOutcome>> {
        let n = y.len();
        self.k[0].copy_from_slice(dy);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.tmp[i] = y[i] + step * acc;
            }
            match rhs(self.h, self.layout, &self.tmp, &mut self.k[s]) {
                Ok(true) => {}
                Ok(false) => return Ok(None),
                Err(Error::NonFinite(_)) | Err(Error::Domain(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        // the last stage was evaluated at the 5th-order solution
        let y_new = self.tmp.clone();
        let mut err = 0.0_f64;
        for i in 0..n {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * self.k[s][i];
            }
            let scale = self.abs + self.rel * y[i].abs().max(y_new[i].abs());
            err = err.max((step * e).abs() / scale);
        }
        if !err.is_finite() {
            return Ok(None);
        }
        Ok(Some(StepOutcome {
            y: y_new,
            dy: self.k[6].clone(),
            err,
        }))
    }
}

/// One Störmer–Verlet (kick–drift–kick) step for separable symbols, carrying
/// the linearised map and the discrete action.
pub(crate) fn verlet_step(
    h: &HamiltonianSymbol,
    layout: Layout,
    y: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let d = layout.d;
    let n = 2 * d;
    let x0 = &y[..d];
    let xi0 = &y[d..n];
    let gx0 = h.grad_x(x0, xi0)?;
    let xi_half: Vec<f64> = (0..d).map(|i| xi0[i] - 0.5 * step * gx0[i]).collect();
    let gxi_half = h.grad_xi(x0, &xi_half)?;
    let x1: Vec<f64> = (0..d).map(|i| x0[i] + step * gxi_half[i]).collect();
    let gx1 = h.grad_x(&x1, &xi_half)?;
    let xi1: Vec<f64> = (0..d).map(|i| xi_half[i] - 0.5 * step * gx1[i]).collect();

    let s0 = h.second_derivatives(x0, xi0)?;
    let s_half = h.second_derivatives(x0, &xi_half)?;
    let s1 = h.second_derivatives(&x1, &xi1)?;
    let jac = layout.jacobian(y);
    let dx = jac.rows(0, d).into_owned();
    let dxi = jac.rows(d, d).into_owned();
    let dxi_half = &dxi - &s0.hess_x * &dx * (0.5 * step);
    let dx1 = &dx + &s_half.hess_xi * &dxi_half * step;
    let dxi1 = &dxi_half - &s1.hess_x * &dx1 * (0.5 * step);

    let lagr = gxi_half
        .iter()
        .zip(&xi_half)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        - 0.5 * (h.h(x0, &xi_half)? + h.h(&x1, &xi_half)?);

    let mut out = vec![0.0; layout.len()];
    out[..d].copy_from_slice(&x1);
    out[d..n].copy_from_slice(&xi1);
    out[layout.action()] = y[layout.action()] + step * lagr;
    let mut new_jac = DMatrix::zeros(n, n);
    new_jac.rows_mut(0, d).copy_from(&dx1);
    new_jac.rows_mut(d, d).copy_from(&dxi1);
    out[layout.jac_start()..].copy_from_slice(new_jac.as_slice());
    Ok(out)
}
