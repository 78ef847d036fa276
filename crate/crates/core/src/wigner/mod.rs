//! Finite-ε oracle in one space dimension.
//!
//! Wave functions live on a uniform periodic grid. The ε-scaled equation
//! εψ_t + iH^W ψ = 0 with a separable symbol H = ω(ξ) + V(x) is advanced by
//! Strang splitting (the ω-part exact in Fourier space). Fourier transforms
//! follow f̂(ξ) = ∫ f e^{−ixξ} dx.

mod compare;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::{HamiltonianSymbol, InitialData};

pub use compare::{compare, CompareOptions, ComparisonEntry, ComparisonReport};

/// Uniform periodic grid on [lo, hi) with a power-of-two node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl PeriodicGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::GridTooSmall(format!(
                "periodic grid needs a power of two ≥ 4 nodes, got {n}"
            )));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "empty periodic domain [{lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    /// Smallest power-of-two grid on [lo, hi) with spacing ≤ `max_dx`.
    pub fn with_max_spacing(lo: f64, hi: f64, max_dx: f64) -> Result<Self> {
        let need = ((hi - lo) / max_dx).ceil().max(4.0) as usize;
        Self::new(lo, hi, need.next_power_of_two())
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.lo + self.dx() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        (0..n)
            .map(|m| {
                let m = if m >= n / 2 { m - n } else { m };
                2.0 * PI * m as f64 / self.length()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: PeriodicGrid,
    pub values: Vec<Complex64>,
    pub eps: f64,
    pub t: f64,
}

impl WaveField {
    pub fn new(grid: PeriodicGrid, values: Vec<Complex64>, eps: f64) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidScenario(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.n
            )));
        }
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("ε must be positive, got {eps}")));
        }
        Ok(Self {
            grid,
            values,
            eps,
            t: 0.0,
        })
    }

    /// |ψ|² at the nodes.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Discrete ∫|ψ|².
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }
}

/// Largest |∂S_I| over the nodes where n_I is not negligible (relative 1e-16).
fn max_slope(initial: &InitialData, nodes: &[f64]) -> f64 {
    let n: Vec<f64> = nodes.iter().map(|&x| initial.n_i(&[x])).collect();
    let peak = n.iter().cloned().fold(0.0, f64::max);
    nodes
        .iter()
        .zip(&n)
        .filter(|(_, v)| **v > 1e-16 * peak)
        .map(|(&x, _)| initial.grad_s_i(&[x])[0].abs())
        .fold(0.0, f64::max)
}

/// Spacing that resolves the phase of the WKB datum: ε / (4 max|∂S_I|).
pub fn resolving_spacing(initial: &InitialData, eps: f64, lo: f64, hi: f64) -> f64 {
    let probe: Vec<f64> = (0..=4096)
        .map(|j| lo + (hi - lo) * j as f64 / 4096.0)
        .collect();
    let slope = max_slope(initial, &probe);
    if slope == 0.0 {
        f64::INFINITY
    } else {
        eps / (4.0 * slope)
    }
}

/// ψ(x, 0) = √n_I(x) · exp(iS_I(x)/ε) on `grid`.
pub fn wkb_initial(initial: &InitialData, eps: f64, grid: &PeriodicGrid) -> Result<WaveField> {
    if initial.dim() != 1 {
        return Err(Error::Domain(
            "the wave-field oracle is one-dimensional".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    let nodes = grid.nodes();
    let slope = max_slope(initial, &nodes);
    if slope > 0.0 && grid.dx() > eps / (4.0 * slope) {
        return Err(Error::UnderResolved(format!(
            "Δx = {:.3e} exceeds ε/(4 max|S_I'|) = {:.3e}",
            grid.dx(),
            eps / (4.0 * slope)
        )));
    }
    let values = nodes
        .par_iter()
        .map(|&x| {
            let n = initial.n_i(&[x]);
            if n < 0.0 {
                return Err(Error::Domain(format!("n_I({x}) = {n} < 0")));
            }
            Ok(Complex64::from_polar(n.sqrt(), initial.s_i(&[x]) / eps))
        })
        .collect::<Result<Vec<_>>>()?;
    WaveField::new(*grid, values, eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Largest Strang step as a fraction of ε.
    pub step_fraction: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { step_fraction: 0.1 }
    }
}

fn fft(values: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(values.len())
    } else {
        planner.plan_fft_forward(values.len())
    };
    plan.process(values);
}

/// Advance `field` by time `t` under the separable symbol `h`.
pub fn evolve(field: &WaveField, h: &HamiltonianSymbol, t: f64) -> Result<WaveField> {
    evolve_with(field, h, t, &EvolveOptions::default())
}

pub fn evolve_with(
    field: &WaveField,
    h: &HamiltonianSymbol,
    t: f64,
    opts: &EvolveOptions,
) -> Result<WaveField> {
    if h.dim() != 1 {
        return Err(Error::Domain(
            "the wave-field oracle is one-dimensional".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::Domain("non-finite evolution time".into()));
    }
    if !(opts.step_fraction > 0.0 && opts.step_fraction <= 0.1) {
        return Err(Error::Domain(format!(
            "Strang step must be a positive fraction ≤ 0.1 of ε, got {}",
            opts.step_fraction
        )));
    }
    let eps = field.eps;
    let grid = field.grid;
    let k = grid.wavenumbers();
    let omega = k
        .iter()
        .map(|&kk| {
            h.dispersion(eps * kk).ok_or_else(|| {
                Error::Domain(format!(
                    "symbol `{}` has no Fourier-multiplier form ω(ξ) + V(x)",
                    h.label()
                ))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let nodes = grid.nodes();
    let potential: Vec<f64> = nodes
        .iter()
        .map(|&x| h.potential(&[x]).unwrap_or(0.0))
        .collect();
    if potential.iter().any(|v| !v.is_finite()) || omega.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "symbol `{}` on the grid",
            h.label()
        )));
    }
    let kinetic = |dt: f64| -> Vec<Complex64> {
        omega
            .iter()
            .map(|w| Complex64::from_polar(1.0 / grid.n as f64, -dt * w / eps))
            .collect()
    };
    let mut psi = field.values.clone();
    let free = potential.iter().all(|v| *v == 0.0);
    if free {
        fft(&mut psi, false);
        for (p, m) in psi.iter_mut().zip(kinetic(t)) {
            *p *= m;
        }
        fft(&mut psi, true);
    } else {
        let max_step = opts.step_fraction * eps;
        let steps = (t.abs() / max_step).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let half: Vec<Complex64> = potential
            .iter()
            .map(|v| Complex64::from_polar(1.0, -0.5 * dt * v / eps))
            .collect();
        let kin = kinetic(dt);
        for _ in 0..steps {
            for (p, m) in psi.iter_mut().zip(&half) {
                *p *= m;
            }
            fft(&mut psi, false);
            for (p, m) in psi.iter_mut().zip(&kin) {
                *p *= m;
            }
            fft(&mut psi, true);
            for (p, m) in psi.iter_mut().zip(&half) {
                *p *= m;
            }
        }
    }
    Ok(WaveField {
        grid,
        values: psi,
        eps,
        t: field.t + t,
    })
}

/// Sampled phase-space function; `values[i * xi.len() + k]` at (x[i], xi[k]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub values: Vec<f64>,
    pub eps: f64,
    pub dx: f64,
    pub dxi: f64,
}

impl PhaseSpaceGrid {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.xi.len() + k]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Total mass ∬ w dx dξ.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx * self.dxi
    }
}

/// Discrete Wigner transform at every node.
pub fn wigner_transform(field: &WaveField) -> PhaseSpaceGrid {
    wigner_strided(field, 1)
}

/// Discrete Wigner transform at every `stride`-th node.
///
/// w(x_j, ξ_k) = (2π)⁻¹ Σ_m ψ_{j−m} ψ̄_{j+m} e^{i z_m ξ_k} Δz with
/// z_m = 2mΔx/ε, so that εz/2 lands on grid nodes. Indices wrap
/// periodically; |m| < n/4 keeps the two arguments within half a period of
/// each other, which removes the ghost images a full-period sum picks up
/// midway between a packet and its periodic copy.
pub fn wigner_strided(field: &WaveField, stride: usize) -> PhaseSpaceGrid {
    let stride = stride.max(1);
    let n = field.grid.n;
    let dx = field.grid.dx();
    let dz = 2.0 * dx / field.eps;
    let dxi = 2.0 * PI / (n as f64 * dz);
    let psi = &field.values;
    let rows: Vec<usize> = (0..n).step_by(stride).collect();
    let half = n as i64 / 2;
    // sorted ξ order: FFT slot for ascending index q is (q − n/2) mod n
    let xi: Vec<f64> = (0..n as i64).map(|q| (q - half) as f64 * dxi).collect();
    let plan = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let data: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|&j| {
            let mut buf = kernel(psi, j);
            plan.process(&mut buf);
            let scale = dz / (2.0 * PI);
            (0..n)
                .map(|q| {
                    let slot = (q as i64 - half).rem_euclid(n as i64) as usize;
                    buf[slot].re * scale
                })
                .collect()
        })
        .collect();
    PhaseSpaceGrid {
        x: rows.iter().map(|&j| field.grid.x(j)).collect(),
        xi,
        values: data.into_iter().flatten().collect(),
        eps: field.eps,
        dx: dx * stride as f64,
        dxi,
    }
}

/// ψ_{j−m} ψ̄_{j+m} in FFT order (slot m ≥ n/2 holds shift m − n), zero
/// for |m| ≥ n/4.
fn kernel(psi: &[Complex64], j: usize) -> Vec<Complex64> {
    let n = psi.len() as i64;
    (0..n)
        .map(|slot| {
            let m = if slot >= n / 2 { slot - n } else { slot };
            if 4 * m.abs() >= n {
                return Complex64::new(0.0, 0.0);
            }
            let a = (j as i64 - m).rem_euclid(n) as usize;
            let b = (j as i64 + m).rem_euclid(n) as usize;
            psi[a] * psi[b].conj()
        })
        .collect()
}

/// Largest imaginary part of the discrete Wigner sums, for the realness check.
pub fn wigner_imaginary_residue(field: &WaveField) -> f64 {
    let n = field.grid.n;
    let psi = &field.values;
    let plan = FftPlanner::<f64>::new().plan_fft_inverse(n);
    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut buf = kernel(psi, j);
            plan.process(&mut buf);
            buf.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        * (2.0 * field.grid.dx() / field.eps)
        / (2.0 * PI)
}

/// Periodic convolution of each row (`len` samples, spacing `h`) with the
/// normalized samples of G(z) = (πε)^{-1/2} e^{−z²/ε}.
fn smooth_rows(data: &mut [f64], len: usize, h: f64, eps: f64) {
    let kernel: Vec<f64> = (0..len as i64)
        .map(|m| {
            let m = if m >= len as i64 / 2 {
                m - len as i64
            } else {
                m
            };
            let z = m as f64 * h;
            (-z * z / eps).exp()
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    let mut khat: Vec<Complex64> = kernel
        .iter()
        .map(|k| Complex64::new(k / total, 0.0))
        .collect();
    fft(&mut khat, false);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    data.par_chunks_mut(len).for_each(|row| {
        let mut buf: Vec<Complex64> = row.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&khat) {
            *b *= k / len as f64;
        }
        inv.process(&mut buf);
        for (r, b) in row.iter_mut().zip(&buf) {
            *r = b.re;
        }
    });
}

fn transpose(values: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for i in 0..rows {
        for k in 0..cols {
            out[k * rows + i] = values[i * cols + k];
        }
    }
    out
}

/// Husimi function: w^ε smoothed by G^ε in x and in ξ.
pub fn husimi(ps: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    let (nx, nxi) = (ps.x.len(), ps.xi.len());
    let mut values = ps.values.clone();
    smooth_rows(&mut values, nxi, ps.dxi, ps.eps);
    let mut cols = transpose(&values, nx, nxi);
    smooth_rows(&mut cols, nx, ps.dx, ps.eps);
    PhaseSpaceGrid {
        values: transpose(&cols, nxi, nx),
        ..ps.clone()
    }
}

/// Zeroth ξ-moment ∫ w dξ at each x.
pub fn moment0(ps: &PhaseSpaceGrid) -> Vec<f64> {
    ps.values
        .chunks(ps.xi.len())
        .map(|row| row.iter().sum::<f64>() * ps.dxi)
        .collect()
}

/// ∬ a(x, ξ) w(x, ξ) dx dξ.
pub fn expectation(ps: &PhaseSpaceGrid, a: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    let nxi = ps.xi.len();
    ps.values
        .par_chunks(nxi)
        .zip(ps.x.par_iter())
        .map(|(row, &x)| {
            row.iter()
                .zip(&ps.xi)
                .map(|(w, &xi)| a(x, xi) * w)
                .sum::<f64>()
        })
        .sum::<f64>()
        * ps.dx
        * ps.dxi
}

/// Expectation of a Hamiltonian symbol.
pub fn expectation_symbol(ps: &PhaseSpaceGrid, h: &HamiltonianSymbol) -> Result<f64> {
    if h.dim() != 1 {
        return Err(Error::Domain(
            "the wave-field oracle is one-dimensional".into(),
        ));
    }
    let mut out = 0.0;
    for (i, &x) in ps.x.iter().enumerate() {
        for (k, &xi) in ps.xi.iter().enumerate() {
            out += h.h(&[x], &[xi])? * ps.at(i, k);
        }
    }
    Ok(out * ps.dx * ps.dxi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, ExprField, SymbolParams};

    fn data(n: &str, s: &str) -> InitialData {
        InitialData::new(
            ExprField::parse(n, 1).unwrap().into_field(),
            ExprField::parse(s, 1).unwrap().into_field(),
        )
    }

    fn free() -> HamiltonianSymbol {
        builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap()
    }

    fn harmonic_potential() -> HamiltonianSymbol {
        let v = ExprField::parse("x^2/2", 1).unwrap().into_field();
        builtin_symbol(
            "schrodinger_potential",
            &SymbolParams::dim(1).with_potential(v),
        )
        .unwrap()
    }

    #[test]
    fn zero_phase_datum_is_real_gaussian() {
        let init = data("exp(-x^2)", "0");
        let grid = PeriodicGrid::new(-8.0, 8.0, 256).unwrap();
        let f = wkb_initial(&init, 0.1, &grid).unwrap();
        for (j, v) in f.values.iter().enumerate() {
            assert_eq!(v.im, 0.0);
            assert!((v.re - (-0.5 * grid.x(j).powi(2)).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let init = data("exp(-x^2)", "x^2/2");
        let grid = PeriodicGrid::new(-8.0, 8.0, 256).unwrap();
        assert!(matches!(
            wkb_initial(&init, 1.0 / 64.0, &grid),
            Err(Error::UnderResolved(_))
        ));
        assert!(matches!(
            PeriodicGrid::new(0.0, 1.0, 100),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn chirp_local_wavenumber() {
        let eps = 1.0 / 64.0;
        let init = data("exp(-x^2/8)", "x^2/2");
        let grid =
            PeriodicGrid::with_max_spacing(-16.0, 16.0, resolving_spacing(&init, eps, -16.0, 16.0))
                .unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        // windowed spectrum around x0: peak at ξ = εk ≈ x0
        for x0 in [-1.5, 0.5, 2.0] {
            let width = 256;
            let centre = ((x0 - grid.lo) / grid.dx()).round() as usize;
            let mut buf: Vec<Complex64> = (0..width)
                .map(|m| {
                    let j = centre + m - width / 2;
                    let hann = (PI * m as f64 / width as f64).sin().powi(2);
                    f.values[j] * hann
                })
                .collect();
            fft(&mut buf, false);
            let (peak, _) = buf
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            let m = if peak >= width / 2 {
                peak as f64 - width as f64
            } else {
                peak as f64
            };
            let xi = eps * 2.0 * PI * m / (width as f64 * grid.dx());
            let bin = eps * 2.0 * PI / (width as f64 * grid.dx());
            assert!((xi - x0).abs() <= bin, "x0 = {x0}: ξ = {xi}, bin {bin}");
        }
    }

    #[test]
    fn datum_mass_matches_integral() {
        let init = data("exp(-x^2)/sqrt(pi)", "x^2/2");
        let eps = 1.0 / 32.0;
        let grid =
            PeriodicGrid::with_max_spacing(-10.0, 10.0, resolving_spacing(&init, eps, -10.0, 10.0))
                .unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn free_evolution_matches_gaussian_closed_form() {
        // ψ0 = exp(−αx²/2) evolves to (1 + iεαt)^{-1/2} exp(−x²/(2(1/α + iεt)))
        let eps = 0.05;
        let init = data("exp(-x^2)", "x^2/4");
        let grid = PeriodicGrid::new(-20.0, 20.0, 16384).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let t = 1.3;
        let g = evolve(&f, &free(), t).unwrap();
        let alpha = Complex64::new(1.0, -0.5 / eps);
        let i = Complex64::i();
        for s in 0..64 {
            let j = 6144 + 64 * s;
            let x = grid.x(j);
            let inv = 1.0 / alpha + i * eps * t;
            let exact = (1.0 + i * eps * alpha * t).powf(-0.5) * (-x * x / (2.0 * inv)).exp();
            assert!((g.values[j] - exact).norm() < 1e-8, "x = {x}");
        }
        assert!((g.mass() - f.mass()).abs() <= 1e-10 * f.mass() * t);
    }

    #[test]
    fn harmonic_evolution_conserves_norm_and_energy() {
        let eps = 1.0 / 16.0;
        let init = data("exp(-(x-1)^2/(1/16))", "0.5*x");
        let grid = PeriodicGrid::new(-8.0, 8.0, 512).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let h = harmonic_potential();
        let opts = EvolveOptions {
            step_fraction: 0.01,
        };
        let e0 = expectation_symbol(&wigner_transform(&f), &h).unwrap();
        let g = evolve_with(&f, &h, 1.0, &opts).unwrap();
        let e1 = expectation_symbol(&wigner_transform(&g), &h).unwrap();
        assert!(((g.mass() - f.mass()) / f.mass()).abs() < 1e-10);
        assert!((e1 - e0).abs() < 1e-6, "{e0} -> {e1}");
    }

    #[test]
    fn airy_evolution_is_unitary() {
        let eps = 1.0 / 16.0;
        let init = data("exp(-x^2)", "x");
        let grid = PeriodicGrid::new(-16.0, 16.0, 2048).unwrap();
        let h = builtin_symbol("airy_cubic", &SymbolParams::default()).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let g = evolve(&f, &h, 2.0).unwrap();
        assert!(((g.mass() - f.mass()) / f.mass()).abs() < 2e-10);
        // centre moves with group velocity ω'(1) = 1
        let centre: f64 = g
            .density()
            .iter()
            .enumerate()
            .map(|(j, v)| grid.x(j) * v)
            .sum::<f64>()
            / g.density().iter().sum::<f64>();
        assert!((centre - 2.0).abs() < 0.05, "{centre}");
    }

    #[test]
    fn non_separable_symbol_is_rejected() {
        let h = builtin_symbol("airy_variable", &SymbolParams::default()).unwrap();
        let grid = PeriodicGrid::new(-1.0, 1.0, 8).unwrap();
        let f = WaveField::new(grid, vec![Complex64::new(1.0, 0.0); 8], 0.1).unwrap();
        assert!(evolve(&f, &h, 1.0).is_err());
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let grid = PeriodicGrid::new(-1.0, 1.0, 16).unwrap();
        let f = WaveField::new(grid, vec![Complex64::new(0.0, 0.0); 16], 0.1).unwrap();
        let w = wigner_transform(&f);
        assert!(w.values.iter().all(|v| *v == 0.0));
        assert!(moment0(&w).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn moment_identity_and_realness() {
        let eps = 0.1;
        let init = data("exp(-x^2)*(1+0.5*sin(3*x))", "sin(x)");
        let grid = PeriodicGrid::new(-8.0, 8.0, 1024).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let w = wigner_transform(&f);
        for (m, d) in moment0(&w).iter().zip(f.density()) {
            assert!((m - d).abs() < 1e-8);
        }
        assert!((w.mass() - f.mass()).abs() < 1e-8);
        assert!(wigner_imaginary_residue(&f) < 1e-10 * f.mass());
    }

    #[test]
    fn gaussian_wigner_is_nonnegative() {
        let init = data("exp(-2*x^2)", "0.3*x");
        let grid = PeriodicGrid::new(-8.0, 8.0, 512).unwrap();
        let f = wkb_initial(&init, 0.5, &grid).unwrap();
        assert!(wigner_transform(&f).min() >= -1e-10);
    }

    #[test]
    fn husimi_of_interfering_bumps_is_nonnegative() {
        let eps = 0.05;
        let init = data("exp(-(x-1)^2*8) + exp(-(x+1)^2*8)", "0");
        let grid = PeriodicGrid::new(-4.0, 4.0, 512).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let w = wigner_transform(&f);
        assert!(w.min() < -1e-3, "interference should make w negative");
        let hu = husimi(&w);
        assert!(hu.min() >= -1e-9, "{}", hu.min());
        // ξ-moment of the Husimi function is the x-smoothed density
        let smooth = moment0(&hu);
        let dens = f.density();
        let n = grid.n;
        for i in (0..n).step_by(37) {
            let mut want = 0.0;
            let mut norm = 0.0;
            for j in 0..n {
                let mut d = grid.x(i) - grid.x(j);
                d -= grid.length() * (d / grid.length()).round();
                let g = (-d * d / eps).exp();
                want += g * dens[j];
                norm += g;
            }
            assert!((smooth[i] - want / norm).abs() < 1e-6);
        }
    }

    #[test]
    fn monokinetic_concentration() {
        let init = data("exp(-x^2)", "x^2/2");
        let outside = |eps: f64| {
            let grid =
                PeriodicGrid::with_max_spacing(-6.0, 6.0, resolving_spacing(&init, eps, -6.0, 6.0))
                    .unwrap();
            let f = wkb_initial(&init, eps, &grid).unwrap();
            let w = wigner_strided(&f, 16);
            let tube = eps.powf(0.4);
            expectation(&w, |x, xi| if (xi - x).abs() >= tube { 1.0 } else { 0.0 }).abs()
        };
        let (a, b) = (outside(1.0 / 32.0), outside(1.0 / 64.0));
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn plane_wave_momentum_expectation() {
        let eps = 1.0 / 32.0;
        let init = data("exp(-x^2)", "2*x");
        let grid = PeriodicGrid::new(-8.0, 8.0, 4096).unwrap();
        let f = wkb_initial(&init, eps, &grid).unwrap();
        let w = wigner_transform(&f);
        let p = expectation(&w, |_, xi| xi);
        assert!((p - 2.0 * f.mass()).abs() < eps);
        assert!((expectation(&w, |_, _| 1.0) - f.mass()).abs() < 1e-8);
    }
}
