//! Fluid form of the monokinetic regime.
//!
//! A monokinetic Wigner measure n(x,t)δ(ξ − v(x,t)) solves the Liouville
//! equation exactly when (n, v) solve the pressureless system
//!
//!   ∂_t n + ∂_x(n ∂_ξH(x,v)) = 0,
//!   ∂_t(nv) + ∂_x(∂_ξH(x,v) nv) + n ∂_xH(x,v) = 0.
//!
//! Nothing here time-steps these equations: fields are sampled (from closed
//! forms or from the branch reconstruction) and second-order central
//! differences measure how well they satisfy them. Grids are one-dimensional
//! in space.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::branches::BranchSearch;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::symbols::HamiltonianSymbol;

/// Uniform (x, t) grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceTimeGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub nt: usize,
}

impl SpaceTimeGrid {
    pub fn new(x_lo: f64, x_hi: f64, nx: usize, t_lo: f64, t_hi: f64, nt: usize) -> Result<Self> {
        let g = Self {
            x_lo,
            x_hi,
            nx,
            t_lo,
            t_hi,
            nt,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid with (approximately) spacing `h` on both axes.
    pub fn with_spacing(x_lo: f64, x_hi: f64, t_lo: f64, t_hi: f64, h: f64) -> Result<Self> {
        let nx = ((x_hi - x_lo) / h).round() as usize + 1;
        let nt = ((t_hi - t_lo) / h).round() as usize + 1;
        Self::new(x_lo, x_hi, nx, t_lo, t_hi, nt)
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 3 || self.nt < 3 {
            return Err(Error::GridTooSmall(format!(
                "need at least 3 nodes per axis, got nx = {}, nt = {}",
                self.nx, self.nt
            )));
        }
        if !(self.x_hi > self.x_lo && self.t_hi > self.t_lo) {
            return Err(Error::InvalidScenario(
                "grid spacings must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_hi - self.t_lo) / (self.nt - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_lo + self.dx() * i as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_lo + self.dt() * k as f64
    }

    fn index(&self, i: usize, k: usize) -> usize {
        k * self.nx + i
    }
}

/// Density and velocity sampled on a space-time grid (time-major layout).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluidField {
    pub grid: SpaceTimeGrid,
    pub n: Vec<f64>,
    pub v: Vec<f64>,
}

impl FluidField {
    pub fn new(grid: SpaceTimeGrid, n: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        let len = grid.nx * grid.nt;
        if n.len() != len || v.len() != len {
            return Err(Error::InvalidScenario(format!(
                "field has {} / {} values for a grid of {len} nodes",
                n.len(),
                v.len()
            )));
        }
        if let Some(bad) = n.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!(
                "negative or non-finite density {bad}"
            )));
        }
        Ok(Self { grid, n, v })
    }

    /// Sample closed-form fields `(x, t) ↦ (n, v)`.
    pub fn sample(grid: SpaceTimeGrid, f: impl Fn(f64, f64) -> (f64, f64) + Sync) -> Result<Self> {
        grid.validate()?;
        let (n, v): (Vec<f64>, Vec<f64>) = (0..grid.nx * grid.nt)
            .into_par_iter()
            .map(|j| f(grid.x(j % grid.nx), grid.t(j / grid.nx)))
            .unzip();
        Self::new(grid, n, v)
    }

    /// Reconstruct (n, v) from the branch search. Every node must carry
    /// exactly one branch (a caustic-free, single-phase region).
    pub fn from_branches(search: &BranchSearch, grid: SpaceTimeGrid) -> Result<Self> {
        grid.validate()?;
        let nodes: Vec<(f64, f64)> = (0..grid.nx * grid.nt)
            .into_par_iter()
            .map(|j| {
                let (x, t) = (grid.x(j % grid.nx), grid.t(j / grid.nx));
                let s = search.density(&[x], t)?;
                if s.count != 1 {
                    return Err(Error::Domain(format!(
                        "{} branches at (x, t) = ({x}, {t}); fluid fields need exactly one",
                        s.count
                    )));
                }
                let set = search.find(&[x], t)?;
                Ok((s.n, set.branches[0].v[0]))
            })
            .collect::<Result<_>>()?;
        let (n, v) = nodes.into_iter().unzip();
        Self::new(grid, n, v)
    }

    fn at(&self, values: &[f64], i: usize, k: usize) -> f64 {
        values[self.grid.index(i, k)]
    }
}

/// σ(v) with derivative; the test function of the generalized moment
/// equation.
#[derive(Clone)]
pub struct WeightFunction {
    pub label: String,
    sigma: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    grad_sigma: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Growth conditions at |ξ| → ∞ are not checked on bounded grids.
    pub admissibility_note: String,
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightFunction")
            .field("label", &self.label)
            .finish()
    }
}

const ADMISSIBILITY: &str = "growth bound of σ against 1 + λ(H) not checked (bounded grid)";

impl WeightFunction {
    pub fn new(
        label: impl Into<String>,
        sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        grad_sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            sigma: Arc::new(sigma),
            grad_sigma: Arc::new(grad_sigma),
            admissibility_note: ADMISSIBILITY.into(),
        }
    }

    /// σ ≡ 1.
    pub fn one() -> Self {
        Self::new("1", |_| 1.0, |_| 0.0)
    }

    /// σ(v) = v.
    pub fn velocity() -> Self {
        Self::new("v", |v| v, |_| 1.0)
    }

    /// σ from an expression in the variable `v`.
    pub fn parse(source: &str) -> Result<Self> {
        let e = Arc::new(Expr::parse(source, &["v"])?);
        let g = e.clone();
        Ok(Self::new(
            source,
            move |v| e.eval(&[v]),
            move |v| g.eval_jet(&[v]).grad[0],
        ))
    }

    pub fn sigma(&self, v: f64) -> f64 {
        (self.sigma)(v)
    }

    pub fn grad_sigma(&self, v: f64) -> f64 {
        (self.grad_sigma)(v)
    }
}

/// Values at the interior nodes (1..nx−1) × (1..nt−1), time-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualField {
    pub nx: usize,
    pub nt: usize,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl ResidualField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[k * self.nx + i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerResidual {
    pub mass: ResidualField,
    pub momentum: ResidualField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservativeFields {
    /// u = ∂_ξH(x, v) at every node.
    pub u: Vec<f64>,
    /// f = {∂_ξH, H}(x, v) at every node.
    pub f: Vec<f64>,
    /// ∂_t n + ∂_x(nu).
    pub mass: ResidualField,
    /// ∂_t(nu) + ∂_x(nu²) + nf.
    pub momentum: ResidualField,
    /// Second derivatives of H came from finite differences.
    pub fd_hessians: bool,
}

fn require_1d(h: &HamiltonianSymbol) -> Result<()> {
    if h.dim() != 1 {
        return Err(Error::Domain(format!(
            "fluid residuals are implemented for d = 1, symbol has d = {}",
            h.dim()
        )));
    }
    Ok(())
}

/// Per-node map through H.
fn node_map<T: Send>(
    field: &FluidField,
    f: impl Fn(f64, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let g = field.grid;
    (0..g.nx * g.nt)
        .into_par_iter()
        .map(|j| f(g.x(j % g.nx), field.v[j]))
        .collect()
}

/// Central-difference residual of ∂_t a + ∂_x b + c at interior nodes.
fn balance(field: &FluidField, a: &[f64], b: &[f64], c: Option<&[f64]>) -> ResidualField {
    let g = field.grid;
    let (dx, dt) = (g.dx(), g.dt());
    let (nx, nt) = (g.nx - 2, g.nt - 2);
    let mut values = Vec::with_capacity(nx * nt);
    for k in 1..g.nt - 1 {
        for i in 1..g.nx - 1 {
            let dta = (field.at(a, i, k + 1) - field.at(a, i, k - 1)) / (2.0 * dt);
            let dxb = (field.at(b, i + 1, k) - field.at(b, i - 1, k)) / (2.0 * dx);
            let src = c.map_or(0.0, |c| field.at(c, i, k));
            values.push(dta + dxb + src);
        }
    }
    ResidualField {
        nx,
        nt,
        x: (1..g.nx - 1).map(|i| g.x(i)).collect(),
        t: (1..g.nt - 1).map(|k| g.t(k)).collect(),
        values,
    }
}

/// Residuals of the pressureless system for a sampled (n, v).
pub fn euler_residual(h: &HamiltonianSymbol, field: &FluidField) -> Result<EulerResidual> {
    require_1d(h)?;
    let grads = node_map(field, |x, v| {
        Ok((h.grad_xi(&[x], &[v])?[0], h.grad_x(&[x], &[v])?[0]))
    })?;
    let len = field.n.len();
    let mut flux = Vec::with_capacity(len);
    let mut nv = Vec::with_capacity(len);
    let mut mom_flux = Vec::with_capacity(len);
    let mut force = Vec::with_capacity(len);
    for j in 0..len {
        let (hxi, hx) = grads[j];
        let (n, v) = (field.n[j], field.v[j]);
        flux.push(n * hxi);
        nv.push(n * v);
        mom_flux.push(n * v * hxi);
        force.push(n * hx);
    }
    Ok(EulerResidual {
        mass: balance(field, &field.n, &flux, None),
        momentum: balance(field, &nv, &mom_flux, Some(&force)),
    })
}

/// Residual of ∂_t(nσ(v)) + ∂_x(nσ(v)∂_ξH) + nσ'(v)∂_xH. With σ ≡ 1 this is
/// the mass residual of [`euler_residual`], with σ(v) = v the momentum one,
/// node for node.
pub fn generalized_moment_residual(
    h: &HamiltonianSymbol,
    field: &FluidField,
    w: &WeightFunction,
) -> Result<ResidualField> {
    require_1d(h)?;
    let grads = node_map(field, |x, v| {
        Ok((h.grad_xi(&[x], &[v])?[0], h.grad_x(&[x], &[v])?[0]))
    })?;
    let len = field.n.len();
    let mut a = Vec::with_capacity(len);
    let mut b = Vec::with_capacity(len);
    let mut c = Vec::with_capacity(len);
    for j in 0..len {
        let (hxi, hx) = grads[j];
        let (n, v) = (field.n[j], field.v[j]);
        let ns = n * w.sigma(v);
        a.push(ns);
        b.push(ns * hxi);
        c.push(n * w.grad_sigma(v) * hx);
    }
    Ok(balance(field, &a, &b, Some(&c)))
}

/// Generalized velocity u = ∂_ξH(x, v), modified force f = {∂_ξH, H}(x, v)
/// and the residuals of the gas-dynamics form ∂_t n + ∂_x(nu) = 0,
/// ∂_t(nu) + ∂_x(nu²) + nf = 0.
pub fn to_conservative(h: &HamiltonianSymbol, field: &FluidField) -> Result<ConservativeFields> {
    require_1d(h)?;
    let x_mid = [0.5 * (field.grid.x_lo + field.grid.x_hi)];
    let fd_hessians = !h.has_analytic_hessians(&x_mid, &[field.v[0]]);
    let uf = node_map(field, |x, v| {
        let (xs, vs) = ([x], [v]);
        let hxi = h.grad_xi(&xs, &vs)?[0];
        let hx = h.grad_x(&xs, &vs)?[0];
        let sd = h.second_derivatives(&xs, &vs)?;
        // f = H_ξξ H_x − H_ξ ∂_x H_ξ
        Ok((hxi, sd.hess_xi[(0, 0)] * hx - hxi * sd.hess_mixed[(0, 0)]))
    })?;
    let (u, f): (Vec<f64>, Vec<f64>) = uf.into_iter().unzip();
    let nu: Vec<f64> = field.n.iter().zip(&u).map(|(n, u)| n * u).collect();
    let nuu: Vec<f64> = nu.iter().zip(&u).map(|(a, u)| a * u).collect();
    let nf: Vec<f64> = field.n.iter().zip(&f).map(|(n, f)| n * f).collect();
    Ok(ConservativeFields {
        mass: balance(field, &field.n, &nu, None),
        momentum: balance(field, &nu, &nuu, Some(&nf)),
        u,
        f,
        fd_hessians,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, ExprField, SymbolParams};

    fn n_i(x: f64) -> f64 {
        (-x * x).exp() / std::f64::consts::PI.sqrt()
    }

    fn rarefaction(h: f64) -> FluidField {
        let grid = SpaceTimeGrid::with_spacing(-2.0, 2.0, 0.0, 1.0, h).unwrap();
        FluidField::sample(grid, |x, t| (n_i(x / (t + 1.0)) / (t + 1.0), x / (t + 1.0))).unwrap()
    }

    fn harmonic(h: f64) -> FluidField {
        let grid = SpaceTimeGrid::with_spacing(-2.0, 2.0, 0.0, 1.0, h).unwrap();
        FluidField::sample(grid, |x, t| {
            let (s, c) = t.sin_cos();
            (n_i((x - s) / c) / c, (1.0 - x * s) / c)
        })
        .unwrap()
    }

    fn free() -> HamiltonianSymbol {
        builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap()
    }

    fn ratio(coarse: f64, fine: f64) -> f64 {
        coarse / fine
    }

    #[test]
    fn constant_state_has_zero_residual() {
        let grid = SpaceTimeGrid::new(-1.0, 1.0, 9, 0.0, 1.0, 5).unwrap();
        let field = FluidField::sample(grid, |_, _| (1.0, 0.3)).unwrap();
        let r = euler_residual(&free(), &field).unwrap();
        assert!(r.mass.max_abs() < 1e-14 && r.momentum.max_abs() < 1e-14);
    }

    #[test]
    fn rarefaction_residual_is_second_order() {
        let (a, b) = (
            euler_residual(&free(), &rarefaction(1.0 / 64.0)).unwrap(),
            euler_residual(&free(), &rarefaction(1.0 / 128.0)).unwrap(),
        );
        let rm = ratio(a.mass.max_abs(), b.mass.max_abs());
        let rp = ratio(a.momentum.max_abs(), b.momentum.max_abs());
        assert!((3.5..=4.5).contains(&rm), "{rm}");
        assert!((3.5..=4.5).contains(&rp), "{rp}");
    }

    #[test]
    fn sigma_reductions_are_exact() {
        let h = builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap();
        let field = harmonic(1.0 / 32.0);
        let e = euler_residual(&h, &field).unwrap();
        let one = generalized_moment_residual(&h, &field, &WeightFunction::one()).unwrap();
        let vel = generalized_moment_residual(&h, &field, &WeightFunction::velocity()).unwrap();
        assert_eq!(one.values, e.mass.values);
        assert_eq!(vel.values, e.momentum.values);
    }

    #[test]
    fn kinetic_energy_weight_is_second_order() {
        let w = WeightFunction::parse("v^2/2").unwrap();
        let a = generalized_moment_residual(&free(), &rarefaction(1.0 / 64.0), &w).unwrap();
        let b = generalized_moment_residual(&free(), &rarefaction(1.0 / 128.0), &w).unwrap();
        let r = ratio(a.max_abs(), b.max_abs());
        assert!((3.5..=4.5).contains(&r), "{r}");
    }

    #[test]
    fn quadratic_symbol_conservative_form_is_identity() {
        let v = ExprField::parse("x^2/2", 1).unwrap().into_field();
        let h = builtin_symbol(
            "schrodinger_potential",
            &SymbolParams::dim(1).with_potential(v),
        )
        .unwrap();
        let field = harmonic(1.0 / 16.0);
        let c = to_conservative(&h, &field).unwrap();
        for j in 0..field.v.len() {
            assert_eq!(c.u[j], field.v[j]);
            let x = field.grid.x(j % field.grid.nx);
            assert!((c.f[j] - x).abs() < 1e-14);
        }
    }

    #[test]
    fn separable_force_is_dispersion_curvature_times_gradient() {
        let v = ExprField::parse("sin(x)", 1).unwrap().into_field();
        let h = builtin_symbol("bethe_salpeter", &SymbolParams::dim(1).with_potential(v)).unwrap();
        let grid = SpaceTimeGrid::new(-1.0, 1.0, 5, 0.0, 1.0, 3).unwrap();
        let field = FluidField::sample(grid, |x, _| (1.0, 0.5 + x)).unwrap();
        let c = to_conservative(&h, &field).unwrap();
        for j in 0..field.v.len() {
            let (x, v) = (grid.x(j % grid.nx), field.v[j]);
            let w = (v * v / 2.0 + 1.0).sqrt();
            assert!((c.u[j] - v / (2.0 * w)).abs() < 1e-14);
            let w2 = 1.0 / (2.0 * w) - v * v / (4.0 * w * w * w);
            assert!((c.f[j] - w2 * x.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_conservative_residual_is_second_order() {
        let h = builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap();
        let a = to_conservative(&h, &harmonic(1.0 / 64.0)).unwrap();
        let b = to_conservative(&h, &harmonic(1.0 / 128.0)).unwrap();
        let rm = ratio(a.mass.max_abs(), b.mass.max_abs());
        let rp = ratio(a.momentum.max_abs(), b.momentum.max_abs());
        assert!((3.5..=4.5).contains(&rm), "{rm}");
        assert!((3.5..=4.5).contains(&rp), "{rp}");
    }

    #[test]
    fn tiny_grid_is_rejected() {
        assert!(matches!(
            SpaceTimeGrid::new(0.0, 1.0, 2, 0.0, 1.0, 5),
            Err(Error::GridTooSmall(_))
        ));
    }
}
