//! Multivalued solution at a point (x, t).
//!
//! The branch set K(x, t) is the zero set of
//! f_{x,t}(ξ) = ξ̃(−t, x, ξ) − ∇S_I(x̃(−t, x, ξ)). Every zero v_i carries a
//! footpoint z_i = x̃(−t, x, v_i), a density n_i = n_I(z_i)/|Df_{x,t}(v_i)| and
//! a phase S_i obtained by integrating the action along the forward ray from
//! z_i. Phases carry no Maslov shifts.

mod caustics;
mod concentration;
mod density;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{flow, ray_state, FlowOptions, FlowStatus, PhasePoint};
use crate::symbols::{AxisBox, HamiltonianSymbol, InitialData, Scenario, Tolerances};

pub use caustics::{caustic_scan, CausticGrid, CausticPoint};
pub use concentration::{
    concentration, Classification, ConcentrationReport, PieceKind, PreimagePiece, PREIMAGE_TOL,
};
pub use density::{density, density_mass, wkb_superposition, DensitySample, WkbValue};

/// Default number of coarse-scan cells per ξ-axis.
pub const DEFAULT_CELLS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    /// v_i = ∇_x S_i(x, t).
    pub v: Vec<f64>,
    #[serde(rename = "S")]
    pub s: f64,
    /// n_i; `None` when the branch sits on a caustic.
    pub n: Option<f64>,
    #[serde(rename = "Df")]
    pub df: f64,
    /// Backward footpoint x̃(−t, x, v_i).
    pub z: Vec<f64>,
    /// |f_{x,t}(v_i)|.
    pub residual: f64,
    pub at_caustic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSet {
    pub x: Vec<f64>,
    pub t: f64,
    pub branches: Vec<BranchPoint>,
    /// False when roots may lie outside the search box or f vanishes on a
    /// whole cell (a continuum of momenta, as at a hot focus).
    pub complete: bool,
    /// f vanishes on a whole ξ-cell: the point sits on a hot focus.
    pub continuum: bool,
    pub diagnostics: Vec<String>,
}

impl BranchSet {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn velocities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.v[0]).collect()
    }

    pub fn any_at_caustic(&self) -> bool {
        self.branches.iter().any(|b| b.at_caustic)
    }

    /// Smallest |Df| over all branches.
    pub fn min_abs_df(&self) -> Option<f64> {
        self.branches
            .iter()
            .map(|b| b.df.abs())
            .min_by(f64::total_cmp)
    }
}

/// Defect f_{x,t}(ξ) with its ξ-Jacobian.
#[derive(Debug, Clone)]
pub struct Defect {
    pub f: Vec<f64>,
    /// ∂f/∂ξ.
    pub jacobian: DMatrix<f64>,
    /// det ∂f/∂ξ.
    pub df: f64,
    /// Backward footpoint x̃(−t, x, ξ).
    pub z: Vec<f64>,
}

impl Defect {
    pub fn norm(&self) -> f64 {
        self.f.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Evaluate f_{x,t}(ξ). `Ok(None)` when the backward flow blows up (the
/// momentum is unreachable from t = 0).
pub fn f_xt(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x: &[f64],
    t: f64,
    xi: &[f64],
    opts: &FlowOptions,
) -> Result<Option<Defect>> {
    let back = match flow(h, &PhasePoint::new(x.to_vec(), xi.to_vec()), -t, opts) {
        Ok(s) => s,
        Err(Error::Domain(_)) | Err(Error::NonFinite(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !back.status.is_ok() {
        return Ok(None);
    }
    let z = back.point.x.clone();
    let grad = initial.grad_s_i(&z);
    let f: Vec<f64> = back
        .point
        .xi
        .iter()
        .zip(&grad)
        .map(|(a, b)| a - b)
        .collect();
    let jacobian = back.dxi_dxi() - initial.hess_s_i(&z) * back.dx_dxi();
    let df = jacobian.determinant();
    if f.iter().any(|v| !v.is_finite()) || !df.is_finite() {
        return Ok(None);
    }
    Ok(Some(Defect { f, jacobian, df, z }))
}

/// Branch search configuration bound to one scenario's symbol and data.
#[derive(Debug, Clone)]
pub struct BranchSearch<'a> {
    pub hamiltonian: &'a HamiltonianSymbol,
    pub initial: &'a InitialData,
    pub xi_box: AxisBox,
    pub tolerances: Tolerances,
    pub cells: usize,
    pub flow: FlowOptions,
}

/// Enumerate K(x, t) inside `xi_box`.
pub fn find_branches(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x: &[f64],
    t: f64,
    xi_box: &AxisBox,
    tol: &Tolerances,
) -> Result<BranchSet> {
    BranchSearch::new(h, initial, xi_box.clone(), *tol).find(x, t)
}

struct ScanNotes {
    complete: bool,
    continuum: bool,
    diagnostics: Vec<String>,
}

struct Root {
    xi: Vec<f64>,
    defect: Defect,
    /// Found at an extremum of f: a double root, hence on a caustic.
    tangential: bool,
}

impl<'a> BranchSearch<'a> {
    pub fn new(
        h: &'a HamiltonianSymbol,
        initial: &'a InitialData,
        xi_box: AxisBox,
        tolerances: Tolerances,
    ) -> Self {
        Self {
            hamiltonian: h,
            initial,
            xi_box,
            tolerances,
            cells: DEFAULT_CELLS,
            flow: FlowOptions::from_tolerances(&tolerances),
        }
    }

    pub fn for_scenario(s: &'a Scenario) -> Self {
        Self::new(&s.hamiltonian, &s.initial, s.xi_box.clone(), s.tolerances)
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells.max(2);
        self
    }

    pub fn f_xt(&self, x: &[f64], t: f64, xi: &[f64]) -> Result<Option<Defect>> {
        if let Some(r) = self.hamiltonian.xi_exclusion_radius() {
            if xi.iter().map(|v| v * v).sum::<f64>().sqrt() <= r {
                return Ok(None);
            }
        }
        f_xt(self.hamiltonian, self.initial, x, t, xi, &self.flow)
    }

    pub fn find(&self, x: &[f64], t: f64) -> Result<BranchSet> {
        let d = self.hamiltonian.dim();
        if x.len() != d {
            return Err(Error::Domain(format!(
                "point has dimension {} but d = {d}",
                x.len()
            )));
        }
        self.xi_box.validate("xi_box")?;
        let mut notes = ScanNotes {
            complete: true,
            continuum: false,
            diagnostics: Vec::new(),
        };
        let roots = if d == 1 {
            self.scan_1d(x, t, &mut notes)?
        } else {
            self.scan_nd(x, t, &mut notes)?
        };
        let roots = self.dedupe(roots);
        let branches = roots
            .into_iter()
            .map(|r| self.complete_branch(x, t, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(BranchSet {
            x: x.to_vec(),
            t,
            branches,
            complete: notes.complete,
            continuum: notes.continuum,
            diagnostics: notes.diagnostics,
        })
    }

    fn complete_branch(&self, x: &[f64], t: f64, root: Root) -> Result<BranchPoint> {
        let Root {
            xi,
            defect,
            tangential,
        } = root;
        let at_caustic = tangential || defect.df.abs() < self.tolerances.caustic;
        let forward = ray_state(self.hamiltonian, self.initial, &defect.z, t, &self.flow)?;
        let n = (!at_caustic).then(|| self.initial.n_i(&defect.z) / defect.df.abs());
        debug_assert!(
            !forward.flow.status.is_ok()
                || forward
                    .flow
                    .point
                    .x
                    .iter()
                    .zip(x)
                    .all(|(a, b)| (a - b).abs() < 1e-6 * (1.0 + b.abs()))
        );
        Ok(BranchPoint {
            v: xi,
            s: forward.s,
            n,
            df: defect.df,
            z: defect.z.clone(),
            residual: defect.norm(),
            at_caustic,
        })
    }

    fn dedupe(&self, mut roots: Vec<Root>) -> Vec<Root> {
        roots.sort_by(|a, b| {
            a.xi.iter()
                .zip(&b.xi)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut kept: Vec<Root> = Vec::new();
        for r in roots {
            let scale = 1.0 + r.xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let radius = self.tolerances.dedupe * scale;
            if let Some(existing) = kept.iter_mut().find(|k| {
                k.xi.iter()
                    .zip(&r.xi)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    <= radius
            }) {
                if r.defect.norm() < existing.defect.norm() {
                    *existing = r;
                }
            } else {
                kept.push(r);
            }
        }
        kept
    }

    fn scan_1d(&self, x: &[f64], t: f64, notes: &mut ScanNotes) -> Result<Vec<Root>> {
        let (lo, hi) = (self.xi_box.lo[0], self.xi_box.hi[0]);
        let n = self.cells;
        let nodes: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        let values: Vec<Option<Defect>> = nodes
            .par_iter()
            .map(|&xi| self.f_xt(x, t, &[xi]))
            .collect::<Result<_>>()?;
        let tol = self.tolerances.root;

        for &end in &[0, n] {
            if let Some(d) = &values[end] {
                if d.f[0].abs() < 10.0 * tol {
                    notes.complete = false;
                    notes.diagnostics.push(format!(
                        "|f| small on the search-box boundary at ξ = {}",
                        nodes[end]
                    ));
                }
            }
        }

        let mut roots = Vec::new();
        for i in 0..n {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let (Some(fa), Some(fb)) = (&values[i], &values[i + 1]) else {
                continue;
            };
            if fa.f[0].abs() <= tol && fb.f[0].abs() <= tol {
                if let Some(fm) = self.f_xt(x, t, &[0.5 * (a + b)])? {
                    if fm.f[0].abs() <= tol {
                        notes.complete = false;
                        if !notes.continuum {
                            notes.continuum = true;
                            notes.diagnostics.push(format!(
                                "f vanishes identically near ξ ∈ [{a}, {b}]: continuum of momenta"
                            ));
                        }
                        continue;
                    }
                }
            }
            // split at an interior extremum of f (sign change of Df)
            let mut pieces = vec![(a, fa.clone()), (b, fb.clone())];
            if fa.df * fb.df < 0.0 {
                if let Some((c, fc)) = self.extremum_1d(x, t, (a, fa), (b, fb))? {
                    if fc.f[0].abs() <= tol {
                        roots.push(Root {
                            xi: vec![c],
                            defect: fc.clone(),
                            tangential: true,
                        });
                    }
                    pieces.insert(1, (c, fc));
                }
            }
            if fa.f[0] == 0.0 {
                roots.push(Root {
                    xi: vec![a],
                    defect: fa.clone(),
                    tangential: false,
                });
            }
            for w in pieces.windows(2) {
                let (p, fp) = &w[0];
                let (q, fq) = &w[1];
                if fp.f[0] * fq.f[0] < 0.0 {
                    match self.bracketed_newton(x, t, (*p, fp.clone()), (*q, fq.clone()))? {
                        Some(r) => roots.push(r),
                        None => notes.diagnostics.push(format!(
                            "sign change in [{p}, {q}] did not converge to a root (jump in ∇S_I?)"
                        )),
                    }
                }
            }
        }
        if let Some(last) = &values[n] {
            if last.f[0] == 0.0 {
                roots.push(Root {
                    xi: vec![nodes[n]],
                    defect: last.clone(),
                    tangential: false,
                });
            }
        }
        Ok(roots)
    }

    /// Locate a sign change of Df inside [a, b] by bisection.
    fn extremum_1d(
        &self,
        x: &[f64],
        t: f64,
        (mut a, fa): (f64, &Defect),
        (mut b, _): (f64, &Defect),
    ) -> Result<Option<(f64, Defect)>> {
        let mut df_a = fa.df;
        let mut best: Option<(f64, Defect)> = None;
        for _ in 0..60 {
            if b - a <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
            let m = 0.5 * (a + b);
            let Some(fm) = self.f_xt(x, t, &[m])? else {
                return Ok(None);
            };
            if fm.df * df_a <= 0.0 {
                b = m;
            } else {
                a = m;
                df_a = fm.df;
            }
            best = Some((m, fm));
        }
        Ok(best)
    }

    /// Safeguarded Newton iteration on a bracket with a sign change.
    fn bracketed_newton(
        &self,
        x: &[f64],
        t: f64,
        (mut a, mut fa): (f64, Defect),
        (mut b, _): (f64, Defect),
    ) -> Result<Option<Root>> {
        let tol = self.tolerances.root;
        let mut c = 0.5 * (a + b);
        for _ in 0..200 {
            let Some(fc) = self.f_xt(x, t, &[c])? else {
                return Ok(None);
            };
            let width = b - a;
            if fc.f[0] == 0.0 || (fc.f[0].abs() <= tol && width <= 1e-12 * (1.0 + c.abs())) {
                return Ok(Some(Root {
                    xi: vec![c],
                    defect: fc,
                    tangential: false,
                }));
            }
            if fc.f[0] * fa.f[0] < 0.0 {
                b = c;
            } else {
                a = c;
                fa = fc.clone();
            }
            let newton = c - fc.f[0] / fc.df;
            let next = if fc.df != 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if fc.f[0].abs() <= tol && (next - c).abs() <= 1e-13 * (1.0 + c.abs()) {
                return Ok(Some(Root {
                    xi: vec![c],
                    defect: fc,
                    tangential: false,
                }));
            }
            if b - a <= 1e-15 * (1.0 + c.abs()) {
                return Ok((fc.f[0].abs() <= tol).then_some(Root {
                    xi: vec![c],
                    defect: fc,
                    tangential: false,
                }));
            }
            c = next;
        }
        Ok(None)
    }

    fn scan_nd(&self, x: &[f64], t: f64, notes: &mut ScanNotes) -> Result<Vec<Root>> {
        let d = self.hamiltonian.dim();
        let per_axis = self.cells + 1;
        let nodes = self.xi_box.grid(per_axis);
        let values: Vec<Option<Defect>> = nodes
            .par_iter()
            .map(|xi| self.f_xt(x, t, xi))
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = values
            .iter()
            .map(|v| v.as_ref().map_or(f64::INFINITY, Defect::norm))
            .collect();
        let index = |mut flat: usize| -> Vec<usize> {
            (0..d)
                .map(|_| {
                    let i = flat % per_axis;
                    flat /= per_axis;
                    i
                })
                .collect()
        };
        let flat = |idx: &[usize]| idx.iter().rev().fold(0, |acc, &i| acc * per_axis + i);
        let mut seeds = Vec::new();
        for (k, norm) in norms.iter().enumerate() {
            if !norm.is_finite() {
                continue;
            }
            let idx = index(k);
            let mut is_min = true;
            let mut on_boundary = false;
            for axis in 0..d {
                if idx[axis] == 0 || idx[axis] + 1 == per_axis {
                    on_boundary = true;
                }
                for delta in [-1i64, 1] {
                    let j = idx[axis] as i64 + delta;
                    if j < 0 || j >= per_axis as i64 {
                        continue;
                    }
                    let mut nb = idx.clone();
                    nb[axis] = j as usize;
                    if norms[flat(&nb)] < *norm {
                        is_min = false;
                    }
                }
            }
            if is_min {
                if on_boundary && *norm < 10.0 * self.tolerances.root {
                    notes.complete = false;
                    notes.diagnostics.push(format!(
                        "|f| small on the search-box boundary at ξ = {:?}",
                        nodes[k]
                    ));
                }
                seeds.push(nodes[k].clone());
            }
        }
        let mut roots = Vec::new();
        for seed in seeds {
            match self.damped_newton(x, t, seed.clone())? {
                Some(r) if self.xi_box.contains(&r.xi) => roots.push(r),
                Some(_) => {}
                None => notes
                    .diagnostics
                    .push(format!("Newton did not converge from seed {seed:?}")),
            }
        }
        Ok(roots)
    }

    fn damped_newton(&self, x: &[f64], t: f64, mut xi: Vec<f64>) -> Result<Option<Root>> {
        let tol = self.tolerances.root;
        let Some(mut cur) = self.f_xt(x, t, &xi)? else {
            return Ok(None);
        };
        for _ in 0..100 {
            let norm = cur.norm();
            let Some(inv) = cur.jacobian.clone().try_inverse() else {
                return Ok((norm <= tol).then_some(Root {
                    xi,
                    defect: cur,
                    tangential: false,
                }));
            };
            let step = -(inv * DVector::from_column_slice(&cur.f));
            let step_norm = step.norm();
            if norm <= tol
                && step_norm <= 1e-12 * (1.0 + xi.iter().map(|v| v * v).sum::<f64>().sqrt())
            {
                return Ok(Some(Root {
                    xi,
                    defect: cur,
                    tangential: false,
                }));
            }
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let trial: Vec<f64> = xi
                    .iter()
                    .zip(step.iter())
                    .map(|(a, s)| a + lambda * s)
                    .collect();
                if let Some(ft) = self.f_xt(x, t, &trial)? {
                    if ft.norm() < norm || ft.norm() <= tol {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((trial, ft)) => {
                    xi = trial;
                    cur = ft;
                }
                None => {
                    return Ok((norm <= tol).then_some(Root {
                        xi,
                        defect: cur,
                        tangential: false,
                    }))
                }
            }
        }
        let ok = cur.norm() <= tol;
        Ok(ok.then_some(Root {
            xi,
            defect: cur,
            tangential: false,
        }))
    }
}

/// Status of the backward flow from (x, ξ) over −t, for diagnostics.
pub fn backward_status(
    h: &HamiltonianSymbol,
    x: &[f64],
    t: f64,
    xi: &[f64],
    opts: &FlowOptions,
) -> Result<FlowStatus> {
    Ok(flow(h, &PhasePoint::new(x.to_vec(), xi.to_vec()), -t, opts)?.status)
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

    const LIPSCHITZ: &str = "x*(1-step(x)) + (x - x^2/2)*step(x)*step(1-x)";

    #[test]
    fn defect_of_free_rarefaction() {
        let init = data("exp(-x^2)", "x^2/2");
        for (x, t, xi) in [(1.0, 1.0, 0.3), (-2.0, 0.5, 1.7), (0.4, 0.0, -0.2)] {
            let d = f_xt(&free(), &init, &[x], t, &[xi], &FlowOptions::default())
                .unwrap()
                .unwrap();
            assert!((d.f[0] - (xi * (1.0 + t) - x)).abs() < 1e-12);
            assert!((d.df - (1.0 + t)).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_defect_vanishes_on_closed_form_velocity() {
        let h = builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap();
        let init = data("exp(-x^2)", "x");
        let (x, t) = (0.7_f64, 0.6_f64);
        let v = (1.0 - x * t.sin()) / t.cos();
        let d = f_xt(&h, &init, &[x], t, &[v], &FlowOptions::default())
            .unwrap()
            .unwrap();
        assert!(d.f[0].abs() < 1e-8);
    }

    #[test]
    fn rarefaction_single_branch() {
        let init = data("exp(-x^2)", "x^2/2");
        let set = find_branches(
            &free(),
            &init,
            &[1.0],
            1.0,
            &AxisBox::interval(-4.0, 4.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(set.len(), 1);
        let b = &set.branches[0];
        assert!((b.v[0] - 0.5).abs() < 1e-10);
        assert!((b.s - 0.25).abs() < 1e-10);
        assert!((b.df - 2.0).abs() < 1e-10);
        assert!((b.n.unwrap() - (-0.25_f64).exp() / 2.0).abs() < 1e-10);
        assert!(set.complete && !set.continuum);
    }

    #[test]
    fn zero_time_reproduces_the_datum() {
        let init = data("exp(-x^2)", "sin(x)");
        let set = find_branches(
            &free(),
            &init,
            &[0.3],
            0.0,
            &AxisBox::interval(-3.0, 3.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(set.len(), 1);
        let b = &set.branches[0];
        assert!((b.v[0] - 0.3_f64.cos()).abs() < 1e-10);
        assert!((b.s - 0.3_f64.sin()).abs() < 1e-12);
        assert!((b.df - 1.0).abs() < 1e-12);
        assert!((b.n.unwrap() - (-0.09_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_cusp_has_three_branches() {
        let init = data("exp(-x^2)", LIPSCHITZ);
        let set = find_branches(
            &free(),
            &init,
            &[1.5],
            2.0,
            &AxisBox::interval(-3.0, 3.0),
            &Tolerances::default(),
        )
        .unwrap();
        let mut v = set.velocities();
        v.sort_by(f64::total_cmp);
        assert_eq!(v.len(), 3, "{set:?}");
        for (got, want) in v.iter().zip([0.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        // the branch entering from the left has S = x − t/2
        let left = set
            .branches
            .iter()
            .find(|b| (b.v[0] - 1.0).abs() < 1e-6)
            .unwrap();
        assert!((left.s - 0.5).abs() < 1e-9);
    }

    #[test]
    fn hot_focus_reports_a_continuum() {
        let init = data("exp(-x^2)", "-x^2/2");
        let set = find_branches(
            &free(),
            &init,
            &[0.0],
            1.0,
            &AxisBox::interval(-3.0, 3.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(set.continuum && !set.complete);
    }

    #[test]
    fn roots_on_the_box_edge_mark_the_set_incomplete() {
        let init = data("exp(-x^2)", "x^2/2");
        let set = find_branches(
            &free(),
            &init,
            &[4.0],
            1.0,
            &AxisBox::interval(-2.0, 2.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!set.complete);
    }

    #[test]
    fn two_dimensional_rarefaction() {
        let h = builtin_symbol("free_quadratic", &SymbolParams::dim(2)).unwrap();
        let init = InitialData::new(
            ExprField::parse("exp(-x1^2-x2^2)", 2).unwrap().into_field(),
            ExprField::parse("(x1^2+x2^2)/2", 2).unwrap().into_field(),
        );
        let xi_box = AxisBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]);
        let search = BranchSearch::new(&h, &init, xi_box, Tolerances::default()).with_cells(16);
        let set = search.find(&[1.0, -0.5], 1.0).unwrap();
        assert_eq!(set.len(), 1);
        assert!((set.branches[0].v[0] - 0.5).abs() < 1e-9);
        assert!((set.branches[0].v[1] + 0.25).abs() < 1e-9);
        assert!((set.branches[0].df - 4.0).abs() < 1e-9);
    }
}
