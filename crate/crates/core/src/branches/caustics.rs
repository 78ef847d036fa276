use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BranchSearch;
use crate::error::{Error, Result};
use crate::flow::{flow, FlowOptions, PhasePoint};
use crate::symbols::{AxisBox, HamiltonianSymbol, InitialData, Tolerances};

/// Footpoint box and time window swept by [`caustic_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticGrid {
    pub footpoints: AxisBox,
    pub t0: f64,
    pub t1: f64,
    /// Footpoints per axis.
    pub nx: usize,
    /// Time cells.
    pub nt: usize,
}

impl CausticGrid {
    pub fn new(footpoints: AxisBox, t0: f64, t1: f64) -> Self {
        Self {
            footpoints,
            t0,
            t1,
            nx: 201,
            nt: 300,
        }
    }

    fn validate(&self) -> Result<()> {
        self.footpoints.validate("footpoint box")?;
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::InvalidScenario(format!(
                "caustic time window [{}, {}] is empty",
                self.t0, self.t1
            )));
        }
        if self.nx < 2 || self.nt < 1 {
            return Err(Error::GridTooSmall(format!(
                "nx = {}, nt = {}",
                self.nx, self.nt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausticPoint {
    pub x: Vec<f64>,
    pub t: f64,
    /// Footpoint of the first ray found to focus here.
    pub x0: Vec<f64>,
    /// Index of the branch of K(x, t) whose Df vanishes, when the branch set
    /// is discrete there (it is not at a hot focus).
    pub branch: Option<usize>,
    /// Number of footpoints whose rays focus at this point.
    pub rays: usize,
}

/// Ray state tracked while marching a footpoint through time.
#[derive(Clone)]
struct Marker {
    point: PhasePoint,
    /// ∂(x̂, ξ̂)/∂x0, 2d × d.
    tangent: DMatrix<f64>,
    t: f64,
}

impl Marker {
    fn det(&self) -> f64 {
        let d = self.point.dim();
        self.tangent.rows(0, d).into_owned().determinant()
    }

    fn advance(
        &self,
        h: &HamiltonianSymbol,
        dt: f64,
        opts: &FlowOptions,
    ) -> Result<Option<Marker>> {
        let state = flow(h, &self.point, dt, opts)?;
        if !state.status.is_ok() {
            return Ok(None);
        }
        Ok(Some(Marker {
            tangent: &state.jac * &self.tangent,
            point: state.point,
            t: self.t + dt,
        }))
    }
}

fn start(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x0: &[f64],
    t0: f64,
    opts: &FlowOptions,
) -> Result<Option<Marker>> {
    let d = x0.len();
    let mut tangent = DMatrix::zeros(2 * d, d);
    tangent.rows_mut(0, d).fill_with_identity();
    tangent.rows_mut(d, d).copy_from(&initial.hess_s_i(x0));
    let m = Marker {
        point: PhasePoint::new(x0.to_vec(), initial.grad_s_i(x0)),
        tangent,
        t: 0.0,
    };
    if t0 == 0.0 {
        return Ok(Some(m));
    }
    m.advance(h, t0, opts)
}

/// Sign changes of det ∂x̂/∂x0 along one ray, refined in t by bisection.
fn focal_times(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x0: &[f64],
    grid: &CausticGrid,
    opts: &FlowOptions,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let dt = (grid.t1 - grid.t0) / grid.nt as f64;
    let Some(mut cur) = start(h, initial, x0, grid.t0, opts)? else {
        return Ok(Vec::new());
    };
    let mut hits = Vec::new();
    if cur.det() == 0.0 {
        hits.push((cur.point.x.clone(), cur.t));
    }
    for _ in 0..grid.nt {
        let Some(next) = cur.advance(h, dt, opts)? else {
            break;
        };
        let (da, db) = (cur.det(), next.det());
        if db == 0.0 {
            hits.push((next.point.x.clone(), next.t));
        } else if da * db < 0.0 {
            let mut lo = cur.clone();
            let mut hi_t = next.t;
            let mut best = next.clone();
            for _ in 0..80 {
                let half = 0.5 * (hi_t - lo.t);
                if half.abs() <= 1e-13 * (1.0 + lo.t.abs()) {
                    break;
                }
                let Some(mid) = lo.advance(h, half, opts)? else {
                    break;
                };
                if mid.det() * lo.det() <= 0.0 {
                    hi_t = mid.t;
                    best = mid;
                } else {
                    lo = mid;
                }
            }
            hits.push((best.point.x.clone(), best.t));
        }
        cur = next;
    }
    Ok(hits)
}

impl BranchSearch<'_> {
    /// Caustic points reached by rays from footpoints in the grid box: the
    /// zeros of the ray Jacobian, which are exactly the points where some
    /// branch has Df = 0. Nearby hits are merged.
    pub fn caustic_scan(&self, grid: &CausticGrid) -> Result<Vec<CausticPoint>> {
        grid.validate()?;
        let footpoints = grid.footpoints.grid(grid.nx);
        let per_ray: Vec<Vec<(Vec<f64>, f64)>> = footpoints
            .par_iter()
            .map(|x0| focal_times(self.hamiltonian, self.initial, x0, grid, &self.flow))
            .collect::<Result<_>>()?;

        let mut points: Vec<CausticPoint> = Vec::new();
        for (x0, hits) in footpoints.iter().zip(per_ray) {
            for (x, t) in hits {
                let radius =
                    self.tolerances.caustic * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
                let close = |p: &CausticPoint| {
                    let dx =
                        p.x.iter()
                            .zip(&x)
                            .map(|(a, b)| (a - b).powi(2))
                            .sum::<f64>();
                    (dx + (p.t - t).powi(2)).sqrt() <= radius
                };
                match points.iter_mut().find(|p| close(p)) {
                    Some(p) => p.rays += 1,
                    None => points.push(CausticPoint {
                        x,
                        t,
                        x0: x0.clone(),
                        branch: None,
                        rays: 1,
                    }),
                }
            }
        }
        for p in points.iter_mut() {
            p.branch = self.vanishing_branch(p)?;
        }
        Ok(points)
    }

    fn vanishing_branch(&self, p: &CausticPoint) -> Result<Option<usize>> {
        let set = self.find(&p.x, p.t)?;
        if set.continuum {
            return Ok(None);
        }
        Ok(set
            .branches
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da: f64 = a.z.iter().zip(&p.x0).map(|(u, v)| (u - v).powi(2)).sum();
                let db: f64 = b.z.iter().zip(&p.x0).map(|(u, v)| (u - v).powi(2)).sum();
                da.total_cmp(&db)
            })
            .map(|(i, _)| i))
    }
}

pub fn caustic_scan(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    grid: &CausticGrid,
    xi_box: &AxisBox,
    tol: &Tolerances,
) -> Result<Vec<CausticPoint>> {
    BranchSearch::new(h, initial, xi_box.clone(), *tol).caustic_scan(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{builtin_symbol, ExprField, SymbolParams};
    use std::f64::consts::FRAC_PI_2;

    fn data(n: &str, s: &str) -> InitialData {
        InitialData::new(
            ExprField::parse(n, 1).unwrap().into_field(),
            ExprField::parse(s, 1).unwrap().into_field(),
        )
    }

    fn free() -> HamiltonianSymbol {
        builtin_symbol("free_quadratic", &SymbolParams::dim(1)).unwrap()
    }

    #[test]
    fn rarefaction_has_no_caustic() {
        let init = data("exp(-x^2)", "x^2/2");
        let grid = CausticGrid::new(AxisBox::interval(-4.0, 4.0), 0.0, 3.0);
        let pts = caustic_scan(
            &free(),
            &init,
            &grid,
            &AxisBox::interval(-4.0, 4.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn focus_is_a_single_point() {
        let init = data("exp(-x^2)", "-x^2/2");
        let mut grid = CausticGrid::new(AxisBox::interval(-4.0, 4.0), 0.0, 3.0);
        grid.nt = 7;
        let pts = caustic_scan(
            &free(),
            &init,
            &grid,
            &AxisBox::interval(-6.0, 6.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(pts.len(), 1, "{pts:?}");
        assert!(pts[0].x[0].abs() < 1e-9 && (pts[0].t - 1.0).abs() < 1e-9);
        assert_eq!(pts[0].rays, 201);
        assert_eq!(pts[0].branch, None);
    }

    #[test]
    fn harmonic_foci() {
        let h = builtin_symbol("harmonic_oscillator", &SymbolParams::dim(1)).unwrap();
        let init = data("exp(-x^2)", "x");
        let mut grid = CausticGrid::new(AxisBox::interval(-3.0, 3.0), 0.0, 5.0);
        grid.nx = 31;
        let pts = caustic_scan(
            &h,
            &init,
            &grid,
            &AxisBox::interval(-5.0, 5.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!((pts[0].x[0] - 1.0).abs() < 1e-7 && (pts[0].t - FRAC_PI_2).abs() < 1e-7);
        assert!((pts[1].x[0] + 1.0).abs() < 1e-7 && (pts[1].t - 3.0 * FRAC_PI_2).abs() < 1e-7);
    }

    #[test]
    fn fold_caustic_has_a_vanishing_branch() {
        let init = data("exp(-x^2)", "-ln(cosh(x))");
        let mut grid = CausticGrid::new(AxisBox::interval(0.5, 0.5001), 0.0, 3.0);
        grid.nx = 2;
        let pts = caustic_scan(
            &free(),
            &init,
            &grid,
            &AxisBox::interval(-3.0, 3.0),
            &Tolerances::default(),
        )
        .unwrap();
        let c = 0.5_f64.cosh().powi(2);
        let p = pts.iter().find(|p| p.x0[0] == 0.5).unwrap();
        assert!((p.t - c).abs() < 1e-8);
        assert!(p.branch.is_some());
    }
}
