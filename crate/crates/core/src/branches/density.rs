use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{BranchSearch, BranchSet};
use crate::error::{Error, Result};
use crate::flow::ray_state;
use crate::quad;
use crate::symbols::{AxisBox, HamiltonianSymbol, InitialData, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySample {
    pub x: Vec<f64>,
    pub t: f64,
    /// Σ_i n_i.
    pub n: f64,
    /// Per-branch terms n_I(z_i)/|Df_i|, in branch order.
    pub terms: Vec<f64>,
    pub count: usize,
    pub complete: bool,
}

/// Σ_i √n_i · exp(i S_i/ε). Phases carry no Maslov shifts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbValue {
    pub x: Vec<f64>,
    pub t: f64,
    pub eps: f64,
    pub re: f64,
    pub im: f64,
    pub branches: usize,
    pub maslov_shifts_omitted: bool,
}

impl WkbValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn regular(set: &BranchSet) -> Result<()> {
    if set.continuum || set.any_at_caustic() {
        return Err(Error::AtCaustic {
            x: set.x.clone(),
            t: set.t,
        });
    }
    Ok(())
}

/// |Df| below which [`BranchSearch::density_mass`] treats a branch as lying
/// on a caustic.
const MASS_CAUSTIC_TOL: f64 = 1e-13;

impl BranchSearch<'_> {
    /// Limiting energy density at (x, t); errors on a caustic.
    pub fn density(&self, x: &[f64], t: f64) -> Result<DensitySample> {
        let set = self.find(x, t)?;
        regular(&set)?;
        let terms: Vec<f64> = set.branches.iter().map(|b| b.n.unwrap_or(0.0)).collect();
        Ok(DensitySample {
            x: x.to_vec(),
            t,
            n: terms.iter().sum(),
            count: terms.len(),
            terms,
            complete: set.complete,
        })
    }

    pub fn wkb_superposition(&self, x: &[f64], t: f64, eps: f64) -> Result<WkbValue> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("ε must be positive, got {eps}")));
        }
        let set = self.find(x, t)?;
        regular(&set)?;
        let value: Complex64 = set
            .branches
            .iter()
            .map(|b| Complex64::from_polar(b.n.unwrap_or(0.0).sqrt(), b.s / eps))
            .sum();
        Ok(WkbValue {
            x: x.to_vec(),
            t,
            eps,
            re: value.re,
            im: value.im,
            branches: set.len(),
            maslov_shifts_omitted: true,
        })
    }

    /// ∫ Σ_i n_i(x, t) dx over `region`: the regular part of the limiting
    /// density. Quadrature nodes that land exactly on a caustic are nudged
    /// off it (the caustic set has measure zero).
    ///
    /// In one dimension the interval is first split where the footpoint map
    /// folds or kinks, and each piece is integrated through a change of
    /// variables flat to third order at both ends, which tames the
    /// |x − x_c|^(−1/2) and |x − x_c|^(−2/3) blow-up of n at folds and cusps.
    pub fn density_mass(&self, region: &AxisBox, t: f64) -> Result<f64> {
        region.validate("region")?;
        // n stays integrable up to the caustic, and near a cusp a visible
        // share of the mass sits where |Df| is far below the display
        // threshold, so only flag branches whose Df is numerically zero
        let fine = BranchSearch {
            hamiltonian: self.hamiltonian,
            initial: self.initial,
            xi_box: self.xi_box.clone(),
            tolerances: Tolerances {
                caustic: self.tolerances.caustic.min(MASS_CAUSTIC_TOL),
                ..self.tolerances
            },
            cells: self.cells,
            flow: self.flow.clone(),
        };
        let failure = RefCell::new(None);
        let eval = |x: &[f64]| -> f64 {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let mut p = x.to_vec();
            for _ in 0..4 {
                match fine.density(&p, t) {
                    Ok(s) => return s.n,
                    Err(Error::AtCaustic { .. }) => {
                        for v in p.iter_mut() {
                            *v += 1e-9 * (1.0 + v.abs());
                        }
                    }
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        return 0.0;
                    }
                }
            }
            *failure.borrow_mut() = Some(Error::AtCaustic { x: p, t });
            0.0
        };
        let total = if region.dim() == 1 {
            let (lo, hi) = (region.lo[0], region.hi[0]);
            let mut cuts = vec![lo];
            cuts.extend(self.singular_points(lo, hi, t)?);
            cuts.push(hi);
            cuts.windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    quad::integrate(
                        |u| {
                            let (phi, dphi) = smoothstep(u);
                            eval(&[a + (b - a) * phi]) * (b - a) * dphi
                        },
                        0.0,
                        1.0,
                        1e-10,
                        1e-10,
                        400,
                    )
                })
                .sum()
        } else {
            quad::integrate_box(eval, &region.lo, &region.hi)
        };
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }

    /// Positions in (lo, hi) where the footpoint map x0 ↦ x̂(t, x0) changes
    /// orientation or has a vanishing Jacobian: folds, cusps, foci and the
    /// images of kinks in ∇S_I.
    fn singular_points(&self, lo: f64, hi: f64, t: f64) -> Result<Vec<f64>> {
        const NODES: usize = 2049;
        let ray = |x0: f64| -> Result<Option<(f64, f64)>> {
            let r = ray_state(self.hamiltonian, self.initial, &[x0], t, &self.flow)?;
            Ok(r.flow.status.is_ok().then(|| (r.flow.point.x[0], r.det)))
        };
        let x0s: Vec<f64> = (0..NODES)
            .map(|i| lo + (hi - lo) * i as f64 / (NODES - 1) as f64)
            .collect();
        let rays = x0s
            .par_iter()
            .map(|&x0| ray(x0))
            .collect::<Result<Vec<_>>>()?;
        let scale = rays
            .iter()
            .flatten()
            .fold(0.0_f64, |m, r| m.max(r.1.abs()))
            .max(f64::MIN_POSITIVE);
        let near_zero = self.tolerances.caustic * scale;

        let mut points: Vec<f64> = Vec::new();
        let keep = |x: f64, points: &mut Vec<f64>| {
            if x > lo
                && x < hi
                && !points
                    .iter()
                    .any(|p| (p - x).abs() <= 1e-12 * (1.0 + x.abs()))
            {
                points.push(x);
            }
        };
        for i in 0..NODES - 1 {
            let (Some(a), Some(b)) = (rays[i], rays[i + 1]) else {
                continue;
            };
            if a.1 * b.1 < 0.0 {
                // orientation flip: bisect on the sign of the Jacobian
                let (mut p, mut q) = (x0s[i], x0s[i + 1]);
                let mut last = a;
                for _ in 0..60 {
                    let m = 0.5 * (p + q);
                    let Some(r) = ray(m)? else { break };
                    if r.1 * a.1 > 0.0 {
                        p = m;
                    } else {
                        q = m;
                    }
                    last = r;
                }
                keep(last.0, &mut points);
            }
        }
        for i in 1..NODES - 1 {
            let (Some(a), Some(b), Some(c)) = (rays[i - 1], rays[i], rays[i + 1]) else {
                continue;
            };
            if b.1.abs() > a.1.abs() || b.1.abs() > c.1.abs() || a.1 * c.1 < 0.0 {
                continue;
            }
            if points
                .iter()
                .any(|p| (p - b.0).abs() <= 1e-9 * (1.0 + b.0.abs()))
            {
                continue;
            }
            // golden-section search for a touching zero of the Jacobian
            let g = 0.5 * (5.0_f64.sqrt() - 1.0);
            let (mut p, mut q) = (x0s[i - 1], x0s[i + 1]);
            let mut best = b;
            for _ in 0..80 {
                let m1 = q - g * (q - p);
                let m2 = p + g * (q - p);
                let (Some(r1), Some(r2)) = (ray(m1)?, ray(m2)?) else {
                    break;
                };
                if r1.1.abs() <= r2.1.abs() {
                    q = m2;
                    if r1.1.abs() < best.1.abs() {
                        best = r1;
                    }
                } else {
                    p = m1;
                    if r2.1.abs() < best.1.abs() {
                        best = r2;
                    }
                }
                if q - p < 1e-13 * (1.0 + p.abs()) {
                    break;
                }
            }
            if best.1.abs() <= near_zero {
                keep(best.0, &mut points);
            }
        }
        points.sort_by(f64::total_cmp);
        Ok(points)
    }
}

/// φ(u) = 6u⁵ − 15u⁴ + 10u³ and φ'(u): a bijection of [0, 1] whose derivative
/// vanishes to second order at both ends.
fn smoothstep(u: f64) -> (f64, f64) {
    let u2 = u * u;
    (
        u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 * (1.0 - u) * (1.0 - u),
    )
}

pub fn density(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x: &[f64],
    t: f64,
    xi_box: &AxisBox,
    tol: &Tolerances,
) -> Result<DensitySample> {
    BranchSearch::new(h, initial, xi_box.clone(), *tol).density(x, t)
}

pub fn wkb_superposition(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    x: &[f64],
    t: f64,
    eps: f64,
    xi_box: &AxisBox,
    tol: &Tolerances,
) -> Result<WkbValue> {
    BranchSearch::new(h, initial, xi_box.clone(), *tol).wkb_superposition(x, t, eps)
}

pub fn density_mass(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    region: &AxisBox,
    t: f64,
    xi_box: &AxisBox,
    tol: &Tolerances,
) -> Result<f64> {
    BranchSearch::new(h, initial, xi_box.clone(), *tol).density_mass(region, t)
}
