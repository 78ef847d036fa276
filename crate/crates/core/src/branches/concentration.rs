use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{ray_state, FlowOptions, FlowStatus};
use crate::quad;
use crate::symbols::{AxisBox, HamiltonianSymbol, InitialData, Tolerances};

/// |x̂(t, x0) − y| below this counts as "x0 maps onto y".
pub const PREIMAGE_TOL: f64 = 1e-8;
/// Footpoint nodes per axis for the preimage scan (d = 1).
const NODES_1D: usize = 2049;
const NODES_ND: usize = 129;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Hot,
    Cool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// A whole interval of footpoints lands on y.
    Interval,
    /// An isolated footpoint (possibly a high-order zero).
    Isolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimagePiece {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub kind: PieceKind,
    /// ∫ n_I over the piece.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub y: Vec<f64>,
    pub t: f64,
    pub mu: f64,
    pub classification: Classification,
    pub preimage: Vec<PreimagePiece>,
    /// True for the one-dimensional interval algorithm; false for the
    /// grid heuristic used in higher dimensions.
    pub exact: bool,
    /// The preimage touches the footpoint box, so μ may be truncated.
    pub truncated: bool,
}

struct Preimage<'a> {
    h: &'a HamiltonianSymbol,
    initial: &'a InitialData,
    y: &'a [f64],
    t: f64,
    opts: FlowOptions,
}

impl Preimage<'_> {
    /// g(x0) = x̂(t, x0) − y.
    fn g(&self, x0: &[f64]) -> Result<Vec<f64>> {
        let r = ray_state(self.h, self.initial, x0, self.t, &self.opts)?;
        if let FlowStatus::BlownUp(ev) = r.flow.status {
            return Err(Error::BlowUp {
                t_event: ev.t_event,
                diagnostic: format!("ray from x0 = {x0:?}: {}", ev.diagnostic),
            });
        }
        Ok(r.flow
            .point
            .x
            .iter()
            .zip(self.y)
            .map(|(a, b)| a - b)
            .collect())
    }

    fn norm(&self, x0: &[f64]) -> Result<f64> {
        Ok(self.g(x0)?.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Move the boundary between `inside` and `outside` of {|g| < tol} to ~1e-13.
    fn refine(&self, mut inside: f64, mut outside: f64) -> Result<f64> {
        for _ in 0..80 {
            if (outside - inside).abs() <= 1e-13 * (1.0 + inside.abs()) {
                break;
            }
            let m = 0.5 * (inside + outside);
            if self.norm(&[m])? < PREIMAGE_TOL {
                inside = m;
            } else {
                outside = m;
            }
        }
        Ok(inside)
    }

    /// Does g vanish on the whole of [a, b], or only at an isolated
    /// (flat) zero? Interior points of a genuine interval sit at rounding level.
    fn is_interval(&self, a: f64, b: f64) -> Result<bool> {
        let samples = 64;
        let flat = (1..=samples)
            .map(|k| a + (b - a) * k as f64 / (samples + 1) as f64)
            .map(|x| self.norm(&[x]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|v| *v < 1e-2 * PREIMAGE_TOL)
            .count();
        Ok(flat as f64 >= 0.9 * samples as f64)
    }
}

/// Concentrated mass μ = ∫_{x̂⁻¹(y, t)} n_I at the point (y, t).
pub fn concentration(
    h: &HamiltonianSymbol,
    initial: &InitialData,
    y: &[f64],
    t: f64,
    x0_box: &AxisBox,
    tol: &Tolerances,
) -> Result<ConcentrationReport> {
    x0_box.validate("x0_box")?;
    if y.len() != h.dim() || x0_box.dim() != h.dim() {
        return Err(Error::Domain(format!("dimension mismatch for y = {y:?}")));
    }
    let pre = Preimage {
        h,
        initial,
        y,
        t,
        opts: FlowOptions::tight(),
    };
    let (preimage, exact, truncated) = if h.dim() == 1 {
        let (p, tr) = preimage_1d(&pre, initial, x0_box)?;
        (p, true, tr)
    } else {
        let (p, tr) = preimage_nd(&pre, initial, x0_box)?;
        (p, false, tr)
    };
    let mu: f64 = preimage.iter().map(|p| p.mass).sum();
    Ok(ConcentrationReport {
        y: y.to_vec(),
        t,
        mu,
        classification: if mu > tol.mass {
            Classification::Hot
        } else {
            Classification::Cool
        },
        preimage,
        exact,
        truncated,
    })
}

fn preimage_1d(
    pre: &Preimage,
    initial: &InitialData,
    x0_box: &AxisBox,
) -> Result<(Vec<PreimagePiece>, bool)> {
    let (lo, hi) = (x0_box.lo[0], x0_box.hi[0]);
    let n = NODES_1D;
    let nodes: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let g: Vec<f64> = nodes
        .par_iter()
        .map(|&x| pre.g(&[x]).map(|v| v[0]))
        .collect::<Result<_>>()?;
    let small: Vec<bool> = g.iter().map(|v| v.abs() < PREIMAGE_TOL).collect();

    let mut pieces = Vec::new();
    let mut truncated = false;
    let mut i = 0;
    while i < n {
        if !small[i] {
            if i + 1 < n && !small[i + 1] && g[i] * g[i + 1] < 0.0 {
                let z = bisect_sign(pre, nodes[i], g[i], nodes[i + 1])?;
                pieces.push(isolated(z));
            }
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && small[i + 1] {
            i += 1;
        }
        let end = i;
        i += 1;
        let a = if start == 0 {
            truncated = true;
            nodes[0]
        } else {
            pre.refine(nodes[start], nodes[start - 1])?
        };
        let b = if end == n - 1 {
            truncated = true;
            nodes[n - 1]
        } else {
            pre.refine(nodes[end], nodes[end + 1])?
        };
        if end > start && pre.is_interval(a, b)? {
            let mass = quad::integrate(|x| initial.n_i(&[x]), a, b, 1e-14, 1e-12, 2000);
            pieces.push(PreimagePiece {
                lo: vec![a],
                hi: vec![b],
                kind: PieceKind::Interval,
                mass,
            });
        } else {
            let (z, _) = (start..=end)
                .map(|k| (nodes[k], g[k].abs()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .expect("non-empty run");
            pieces.push(isolated(z));
        }
    }
    Ok((pieces, truncated))
}

fn isolated(z: f64) -> PreimagePiece {
    PreimagePiece {
        lo: vec![z],
        hi: vec![z],
        kind: PieceKind::Isolated,
        mass: 0.0,
    }
}

fn bisect_sign(pre: &Preimage, mut a: f64, ga: f64, mut b: f64) -> Result<f64> {
    for _ in 0..80 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = pre.g(&[m])?[0];
        if gm == 0.0 {
            return Ok(m);
        }
        if gm * ga < 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Grid heuristic for d ≥ 2: footpoint cells whose centre maps within
/// tolerance of y, and whose neighbours do too, contribute n_I · cell volume.
fn preimage_nd(
    pre: &Preimage,
    initial: &InitialData,
    x0_box: &AxisBox,
) -> Result<(Vec<PreimagePiece>, bool)> {
    let d = x0_box.dim();
    let n = NODES_ND;
    let nodes = x0_box.grid(n);
    let small: Vec<bool> = nodes
        .par_iter()
        .map(|x| pre.norm(x).map(|v| v < PREIMAGE_TOL))
        .collect::<Result<_>>()?;
    let widths: Vec<f64> = (0..d)
        .map(|k| (x0_box.hi[k] - x0_box.lo[k]) / (n - 1) as f64)
        .collect();
    let volume: f64 = widths.iter().product();
    let mut pieces = Vec::new();
    let mut truncated = false;
    for (k, x) in nodes.iter().enumerate() {
        if !small[k] {
            continue;
        }
        let mut idx = k;
        let mut has_neighbour = false;
        let mut on_edge = false;
        let mut stride = 1;
        for _ in 0..d {
            let i = idx % n;
            idx /= n;
            if i == 0 || i == n - 1 {
                on_edge = true;
            }
            if (i > 0 && small[k - stride]) || (i + 1 < n && small[k + stride]) {
                has_neighbour = true;
            }
            stride *= n;
        }
        if !has_neighbour {
            pieces.push(PreimagePiece {
                lo: x.clone(),
                hi: x.clone(),
                kind: PieceKind::Isolated,
                mass: 0.0,
            });
            continue;
        }
        truncated |= on_edge;
        let lo: Vec<f64> = x.iter().zip(&widths).map(|(c, w)| c - 0.5 * w).collect();
        let hi: Vec<f64> = x.iter().zip(&widths).map(|(c, w)| c + 0.5 * w).collect();
        pieces.push(PreimagePiece {
            lo,
            hi,
            kind: PieceKind::Interval,
            mass: initial.n_i(x) * volume,
        });
    }
    Ok((pieces, truncated))
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

    #[test]
    fn hot_focus_collects_all_mass() {
        let init = data("exp(-x^2)/sqrt(pi)", "-x^2/2");
        let r = concentration(
            &free(),
            &init,
            &[0.0],
            1.0,
            &AxisBox::interval(-8.0, 8.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(r.classification, Classification::Hot);
        assert!((r.mu - 1.0).abs() < 1e-10, "{}", r.mu);
        assert!(r.truncated);
    }

    #[test]
    fn lipschitz_cusp_focus_mass() {
        let init = data(
            "exp(-x^2)/sqrt(pi)",
            "x*(1-step(x)) + (x - x^2/2)*step(x)*step(1-x)",
        );
        let r = concentration(
            &free(),
            &init,
            &[1.0],
            1.0,
            &AxisBox::interval(-8.0, 8.0),
            &Tolerances::default(),
        )
        .unwrap();
        // ∫₀¹ e^{−x²}/√π dx = erf(1)/2
        let expected = 0.421_350_396_474_857_4;
        assert_eq!(r.classification, Classification::Hot);
        assert!((r.mu - expected).abs() < 1e-7, "{}", r.mu);
        assert!(!r.truncated);
    }

    #[test]
    fn smooth_cusp_focus_is_cool() {
        let init = data("exp(-x^2)/sqrt(pi)", "-ln(cosh(x))");
        let r = concentration(
            &free(),
            &init,
            &[0.0],
            1.0,
            &AxisBox::interval(-8.0, 8.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(r.classification, Classification::Cool);
        assert_eq!(r.mu, 0.0);
        assert!(r.preimage.iter().all(|p| p.kind == PieceKind::Isolated));
    }

    #[test]
    fn regular_point_has_isolated_preimages() {
        let init = data("exp(-x^2)", "x^2/2");
        let r = concentration(
            &free(),
            &init,
            &[1.0],
            1.0,
            &AxisBox::interval(-4.0, 4.0),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(r.mu, 0.0);
        assert_eq!(r.preimage.len(), 1);
        assert!((r.preimage[0].lo[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn blow_up_inside_the_box_is_an_error() {
        let h = builtin_symbol("airy_variable", &SymbolParams::default()).unwrap();
        let init = data("exp(-x^2)", "x");
        let err = concentration(
            &h,
            &init,
            &[0.0],
            0.6,
            &AxisBox::interval(-1.0, 1.0),
            &Tolerances::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }
}
