use serde::Serialize;

use super::field::ScalarField;
use super::scenario::Scenario;
use crate::error::Result;
use crate::flow::{flow, FlowOptions, FlowStatus, PhasePoint};

const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCheck {
    pub name: String,
    pub samples: usize,
    pub max_rel_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowProbe {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub t: f64,
    pub blown_up_at: Option<f64>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Empirical check of the standing assumptions on a scenario. Soft failures
/// are recorded, never raised.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub scenario: String,
    pub derivative_checks: Vec<DerivativeCheck>,
    pub density_samples: usize,
    pub density_min: f64,
    pub flow_probes: Vec<FlowProbe>,
    /// Assumptions with no computational counterpart.
    pub unchecked: Vec<String>,
}

impl ValidationReport {
    pub fn density_nonnegative(&self) -> bool {
        self.density_min >= 0.0
    }

    pub fn global_flow(&self) -> bool {
        self.flow_probes.iter().all(|p| p.blown_up_at.is_none())
    }

    /// Earliest blow-up time seen by any probe.
    pub fn first_blowup(&self) -> Option<f64> {
        self.flow_probes
            .iter()
            .filter_map(|p| p.blown_up_at)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
    }

    pub fn outcomes(&self) -> Vec<CheckOutcome> {
        let mut out: Vec<CheckOutcome> = self
            .derivative_checks
            .iter()
            .map(|c| CheckOutcome {
                name: c.name.clone(),
                passed: c.passed,
                detail: format!(
                    "max relative error {:.3e} over {} samples",
                    c.max_rel_error, c.samples
                ),
            })
            .collect();
        out.push(CheckOutcome {
            name: "n_I >= 0".into(),
            passed: self.density_nonnegative(),
            detail: format!(
                "min {:.3e} over {} samples",
                self.density_min, self.density_samples
            ),
        });
        out.push(CheckOutcome {
            name: "global flow".into(),
            passed: self.global_flow(),
            detail: match self.first_blowup() {
                Some(t) => format!("finite-time blow-up near t = {t:.6}"),
                None => format!("{} probes completed", self.flow_probes.len()),
            },
        });
        out
    }

    pub fn passed(&self) -> bool {
        self.outcomes().iter().all(|o| o.passed)
    }
}

/// Deterministic xorshift sampler for validation points.
struct Sampler(u64);

impl Sampler {
    fn next_unit(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_box(&mut self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        lo.iter()
            .zip(hi)
            .map(|(a, b)| a + (b - a) * self.next_unit())
            .collect()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn central(f: impl Fn(&[f64]) -> f64, at: &[f64], k: usize) -> f64 {
    let mut p = at.to_vec();
    p[k] = at[k] + FD_STEP;
    let fp = f(&p);
    p[k] = at[k] - FD_STEP;
    let fm = f(&p);
    (fp - fm) / (2.0 * FD_STEP)
}

fn field_check(name: &str, field: &dyn ScalarField, points: &[Vec<f64>]) -> DerivativeCheck {
    let mut worst = 0.0_f64;
    for p in points {
        let g = field.gradient(p);
        for k in 0..p.len() {
            worst = worst.max(rel_err(g[k], central(|q| field.value(q), p, k)));
        }
    }
    DerivativeCheck {
        name: name.into(),
        samples: points.len(),
        max_rel_error: worst,
        passed: worst <= FD_REL_TOL,
    }
}

/// Sample the scenario's symbol, initial data and flow.
pub fn validate_scenario(s: &Scenario) -> Result<ValidationReport> {
    s.tolerances.validate()?;
    s.region.x.validate("region")?;
    s.xi_box.validate("xi_box")?;

    let h = &s.hamiltonian;
    let d = s.dim();
    let mut rng = Sampler(0x9E37_79B9_7F4A_7C15);
    let exclusion = h.xi_exclusion_radius().unwrap_or(0.0);

    let mut xs = Vec::new();
    let mut phase_points = Vec::new();
    while phase_points.len() < 40 {
        let x = rng.in_box(&s.region.x.lo, &s.region.x.hi);
        let xi = rng.in_box(&s.xi_box.lo, &s.xi_box.hi);
        if xi.iter().map(|v| v * v).sum::<f64>().sqrt() <= 10.0 * exclusion.max(1e-3)
            && exclusion > 0.0
        {
            continue;
        }
        xs.push(x.clone());
        phase_points.push((x, xi));
    }

    let mut sym_x = 0.0_f64;
    let mut sym_xi = 0.0_f64;
    let mut hess_sym = 0.0_f64;
    for (x, xi) in &phase_points {
        let gx = h.grad_x(x, xi)?;
        let gxi = h.grad_xi(x, xi)?;
        for k in 0..d {
            let fd_x = central(|q| h.h(q, xi).unwrap_or(f64::NAN), x, k);
            let fd_xi = central(|q| h.h(x, q).unwrap_or(f64::NAN), xi, k);
            sym_x = sym_x.max(rel_err(gx[k], fd_x));
            sym_xi = sym_xi.max(rel_err(gxi[k], fd_xi));
        }
        let sd = h.second_derivatives(x, xi)?;
        hess_sym = hess_sym.max((&sd.hess_xi - sd.hess_xi.transpose()).abs().max());
    }
    let mut checks = vec![
        DerivativeCheck {
            name: "grad_x H".into(),
            samples: phase_points.len(),
            max_rel_error: sym_x,
            passed: sym_x <= FD_REL_TOL,
        },
        DerivativeCheck {
            name: "grad_xi H".into(),
            samples: phase_points.len(),
            max_rel_error: sym_xi,
            passed: sym_xi <= FD_REL_TOL,
        },
        DerivativeCheck {
            name: "hess_xi H symmetric".into(),
            samples: phase_points.len(),
            max_rel_error: hess_sym,
            passed: hess_sym <= 1e-12,
        },
    ];
    checks.push(field_check("grad S_I", s.initial.phase.as_ref(), &xs));

    let density_min = xs
        .iter()
        .map(|x| s.initial.n_i(x))
        .fold(f64::INFINITY, f64::min);

    let t_probe = s.region.max_abs_time().max(1.0);
    let opts = FlowOptions::from_tolerances(&s.tolerances);
    let mut probes = Vec::new();
    for x in xs.iter().take(8) {
        let xi = s.initial.grad_s_i(x);
        probes.push(probe(s, x, &xi, t_probe, &opts)?);
    }
    for (x, xi) in phase_points.iter().take(8) {
        probes.push(probe(s, x, xi, -t_probe, &opts)?);
    }

    Ok(ValidationReport {
        scenario: s.name.clone(),
        derivative_checks: checks,
        density_samples: xs.len(),
        density_min,
        flow_probes: probes,
        unchecked: vec!["essential self-adjointness of the Weyl-quantized operator".into()],
    })
}

fn probe(s: &Scenario, x: &[f64], xi: &[f64], t: f64, opts: &FlowOptions) -> Result<FlowProbe> {
    let state = flow(
        &s.hamiltonian,
        &PhasePoint::new(x.to_vec(), xi.to_vec()),
        t,
        opts,
    )?;
    let (blown_up_at, diagnostic) = match state.status {
        FlowStatus::Ok => (None, None),
        FlowStatus::BlownUp(ev) => (Some(ev.t_event), Some(ev.diagnostic)),
    };
    Ok(FlowProbe {
        x: x.to_vec(),
        xi: xi.to_vec(),
        t,
        blown_up_at,
        diagnostic,
    })
}
