use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::field::{hessian_or_fd, Field};
use super::HamiltonianSymbol;
use crate::error::{Error, Result};
use crate::quad;

/// Axis-aligned box `[lo_k, hi_k]` in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::InvalidScenario(format!("{what}: malformed bounds")));
        }
        for (a, b) in self.lo.iter().zip(&self.hi) {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::InvalidScenario(format!(
                    "{what}: empty or unbounded axis [{a}, {b}]"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// `n` equispaced nodes per axis (endpoints included), as a flat point list.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let n = n.max(2);
        let axis =
            |k: usize, i: usize| self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (n - 1) as f64;
        let total = n.pow(d as u32);
        (0..total)
            .map(|mut flat| {
                (0..d)
                    .map(|k| {
                        let i = flat % n;
                        flat /= n;
                        axis(k, i)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Position box plus the times at which the scenario is queried.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub x: AxisBox,
    pub times: Vec<f64>,
}

impl Region {
    pub fn max_abs_time(&self) -> f64 {
        self.times.iter().fold(0.0_f64, |m, t| m.max(t.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ode_rel: f64,
    pub ode_abs: f64,
    /// Acceptance threshold on |f_{x,t}(ξ)| for a branch root.
    pub root: f64,
    /// Relative dedupe radius for roots, scaled by 1 + |ξ|.
    pub dedupe: f64,
    /// |Df| below this marks a branch as lying on a caustic.
    pub caustic: f64,
    /// Concentrated mass above this classifies a focus as hot.
    pub mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode_rel: 1e-10,
            ode_abs: 1e-12,
            root: 1e-10,
            dedupe: 1e-6,
            caustic: 1e-6,
            mass: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("ode_rel", self.ode_rel),
            ("ode_abs", self.ode_abs),
            ("root", self.root),
            ("dedupe", self.dedupe),
            ("caustic", self.caustic),
            ("mass", self.mass),
        ];
        for (name, v) in named {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "tolerance `{name}` must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// WKB initial data: density n_I ≥ 0 and phase S_I.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub density: Field,
    pub phase: Field,
    /// ∫ n_I over the scenario region; filled in by [`Scenario::new`].
    pub mass: f64,
}

impl InitialData {
    pub fn new(density: Field, phase: Field) -> Self {
        Self {
            density,
            phase,
            mass: f64::NAN,
        }
    }

    pub fn dim(&self) -> usize {
        self.phase.dim()
    }

    pub fn n_i(&self, x: &[f64]) -> f64 {
        self.density.value(x)
    }

    pub fn s_i(&self, x: &[f64]) -> f64 {
        self.phase.value(x)
    }

    /// v_I = ∇S_I.
    pub fn grad_s_i(&self, x: &[f64]) -> Vec<f64> {
        self.phase.gradient(x)
    }

    pub fn hess_s_i(&self, x: &[f64]) -> DMatrix<f64> {
        hessian_or_fd(self.phase.as_ref(), x)
    }

    pub fn mass_over(&self, region: &AxisBox) -> f64 {
        quad::integrate_box(|x| self.density.value(x), &region.lo, &region.hi)
    }
}

/// Hamiltonian, initial data, query region and tolerances: one reproducible experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub hamiltonian: HamiltonianSymbol,
    pub initial: InitialData,
    pub region: Region,
    pub tolerances: Tolerances,
    pub xi_box: AxisBox,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        hamiltonian: HamiltonianSymbol,
        mut initial: InitialData,
        region: Region,
        tolerances: Tolerances,
        xi_box: AxisBox,
    ) -> Result<Self> {
        region.x.validate("region")?;
        xi_box.validate("xi_box")?;
        tolerances.validate()?;
        let d = hamiltonian.dim();
        if region.x.dim() != d
            || xi_box.dim() != d
            || initial.dim() != d
            || initial.density.dim() != d
        {
            return Err(Error::InvalidScenario(format!(
                "dimension mismatch: symbol d = {d}, region d = {}, xi_box d = {}, initial d = {}",
                region.x.dim(),
                xi_box.dim(),
                initial.dim()
            )));
        }
        if region.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidScenario("non-finite query time".into()));
        }
        initial.mass = initial.mass_over(&region.x);
        Ok(Self {
            name: name.into(),
            hamiltonian,
            initial,
            region,
            tolerances,
            xi_box,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Result<Self> {
        tolerances.validate()?;
        self.tolerances = tolerances;
        Ok(self)
    }
}
