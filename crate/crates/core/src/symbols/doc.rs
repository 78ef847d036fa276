//! JSON scenario documents.
//!
//! ```json
//! {
//!   "name": "ex_1_1_rarefaction",
//!   "dim": 1,
//!   "hamiltonian": { "name": "free_quadratic" },
//!   "initial": { "n_I": "exp(-x^2)/sqrt(pi)", "S_I": "x^2/2" },
//!   "region": { "lo": [-8.0], "hi": [8.0] },
//!   "times": [0.5, 1.0, 2.0],
//!   "tolerances": { "root": 1e-10 },
//!   "xi_box": { "lo": [-10.0], "hi": [10.0] }
//! }
//! ```
//!
//! `hamiltonian.name` is a builtin symbol name or `"custom"`, in which case
//! `expr` holds H in the variables `x`, `xi` (or `x1..xd`, `xi1..xid`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::builtin::{builtin_symbol, SymbolParams};
use super::field::ExprField;
use super::scenario::{AxisBox, InitialData, Region, Scenario, Tolerances};
use super::{ExprHamiltonian, HamiltonianSymbol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDoc {
    pub name: String,
    /// V(x) for `schrodinger_potential`, `bethe_salpeter` and `free_quadratic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// a(x) for `eikonal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<String>,
    /// H(x, ξ) for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDoc {
    #[serde(rename = "n_I")]
    pub density: String,
    #[serde(rename = "S_I")]
    pub phase: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TolerancesDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dedupe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caustic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

impl TolerancesDoc {
    pub fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            ode_rel: self.ode_rel.unwrap_or(d.ode_rel),
            ode_abs: self.ode_abs.unwrap_or(d.ode_abs),
            root: self.root.unwrap_or(d.root),
            dedupe: self.dedupe.unwrap_or(d.dedupe),
            caustic: self.caustic.unwrap_or(d.caustic),
            mass: self.mass.unwrap_or(d.mass),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub name: String,
    pub dim: usize,
    pub hamiltonian: HamiltonianDoc,
    pub initial: InitialDoc,
    pub region: RegionDoc,
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerances: TolerancesDoc,
    pub xi_box: RegionDoc,
}

impl ScenarioDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn symbol(&self) -> Result<HamiltonianSymbol> {
        let h = &self.hamiltonian;
        if h.name == "custom" {
            let src = h.expr.as_deref().ok_or_else(|| Error::MissingParameter {
                symbol: "custom".into(),
                param: "expr".into(),
            })?;
            return Ok(HamiltonianSymbol::new(ExprHamiltonian::parse(
                src, self.dim,
            )?));
        }
        let mut params = SymbolParams::dim(self.dim);
        if let Some(v) = &h.potential {
            params.potential = Some(ExprField::parse(v, self.dim)?.into_field());
        }
        if let Some(a) = &h.coefficient {
            params.coefficient = Some(ExprField::parse(a, self.dim)?.into_field());
        }
        builtin_symbol(&h.name, &params)
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.dim == 0 {
            return Err(Error::InvalidScenario("dim must be positive".into()));
        }
        let hamiltonian = self.symbol()?;
        let initial = InitialData::new(
            ExprField::parse(&self.initial.density, self.dim)?.into_field(),
            ExprField::parse(&self.initial.phase, self.dim)?.into_field(),
        );
        let region = Region {
            x: AxisBox::new(self.region.lo.clone(), self.region.hi.clone()),
            times: self.times.clone(),
        };
        Scenario::new(
            self.name.clone(),
            hamiltonian,
            initial,
            region,
            self.tolerances.resolve(),
            AxisBox::new(self.xi_box.lo.clone(), self.xi_box.hi.clone()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "name": "demo",
        "dim": 1,
        "hamiltonian": { "name": "schrodinger_potential", "potential": "x^2/2" },
        "initial": { "n_I": "exp(-x^2)/sqrt(pi)", "S_I": "x" },
        "region": { "lo": [-6.0], "hi": [6.0] },
        "times": [0.5],
        "tolerances": { "root": 1e-9 },
        "xi_box": { "lo": [-4.0], "hi": [4.0] }
    }"#;

    #[test]
    fn parses_and_builds() {
        let doc = ScenarioDoc::from_json(DOC).unwrap();
        let s = doc.to_scenario().unwrap();
        assert_eq!(s.tolerances.root, 1e-9);
        assert_eq!(s.tolerances.ode_rel, Tolerances::default().ode_rel);
        assert!((s.initial.mass - 1.0).abs() < 1e-12);
        assert_eq!(s.hamiltonian.h(&[1.0], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn rejects_zero_root_tolerance() {
        let mut doc = ScenarioDoc::from_json(DOC).unwrap();
        doc.tolerances.root = Some(0.0);
        assert!(matches!(doc.to_scenario(), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn rejects_empty_xi_box() {
        let mut doc = ScenarioDoc::from_json(DOC).unwrap();
        doc.xi_box.hi = vec![-4.0];
        assert!(matches!(doc.to_scenario(), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn custom_symbol_requires_expression() {
        let mut doc = ScenarioDoc::from_json(DOC).unwrap();
        doc.hamiltonian = HamiltonianDoc {
            name: "custom".into(),
            potential: None,
            coefficient: None,
            expr: None,
        };
        assert!(doc.to_scenario().is_err());
        doc.hamiltonian.expr = Some("xi^2/2 + cos(x)".into());
        let s = doc.to_scenario().unwrap();
        assert_eq!(s.hamiltonian.grad_x(&[0.0], &[1.0]).unwrap(), vec![0.0]);
    }
}
