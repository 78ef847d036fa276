//! Shipped scenarios: the worked examples (rarefaction, focus, both cusp
//! variants, harmonic oscillator) and the cubic counterexample to a global flow.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symbols::{HamiltonianDoc, InitialDoc, RegionDoc, ScenarioDoc, TolerancesDoc};

pub const PRESET_NAMES: &[&str] = &[
    "ex_1_1_rarefaction",
    "ex_1_2_focus",
    "ex_1_3_cusp_smooth",
    "ex_1_3_cusp_lipschitz",
    "harmonic_k",
    "appendix1_airy_k",
];

/// Normalized Gaussian, ∫ n_I = 1.
pub const GAUSSIAN: &str = "exp(-x^2)/sqrt(pi)";

/// Piecewise phase: x for x < 0, x − x²/2 on [0, 1], 0 for x > 1.
pub const LIPSCHITZ_PHASE: &str = "x*(1-step(x)) + (x - x^2/2)*step(x)*step(1-x)";

fn doc(
    name: &str,
    symbol: &str,
    phase: &str,
    region: (f64, f64),
    times: Vec<f64>,
    xi_box: (f64, f64),
) -> ScenarioDoc {
    ScenarioDoc {
        name: name.into(),
        dim: 1,
        hamiltonian: HamiltonianDoc {
            name: symbol.into(),
            potential: None,
            coefficient: None,
            expr: None,
        },
        initial: InitialDoc {
            density: GAUSSIAN.into(),
            phase: phase.into(),
        },
        region: RegionDoc {
            lo: vec![region.0],
            hi: vec![region.1],
        },
        times,
        tolerances: TolerancesDoc::default(),
        xi_box: RegionDoc {
            lo: vec![xi_box.0],
            hi: vec![xi_box.1],
        },
    }
}

pub fn preset(name: &str) -> Result<ScenarioDoc> {
    Ok(match name {
        "ex_1_1_rarefaction" => doc(
            name,
            "free_quadratic",
            "x^2/2",
            (-20.0, 20.0),
            vec![0.5, 1.0, 2.0],
            (-24.0, 24.0),
        ),
        "ex_1_2_focus" => doc(
            name,
            "free_quadratic",
            "-x^2/2",
            (-16.0, 16.0),
            vec![0.5, 1.0, 1.5, 2.0, 3.0],
            (-24.0, 24.0),
        ),
        "ex_1_3_cusp_smooth" => doc(
            name,
            "free_quadratic",
            "-ln(cosh(x))",
            (-10.0, 10.0),
            vec![0.5, 1.0, 2.0],
            (-2.0, 2.0),
        ),
        "ex_1_3_cusp_lipschitz" => doc(
            name,
            "free_quadratic",
            LIPSCHITZ_PHASE,
            (-8.0, 12.0),
            vec![0.5, 1.0, 2.0],
            (-3.0, 3.0),
        ),
        "harmonic_k" => doc(
            name,
            "harmonic_oscillator",
            "1*x",
            (-8.0, 8.0),
            vec![PI / 8.0, PI / 4.0, PI / 2.0, PI],
            (-24.0, 24.0),
        ),
        "appendix1_airy_k" => doc(
            name,
            "airy_variable",
            "1*x",
            (-8.0, 8.0),
            vec![0.25, 0.45],
            (-6.0, 6.0),
        ),
        other => return Err(Error::UnknownPreset(other.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_bit_identically() {
        for name in PRESET_NAMES {
            let d = preset(name).unwrap();
            let text = d.to_json().unwrap();
            let back = ScenarioDoc::from_json(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(back.to_json().unwrap(), text);
            for (a, b) in back.times.iter().zip(&d.times) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
            back.to_scenario().unwrap();
        }
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }
}
