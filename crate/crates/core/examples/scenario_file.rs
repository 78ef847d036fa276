//! Scenario documents: a custom symbol written as an expression, checked
//! against the standing assumptions, traced and reconstructed.
//!
//!     cargo run --release --example scenario_file

use caustica::branches::BranchSearch;
use caustica::flow::ray_state;
use caustica::flow::FlowOptions;
use caustica::symbols::{validate_scenario, ScenarioDoc};

const DOC: &str = r#"{
  "name": "anharmonic",
  "dim": 1,
  "hamiltonian": { "name": "custom", "expr": "xi^2/2 + x^4/4" },
  "initial": { "n_I": "exp(-x^2)/sqrt(pi)", "S_I": "0*x" },
  "region": { "lo": [-3.0], "hi": [3.0] },
  "times": [0.25],
  "tolerances": { "root": 1e-10 },
  "xi_box": { "lo": [-12.0], "hi": [12.0] }
}"#;

fn main() -> caustica::Result<()> {
    let doc = ScenarioDoc::from_json(DOC)?;
    let s = doc.to_scenario()?;
    println!(
        "{} with H = {}; ∫ n_I = {:.12}",
        s.name,
        s.hamiltonian.label(),
        s.initial.mass
    );

    let report = validate_scenario(&s)?;
    for o in report.outcomes() {
        println!(
            "  [{}] {}: {}",
            if o.passed { "ok" } else { "FAIL" },
            o.name,
            o.detail
        );
    }

    let opts = FlowOptions::from_tolerances(&s.tolerances);
    for x0 in [0.5, 1.0, 1.5] {
        let r = ray_state(&s.hamiltonian, &s.initial, &[x0], 0.5, &opts)?;
        let e0 = s.hamiltonian.h(&[x0], &[0.0])?;
        let e1 = s.hamiltonian.h(&r.flow.point.x, &r.flow.point.xi)?;
        println!(
            "ray from {x0}: x̂ = {:+.8}, ξ̂ = {:+.8}, J = {:.6}, energy drift {:.1e}",
            r.flow.point.x[0],
            r.flow.point.xi[0],
            r.jacobian,
            (e1 - e0).abs()
        );
    }

    let search = BranchSearch::for_scenario(&s);
    for &t in &s.region.times {
        for x in [0.0, 0.75, 1.5] {
            let d = search.density(&[x], t)?;
            println!("n({x}, {t}) = {:.10} from {} branch(es)", d.n, d.count);
        }
    }
    println!("{}", doc.to_json()?);
    Ok(())
}
