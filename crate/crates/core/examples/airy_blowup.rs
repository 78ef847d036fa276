//! H = −xξ³: with ξ(0) = k the momentum solves ξ' = ξ³ and escapes to
//! infinity at t = 1/(2k²). Before that the phase stays single-valued.
//!
//!     cargo run --release --example airy_blowup

use caustica::branches::BranchSearch;
use caustica::cli::preset;
use caustica::flow::{ray, FlowOptions, FlowStatus};
use caustica::symbols::validate_scenario;

fn main() -> caustica::Result<()> {
    let s = preset("appendix1_airy_k")?.to_scenario()?;
    let k = 1.0_f64;

    for x0 in [-1.0, 0.5, 2.0] {
        let r = ray(
            &s.hamiltonian,
            &s.initial,
            &[x0],
            0.6,
            &FlowOptions::default(),
        )?;
        match r.status {
            FlowStatus::BlownUp(ev) => println!(
                "x0 = {x0:+.1}: blew up at t = {:.9} (expected {:.9}): {}",
                ev.t_event,
                1.0 / (2.0 * k * k),
                ev.diagnostic
            ),
            FlowStatus::Ok => println!("x0 = {x0:+.1}: reached t = 0.6"),
        }
    }

    let search = BranchSearch::for_scenario(&s);
    let t = 0.25;
    for x in [-1.0, 0.5, 1.5] {
        let b = &search.find(&[x], t)?.branches[0];
        let exact = k * x / (1.0 - 2.0 * k * k * t).sqrt();
        println!(
            "S({x:+.1}, {t}) = {:+.12}, k x/√(1 − 2k²t) = {exact:+.12}",
            b.s
        );
    }

    let report = validate_scenario(&s)?;
    println!(
        "global flow: {}, first blow-up seen at {:?}",
        report.global_flow(),
        report.first_blowup()
    );
    for o in report.outcomes() {
        println!(
            "  [{}] {}: {}",
            if o.passed { "ok" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    Ok(())
}
