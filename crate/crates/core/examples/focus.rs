//! Converging phase −x²/2: every ray passes through (0, 1), carrying the
//! whole mass into a point.
//!
//!     cargo run --release --example focus

use caustica::branches::{concentration, BranchSearch, CausticGrid};
use caustica::cli::preset;

fn main() -> caustica::Result<()> {
    let s = preset("ex_1_2_focus")?.to_scenario()?;
    let search = BranchSearch::for_scenario(&s);

    for p in search.caustic_scan(&CausticGrid::new(s.region.x.clone(), 0.0, 3.0))? {
        println!(
            "caustic at x = {:+.9}, t = {:.9}; {} rays focus here, branch index {:?}",
            p.x[0], p.t, p.rays, p.branch
        );
    }

    let report = concentration(
        &s.hamiltonian,
        &s.initial,
        &[0.0],
        1.0,
        &s.region.x,
        &s.tolerances,
    )?;
    println!(
        "μ(0, 1) = {:.10} ({:?}), preimage [{:.3}, {:.3}], truncated: {}",
        report.mu,
        report.classification,
        report.preimage[0].lo[0],
        report.preimage[0].hi[0],
        report.truncated
    );

    let at_focus = search.find(&[0.0], 1.0)?;
    println!(
        "branch set at the focus: continuum = {}, complete = {}",
        at_focus.continuum, at_focus.complete
    );

    // away from t = 1 the density is the initial profile, rescaled and flipped
    for t in [0.5, 1.5, 3.0] {
        let x = 0.3;
        let n = search.density(&[x], t)?.n;
        let z = x / (t - 1.0);
        let exact = (-z * z).exp() / std::f64::consts::PI.sqrt() / (t - 1.0f64).abs();
        println!("n({x}, {t}) = {n:.12}  closed form {exact:.12}");
    }
    Ok(())
}
