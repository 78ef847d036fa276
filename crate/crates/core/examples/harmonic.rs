//! Harmonic oscillator H = (ξ² + x²)/2 with a uniform initial momentum:
//! the phase portrait rotates rigidly, so all rays meet every half period.
//!
//!     cargo run --release --example harmonic

use std::f64::consts::PI;

use caustica::branches::{concentration, BranchSearch, CausticGrid};
use caustica::cli::preset;

fn main() -> caustica::Result<()> {
    let s = preset("harmonic_k")?.to_scenario()?;
    let search = BranchSearch::for_scenario(&s);
    let k = 1.0;

    let foci = search.caustic_scan(&CausticGrid::new(s.region.x.clone(), 0.0, 2.0 * PI - 0.1))?;
    for p in &foci {
        let mu = concentration(
            &s.hamiltonian,
            &s.initial,
            &p.x,
            p.t,
            &s.region.x,
            &s.tolerances,
        )?
        .mu;
        println!(
            "focus x = {:+.8}, t = {:.8} (t/π = {:.6}), μ = {mu:.8}",
            p.x[0],
            p.t,
            p.t / PI
        );
    }

    // x = x0 cos t + k sin t, so x0 = (x − k sin t)/cos t
    for t in [PI / 8.0, PI / 4.0] {
        for x in [-1.0, 0.0, 1.0] {
            let b = &search.find(&[x], t)?.branches[0];
            let (c, sn) = (t.cos(), t.sin());
            let x0 = (x - k * sn) / c;
            let v = (k - x * sn) / c;
            let n = (-x0 * x0).exp() / PI.sqrt() / c;
            // S_I(x0) + ∫ (ξ² − x²)/2 dt along the ray
            let s_exact = k * x0
                + (k * k - x0 * x0) * (2.0 * t).sin() / 4.0
                + k * x0 * ((2.0 * t).cos() - 1.0) / 2.0;
            println!(
                "t = {t:.4}, x = {x:+.1}: v = {:+.10} ({v:+.10}), n = {:.10} ({n:.10}), S = {:+.10} ({s_exact:+.10})",
                b.v[0],
                b.n.unwrap(),
                b.s
            );
        }
    }
    Ok(())
}
