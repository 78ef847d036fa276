//! Finite-ε Schrödinger solutions from WKB data converge to the
//! multivalued limit: |ψ^ε|² → n at rate ε², ψ^ε → ψ_wkb at rate ε.
//!
//!     cargo run --release --example wigner_limit

use caustica::cli::preset;
use caustica::wigner::{
    compare, evolve, husimi, moment0, resolving_spacing, wigner_strided, wkb_initial,
    CompareOptions, PeriodicGrid,
};

fn main() -> caustica::Result<()> {
    let s = preset("ex_1_1_rarefaction")?.to_scenario()?;

    let report = compare(
        &s,
        &[1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0],
        1.0,
        &CompareOptions::default(),
    )?;
    for e in &report.entries {
        println!(
            "ε = 1/{:<4} nodes {:>7}  L¹ density {:.4e}  L² wave {:.4e}  mass drift {:.1e}",
            (1.0 / e.eps) as u32,
            e.grid_nodes,
            e.l1_density,
            e.l2_wkb,
            e.mass_drift
        );
    }
    println!(
        "L¹ ratios {:?} (pass: {})",
        report.l1_ratios, report.l1_pass
    );
    println!(
        "L² ratios {:?} (pass: {})",
        report.l2_ratios, report.l2_pass
    );

    // phase-space picture at ε = 1/32: the Wigner function sits on ξ = x/2
    let eps = 1.0 / 32.0;
    let (lo, hi) = (-8.0, 8.0);
    let grid = PeriodicGrid::with_max_spacing(lo, hi, resolving_spacing(&s.initial, eps, lo, hi))?;
    let psi = evolve(&wkb_initial(&s.initial, eps, &grid)?, &s.hamiltonian, 1.0)?;
    // every 64th node: rows of the full n × n transform would not fit in memory
    let stride = 64;
    let w = wigner_strided(&psi, stride);
    let hu = husimi(&w);
    let density = psi.density();
    let moment_err = moment0(&w)
        .iter()
        .enumerate()
        .map(|(i, a)| (a - density[i * stride]).abs())
        .fold(0.0, f64::max);
    println!(
        "max |∫w dξ − |ψ|²| = {moment_err:.2e}; min W = {:.3e}; min Husimi = {:.3e}",
        w.min(),
        hu.min()
    );
    for i in (w.x.len() / 2..w.x.len() * 5 / 8).step_by(w.x.len() / 32) {
        let k = (0..w.xi.len())
            .max_by(|&a, &b| hu.at(i, a).total_cmp(&hu.at(i, b)))
            .unwrap();
        println!(
            "  x = {:+.3}: Husimi peak at ξ = {:+.4} (limit {:+.4})",
            w.x[i],
            w.xi[k],
            w.x[i] / 2.0
        );
    }
    Ok(())
}
