//! Two cusp geometries with the same free symbol: a Lipschitz phase whose
//! middle rays all meet at (1, 1), producing a triple-valued region, and the
//! smooth −ln cosh phase whose cusp carries no mass.
//!
//!     cargo run --release --example cusp

use caustica::branches::{concentration, BranchSearch, CausticGrid};
use caustica::cli::preset;

fn main() -> caustica::Result<()> {
    let lip = preset("ex_1_3_cusp_lipschitz")?.to_scenario()?;
    let search = BranchSearch::for_scenario(&lip);

    let set = search.find(&[1.5], 2.0)?;
    println!("Lipschitz phase, (x, t) = (1.5, 2): {} branches", set.len());
    for b in &set.branches {
        println!(
            "  v = {:+.9}  S = {:+.9}  n = {:.9}  footpoint {:+.6}",
            b.v[0],
            b.s,
            b.n.unwrap_or(f64::NAN),
            b.z[0]
        );
    }

    let hot = concentration(
        &lip.hamiltonian,
        &lip.initial,
        &[1.0],
        1.0,
        &lip.region.x,
        &lip.tolerances,
    )?;
    println!(
        "focus (1, 1): μ = {:.10} → {:?}",
        hot.mu, hot.classification
    );
    for p in &hot.preimage {
        println!(
            "  preimage piece [{:.6}, {:.6}] {:?}, mass {:.10}",
            p.lo[0], p.hi[0], p.kind, p.mass
        );
    }

    let smooth = preset("ex_1_3_cusp_smooth")?.to_scenario()?;
    let cool = concentration(
        &smooth.hamiltonian,
        &smooth.initial,
        &[0.0],
        1.0,
        &smooth.region.x,
        &smooth.tolerances,
    )?;
    println!(
        "−ln cosh phase, cusp (0, 1): μ = {:.3e} → {:?}",
        cool.mu, cool.classification
    );

    let mut grid = CausticGrid::new(smooth.region.x.clone(), 0.0, 2.0);
    grid.nx = 401;
    let folds = BranchSearch::for_scenario(&smooth).caustic_scan(&grid)?;
    println!("−ln cosh fold points for t ≤ 2 (first few):");
    for p in folds.iter().take(6) {
        println!(
            "  x = {:+.6}, t = {:.6}, branch {:?}",
            p.x[0], p.t, p.branch
        );
    }
    Ok(())
}
