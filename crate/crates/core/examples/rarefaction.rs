//! Free motion with an expanding phase: one branch everywhere, no caustics.
//!
//!     cargo run --release --example rarefaction

use caustica::branches::{BranchSearch, CausticGrid};
use caustica::cli::preset;

fn n_i(x: f64) -> f64 {
    (-x * x).exp() / std::f64::consts::PI.sqrt()
}

fn main() -> caustica::Result<()> {
    let scenario = preset("ex_1_1_rarefaction")?.to_scenario()?;
    let search = BranchSearch::for_scenario(&scenario);

    println!(
        "{:>5} {:>5} {:>3} {:>12} {:>12} {:>12}",
        "t", "x", "N", "v err", "S err", "n err"
    );
    for &t in &scenario.region.times {
        for k in 0..=4 {
            let x = -2.0 + k as f64;
            let set = search.find(&[x], t)?;
            let b = &set.branches[0];
            // characteristics are straight lines x = x0 (1 + t)
            let v = x / (1.0 + t);
            let s = x * x / (2.0 * (1.0 + t));
            let n = n_i(x / (1.0 + t)) / (1.0 + t);
            println!(
                "{t:5.2} {x:5.1} {:3} {:12.2e} {:12.2e} {:12.2e}",
                set.len(),
                (b.v[0] - v).abs(),
                (b.s - s).abs(),
                (b.n.unwrap() - n).abs()
            );
        }
    }

    let caustics = search.caustic_scan(&CausticGrid::new(scenario.region.x.clone(), 0.0, 3.0))?;
    println!("caustic points for t in [0, 3]: {}", caustics.len());

    for &t in &scenario.region.times {
        let mass = search.density_mass(&scenario.region.x, t)?;
        println!(
            "t = {t}: ∫ n dx = {mass:.12} (initial {:.12})",
            scenario.initial.mass
        );
    }
    Ok(())
}
