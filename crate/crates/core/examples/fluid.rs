//! Pressureless fluid equations satisfied by a single-branch field, and the
//! second-order decay of their discrete residuals under grid refinement.
//!
//!     cargo run --release --example fluid

use caustica::branches::BranchSearch;
use caustica::cli::preset;
use caustica::fluid::{
    euler_residual, generalized_moment_residual, to_conservative, FluidField, SpaceTimeGrid,
    WeightFunction,
};

fn main() -> caustica::Result<()> {
    let s = preset("ex_1_1_rarefaction")?.to_scenario()?;
    let search = BranchSearch::for_scenario(&s);
    let cubic = WeightFunction::parse("v^3")?;

    let mut prev: Option<(f64, f64, f64)> = None;
    for h in [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0] {
        let grid = SpaceTimeGrid::with_spacing(-1.0, 1.0, 0.0, 0.5, h)?;
        // fields rebuilt from ray tracing, not from the closed form
        let field = FluidField::from_branches(&search, grid)?;
        let e = euler_residual(&s.hamiltonian, &field)?;
        let c = to_conservative(&s.hamiltonian, &field)?;
        let w = generalized_moment_residual(&s.hamiltonian, &field, &cubic)?;
        let now = (e.mass.max_abs(), e.momentum.max_abs(), w.max_abs());
        print!(
            "h = 1/{:<3} mass {:.3e}  momentum {:.3e}  σ = v³ {:.3e}  conservative {:.3e}",
            (1.0 / h) as u32,
            now.0,
            now.1,
            now.2,
            c.momentum.max_abs()
        );
        if let Some(p) = prev {
            print!(
                "   ratios {:.3} {:.3} {:.3}",
                now.0 / p.0,
                now.1 / p.1,
                now.2 / p.2
            );
        }
        println!();
        prev = Some(now);
    }

    // σ ≡ 1 is the mass equation itself
    let grid = SpaceTimeGrid::with_spacing(-0.5, 0.5, 0.0, 0.25, 1.0 / 16.0)?;
    let field = FluidField::from_branches(&search, grid)?;
    let one = generalized_moment_residual(&s.hamiltonian, &field, &WeightFunction::one())?;
    let mass = euler_residual(&s.hamiltonian, &field)?.mass;
    println!(
        "σ ≡ 1 reproduces the mass residual exactly: {}",
        one == mass
    );
    Ok(())
}
