//! Bounded principal curvature, κ̂ and ridge orders near a cuspidal edge.

use frontal::chart::adapt_chart;
use frontal::dsl::builtin_surface;
use frontal::invariants::{gauss_mean_curvature, principal_branches, ridge_order};

fn main() -> frontal::Result<()> {
    let chart = adapt_chart(&builtin_surface("CE_R")?, (0.0, 0.0))?;
    for p in [(0.0, 0.0), (0.0, 0.1), (0.3, 0.1)] {
        let pd = principal_branches(&chart, p)?;
        println!(
            "{p:?}: bounded {:?} κ = {:?}  κ̂ = {:?}  V = {:?}  ridge order {}",
            pd.bounded_branch,
            pd.kappa_bounded,
            pd.hat_kappa,
            pd.v,
            ridge_order(&chart, p, 2)?
        );
    }
    let (k, h) = gauss_mean_curvature(&chart, (0.3, 0.1))?;
    println!("K = {k:.6}, H = {h:.6} off the edge");
    Ok(())
}
