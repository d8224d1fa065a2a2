//! The four cuspidal-edge invariants and the normalized cuspidal curvature.

use frontal::chart::adapt_chart;
use frontal::dsl::builtin_surface;
use frontal::invariants::{edge_invariants, normalized_cuspidal_curvature, sub_parabolic_residual};

fn main() -> frontal::Result<()> {
    for name in ["CE0", "CE_T", "CIRC", "CE_R"] {
        let chart = adapt_chart(&builtin_surface(name)?, (0.0, 0.0))?;
        let inv = edge_invariants(&chart, 0.0)?;
        println!(
            "{name:5} κ_s {:>8.5}  κ_ν {:>8.5}  κ_c {:>8.5}  κ_t {:>8.5}  4κ_t²+κ_sκ_c² {:>8.5}",
            inv.kappa_s,
            inv.kappa_nu,
            inv.kappa_c,
            inv.kappa_t,
            sub_parabolic_residual(&chart, 0.0)?
        );
    }
    let sw = adapt_chart(&builtin_surface("SW")?, (0.0, 0.0))?;
    println!("SW    μ_c at the swallowtail point: {}", normalized_cuspidal_curvature(&sw)?);
    Ok(())
}
