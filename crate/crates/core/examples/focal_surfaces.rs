//! The focal surfaces FC_f and ŵFC_f, and the geometry of ŵFC_f along the edge.

use frontal::chart::adapt_chart;
use frontal::dsl::builtin_surface;
use frontal::focal::{focal_surfaces, hat_focal_geometry};

fn main() -> frontal::Result<()> {
    let chart = adapt_chart(&builtin_surface("CE0")?, (0.0, 0.0))?;
    let s = focal_surfaces(&chart, (0.0, 0.1))?;
    println!("CE0 at (0, 0.1): FC {:?}, ŵFC {:?}, λ/κ̂ {}", s.fc, s.hat_fc, s.w2);

    for name in ["CE0", "CIRC", "CE_T"] {
        let chart = adapt_chart(&builtin_surface(name)?, (0.0, 0.0))?;
        let g = hat_focal_geometry(&chart, 0.0)?;
        println!(
            "{name:4} K {:.6} (direct {:.6})  |H| {:.6} (direct {:.6})  κ̂_g {:.3e}  κ̂_n {:.6}  {}",
            g.k_closed, g.k_direct, g.h_closed_abs, g.h_direct_abs, g.kappa_g_hat, g.kappa_n_hat, g.point_type
        );
    }
    Ok(())
}
