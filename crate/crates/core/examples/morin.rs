//! Singularities of the focal surface: ridge-based and Morin classifications.

use frontal::chart::adapt_chart;
use frontal::dsl::builtin_surface;
use frontal::focal::{classify_focal_singularity, focal_lambda_gradient, morin_class};
use frontal::invariants::principal_branches;

fn main() -> frontal::Result<()> {
    let chart = adapt_chart(&builtin_surface("CE_R")?, (0.0, 0.0))?;
    for p in [(0.0, 0.0), (0.0, 0.2), (0.15, 0.0), (0.3, -0.2)] {
        let kappa = principal_branches(&chart, p)?
            .kappa_bounded
            .expect("bounded branch off parabolic points");
        let focal = classify_focal_singularity(&chart, p)?;
        let morin = morin_class(&chart, (p.0, p.1, 1.0 / kappa))?;
        println!(
            "{p:?}: focal {focal}, Morin {morin}, grad Λ {:?}",
            focal_lambda_gradient(&chart, p)?
        );
    }
    Ok(())
}
