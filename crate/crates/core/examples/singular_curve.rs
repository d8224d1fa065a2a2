//! Tracing the singular curve of the swallowtail and classifying its points.

use frontal::chart::{classify_singular_point, trace_singular_curve};
use frontal::dsl::builtin_surface;

fn main() -> frontal::Result<()> {
    let sw = builtin_surface("SW")?;
    let curve = trace_singular_curve(&sw, (-0.06, 0.1), 0.02, 200)?;
    println!("{} samples, closed: {}", curve.samples.len(), curve.closed);
    let worst = curve
        .samples
        .iter()
        .map(|&(u, v)| (u + 6.0 * v * v).abs())
        .fold(0.0, f64::max);
    println!("max |u + 6v²| along the curve: {worst:e}");

    for p in [(0.0, 0.0), (-0.06, 0.1)] {
        let info = classify_singular_point(&sw, p)?;
        println!(
            "({:.3}, {:.3}): {} {}  ηλ = {:.3e}  ηηλ = {:.3e}",
            info.point.0, info.point.1, info.kind, info.edge_type, info.eta_lambda, info.eta_eta_lambda
        );
    }
    Ok(())
}
