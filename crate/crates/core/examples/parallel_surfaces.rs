//! Parallel surfaces f + tν and their singular sets.

use frontal::chart::{area_density_jet, trace_singular_curve};
use frontal::dsl::{builtin_surface, parse_surface_spec};
use frontal::focal::parallel_surface;

fn main() -> frontal::Result<()> {
    let half = parallel_surface(&builtin_surface("SPHERE")?, 0.5)?;
    let (f, _) = half.evaluate_jet((0.4, 0.3), 0)?;
    let r = f.value().iter().map(|x| x * x).sum::<f64>().sqrt();
    println!("sphere at t = 0.5: radius {r}, λ = {:.6}", area_density_jet(&half, (0.4, 0.3), 0)?.value());

    let bowl = parse_surface_spec("name = bowl\nx = u\ny = v\nz = u^2 + 0.3*v^2\ndomain = -1 1 -1 1")?;
    let par = parallel_surface(&bowl, 0.9)?;
    let curve = trace_singular_curve(&par, (0.3, 0.0), 0.02, 400)?;
    println!("bowl at t = 0.9: singular curve with {} samples", curve.samples.len());
    for p in curve.samples.iter().step_by(40) {
        println!("  ({:.4}, {:.4})", p.0, p.1);
    }
    Ok(())
}
