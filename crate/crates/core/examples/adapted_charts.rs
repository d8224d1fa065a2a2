//! Adapted charts: identity charts on preadapted surfaces and polynomial
//! reparametrizations elsewhere.

use frontal::chart::adapt_chart;
use frontal::dsl::builtin_surface;

fn main() -> frontal::Result<()> {
    let circ = adapt_chart(&builtin_surface("CIRC")?, (1.0, 0.0))?;
    println!("CIRC: kind {:?}, identity {}", circ.kind(), circ.is_identity());

    let sw = builtin_surface("SW")?;
    let chart = adapt_chart(&sw, (0.0, 0.0))?;
    println!("SW:   kind {:?}, identity {}", chart.kind(), chart.is_identity());
    for p in [(0.1, 0.2), (-0.3, 0.05)] {
        let c = chart.from_original(p)?;
        let back = chart.to_original(c);
        println!("  original {p:?} -> chart ({:.6}, {:.6}) -> {back:?}", c.0, c.1);
    }
    let fr = chart.frame(chart.origin(), 3)?;
    println!("  λ at the origin: {:e}, λ_v: {}", fr.lambda().value(), fr.lambda().coeff(0, 1));

    let flipped = chart.with_reversed_normal();
    println!("  orientation {} -> {}", chart.orientation(), flipped.orientation());
    Ok(())
}
