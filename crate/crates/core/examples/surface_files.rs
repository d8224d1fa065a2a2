//! Parsing surface files, inspecting built-ins, and printing specs back out.

use frontal::dsl::{builtin_surface, parse_expr, parse_surface_spec, BUILTIN_NAMES};

const FILE: &str = "\
# a cuspidal edge bent along a parabola
name = bent
x = u
y = v^2 + u^2/3
z = v^3 + u*v^2
domain = -0.8 0.8 -0.4 0.4
preadapted = true
";

fn main() -> frontal::Result<()> {
    let spec = parse_surface_spec(FILE)?;
    let (f, _) = spec.evaluate_jet((0.5, 0.25), 2)?;
    println!("{} at (0.5, 0.25): {:?}", spec.name, f.value());
    print!("{}", spec.to_file_string().expect("closed form"));

    let e = parse_expr("sqrt(1 + u^2) * exp(-v/2)")?;
    println!("parsed: {e}  value at (1, 0): {}", e.eval(1.0, 0.0));

    for name in BUILTIN_NAMES {
        let s = builtin_surface(name)?;
        println!(
            "{name:7} domain [{}, {}] x [{}, {}], supplied normal: {}",
            s.domain.u0, s.domain.u1, s.domain.v0, s.domain.v1, s.has_supplied_normal()
        );
    }

    match parse_surface_spec("x = u\ny = v +\nz = 1") {
        Err(e) => println!("bad file: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
