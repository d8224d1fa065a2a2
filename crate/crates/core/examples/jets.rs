//! Truncated Taylor jets: arithmetic, elementary functions and partials.

use frontal::jet::Jet2;

fn main() -> frontal::Result<()> {
    let u = Jet2::var_u(0.3, 4);
    let v = Jet2::var_v(-0.2, 4);

    // g(u, v) = sin(u v) / (1 + u²)
    let g = (&u * &v).sin().try_div(&(&u * &u + 1.0))?;
    println!("g        = {:.12}", g.value());
    println!("g_u      = {:.12}", g.partial(1, 0)?);
    println!("g_uv     = {:.12}", g.partial(1, 1)?);
    println!("g_uuvv   = {:.12}", g.partial(2, 2)?);

    let h = g.d_dv();
    println!("order of ∂g/∂v: {}", h.order());
    println!("value at an offset: {:.12}", g.eval_offset(0.01, -0.02));
    Ok(())
}
