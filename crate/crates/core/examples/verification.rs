//! The acceptance criteria and a per-surface property report.

use frontal::dsl::builtin_surface;
use frontal::verify::{run_all, verify_surface};

fn main() -> frontal::Result<()> {
    for r in run_all() {
        println!("{r}");
    }
    println!();
    println!("{}", verify_surface(&builtin_surface("CE_T")?, 1e-6)?);
    Ok(())
}
