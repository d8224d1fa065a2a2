//! Surface description language: expressions, surface files and built-ins.

mod expr;
mod parser;
mod spec;

pub use expr::{Expr, Func, Var};
pub use parser::parse_expr;
pub use spec::{
    builtin_surface, parse_surface_spec, Domain, Geometry, LocalFrame, NormalRoute, SurfaceSpec,
    BUILTIN_NAMES,
};
pub(crate) use spec::{offset_coords, symbolic_immersion_normal};
