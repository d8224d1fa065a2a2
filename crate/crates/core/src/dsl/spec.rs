use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet2, Vec3Jet};

use super::expr::{self, Expr, Var};
use super::parser::parse_expr_at;

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let eps = 1e-12;
        u >= self.u0 - eps && u <= self.u1 + eps && v >= self.v0 - eps && v <= self.v1 + eps
    }

    /// Cell-centred `n × m` sample of the rectangle.
    pub fn sample(&self, n: usize, m: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let u = self.u0 + (i as f64 + 0.5) / n as f64 * (self.u1 - self.u0);
                let v = self.v0 + (j as f64 + 0.5) / m as f64 * (self.v1 - self.v0);
                out.push((u, v));
            }
        }
        out
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self::new(-1.0, 1.0, -1.0, 1.0)
    }
}

/// How the coordinates of a surface are produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Closed-form coordinates, optionally with a closed-form unit normal.
    Expressions {
        coords: [Expr; 3],
        normal: Option<[Expr; 3]>,
    },
    /// `base + t ν_base`, evaluated through the base surface's normal route.
    Parallel { base: Arc<SurfaceSpec>, t: f64 },
}

/// Which construction produced the unit normal at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalRoute {
    Supplied,
    /// `ν = (f_u × h)/|f_u × h|` with `f_v = v h`.
    Preadapted,
    /// `ν = (f_u × f_v)/|f_u × f_v|`.
    Immersion,
}

/// Position and unit normal jets at a point, in the surface's own parameters.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    pub f: Vec3Jet,
    pub nu: Vec3Jet,
    pub route: NormalRoute,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub name: String,
    pub geometry: Geometry,
    pub domain: Domain,
    /// Asserts that the singular set is `{v = 0}` and `f_v` vanishes there.
    pub preadapted: bool,
}

const IMMERSION_TOL: f64 = 1e-10;

impl SurfaceSpec {
    /// Builds a closed-form surface without validating it.
    pub fn from_exprs(
        name: impl Into<String>,
        coords: [Expr; 3],
        normal: Option<[Expr; 3]>,
        domain: Domain,
        preadapted: bool,
    ) -> Self {
        Self {
            name: name.into(),
            geometry: Geometry::Expressions { coords, normal },
            domain,
            preadapted,
        }
    }

    pub fn coords(&self) -> Option<&[Expr; 3]> {
        match &self.geometry {
            Geometry::Expressions { coords, .. } => Some(coords),
            Geometry::Parallel { .. } => None,
        }
    }

    pub fn normal_exprs(&self) -> Option<&[Expr; 3]> {
        match &self.geometry {
            Geometry::Expressions { normal, .. } => normal.as_ref(),
            Geometry::Parallel { .. } => None,
        }
    }

    /// True when a unit normal is available without the preadapted or
    /// immersion constructions.
    pub fn has_supplied_normal(&self) -> bool {
        match &self.geometry {
            Geometry::Expressions { normal, .. } => normal.is_some(),
            Geometry::Parallel { .. } => true,
        }
    }

    /// Position and supplied-normal jets for arbitrary parameter jets.
    ///
    /// Parallel surfaces need the base normal route and therefore only accept
    /// direct seeds `u0 + Δu`, `v0 + Δv`.
    pub fn eval_jets(&self, u: &Jet2, v: &Jet2) -> Result<(Vec3Jet, Option<Vec3Jet>)> {
        match &self.geometry {
            Geometry::Expressions { coords, normal } => {
                let f = Vec3Jet::new(
                    coords[0].eval_jet(u, v)?,
                    coords[1].eval_jet(u, v)?,
                    coords[2].eval_jet(u, v)?,
                );
                let nu = match normal {
                    Some(n) => Some(Vec3Jet::new(
                        n[0].eval_jet(u, v)?,
                        n[1].eval_jet(u, v)?,
                        n[2].eval_jet(u, v)?,
                    )),
                    None => None,
                };
                Ok((f, nu))
            }
            Geometry::Parallel { base, t } => {
                let (u0, v0) = direct_seed(u, v).ok_or_else(|| {
                    Error::ChartFailure(format!(
                        "parallel surface `{}` has no closed-form normal and cannot be re-parametrized",
                        self.name
                    ))
                })?;
                let order = u.order();
                let frame = base.local_frame_unchecked(u0, v0, order + 2)?;
                let nu = frame.nu.truncate(order);
                let f = frame.f.truncate(order).add(&nu.scale_f(*t));
                Ok((f, Some(nu)))
            }
        }
    }

    /// Jets of `f` (and the supplied normal, if any) at a domain point.
    pub fn evaluate_jet(
        &self,
        point: (f64, f64),
        order: usize,
    ) -> Result<(Vec3Jet, Option<Vec3Jet>)> {
        let (u, v) = point;
        if !self.domain.contains(u, v) {
            return Err(Error::OutsideDomain { u, v });
        }
        self.eval_jets(&Jet2::var_u(u, order), &Jet2::var_v(v, order))
    }

    /// Position and unit normal at a point, choosing the normal by preference:
    /// supplied, then the preadapted `h` construction, then `f_u × f_v`.
    ///
    /// The normal jet has order `order` (supplied), `order - 2` (preadapted)
    /// or `order - 1` (immersion).
    pub fn local_frame(&self, point: (f64, f64), order: usize) -> Result<LocalFrame> {
        let (u, v) = point;
        if !self.domain.contains(u, v) {
            return Err(Error::OutsideDomain { u, v });
        }
        self.local_frame_unchecked(u, v, order)
    }

    pub(crate) fn local_frame_unchecked(&self, u: f64, v: f64, order: usize) -> Result<LocalFrame> {
        let (f, supplied) = self.eval_jets(&Jet2::var_u(u, order), &Jet2::var_v(v, order))?;
        if let Some(nu) = supplied {
            return Ok(LocalFrame {
                f,
                nu,
                route: NormalRoute::Supplied,
            });
        }
        let fu = f.d_du();
        let fv = f.d_dv();
        if self.preadapted {
            let h = if v == 0.0 {
                fv.div_exact_dv(1e-9)?
            } else {
                let vj = Jet2::var_v(v, fv.order());
                fv.try_map(|c| c.try_div(&vj))?
            };
            let n = fu.cross(&h);
            if n.dot(&n).value().sqrt() <= IMMERSION_TOL {
                return Err(Error::NeedsNormal { u, v });
            }
            return Ok(LocalFrame {
                f,
                nu: n.normalize()?,
                route: NormalRoute::Preadapted,
            });
        }
        let n = fu.cross(&fv);
        let scale = 1.0 + fu.dot(&fu).value() + fv.dot(&fv).value();
        if n.dot(&n).value().sqrt() <= IMMERSION_TOL * scale {
            return Err(Error::NeedsNormal { u, v });
        }
        Ok(LocalFrame {
            f,
            nu: n.normalize()?,
            route: NormalRoute::Immersion,
        })
    }

    /// Checks the frontal condition of a supplied normal and the preadapted
    /// assertion on a deterministic sample.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::Validation {
            surface: self.name.clone(),
            reason,
        };
        if self.domain.u0 >= self.domain.u1 || self.domain.v0 >= self.domain.v1 {
            return Err(fail("empty domain".into()));
        }
        if let Geometry::Expressions {
            normal: Some(_), ..
        } = &self.geometry
        {
            for (u, v) in self.domain.sample(10, 10) {
                let (f, nu) = self.evaluate_jet((u, v), 1).map_err(|e| fail(e.to_string()))?;
                let nu = nu.expect("normal present");
                let n = nu.value();
                let fu = f.d_du().value();
                let fv = f.d_dv().value();
                let unit = (dot(n, n).sqrt() - 1.0).abs();
                let (a, b) = (dot(fu, n).abs(), dot(fv, n).abs());
                if unit > 1e-8 || a > 1e-8 || b > 1e-8 {
                    return Err(fail(format!(
                        "normal is not a unit frontal normal at ({u}, {v}): ||ν|-1| = {unit:e}, ⟨f_u,ν⟩ = {a:e}, ⟨f_v,ν⟩ = {b:e}"
                    )));
                }
            }
        }
        if self.preadapted {
            if self.domain.v0 > 0.0 || self.domain.v1 < 0.0 {
                return Err(fail("preadapted surface domain must contain v = 0".into()));
            }
            for i in 0..50 {
                let u = self.domain.u0 + (i as f64 + 0.5) / 50.0 * (self.domain.u1 - self.domain.u0);
                let (f, _) = self.evaluate_jet((u, 0.0), 1).map_err(|e| fail(e.to_string()))?;
                let fu = f.d_du().value();
                let fv = f.d_dv().value();
                let r = dot(fv, fv).sqrt();
                if r > 1e-10 * (1.0 + dot(fu, fu).sqrt()) {
                    return Err(fail(format!("f_v does not vanish on v = 0 at u = {u} (|f_v| = {r:e})")));
                }
            }
        }
        Ok(())
    }

    /// Serializes a closed-form surface in the file grammar.
    pub fn to_file_string(&self) -> Option<String> {
        let Geometry::Expressions { coords, normal } = &self.geometry else {
            return None;
        };
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        for (k, e) in ["x", "y", "z"].iter().zip(coords) {
            let _ = writeln!(s, "{k} = {e}");
        }
        if let Some(n) = normal {
            for (k, e) in ["nx", "ny", "nz"].iter().zip(n) {
                let _ = writeln!(s, "{k} = {e}");
            }
        }
        let d = &self.domain;
        let _ = writeln!(s, "domain = {} {} {} {}", d.u0, d.u1, d.v0, d.v1);
        let _ = writeln!(s, "preadapted = {}", self.preadapted);
        Some(s)
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn direct_seed(u: &Jet2, v: &Jet2) -> Option<(f64, f64)> {
    let is_seed = |j: &Jet2, du: f64, dv: f64| {
        j.order() == 0
            || (j.coeff(1, 0) == du
                && j.coeff(0, 1) == dv
                && j.coeffs()[3.min(j.coeffs().len())..].iter().all(|c| *c == 0.0))
    };
    if is_seed(u, 1.0, 0.0) && is_seed(v, 0.0, 1.0) {
        Some((u.value(), v.value()))
    } else {
        None
    }
}

/// Parses the plain-text surface file grammar and validates the result.
pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec> {
    let mut name = None;
    let mut xyz: [Option<Expr>; 3] = [None, None, None];
    let mut nxyz: [Option<Expr>; 3] = [None, None, None];
    let mut domain = None;
    let mut preadapted = None;
    let mut seen = std::collections::HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(Error::Syntax {
                line,
                column: content.len() - content.trim_start().len() + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        let value = &content[eq + 1..];
        let value_col = eq + 2;
        if !seen.insert(key.to_string()) {
            return Err(Error::Syntax {
                line,
                column: key_col,
                message: format!("duplicate key `{key}`"),
            });
        }
        match key {
            "name" => {
                let v = value.trim();
                if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
                    return Err(Error::Syntax {
                        line,
                        column: value_col,
                        message: "expected an identifier".into(),
                    });
                }
                name = Some(v.to_string());
            }
            "x" | "y" | "z" => {
                let i = (key.as_bytes()[0] - b'x') as usize;
                xyz[i] = Some(parse_expr_at(value, line, value_col)?);
            }
            "nx" | "ny" | "nz" => {
                let i = (key.as_bytes()[1] - b'x') as usize;
                nxyz[i] = Some(parse_expr_at(value, line, value_col)?);
            }
            "domain" => {
                let nums: Vec<&str> = value.split_whitespace().collect();
                let parsed: Option<Vec<f64>> = nums
                    .iter()
                    .map(|s| parse_expr_at(s, line, value_col).ok().and_then(|e| const_value(&e)))
                    .collect();
                match parsed {
                    Some(p) if p.len() == 4 => domain = Some(Domain::new(p[0], p[1], p[2], p[3])),
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            column: value_col,
                            message: "expected four numbers `u0 u1 v0 v1`".into(),
                        })
                    }
                }
            }
            "preadapted" => {
                preadapted = Some(match value.trim() {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            column: value_col,
                            message: "expected `true` or `false`".into(),
                        })
                    }
                })
            }
            _ => {
                return Err(Error::UnknownIdentifier {
                    name: key.to_string(),
                    line,
                    column: key_col,
                })
            }
        }
    }

    let name = name.unwrap_or_else(|| "surface".to_string());
    let missing = |k: &str| Error::Validation {
        surface: name.clone(),
        reason: format!("missing `{k}`"),
    };
    let [x, y, z] = xyz;
    let coords = [
        x.ok_or_else(|| missing("x"))?,
        y.ok_or_else(|| missing("y"))?,
        z.ok_or_else(|| missing("z"))?,
    ];
    let normal = match nxyz {
        [None, None, None] => None,
        [Some(a), Some(b), Some(c)] => Some([a, b, c]),
        _ => return Err(missing("nx, ny, nz (all three or none)")),
    };
    let spec = SurfaceSpec::from_exprs(
        name,
        coords,
        normal,
        domain.unwrap_or_default(),
        preadapted.unwrap_or(false),
    );
    spec.validate()?;
    Ok(spec)
}

fn const_value(e: &Expr) -> Option<f64> {
    let x = e.eval(f64::NAN, f64::NAN);
    x.is_finite().then_some(x)
}

const CE0: &str = "\
name = CE0
x = u
y = v^2
z = v^3
domain = -1 1 -0.5 0.5
preadapted = true
";

const CE_T: &str = "\
name = CE_T
x = u
y = v^2
z = v^3 + u*v^2
domain = -1 1 -0.5 0.5
preadapted = true
";

const CE_R: &str = "\
# cuspidal edge over the parabola z = u^2/2; the edge has a first order ridge at u = 0
name = CE_R
x = u
y = v^2
z = v^3 + u^2/2
domain = -1 1 -0.5 0.5
preadapted = true
";

const CIRC: &str = "\
name = CIRC
x = (1+v^2)*cos(u)
y = (1+v^2)*sin(u)
z = v^3
domain = -pi 3*pi -0.5 0.5
preadapted = true
";

const SW: &str = "\
name = SW
x = u
y = 3*v^4 + u*v^2
z = 4*v^3 + 2*u*v
nx = -v^2/sqrt(1 + v^2 + v^4)
ny = -1/sqrt(1 + v^2 + v^4)
nz = v/sqrt(1 + v^2 + v^4)
domain = -0.5 0.5 -0.5 0.5
";

const SPHERE: &str = "\
# unit sphere with the inward normal
name = SPHERE
x = cos(u)*cos(v)
y = sin(u)*cos(v)
z = sin(v)
nx = -cos(u)*cos(v)
ny = -sin(u)*cos(v)
nz = -sin(v)
domain = -pi pi -1.4 1.4
";

/// Names accepted by [`builtin_surface`].
pub const BUILTIN_NAMES: [&str; 6] = ["CE0", "CE_T", "CE_R", "CIRC", "SW", "SPHERE"];

/// Normal forms and test surfaces.
///
/// `CE0 = (u, v², v³)` and `SW = (u, 3v⁴+uv², 4v³+2uv)` are the cuspidal
/// edge and swallowtail normal forms; `CE_T` adds cusp-directional torsion,
/// `CIRC` bends the edge around a circle, `CE_R` carries a ridge, and
/// `SPHERE` is the unit sphere.
pub fn builtin_surface(name: &str) -> Result<SurfaceSpec> {
    let text = match name {
        "CE0" => CE0,
        "CE_T" => CE_T,
        "CE_R" => CE_R,
        "CIRC" => CIRC,
        "SW" => SW,
        "SPHERE" => SPHERE,
        _ => return Err(Error::UnknownSurface(name.to_string())),
    };
    parse_surface_spec(text)
}

/// `f + t ν` componentwise.
pub(crate) fn offset_coords(coords: &[Expr; 3], normal: &[Expr; 3], t: f64) -> [Expr; 3] {
    std::array::from_fn(|i| {
        expr::add(
            coords[i].clone(),
            expr::mul(Expr::num(t), normal[i].clone()),
        )
    })
}

/// Closed-form unit normal `(f_u × f_v)/|f_u × f_v|` of an expression surface.
pub(crate) fn symbolic_immersion_normal(coords: &[Expr; 3]) -> [Expr; 3] {
    let fu: Vec<Expr> = coords.iter().map(|c| c.derivative(Var::U)).collect();
    let fv: Vec<Expr> = coords.iter().map(|c| c.derivative(Var::V)).collect();
    let comp = |a: usize, b: usize| {
        expr::sub(
            expr::mul(fu[a].clone(), fv[b].clone()),
            expr::mul(fu[b].clone(), fv[a].clone()),
        )
    };
    let n = [comp(1, 2), comp(2, 0), comp(0, 1)];
    let len2 = n
        .iter()
        .cloned()
        .map(|c| expr::powi(c, 2))
        .reduce(expr::add)
        .expect("three components");
    let len = Expr::call(super::expr::Func::Sqrt, len2);
    n.map(|c| expr::div(c, len.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cuspidal_edge_file() {
        let s = parse_surface_spec("x = u\ny = v^2\nz = v^3").unwrap();
        let c = s.coords().unwrap();
        assert_eq!(c[1], Expr::pow(Expr::v(), 2));
        assert_eq!(c[2], Expr::pow(Expr::v(), 3));
        assert!(!s.preadapted);
    }

    #[test]
    fn comments_and_whitespace() {
        let s = parse_surface_spec(
            "# a comment\n  name=demo   # trailing\nx =  u\n\ny=v\nz = u*v\ndomain = -2 2 -1 1\n",
        )
        .unwrap();
        assert_eq!(s.name, "demo");
        assert_eq!(s.domain, Domain::new(-2.0, 2.0, -1.0, 1.0));
    }

    #[test]
    fn syntax_error_carries_line() {
        match parse_surface_spec("x = u\ny = v +\nz = 1") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            parse_surface_spec("x = u\ny = v\nz = 0\ncolor = 1"),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn bad_normal_fails_frontal_validation() {
        let err = parse_surface_spec("x = u\ny = v\nz = u*v\nnx = 0\nny = 0\nnz = 1").unwrap_err();
        assert!(matches!(err, Error::Validation { .. }), "{err:?}");
    }

    #[test]
    fn false_preadapted_claim_rejected() {
        let err = parse_surface_spec("x = u\ny = v\nz = 0\npreadapted = true").unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            let s = builtin_surface(name).unwrap();
            assert_eq!(s.name, name);
        }
        assert!(matches!(builtin_surface("XYZ"), Err(Error::UnknownSurface(_))));
        for name in ["CE0", "CE_T", "CIRC", "CE_R"] {
            assert!(builtin_surface(name).unwrap().preadapted);
        }
        assert!(!builtin_surface("SW").unwrap().preadapted);
    }

    #[test]
    fn monomial_jets() {
        let s = builtin_surface("CE0").unwrap();
        let (f, _) = s.evaluate_jet((0.0, 0.0), 3).unwrap();
        for d in 0..=3 {
            for b in 0..=d {
                let a = d - b;
                let y = if (a, b) == (0, 2) { 1.0 } else { 0.0 };
                let z = if (a, b) == (0, 3) { 1.0 } else { 0.0 };
                assert_eq!(f.y.coeff(a, b), y);
                assert_eq!(f.z.coeff(a, b), z);
            }
        }
    }

    #[test]
    fn circ_jet_at_quarter_turn() {
        let s = builtin_surface("CIRC").unwrap();
        let (f, _) = s
            .evaluate_jet((std::f64::consts::FRAC_PI_2, 0.0), 4)
            .unwrap();
        assert!(f.x.value().abs() < 1e-15);
        assert!((f.x.coeff(1, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_outside_domain() {
        let s = builtin_surface("CE0").unwrap();
        assert!(matches!(
            s.evaluate_jet((5.0, 0.0), 2),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn preadapted_normal_route_on_axis() {
        let s = builtin_surface("CE0").unwrap();
        let fr = s.local_frame((0.2, 0.0), 6).unwrap();
        assert_eq!(fr.route, NormalRoute::Preadapted);
        let n = fr.nu.value();
        assert!((n[2] - 1.0).abs() < 1e-15 && n[0].abs() < 1e-15);
        // ν = (0, -3v, 2)/sqrt(4 + 9v^2)  =>  ∂_v ν_y = -3/2
        assert!((fr.nu.y.coeff(0, 1) + 1.5).abs() < 1e-14);
    }

    #[test]
    fn singular_surface_without_normal_is_rejected() {
        let s = parse_surface_spec("x = u\ny = v^2\nz = v^3").unwrap();
        assert!(matches!(
            s.local_frame((0.0, 0.0), 4),
            Err(Error::NeedsNormal { .. })
        ));
    }

    #[test]
    fn symbolic_normal_matches_cross_product() {
        let s = parse_surface_spec("x = u\ny = v\nz = u^2/2 + v^2").unwrap();
        let n = symbolic_immersion_normal(s.coords().unwrap());
        let fr = s.local_frame((0.3, -0.2), 3).unwrap();
        let want = fr.nu.value();
        for k in 0..3 {
            assert!((n[k].eval(0.3, -0.2) - want[k]).abs() < 1e-14);
        }
    }
}
