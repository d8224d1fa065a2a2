//! The map `F(u, v, w) = f + wν`, the focal surfaces `FC_f = f + ν/κ` and
//! `ŵFC_f = f + (λ/κ̂)ν`, Morin classification on `S₁(F) = {w = 1/κ}`, and
//! the geometry of `ŵFC_f` along a cuspidal edge.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::{AdaptedChart, ChartFrame, ChartKind};
use crate::dsl::{offset_coords, symbolic_immersion_normal, Geometry, SurfaceSpec};
use crate::error::{Error, Result};
use crate::invariants::{
    edge_invariants, gauss_mean_curvature, kappa_and_field, ridge_order, Analysis,
};
use crate::jet::{Jet2, Vec3Jet};
use crate::vec3::{self, V3};

const ZERO_TOL: f64 = 1e-7;
const RANK_TOL: f64 = 1e-7;
const CURVATURE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BigMap {
    pub value: V3,
    /// `det(F_u, F_v, F_w)` from jets.
    pub jacobian: f64,
    /// `(1 - wκ)(λ - wκ̂)`.
    pub factored: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocalSample {
    pub point: (f64, f64),
    /// `None` at parabolic points (`κ = 0`).
    pub fc: Option<V3>,
    pub hat_fc: V3,
    pub w1: Option<f64>,
    pub w2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorinClass {
    A0,
    A1,
    A2,
    A3,
    Degenerate,
}

impl fmt::Display for MorinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MorinClass::A0 => "A0",
            MorinClass::A1 => "A1",
            MorinClass::A2 => "A2",
            MorinClass::A3 => "A3",
            MorinClass::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FocalSingularity {
    Regular,
    CuspidalEdge,
    Swallowtail,
    Degenerate,
}

impl FocalSingularity {
    pub fn as_str(self) -> &'static str {
        match self {
            FocalSingularity::Regular => "regular",
            FocalSingularity::CuspidalEdge => "cuspidal-edge",
            FocalSingularity::Swallowtail => "swallowtail",
            FocalSingularity::Degenerate => "degenerate",
        }
    }

    /// The Morin type of `F` expected at `(p, 1/κ(p))`.
    pub fn morin_counterpart(self) -> MorinClass {
        match self {
            FocalSingularity::Regular => MorinClass::A1,
            FocalSingularity::CuspidalEdge => MorinClass::A2,
            FocalSingularity::Swallowtail => MorinClass::A3,
            FocalSingularity::Degenerate => MorinClass::Degenerate,
        }
    }
}

impl fmt::Display for FocalSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointType {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl PointType {
    pub fn as_str(self) -> &'static str {
        match self {
            PointType::Elliptic => "elliptic",
            PointType::Parabolic => "parabolic",
            PointType::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for PointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Geometry of `ŵFC_f` at a cuspidal-edge point `(u, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HatFocalSample {
    pub u: f64,
    /// Rank of `dŵFC` at the point.
    pub rank: usize,
    /// `⟨ν, n̂⟩` with `n̂` the unit normal of `ŵFC` computed from its jets.
    pub nu_dot_normal: f64,
    /// `|n̂ - (f_u × ν)/|f_u||` after orienting `n̂`.
    pub normal_deviation: f64,
    pub k_direct: f64,
    pub k_closed: f64,
    /// Signed mean curvature for `n̂ = (f_u × ν)/|f_u|`.
    pub h_direct: f64,
    pub h_direct_abs: f64,
    pub h_closed_abs: f64,
    pub kappa_g_hat: f64,
    pub kappa_n_hat: f64,
    pub point_type: PointType,
    pub subparabolic: bool,
    pub pregeodesic: bool,
    pub line_of_curvature_residual: f64,
}

/// `κ` (bounded branch) and `κ̂` at a chart point. On regular charts these
/// are `H - sqrt(H² - K)` and `λ(H + sqrt(H² - K))`.
fn kappa_pair(chart: &AdaptedChart, fr: &ChartFrame, point: (f64, f64)) -> Result<(f64, f64)> {
    if chart.kind() == ChartKind::Regular {
        let (k, h) = gauss_mean_curvature(chart, point)?;
        let disc = (h * h - k).max(0.0).sqrt();
        return Ok((h - disc, fr.lambda().value() * (h + disc)));
    }
    let an = Analysis::new(chart, point, 4)?;
    Ok((an.kappa()?.value(), an.hat_kappa().value()))
}

/// `F(q)`, its Jacobian determinant and the factored form.
pub fn big_map(chart: &AdaptedChart, q: (f64, f64, f64)) -> Result<BigMap> {
    let (u, v, w) = q;
    let fr = chart.frame((u, v), 4)?;
    let nu = fr.nu.value();
    let fu = vec3::add(fr.f_u().value(), vec3::scale(fr.nu.d_du().value(), w));
    let fv = vec3::add(fr.f_v().value(), vec3::scale(fr.nu.d_dv().value(), w));
    let (kappa, hat) = kappa_pair(chart, &fr, (u, v))?;
    let lambda = fr.lambda().value();
    Ok(BigMap {
        value: vec3::add(fr.f.value(), vec3::scale(nu, w)),
        jacobian: vec3::det(fu, fv, nu),
        factored: (1.0 - w * kappa) * (lambda - w * hat),
    })
}

/// Jet of `λ/κ̂`, smooth across the singular curve.
fn hat_offset_jet(an: &Analysis) -> Jet2 {
    (&an.frame.t * &an.d).scale(2.0) / &an.apb
}

/// Points of both focal surfaces over a chart point.
pub fn focal_surfaces(chart: &AdaptedChart, point: (f64, f64)) -> Result<FocalSample> {
    let fr = chart.frame(point, 4)?;
    let f = fr.f.value();
    let nu = fr.nu.value();
    let (kappa, w2) = if chart.kind() == ChartKind::Regular {
        let (k, h) = gauss_mean_curvature(chart, point)?;
        let disc = (h * h - k).max(0.0).sqrt();
        (h - disc, 1.0 / (h + disc))
    } else {
        let an = Analysis::new(chart, point, 4)?;
        if an.apb.value() == 0.0 {
            return Err(Error::NotApplicable {
                u: point.0,
                v: point.1,
            });
        }
        (an.kappa()?.value(), hat_offset_jet(&an).value())
    };
    let w1 = (kappa.abs() > CURVATURE_TOL).then(|| 1.0 / kappa);
    Ok(FocalSample {
        point,
        fc: w1.map(|w| vec3::add(f, vec3::scale(nu, w))),
        hat_fc: vec3::add(f, vec3::scale(nu, w2)),
        w1,
        w2,
    })
}

/// Singular values of the matrix with the given rows, ascending.
fn singular_values(rows: &[[f64; 3]]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(rows.len(), 3, &rows.concat());
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Morin type of `F` at `q = (u, v, w)` by the criterion on
/// `Λ = 1 - wκ` and its derivatives along the principal vector field `V`.
pub fn morin_class(chart: &AdaptedChart, q: (f64, f64, f64)) -> Result<MorinClass> {
    let (u, v, w) = q;
    let fr = chart.frame((u, v), 4)?;
    let nu = fr.nu.value();
    let fu = vec3::add(fr.f_u().value(), vec3::scale(fr.nu.d_du().value(), w));
    let fv = vec3::add(fr.f_v().value(), vec3::scale(fr.nu.d_dv().value(), w));
    let s = singular_values(&[fu, fv, nu]);
    let jscale = 1.0 + s[2];
    if s[0] > RANK_TOL * jscale {
        return Ok(MorinClass::A0);
    }
    if s[1] <= RANK_TOL * jscale {
        return Err(Error::UnsupportedCorank { u, v });
    }
    let (kappa, v1, v2) = kappa_and_field(chart, (u, v))?;
    let k0 = kappa.value();
    let lambda0 = 1.0 - w * k0;
    if k0.abs() <= CURVATURE_TOL || lambda0.abs() > 1e-6 * (1.0 + w.abs() * k0.abs()) {
        return Err(Error::NotOnFocalSheet { residual: lambda0 });
    }
    let vn = v1.value().hypot(v2.value());
    if vn <= 1e-12 {
        return Err(Error::Umbilic);
    }
    // Λ^{(m)} = -w V^{(m)}κ; gradients are taken in (u, v, w).
    let mut chain = vec![kappa.clone()];
    for _ in 0..3 {
        let next = chain.last().expect("nonempty").directional(&v1, &v2);
        chain.push(next);
    }
    let grad = |g: &Jet2| {
        let d = g.gradient();
        [-w * d[0], -w * d[1], -g.value()]
    };
    let zero = |m: usize| chain[m].value().abs() <= ZERO_TOL * (1.0 + k0.abs()) * vn.powi(m as i32);
    let rows: Vec<[f64; 3]> = chain.iter().take(3).map(grad).collect();
    for k in 1..=3 {
        if zero(k) {
            continue;
        }
        let rank_ok = match k {
            1 => true,
            2 => {
                let s = singular_values(&rows[..2]);
                s[0] > RANK_TOL * (1.0 + s[1])
            }
            _ => {
                let s = singular_values(&rows);
                s[0] > RANK_TOL * (1.0 + s[2])
            }
        };
        return Ok(match (k, rank_ok) {
            (1, _) => MorinClass::A1,
            (2, true) => MorinClass::A2,
            (3, true) => MorinClass::A3,
            _ => MorinClass::Degenerate,
        });
    }
    Ok(MorinClass::Degenerate)
}

/// Singularity type of `FC_f` over `p`, from the ridge order of the bounded
/// branch and, for second-order ridges, regularity of the ridge line.
pub fn classify_focal_singularity(chart: &AdaptedChart, p: (f64, f64)) -> Result<FocalSingularity> {
    let order = ridge_order(chart, p, 2)?;
    if order < 0 {
        return Ok(FocalSingularity::Degenerate);
    }
    let (kappa, v1, v2) = kappa_and_field(chart, p)?;
    if kappa.value().abs() <= CURVATURE_TOL {
        return Err(Error::Parabolic { u: p.0, v: p.1 });
    }
    Ok(match order {
        0 => FocalSingularity::Regular,
        1 => FocalSingularity::CuspidalEdge,
        _ => {
            let g = kappa.directional(&v1, &v2).gradient();
            let vn = v1.value().hypot(v2.value());
            if g[0].hypot(g[1]) > ZERO_TOL * (1.0 + kappa.value().abs()) * vn {
                FocalSingularity::Swallowtail
            } else {
                FocalSingularity::Degenerate
            }
        }
    })
}

/// `grad Λ` in `(u, v, w)` at `(p, 1/κ(p))`, with `Λ = 1 - wκ`.
pub fn focal_lambda_gradient(chart: &AdaptedChart, p: (f64, f64)) -> Result<[f64; 3]> {
    let (kappa, _, _) = kappa_and_field(chart, p)?;
    let k = kappa.value();
    if k.abs() <= CURVATURE_TOL {
        return Err(Error::Parabolic { u: p.0, v: p.1 });
    }
    let g = kappa.gradient();
    Ok([-g[0] / k, -g[1] / k, -k])
}

/// Fundamental-form data of `ŵFC_f` at a cuspidal-edge point `(u, 0)`.
pub fn hat_focal_geometry(chart: &AdaptedChart, u: f64) -> Result<HatFocalSample> {
    if chart.kind() != ChartKind::First {
        return Err(Error::WrongKind {
            expected: "first-kind",
        });
    }
    let inv = edge_invariants(chart, u)?;
    let an = Analysis::new(chart, (u, 0.0), chart.order())?;
    if an.sigma == 0.0 {
        return Err(Error::NotApplicable { u, v: 0.0 });
    }
    let fr = &an.frame;
    let x: Vec3Jet = fr.f.add(&fr.nu.scale(&hat_offset_jet(&an)));
    let (xu, xv) = (x.d_du(), x.d_dv());
    let cross = xu.cross(&xv);
    let (a, b) = (xu.value(), xv.value());
    let c = vec3::norm(cross.value());
    let rank = if c > RANK_TOL * vec3::norm(a) * vec3::norm(b) {
        2
    } else if vec3::norm(a).max(vec3::norm(b)) > RANK_TOL {
        1
    } else {
        0
    };
    if rank < 2 {
        return Err(Error::FrameDegenerate(format!(
            "the hat focal surface is singular at u = {u}"
        )));
    }
    let fu = fr.f_u().value();
    let nu = fr.nu.value();
    let expected = vec3::scale(vec3::cross(fu, nu), 1.0 / vec3::norm(fu));
    let mut n = cross.normalize()?;
    if vec3::dot(n.value(), expected) < 0.0 {
        n = n.scale_f(-1.0);
    }
    let nv = n.value();
    let xuu = x.partial(2, 0)?;
    let xuv = x.partial(1, 1)?;
    let xvv = x.partial(0, 2)?;
    let (e, f, g) = (vec3::dot(a, a), vec3::dot(a, b), vec3::dot(b, b));
    let (l, m, nn) = (vec3::dot(xuu, nv), vec3::dot(xuv, nv), vec3::dot(xvv, nv));
    let det = e * g - f * f;
    let k_direct = (l * nn - m * m) / det;
    let h_direct = (e * nn - 2.0 * f * m + g * l) / (2.0 * det);
    let residual = 4.0 * inv.kappa_t * inv.kappa_t + inv.kappa_s * inv.kappa_c * inv.kappa_c;
    let k_closed = -0.25 * residual;
    let h_closed_abs = ((inv.kappa_c * inv.kappa_c - 4.0 * inv.kappa_s) / 8.0).abs();
    let speed = vec3::norm(a);
    let kappa_g_hat = vec3::dot(xuu, vec3::cross(nv, a)) / speed.powi(3);
    let kappa_n_hat = vec3::dot(xuu, nv) / (speed * speed);
    let point_type = if k_closed > CURVATURE_TOL {
        PointType::Elliptic
    } else if k_closed < -CURVATURE_TOL {
        PointType::Hyperbolic
    } else {
        PointType::Parabolic
    };
    Ok(HatFocalSample {
        u,
        rank,
        nu_dot_normal: vec3::dot(nu, nv),
        normal_deviation: vec3::dist(nv, expected),
        k_direct,
        k_closed,
        h_direct,
        h_direct_abs: h_direct.abs(),
        h_closed_abs,
        kappa_g_hat,
        kappa_n_hat,
        point_type,
        subparabolic: k_closed.abs() <= CURVATURE_TOL,
        pregeodesic: kappa_g_hat.abs() <= CURVATURE_TOL,
        line_of_curvature_residual: vec3::det(a, nv, n.d_du().value()),
    })
}

/// The parallel surface `f + tν` as a new surface description.
///
/// Closed-form coordinates are produced when `ν` has a closed form (a
/// supplied normal, or the immersion normal of a non-preadapted surface);
/// otherwise the result evaluates through `spec`'s normal construction.
pub fn parallel_surface(spec: &SurfaceSpec, t: f64) -> Result<SurfaceSpec> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("offset {t} is not finite")));
    }
    let name = format!("{}_parallel", spec.name);
    spec.local_frame(spec.domain.sample(1, 1)[0], 3)?;
    if let Some(coords) = spec.coords() {
        let normal = match spec.normal_exprs() {
            Some(n) => Some(n.clone()),
            None if !spec.preadapted => Some(symbolic_immersion_normal(coords)),
            None => None,
        };
        if let Some(normal) = normal {
            return Ok(SurfaceSpec::from_exprs(
                name,
                offset_coords(coords, &normal, t),
                Some(normal),
                spec.domain,
                false,
            ));
        }
    }
    Ok(SurfaceSpec {
        name,
        geometry: Geometry::Parallel {
            base: Arc::new(spec.clone()),
            t,
        },
        domain: spec.domain,
        preadapted: false,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{adapt_chart, area_density_jet, trace_singular_curve};
    use crate::dsl::{builtin_surface, parse_surface_spec};
    use crate::invariants::{edge_invariants, principal_branches};

    fn chart(name: &str, p: (f64, f64)) -> AdaptedChart {
        adapt_chart(&builtin_surface(name).unwrap(), p).unwrap()
    }

    #[test]
    fn jacobian_factorizes() {
        for (name, p) in [("CE0", (0.0, 0.0)), ("CE_T", (0.1, 0.0)), ("CIRC", (1.0, 0.0)), ("SW", (0.0, 0.0))] {
            let ch = chart(name, p);
            for q in [(0.05, 0.1, 0.3), (-0.1, -0.2, 1.7), (0.12, 0.0, -2.0), (0.0, 0.15, 0.0)] {
                let q = (p.0 + q.0, q.1, q.2);
                let b = big_map(&ch, q).unwrap();
                let tol = 1e-8 * (1.0 + q.2.abs()).powi(3);
                assert!((b.jacobian - b.factored).abs() <= tol, "{name} {q:?}: {b:?}");
            }
        }
        let ce = chart("CE0", (0.2, 0.0));
        let b = big_map(&ce, (0.2, 0.1, 0.0)).unwrap();
        let lam = ce.frame((0.2, 0.1), 2).unwrap().lambda().value();
        assert!((b.factored - lam).abs() < 1e-14 && (b.jacobian - lam).abs() < 1e-14);
    }

    #[test]
    fn sphere_collapses_at_unit_offset() {
        let ch = chart("SPHERE", (0.4, -0.3));
        assert!(big_map(&ch, (0.4, -0.3, 1.0)).unwrap().jacobian.abs() < 1e-12);
        let s = focal_surfaces(&ch, (0.4, -0.3)).unwrap();
        assert!(vec3::norm(s.fc.unwrap()) <= 1e-9);
    }

    #[test]
    fn hat_focal_surface_meets_the_edge() {
        for (name, u) in [("CE0", 0.3), ("CE_T", -0.2), ("CIRC", 2.0)] {
            let ch = chart(name, (u, 0.0));
            let s = focal_surfaces(&ch, (u, 0.0)).unwrap();
            let f = ch.frame((u, 0.0), 3).unwrap().f.value();
            assert!(vec3::dist(s.hat_fc, f) <= 1e-10, "{name}");
        }
        let s = focal_surfaces(&chart("CE0", (0.3, 0.0)), (0.3, 0.0)).unwrap();
        assert!(s.fc.is_none() && s.w1.is_none());
    }

    #[test]
    fn hat_offset_slope() {
        let ch = chart("CE0", (0.0, 0.0));
        let w = |v: f64| focal_surfaces(&ch, (0.0, v)).unwrap().w2 / v;
        let h = 0.05;
        let slope = (4.0 * w(h / 2.0) - w(h)) / 3.0;
        let inv = edge_invariants(&ch, 0.0).unwrap();
        let fr = ch.frame((0.0, 0.0), 3).unwrap();
        let fu = fr.f_u().value();
        let c = vec3::norm(vec3::cross(fu, fr.h.unwrap().value()));
        let closed = 2.0 / inv.kappa_c * (c / vec3::norm(fu)).sqrt();
        assert!((slope - 4.0 / 3.0).abs() < 1e-4, "{slope}");
        assert!((closed - 4.0 / 3.0).abs() < 1e-12);
        assert!(w(0.1).is_finite());
    }

    #[test]
    fn hat_focal_closed_forms() {
        let ce = hat_focal_geometry(&chart("CE0", (0.0, 0.0)), 0.0).unwrap();
        assert!(ce.k_closed.abs() < 1e-12 && (ce.h_closed_abs - 0.5625).abs() < 1e-12);
        assert!(ce.pregeodesic && ce.subparabolic && ce.line_of_curvature_residual.abs() < 1e-8);
        assert!(ce.kappa_n_hat.abs() < 1e-12);

        let c = hat_focal_geometry(&chart("CIRC", (0.0, 0.0)), 0.0).unwrap();
        assert!((c.k_closed - 1.125).abs() < 1e-10 && (c.h_closed_abs - 1.0625).abs() < 1e-10);
        assert_eq!(c.point_type, PointType::Elliptic);
        assert!((c.kappa_n_hat - 1.0).abs() < 1e-10 && c.kappa_g_hat.abs() < 1e-10);

        let ct = chart("CE_T", (0.0, 0.0));
        let t = hat_focal_geometry(&ct, 0.0).unwrap();
        let kt = edge_invariants(&ct, 0.0).unwrap().kappa_t;
        assert!((t.k_closed + kt * kt).abs() < 1e-10);
        assert_eq!(t.point_type, PointType::Hyperbolic);
    }

    #[test]
    fn hat_focal_direct_agrees_with_closed() {
        for (name, u) in [("CE0", 0.1), ("CE_T", 0.0), ("CE_T", 0.3), ("CIRC", 0.7), ("CE_R", 0.0), ("CE_R", 0.25)] {
            let ch = chart(name, (u, 0.0));
            let s = hat_focal_geometry(&ch, u).unwrap();
            let inv = edge_invariants(&ch, u).unwrap();
            assert_eq!(s.rank, 2);
            assert!(s.nu_dot_normal.abs() <= 1e-8 && s.normal_deviation <= 1e-8, "{name}");
            assert!((s.k_direct - s.k_closed).abs() <= 1e-6, "{name}: {s:?}");
            assert!((s.h_direct_abs - s.h_closed_abs).abs() <= 1e-6, "{name}: {s:?}");
            if s.k_closed >= -1e-12 {
                assert!(inv.kappa_s <= 1e-12, "{name}");
            }
            if inv.kappa_s <= 0.0 && inv.kappa_t.abs() < 1e-12 {
                assert!(s.k_closed >= -1e-12, "{name}");
            }
            assert!((s.kappa_g_hat - inv.kappa_nu).abs() <= 1e-8, "{name}");
            assert!((s.kappa_n_hat + inv.kappa_s).abs() <= 1e-8, "{name}");
            if inv.kappa_t.abs() < 1e-12 {
                assert!(s.line_of_curvature_residual.abs() <= 1e-8, "{name}");
            } else {
                assert!(s.line_of_curvature_residual.abs() > 1e-6, "{name}");
            }
        }
    }

    #[test]
    fn lambda_gradient_matches_differences() {
        let ch = chart("CE_R", (0.0, 0.0));
        for p in [(0.1, 0.05), (-0.2, 0.1), (0.0, 0.0)] {
            let g = focal_lambda_gradient(&ch, p).unwrap();
            let k = |q: (f64, f64)| principal_branches(&ch, q).unwrap().kappa_bounded.unwrap();
            let w = 1.0 / k(p);
            let lam = |q: (f64, f64)| 1.0 - w * k(q);
            let d = 1e-4;
            let gu = (lam((p.0 + d, p.1)) - lam((p.0 - d, p.1))) / (2.0 * d);
            let gv = (lam((p.0, p.1 + d)) - lam((p.0, p.1 - d))) / (2.0 * d);
            assert!((g[0] - gu).abs() < 1e-6 && (g[1] - gv).abs() < 1e-6, "{p:?}: {g:?}");
            assert!((g[2] + k(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn morin_types() {
        let ch = chart("CE_R", (0.0, 0.0));
        let w = |p: (f64, f64)| focal_surfaces(&ch, p).unwrap().w1.unwrap();
        assert_eq!(morin_class(&ch, (0.0, 0.0, w((0.0, 0.0)))).unwrap(), MorinClass::A2);
        assert_eq!(morin_class(&ch, (0.15, 0.0, w((0.15, 0.0)))).unwrap(), MorinClass::A1);
        assert_eq!(morin_class(&ch, (0.15, 0.0, 0.3)).unwrap(), MorinClass::A0);
        let sphere = chart("SPHERE", (0.1, 0.1));
        assert!(matches!(
            morin_class(&sphere, (0.1, 0.1, 1.0)),
            Err(Error::UnsupportedCorank { .. })
        ));
    }

    #[test]
    fn focal_classification() {
        let ch = chart("CE_R", (0.0, 0.0));
        assert_eq!(classify_focal_singularity(&ch, (0.0, 0.0)).unwrap(), FocalSingularity::CuspidalEdge);
        assert_eq!(classify_focal_singularity(&ch, (0.2, 0.0)).unwrap(), FocalSingularity::Regular);
        assert_eq!(
            classify_focal_singularity(&chart("CE0", (0.0, 0.0)), (0.0, 0.0)).unwrap(),
            FocalSingularity::Degenerate
        );
        assert_eq!(
            classify_focal_singularity(&chart("CIRC", (0.4, 0.0)), (0.4, 0.0)).unwrap(),
            FocalSingularity::Degenerate
        );
        for p in [(0.0, 0.0), (0.1, 0.05), (0.0, -0.1), (-0.25, 0.1)] {
            let c = classify_focal_singularity(&ch, p).unwrap();
            let w = focal_surfaces(&ch, p).unwrap().w1.unwrap();
            assert_eq!(morin_class(&ch, (p.0, p.1, w)).unwrap(), c.morin_counterpart(), "{p:?}");
        }
    }

    #[test]
    fn parallel_sphere() {
        let s = builtin_surface("SPHERE").unwrap();
        let collapsed = parallel_surface(&s, 1.0).unwrap();
        let half = parallel_surface(&s, 0.5).unwrap();
        assert!(half.coords().is_some());
        for p in s.domain.sample(5, 5) {
            let (f, _) = collapsed.evaluate_jet(p, 0).unwrap();
            assert!(vec3::norm(f.value()) < 1e-12);
            let (g, _) = half.evaluate_jet(p, 0).unwrap();
            assert!((vec3::norm(g.value()) - 0.5).abs() < 1e-12);
            assert!(area_density_jet(&half, p, 1).unwrap().value().abs() > 1e-3);
        }
    }

    #[test]
    fn parallel_singular_set_is_curvature_level_set() {
        let s = parse_surface_spec(
            "name = bowl\nx = u\ny = v\nz = u^2 + 0.3*v^2 + 0.2*u*v^2\ndomain = -0.6 0.6 -0.6 0.6",
        )
        .unwrap();
        let base = AdaptedChart::regular(&s, (0.1, 0.0));
        let k = principal_branches(&base, (0.1, 0.0)).unwrap();
        let t = 1.0 / k.kappa1;
        let par = parallel_surface(&s, t).unwrap();
        let curve = trace_singular_curve(&par, (0.1, 0.0), 0.01, 40).unwrap();
        assert!(curve.samples.len() > 10);
        for &p in &curve.samples {
            let pd = principal_branches(&AdaptedChart::regular(&s, p), p).unwrap();
            let r = (pd.kappa1 - 1.0 / t).abs().min((pd.kappa2 - 1.0 / t).abs());
            assert!(r <= 1e-6, "{p:?}: {r}");
        }
    }

    #[test]
    fn parallel_of_front_is_evaluator_backed() {
        let s = builtin_surface("CE_T").unwrap();
        let par = parallel_surface(&s, 0.25).unwrap();
        assert!(matches!(par.geometry, Geometry::Parallel { .. }));
        let fr = s.local_frame((0.3, 0.2), 2).unwrap();
        let (f, _) = par.evaluate_jet((0.3, 0.2), 2).unwrap();
        let want = vec3::add(fr.f.value(), vec3::scale(fr.nu.value(), 0.25));
        assert!(vec3::dist(f.value(), want) < 1e-14);
    }
}
