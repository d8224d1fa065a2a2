//! Whole-surface runs: invariant tables along the singular curve and focal
//! surface meshes over the domain.

use rayon::prelude::*;

use crate::chart::{
    adapt_chart, classify_singular_point, trace_singular_curve, AdaptedChart, ChartKind,
    PointKind, SingularCurve,
};
use crate::dsl::SurfaceSpec;
use crate::error::Result;
use crate::export::{GridMesh, InvariantRow};
use crate::focal::{focal_surfaces, hat_focal_geometry};
use crate::invariants::{
    edge_invariants, normalized_cuspidal_curvature, principal_branches, ridge_order,
    sub_parabolic_residual,
};
use crate::vec3::V3;

/// Snaps points of a preadapted surface onto `v = 0` so that its identity
/// chart is used.
fn snap(spec: &SurfaceSpec, p: (f64, f64)) -> (f64, f64) {
    if spec.preadapted && p.1.abs() <= 1e-9 {
        (p.0, 0.0)
    } else {
        p
    }
}

/// Invariants at one singular point; quantities that do not apply are left
/// empty.
pub fn analyze_point(spec: &SurfaceSpec, p: (f64, f64)) -> Result<InvariantRow> {
    let p = snap(spec, p);
    let info = classify_singular_point(spec, p)?;
    let mut row = InvariantRow {
        u: info.point.0,
        v: info.point.1,
        kind: info.kind.to_string(),
        edge_type: info.edge_type.to_string(),
        ..Default::default()
    };
    if info.kind == PointKind::Degenerate {
        return Ok(row);
    }
    let chart = adapt_chart(spec, snap(spec, info.point))?;
    let o = chart.origin();
    if let Ok(pd) = principal_branches(&chart, o) {
        row.kappa_bounded = pd.kappa_bounded;
        row.hat_kappa = pd.hat_kappa;
    }
    row.ridge_order = ridge_order(&chart, o, 2).ok();
    match chart.kind() {
        ChartKind::First => {
            if let Ok(inv) = edge_invariants(&chart, o.0) {
                row.kappa_s = Some(inv.kappa_s);
                row.kappa_nu = Some(inv.kappa_nu);
                row.kappa_c = Some(inv.kappa_c);
                row.kappa_t = Some(inv.kappa_t);
            }
            row.subparab_residual = sub_parabolic_residual(&chart, o.0).ok();
            if let Ok(h) = hat_focal_geometry(&chart, o.0) {
                row.k_closed = Some(h.k_closed);
                row.k_direct = Some(h.k_direct);
                row.h_abs_closed = Some(h.h_closed_abs);
                row.h_abs_direct = Some(h.h_direct_abs);
                row.kappa_g_hat = Some(h.kappa_g_hat);
                row.kappa_n_hat = Some(h.kappa_n_hat);
                row.point_type = Some(h.point_type.to_string());
                row.loc_residual = Some(h.line_of_curvature_residual);
            }
        }
        ChartKind::Second => row.mu_c = normalized_cuspidal_curvature(&chart).ok(),
        ChartKind::Regular => {}
    }
    Ok(row)
}

/// Traces the singular curve through `seed` and analyzes every sample.
pub fn analyze_curve(
    spec: &SurfaceSpec,
    seed: (f64, f64),
    step: f64,
    max_points: usize,
) -> Result<(SingularCurve, Vec<InvariantRow>)> {
    let curve = trace_singular_curve(spec, seed, step, max_points)?;
    let rows = curve
        .samples
        .par_iter()
        .map(|&p| analyze_point(spec, p))
        .collect::<Result<Vec<_>>>()?;
    Ok((curve, rows))
}

/// The surface, `FC_f` and `ŵFC_f` sampled at cell centres of an
/// `n × m` grid (`n` along `u`, `m` along `v`).
#[derive(Clone, Debug)]
pub struct FocalMeshes {
    pub surface: GridMesh,
    pub fc: GridMesh,
    pub hat_fc: GridMesh,
}

/// Chart covering the domain: adapted at the singular curve through the
/// domain centre when there is one, otherwise the identity.
fn covering_chart(spec: &SurfaceSpec) -> Result<(AdaptedChart, Option<SingularCurve>)> {
    let d = spec.domain;
    let centre = ((d.u0 + d.u1) / 2.0, (d.v0 + d.v1) / 2.0);
    let step = ((d.u1 - d.u0).min(d.v1 - d.v0) / 100.0).max(1e-3);
    match trace_singular_curve(spec, centre, step, 2000) {
        Ok(curve) => {
            let dist = |p: &(f64, f64)| (p.0 - centre.0).hypot(p.1 - centre.1);
            let nearest = curve
                .samples
                .iter()
                .copied()
                .min_by(|a, b| dist(a).total_cmp(&dist(b)))
                .expect("traced curves are nonempty");
            let p = snap(spec, nearest);
            Ok((adapt_chart(spec, p)?, Some(curve)))
        }
        Err(_) => Ok((AdaptedChart::regular(spec, centre), None)),
    }
}

pub fn focal_meshes(spec: &SurfaceSpec, n: usize, m: usize) -> Result<FocalMeshes> {
    let (chart, curve) = covering_chart(spec)?;
    let d = spec.domain;
    let points: Vec<(f64, f64)> = (0..m)
        .flat_map(|j| {
            (0..n).map(move |i| {
                (
                    d.u0 + (i as f64 + 0.5) / n as f64 * (d.u1 - d.u0),
                    d.v0 + (j as f64 + 0.5) / m as f64 * (d.v1 - d.v0),
                )
            })
        })
        .collect();
    type Sample = (Option<V3>, Option<V3>, Option<V3>);
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|&p| {
            let Ok(c) = chart.from_original(p) else {
                return (None, None, None);
            };
            let f = chart.frame(c, 2).ok().map(|fr| fr.f.value());
            match focal_surfaces(&chart, c) {
                Ok(s) => (f, s.fc, Some(s.hat_fc)),
                Err(_) => (f, None, None),
            }
        })
        .collect();
    let locus: Vec<V3> = curve
        .map(|c| {
            c.samples
                .iter()
                .filter_map(|&p| spec.evaluate_jet(p, 0).ok().map(|(f, _)| f.value()))
                .collect()
        })
        .unwrap_or_default();
    let grid = |name: &str, pick: fn(&Sample) -> Option<V3>| {
        GridMesh::new(name, m, n, samples.iter().map(pick).collect())
    };
    let mut hat_fc = grid("hat_focal_surface", |s| s.2)?;
    if locus.len() > 1 {
        hat_fc = hat_fc.with_polyline("singular_locus", locus);
    }
    Ok(FocalMeshes {
        surface: grid("surface", |s| s.0)?,
        fc: grid("focal_surface", |s| s.1)?,
        hat_fc,
    })
}
