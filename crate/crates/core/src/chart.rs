//! Singular set, singular point classification and adapted coordinates.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3x2, Vector3};

use crate::dsl::SurfaceSpec;
use crate::error::{Error, Result};
use crate::jet::{det3, Jet2, Vec3Jet};
use crate::vec3::{self, V3};

/// Jet order used for adapted charts. Curvature derivatives along a
/// cuspidal edge lose three orders to `h`, `ν_v` and the principal formulas,
/// and a second order ridge test needs three more.
pub const CHART_ORDER: usize = 8;

/// Non-degeneracy threshold for `|dλ|`, scaled by `|f_u| + |f_v| + 1`.
pub const TOL_ND: f64 = 1e-8;
/// Threshold for `ηλ = 0` and `ηηλ = 0`, scaled like [`TOL_ND`].
pub const TOL_C: f64 = 1e-8;

const ON_CURVE: f64 = 1e-9;
const ADMISSIBILITY_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    First,
    SecondAdmissible,
    SecondNonadmissible,
    Degenerate,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::First => "first",
            PointKind::SecondAdmissible => "second-admissible",
            PointKind::SecondNonadmissible => "second-nonadmissible",
            PointKind::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeType {
    CuspidalEdge,
    Swallowtail,
    Other,
}

impl EdgeType {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::CuspidalEdge => "cuspidal-edge",
            EdgeType::Swallowtail => "swallowtail",
            EdgeType::Other => "other",
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPointInfo {
    pub point: (f64, f64),
    pub lambda_gradient: [f64; 2],
    pub null_direction: [f64; 2],
    pub kind: PointKind,
    pub edge_type: EdgeType,
    pub eta_lambda: f64,
    pub eta_eta_lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularCurve {
    pub samples: Vec<(f64, f64)>,
    /// Cumulative parameter-space arclength of the samples.
    pub parameter: Vec<f64>,
    pub closed: bool,
}

/// Jet of the signed area density `λ = det(f_u, f_v, ν)` at a point.
pub fn area_density_jet(spec: &SurfaceSpec, point: (f64, f64), order: usize) -> Result<Jet2> {
    let fr = spec.local_frame(point, order + 2)?;
    let lam = det3(&fr.f.d_du(), &fr.f.d_dv(), &fr.nu);
    Ok(lam.truncate(order))
}

/// Second-order data of `λ` and the Jacobian of `f` at a point.
#[derive(Clone, Debug)]
struct LocalLambda {
    value: f64,
    grad: [f64; 2],
    fu: V3,
    fv: V3,
    scale: f64,
    jets: (Vec3Jet, Vec3Jet, Jet2),
}

impl LocalLambda {
    fn from_jets(f_u: &Vec3Jet, f_v: &Vec3Jet, lam: &Jet2) -> Self {
        let fu = f_u.value();
        let fv = f_v.value();
        Self {
            value: lam.value(),
            grad: lam.gradient(),
            fu,
            fv,
            scale: vec3::norm(fu) + vec3::norm(fv) + 1.0,
            jets: (f_u.clone(), f_v.clone(), lam.clone()),
        }
    }

    fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }

    fn tangent(&self) -> [f64; 2] {
        let n = self.grad_norm();
        [-self.grad[1] / n, self.grad[0] / n]
    }
}

fn local_lambda(spec: &SurfaceSpec, p: (f64, f64)) -> Result<LocalLambda> {
    let fr = spec.local_frame(p, 4)?;
    let fu = fr.f.d_du();
    let fv = fr.f.d_dv();
    let lam = det3(&fu, &fv, &fr.nu);
    Ok(LocalLambda::from_jets(&fu, &fv, &lam))
}

/// Newton projection of `p` onto `{λ = 0}` along `∇λ`.
fn project(spec: &SurfaceSpec, p: (f64, f64)) -> Result<(f64, f64)> {
    let mut p = p;
    for _ in 0..50 {
        let l = local_lambda(spec, p)?;
        let g = l.grad_norm();
        if g <= TOL_ND * l.scale {
            return Err(Error::DegeneratePoint { u: p.0, v: p.1 });
        }
        if l.value == 0.0 {
            return Ok(p);
        }
        let k = l.value / (g * g);
        let next = (p.0 - k * l.grad[0], p.1 - k * l.grad[1]);
        let moved = (next.0 - p.0).hypot(next.1 - p.1);
        p = next;
        if moved <= 1e-15 * (1.0 + p.0.abs() + p.1.abs()) {
            break;
        }
    }
    let l = local_lambda(spec, p)?;
    if l.value.abs() > ON_CURVE * l.scale {
        return Err(Error::NotSingular {
            u: p.0,
            v: p.1,
            lambda: l.value.abs(),
        });
    }
    Ok(p)
}

fn image(spec: &SurfaceSpec, p: (f64, f64)) -> Result<V3> {
    Ok(spec.evaluate_jet(p, 2)?.0.value())
}

/// Predictor-corrector continuation of `{λ = 0}` from a seed.
///
/// Traces forward along `(-λ_v, λ_u)` and, unless the curve closes up in
/// the image, backward as well. Stops at the domain boundary or after
/// `max_points` samples.
pub fn trace_singular_curve(
    spec: &SurfaceSpec,
    seed: (f64, f64),
    step: f64,
    max_points: usize,
) -> Result<SingularCurve> {
    if step.is_nan() || step <= 0.0 || max_points == 0 {
        return Err(Error::InvalidArgument(
            "trace needs a positive step and at least one point".into(),
        ));
    }
    let p0 = project(spec, seed)?;
    let f0 = image(spec, p0)?;
    let (fwd, closed) = march(spec, p0, f0, 1.0, step, max_points - 1)?;
    let mut samples = Vec::with_capacity(max_points);
    let mut closed = closed;
    if closed {
        samples.push(p0);
        samples.extend(fwd);
    } else {
        let budget = max_points - 1 - fwd.len();
        let (bwd, bwd_closed) = march(spec, p0, f0, -1.0, step, budget)?;
        samples.push(p0);
        if bwd_closed {
            // the backward sweep alone covers the loop
            closed = true;
            samples.extend(bwd);
        } else {
            samples.splice(0..0, bwd.into_iter().rev());
            samples.extend(fwd);
        }
    }
    let mut parameter = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (k, p) in samples.iter().enumerate() {
        if k > 0 {
            let q = samples[k - 1];
            acc += (p.0 - q.0).hypot(p.1 - q.1);
        }
        parameter.push(acc);
    }
    Ok(SingularCurve {
        samples,
        parameter,
        closed,
    })
}

fn march(
    spec: &SurfaceSpec,
    p0: (f64, f64),
    f0: V3,
    sign: f64,
    step: f64,
    budget: usize,
) -> Result<(Vec<(f64, f64)>, bool)> {
    let mut out = Vec::new();
    let mut p = p0;
    let t = local_lambda(spec, p0)?.tangent();
    let mut dir = [sign * t[0], sign * t[1]];
    let mut prev = f0;
    let mut farthest = 0.0_f64;
    while out.len() < budget {
        let pred = (p.0 + step * dir[0], p.1 + step * dir[1]);
        if !spec.domain.contains(pred.0, pred.1) {
            break;
        }
        let q = match project(spec, pred) {
            Ok(q) => q,
            Err(Error::OutsideDomain { .. }) => break,
            Err(e) => return Err(e),
        };
        if !spec.domain.contains(q.0, q.1) {
            break;
        }
        let img = image(spec, q)?;
        let d0 = vec3::dist(img, f0);
        let ds = vec3::dist(img, prev);
        farthest = farthest.max(d0);
        if out.len() >= 3 && farthest > 4.0 * ds && d0 < 0.75 * ds {
            return Ok((out, true));
        }
        let mut t = local_lambda(spec, q)?.tangent();
        if t[0] * dir[0] + t[1] * dir[1] < 0.0 {
            t = [-t[0], -t[1]];
        }
        dir = t;
        prev = img;
        p = q;
        out.push(q);
    }
    Ok((out, false))
}

/// Unit kernel direction of the 3×2 Jacobian `[f_u f_v]`, with its largest
/// component made positive.
fn null_direction(l: &LocalLambda, p: (f64, f64)) -> Result<[f64; 2]> {
    let j = Matrix3x2::from_columns(&[Vector3::from(l.fu), Vector3::from(l.fv)]);
    let svd = j.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let (small, large) = if sv[0] <= sv[1] { (0, 1) } else { (1, 0) };
    if sv[large] <= TOL_ND * l.scale {
        return Err(Error::UnsupportedCorank { u: p.0, v: p.1 });
    }
    let mut eta = [vt[(small, 0)], vt[(small, 1)]];
    let dominant = if eta[0].abs() >= eta[1].abs() { eta[0] } else { eta[1] };
    if dominant < 0.0 {
        eta = [-eta[0], -eta[1]];
    }
    Ok(eta)
}

fn directional(eta: [f64; 2], grad: [f64; 2]) -> f64 {
    eta[0] * grad[0] + eta[1] * grad[1]
}

/// `η̃(η̃λ)` at the point, with `η̃` the kernel field of `df`
/// (`(-⟨f_u,f_v⟩, |f_u|²)` or `(|f_v|², -⟨f_u,f_v⟩)`), normalized to `η` at
/// the point. It coincides with the null direction along `S(f)`.
fn eta_eta_lambda(l: &LocalLambda, eta: [f64; 2]) -> f64 {
    let (fu, fv, lam) = &l.jets;
    let cross = fu.dot(fv);
    let (a, b) = if vec3::norm(l.fu) >= vec3::norm(l.fv) {
        (-&cross, fu.dot(fu))
    } else {
        (fv.dot(fv), -&cross)
    };
    let (a0, b0) = (a.value(), b.value());
    let k = (a0 * eta[0] + b0 * eta[1]).signum() / a0.hypot(b0);
    let g = lam.directional(&a.scale(k), &b.scale(k)).gradient();
    eta[0] * g[0] + eta[1] * g[1]
}

/// Classification from local data; `neighbours` yields the `ηλ`-scaled
/// values of `det(γ′, η)` at nearby singular points for the admissibility test.
fn classify_local(
    p: (f64, f64),
    l: &LocalLambda,
    neighbours: impl FnOnce() -> Result<Vec<(f64, f64)>>,
) -> Result<SingularPointInfo> {
    let eta = null_direction(l, p)?;
    let eta_lambda = directional(eta, l.grad);
    let eta_eta_lambda = eta_eta_lambda(l, eta);
    let tol = TOL_C * l.scale;
    let (kind, edge_type) = if l.grad_norm() <= TOL_ND * l.scale {
        (PointKind::Degenerate, EdgeType::Other)
    } else if eta_lambda.abs() > tol {
        (PointKind::First, EdgeType::CuspidalEdge)
    } else {
        // det(γ′, η) = -ηλ/|∇λ| with γ′ = (-λ_v, λ_u)/|∇λ|
        let admissible = neighbours()?.into_iter().all(|(ev, scale)| ev.abs() > TOL_C * scale);
        let kind = if admissible {
            PointKind::SecondAdmissible
        } else {
            PointKind::SecondNonadmissible
        };
        let edge = if eta_eta_lambda.abs() > tol {
            EdgeType::Swallowtail
        } else {
            EdgeType::Other
        };
        (kind, edge)
    };
    Ok(SingularPointInfo {
        point: p,
        lambda_gradient: l.grad,
        null_direction: eta,
        kind,
        edge_type,
        eta_lambda,
        eta_eta_lambda,
    })
}

/// `(ηλ, scale)` at a singular point, with `η` the kernel of `df`.
fn eta_lambda_at(l: &LocalLambda, p: (f64, f64)) -> Result<(f64, f64)> {
    let eta = null_direction(l, p)?;
    Ok((directional(eta, l.grad), l.scale))
}

/// Kind (first / second, admissibility) and edge type of a singular point.
///
/// The point is first projected onto `{λ = 0}`. `ηηλ` extends `η` by
/// the kernel field of `df`.
pub fn classify_singular_point(spec: &SurfaceSpec, p: (f64, f64)) -> Result<SingularPointInfo> {
    let l0 = local_lambda(spec, p)?;
    let (p, l) = if l0.grad_norm() <= TOL_ND * l0.scale {
        if l0.value.abs() > ON_CURVE * l0.scale {
            return Err(Error::NotSingular {
                u: p.0,
                v: p.1,
                lambda: l0.value.abs(),
            });
        }
        (p, l0)
    } else if l0.value == 0.0 {
        (p, l0)
    } else {
        let q = project(spec, p)?;
        (q, local_lambda(spec, q)?)
    };
    classify_local(p, &l, || {
        let curve = trace_singular_curve(spec, p, ADMISSIBILITY_STEP, 7)?;
        curve
            .samples
            .iter()
            .filter(|q| (q.0 - p.0).hypot(q.1 - p.1) > 0.5 * ADMISSIBILITY_STEP)
            .map(|&q| eta_lambda_at(&local_lambda(spec, q)?, q))
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// Singular curve `{v = 0}` with null direction `∂_v` on it.
    First,
    /// Singular curve `{v = 0}` with null direction `∂_u + e(u)∂_v` on it.
    Second,
    /// Neighbourhood of a regular point; identity coordinates.
    Regular,
}

/// A surface in coordinates adapted to its singular curve.
///
/// Chart coordinates are written `(u, v)`. For surfaces declared preadapted,
/// for regular points, and for any surface whose singular set is already
/// `{v = 0}`, the chart is the identity. Otherwise `phi` is a polynomial
/// coordinate change expanded about the chart origin `(center, 0)`.
#[derive(Clone, Debug)]
pub struct AdaptedChart {
    spec: Arc<SurfaceSpec>,
    kind: ChartKind,
    order: usize,
    center: f64,
    base: (f64, f64),
    phi: Option<[Jet2; 2]>,
    e: Option<Jet2>,
    orientation: f64,
}

/// Jets of `f`, `ν` and (on singular charts) `h` at a chart point.
#[derive(Clone, Debug)]
pub struct ChartFrame {
    pub point: (f64, f64),
    pub kind: ChartKind,
    pub f: Vec3Jet,
    pub nu: Vec3Jet,
    /// The chart coordinate `v` as a jet.
    pub t: Jet2,
    /// `f_v = v h` (first kind) or `f_u + e(u) f_v = v h` (second kind).
    pub h: Option<Vec3Jet>,
    /// `e(u)` as a jet (second kind).
    pub e: Option<Jet2>,
}

impl ChartFrame {
    pub fn f_u(&self) -> Vec3Jet {
        self.f.d_du()
    }

    pub fn f_v(&self) -> Vec3Jet {
        self.f.d_dv()
    }

    /// `λ = det(f_u, f_v, ν)`.
    pub fn lambda(&self) -> Jet2 {
        det3(&self.f_u(), &self.f_v(), &self.nu)
    }

    /// `λ / v`: `det(f_u, h, ν)` (first kind) or `det(h, f_v, ν)` (second kind).
    pub fn lambda_tilde(&self) -> Option<Jet2> {
        let h = self.h.as_ref()?;
        Some(match self.kind {
            ChartKind::First => det3(&self.f_u(), h, &self.nu),
            ChartKind::Second => det3(h, &self.f_v(), &self.nu),
            ChartKind::Regular => return None,
        })
    }
}

fn pure_u(j: &Jet2) -> Jet2 {
    Jet2::from_fn(j.order(), |i, k| if k == 0 { j.coeff(i, 0) } else { 0.0 })
}

impl AdaptedChart {
    fn identity(spec: Arc<SurfaceSpec>, kind: ChartKind, base: (f64, f64), order: usize) -> Self {
        Self {
            spec,
            kind,
            order,
            center: base.0,
            base,
            phi: None,
            e: None,
            orientation: 1.0,
        }
    }

    /// Identity chart around a regular point.
    pub fn regular(spec: &SurfaceSpec, p: (f64, f64)) -> Self {
        Self::identity(Arc::new(spec.clone()), ChartKind::Regular, p, CHART_ORDER)
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_identity(&self) -> bool {
        self.phi.is_none()
    }

    /// Chart coordinates of the point the chart was built at.
    pub fn origin(&self) -> (f64, f64) {
        match self.phi {
            None => self.base,
            Some(_) => (self.center, 0.0),
        }
    }

    /// Sign applied to the constructed unit normal.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// The same chart with `ν` replaced by `-ν`. The result has `λ_v < 0`
    /// on the singular curve when `self` has `λ_v > 0`.
    pub fn with_reversed_normal(&self) -> Self {
        let mut c = self.clone();
        c.orientation = -c.orientation;
        c
    }

    /// Polynomial coordinate change `(u, v) ↦ (u_orig, v_orig)` about the
    /// chart origin, or `None` for the identity.
    pub fn phi(&self) -> Option<&[Jet2; 2]> {
        self.phi.as_ref()
    }

    /// `e(u)` as a polynomial in `u - center` (second kind only).
    pub fn e_polynomial(&self) -> Option<&Jet2> {
        self.e.as_ref()
    }

    pub fn e_at(&self, u: f64) -> f64 {
        self.e
            .as_ref()
            .map_or(0.0, |e| e.eval_offset(u - self.center, 0.0))
    }

    /// Original surface parameters of a chart point.
    pub fn to_original(&self, point: (f64, f64)) -> (f64, f64) {
        match &self.phi {
            None => point,
            Some(phi) => {
                let (a, b) = (point.0 - self.center, point.1);
                (phi[0].eval_offset(a, b), phi[1].eval_offset(a, b))
            }
        }
    }

    /// Chart coordinates of an original parameter point, by Newton iteration
    /// on the coordinate change.
    pub fn from_original(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        let Some(phi) = &self.phi else {
            return Ok(point);
        };
        let d = [
            [phi[0].d_du(), phi[0].d_dv()],
            [phi[1].d_du(), phi[1].d_dv()],
        ];
        let (mut a, mut b) = (0.0, 0.0);
        let (mut a_prev, mut b_prev) = (f64::NAN, f64::NAN);
        for it in 0..60 {
            let r0 = phi[0].eval_offset(a, b) - point.0;
            let r1 = phi[1].eval_offset(a, b) - point.1;
            if r0.hypot(r1) <= 1e-13 * (1.0 + point.0.abs() + point.1.abs()) {
                return Ok((self.center + a, b));
            }
            let j = [
                [d[0][0].eval_offset(a, b), d[0][1].eval_offset(a, b)],
                [d[1][0].eval_offset(a, b), d[1][1].eval_offset(a, b)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-14 || it > 0 && a == a_prev && b == b_prev {
                break;
            }
            (a_prev, b_prev) = (a, b);
            a -= (j[1][1] * r0 - j[0][1] * r1) / det;
            b -= (j[0][0] * r1 - j[1][0] * r0) / det;
        }
        Err(Error::ChartFailure(format!(
            "({}, {}) is outside the range of the chart at ({}, {})",
            point.0, point.1, self.base.0, self.base.1
        )))
    }

    fn e_jet(&self, u: f64, order: usize) -> Option<Jet2> {
        self.e.as_ref().map(|e| {
            e.substitute(
                &Jet2::var_u(u - self.center, order),
                &Jet2::zero(order),
            )
        })
    }

    /// Jets of `f` (order `order`), `ν` and `h` at a chart point.
    pub fn frame(&self, point: (f64, f64), order: usize) -> Result<ChartFrame> {
        let (f, nu) = match &self.phi {
            None => {
                let fr = self.spec.local_frame(point, order)?;
                (fr.f, fr.nu)
            }
            Some(phi) => {
                let ds = Jet2::var_u(point.0 - self.center, order);
                let dt = Jet2::var_v(point.1, order);
                let mut uj = phi[0].substitute(&ds, &dt);
                let mut vj = phi[1].substitute(&ds, &dt);
                let (u0, v0) = (uj.value(), vj.value());
                uj.set_coeff(0, 0, 0.0);
                vj.set_coeff(0, 0, 0.0);
                let fr = self.spec.local_frame((u0, v0), order)?;
                let k = fr.nu.order();
                (
                    fr.f.substitute(&uj, &vj),
                    fr.nu.substitute(&uj.truncate(k), &vj.truncate(k)),
                )
            }
        };
        let nu = if self.orientation < 0.0 { nu.scale_f(-1.0) } else { nu };
        let t = Jet2::var_v(point.1, order);
        let e = self.e_jet(point.0, order);
        let numerator = match self.kind {
            ChartKind::Regular => None,
            ChartKind::First => Some(f.d_dv()),
            ChartKind::Second => {
                let e = e.as_ref().expect("second kind charts carry e(u)");
                Some(f.d_du().add(&f.d_dv().scale(e)))
            }
        };
        let h = match numerator {
            None => None,
            Some(num) if point.1 == 0.0 => Some(num.div_exact_dv(1e-7).map_err(|err| {
                Error::NotAdapted {
                    u: point.0,
                    v: point.1,
                    reason: err.to_string(),
                }
            })?),
            Some(num) => Some(num.map(|c| c / &t)),
        };
        Ok(ChartFrame {
            point,
            kind: self.kind,
            f,
            nu,
            t,
            h,
            e,
        })
    }

    /// Classifies the singular point `(u, 0)` using chart coordinates only.
    pub fn classify_at(&self, u: f64) -> Result<SingularPointInfo> {
        let local = |s: f64| -> Result<LocalLambda> {
            let fr = self.frame((s, 0.0), 4)?;
            let (fu, fv) = (fr.f_u(), fr.f_v());
            let lam = det3(&fu, &fv, &fr.nu);
            Ok(LocalLambda::from_jets(&fu, &fv, &lam))
        };
        let l = local(u)?;
        classify_local((u, 0.0), &l, || {
            [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]
                .iter()
                .map(|k| {
                    let s = u + k * ADMISSIBILITY_STEP;
                    eta_lambda_at(&local(s)?, (s, 0.0))
                })
                .collect()
        })
    }
}

/// Adapted chart at a point of the singular set (or a regular chart at a
/// regular point), with jets of order [`CHART_ORDER`].
pub fn adapt_chart(spec: &SurfaceSpec, p: (f64, f64)) -> Result<AdaptedChart> {
    adapt_chart_with_order(spec, p, CHART_ORDER)
}

/// [`adapt_chart`] with an explicit polynomial order for the coordinate change.
pub fn adapt_chart_with_order(
    spec: &SurfaceSpec,
    p: (f64, f64),
    order: usize,
) -> Result<AdaptedChart> {
    if order < 3 {
        return Err(Error::InvalidArgument("chart order must be at least 3".into()));
    }
    let spec = Arc::new(spec.clone());
    let l = local_lambda(&spec, p)?;
    if l.value.abs() > ON_CURVE * l.scale {
        return Ok(AdaptedChart::identity(spec, ChartKind::Regular, p, order));
    }
    if spec.preadapted && p.1 == 0.0 {
        if l.grad_norm() <= TOL_ND * l.scale {
            return Err(Error::DegeneratePoint { u: p.0, v: p.1 });
        }
        let mut chart = AdaptedChart::identity(spec, ChartKind::First, p, order);
        if l.grad[1] < 0.0 {
            chart.orientation = -1.0;
        }
        return Ok(chart);
    }

    let info = classify_singular_point(&spec, p)?;
    let kind = match info.kind {
        PointKind::First => ChartKind::First,
        PointKind::SecondAdmissible | PointKind::SecondNonadmissible => ChartKind::Second,
        PointKind::Degenerate => return Err(Error::DegeneratePoint { u: p.0, v: p.1 }),
    };
    let p = info.point;
    let n = order;

    // Straighten the singular curve as a graph over u or over v, keeping the
    // expansion with the larger estimated radius of convergence.
    let lam = area_density_jet(&spec, p, n + 1)?;
    let g = lam.gradient();
    let gmax = g[0].abs().max(g[1].abs());
    let mut candidates = Vec::new();
    for by_u in [true, false] {
        let slope = if by_u { g[1] } else { g[0] };
        if slope.abs() > 1e-6 * gmax {
            if let Some(graph) = straighten(&lam, by_u, n, l.scale) {
                candidates.push((by_u, graph));
            }
        }
    }
    let preferred = g[1].abs() >= g[0].abs();
    let rank = |c: &(bool, Jet2)| (radius_estimate(&c.1), c.0 == preferred);
    let best = candidates
        .into_iter()
        .max_by(|a, b| rank(a).partial_cmp(&rank(b)).unwrap_or(std::cmp::Ordering::Equal));
    let Some((by_u, graph)) = best else {
        return Err(Error::ChartFailure(format!(
            "singular curve at ({}, {}) could not be straightened",
            p.0, p.1
        )));
    };
    let (phi, center) = if by_u {
        ([Jet2::var_u(p.0, n), &graph + &Jet2::var_v(p.1, n)], p.0)
    } else {
        ([&graph + &Jet2::var_v(p.0, n), Jet2::var_u(p.1, n)], p.1)
    };
    let mut chart = AdaptedChart {
        spec,
        kind: ChartKind::Regular,
        order: n,
        center,
        base: p,
        phi: Some(phi),
        e: None,
        orientation: 1.0,
    };

    let fr = chart.frame((center, 0.0), n + 1)?;
    let (fs, ft) = (fr.f_u(), fr.f_v());
    match kind {
        ChartKind::First => {
            // shear u = u' + c(u') v' so that f_v' vanishes on the axis
            let c = pure_u(&(-(fs.dot(&ft) / fs.dot(&fs))));
            let a = &Jet2::var_u(0.0, n) + &(&c * &Jet2::var_v(0.0, n));
            let b = Jet2::var_v(0.0, n);
            let phi = chart.phi.as_ref().expect("polynomial chart");
            chart.phi = Some([phi[0].substitute(&a, &b), phi[1].substitute(&a, &b)]);
        }
        ChartKind::Second => {
            let mut e = pure_u(&(-(fs.dot(&ft) / ft.dot(&ft)))).truncate(n);
            if e.value().abs() <= 1e-10 {
                e.set_coeff(0, 0, 0.0);
            }
            chart.e = Some(e);
        }
        ChartKind::Regular => unreachable!(),
    }
    chart.kind = kind;
    let lam = chart.frame((center, 0.0), 3)?.lambda();
    if lam.coeff(0, 1) < 0.0 {
        chart.orientation = -1.0;
    }
    Ok(chart)
}

/// Graph `v = v0 + g(u - u0)` (or `u = u0 + g(v - v0)`) of `{λ = 0}` by
/// chord iteration on the jet of `λ`.
fn straighten(lam: &Jet2, by_u: bool, n: usize, scale: f64) -> Option<Jet2> {
    let g = lam.gradient();
    let slope = if by_u { g[1] } else { g[0] };
    let s = Jet2::var_u(0.0, n);
    let eval = |graph: &Jet2| {
        if by_u {
            lam.substitute(&s, graph)
        } else {
            lam.substitute(graph, &s)
        }
    };
    let mut graph = Jet2::zero(n);
    for _ in 0..=n + 1 {
        graph = &graph - &eval(&graph).scale(1.0 / slope);
    }
    let resid = eval(&graph)
        .coeffs()
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()));
    (resid <= 1e-8 * scale).then_some(graph)
}

/// Root-test estimate of the radius of convergence of a univariate series.
fn radius_estimate(g: &Jet2) -> f64 {
    let n = g.order();
    (n / 2..=n)
        .filter(|&k| k > 0)
        .map(|k| g.coeff(k, 0).abs())
        .enumerate()
        .map(|(i, c)| {
            let k = (n / 2 + i).max(1) as f64;
            if c == 0.0 {
                f64::INFINITY
            } else {
                c.powf(-1.0 / k)
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Jet of `h` at a chart point: `f_v = v h` (first kind) or
/// `f_u + e(u) f_v = v h` (second kind), by exact division on the axis.
pub fn h_field_jet(chart: &AdaptedChart, point: (f64, f64)) -> Result<Vec3Jet> {
    chart
        .frame(point, chart.order())?
        .h
        .ok_or(Error::WrongKind {
            expected: "singular (first or second kind)",
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::builtin_surface;

    fn spec(name: &str) -> SurfaceSpec {
        builtin_surface(name).unwrap()
    }

    #[test]
    fn cuspidal_edge_area_density() {
        let lam = area_density_jet(&spec("CE0"), (0.4, 0.0), 3).unwrap();
        assert_eq!(lam.value(), 0.0);
        assert!((lam.coeff(0, 1) - 2.0).abs() < 1e-14);
        let sw = area_density_jet(&spec("SW"), (0.0, 0.0), 3).unwrap();
        assert!(sw.value().abs() < 1e-15);
    }

    #[test]
    fn sphere_has_no_singular_points() {
        let s = spec("SPHERE");
        for (u, v) in s.domain.sample(8, 8) {
            let lam = area_density_jet(&s, (u, v), 1).unwrap().value();
            assert!(lam >= v.cos() * 0.999 || -lam >= v.cos() * 0.999, "{lam}");
        }
    }

    #[test]
    fn trace_straight_edge() {
        let c = trace_singular_curve(&spec("CE0"), (0.0, 0.0), 0.05, 200).unwrap();
        assert!(c.samples.len() > 35);
        assert!(!c.closed);
        assert!(c.samples.iter().all(|p| p.1.abs() <= 1e-9));
        for w in c.samples.windows(2) {
            assert!((w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) < 0.1);
        }
    }

    #[test]
    fn trace_swallowtail_parabola() {
        let s = spec("SW");
        let c = trace_singular_curve(&s, (-0.06, 0.1), 0.02, 400).unwrap();
        assert!(c.samples.len() > 20);
        for &(u, v) in &c.samples {
            assert!((u + 6.0 * v * v).abs() <= 1e-6);
            let lam = area_density_jet(&s, (u, v), 0).unwrap().value();
            assert!(lam.abs() <= 1e-9);
        }
        assert!(c.samples.iter().any(|p| p.1 > 0.2) && c.samples.iter().any(|p| p.1 < -0.2));
    }

    #[test]
    fn trace_circle_closes() {
        let c = trace_singular_curve(&spec("CIRC"), (0.0, 0.0), 0.05, 1000).unwrap();
        assert!(c.closed);
        let span = c.samples.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
        assert!(span > 6.0 && span < 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn classify_cuspidal_edge() {
        let info = classify_singular_point(&spec("CE0"), (0.3, 0.0)).unwrap();
        assert_eq!(info.kind, PointKind::First);
        assert_eq!(info.edge_type, EdgeType::CuspidalEdge);
        assert!((info.eta_lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classify_swallowtail() {
        let s = spec("SW");
        let info = classify_singular_point(&s, (0.0, 0.0)).unwrap();
        assert_eq!(info.kind, PointKind::SecondAdmissible);
        assert_eq!(info.edge_type, EdgeType::Swallowtail);
        assert!(info.eta_lambda.abs() < 1e-12);
        assert!(info.eta_eta_lambda.abs() > 1.0);
        let off = classify_singular_point(&s, (-0.06, 0.1)).unwrap();
        assert_eq!(off.kind, PointKind::First);
        assert_eq!(off.edge_type, EdgeType::CuspidalEdge);
    }

    #[test]
    fn regular_point_is_not_singular() {
        assert!(matches!(
            classify_singular_point(&spec("SPHERE"), (0.0, 0.0)),
            Err(Error::NotSingular { .. })
        ));
    }

    #[test]
    fn eta_lambda_matches_finite_difference() {
        let s = spec("SW");
        let info = classify_singular_point(&s, (-0.06, 0.1)).unwrap();
        let (p, eta) = (info.point, info.null_direction);
        let lam = |k: f64| {
            area_density_jet(&s, (p.0 + k * eta[0], p.1 + k * eta[1]), 0)
                .unwrap()
                .value()
        };
        let d = |h: f64| (lam(h) - lam(-h)) / (2.0 * h);
        let fd = (4.0 * d(5e-4) - d(1e-3)) / 3.0;
        assert!((fd - info.eta_lambda).abs() < 1e-6, "{fd} {}", info.eta_lambda);
    }

    #[test]
    fn eta_eta_lambda_independent_of_linear_extension() {
        let s = spec("SW");
        let info = classify_singular_point(&s, (0.0, 0.0)).unwrap();
        let lam = area_density_jet(&s, info.point, 3).unwrap();
        let eta = info.null_direction;
        let g = info.lambda_gradient;
        let gn = g[0].hypot(g[1]);
        let n = [g[0] / gn, g[1] / gn];
        let w = [0.7, -1.3];
        // η̃ = η + ((q - p)·n) W vanishes-to-first-order off S(f) only along n
        let offset = Jet2::var_u(0.0, 3).scale(n[0]) + Jet2::var_v(0.0, 3).scale(n[1]);
        let a = Jet2::constant(eta[0], 3) + offset.scale(w[0]);
        let b = Jet2::constant(eta[1], 3) + offset.scale(w[1]);
        let eta_lam = lam.directional(&a, &b);
        let gg = eta_lam.gradient();
        let alt = eta[0] * gg[0] + eta[1] * gg[1];
        assert!((alt - info.eta_eta_lambda).abs() < 1e-10);
    }

    #[test]
    fn preadapted_charts_are_identity() {
        let c = adapt_chart(&spec("CE0"), (0.0, 0.0)).unwrap();
        assert!(c.is_identity());
        assert_eq!(c.kind(), ChartKind::First);
        let circ = adapt_chart(&spec("CIRC"), (1.0, 0.0)).unwrap();
        let lam = circ.frame((1.0, 0.0), 4).unwrap().lambda();
        assert!((lam.coeff(0, 1) - 2.0).abs() < 1e-12);
        let sph = adapt_chart(&spec("SPHERE"), (0.1, 0.2)).unwrap();
        assert_eq!(sph.kind(), ChartKind::Regular);
    }

    #[test]
    fn swallowtail_chart_is_second_kind() {
        let s = spec("SW");
        let c = adapt_chart(&s, (0.0, 0.0)).unwrap();
        assert_eq!(c.kind(), ChartKind::Second);
        assert!(!c.is_identity());
        assert_eq!(c.e_at(0.0), 0.0);
        assert!((c.e_polynomial().unwrap().coeff(1, 0) - 12.0).abs() < 1e-9);
        for k in -5..=5 {
            let u = 0.02 * k as f64;
            let fr = c.frame((u, 0.0), 4).unwrap();
            assert!(fr.lambda().value().abs() < 1e-8);
            assert!(fr.lambda().coeff(0, 1) > 0.0);
            // η = ∂_u + e ∂_v is null on the axis
            let null = fr.f_u().value();
            let fv = fr.f_v().value();
            let e = c.e_at(u);
            assert!(vec3::norm(vec3::add(null, vec3::scale(fv, e))) < 1e-8);
        }
        let info = c.classify_at(0.0).unwrap();
        assert_eq!(info.kind, PointKind::SecondAdmissible);
        assert_eq!(info.edge_type, EdgeType::Swallowtail);
    }

    #[test]
    fn sheared_first_kind_chart() {
        let s = spec("SW");
        let c = adapt_chart(&s, (-0.06, 0.1)).unwrap();
        assert_eq!(c.kind(), ChartKind::First);
        let o = c.origin();
        for k in -3..=3 {
            let u = o.0 + 0.01 * k as f64;
            let fr = c.frame((u, 0.0), 4).unwrap();
            assert!(fr.lambda().value().abs() < 1e-8);
            assert!(vec3::norm(fr.f_v().value()) < 1e-8);
            assert!(fr.lambda().coeff(0, 1) > 0.0);
        }
        let info = c.classify_at(o.0).unwrap();
        assert_eq!(info.kind, PointKind::First);
        assert_eq!(info.edge_type, EdgeType::CuspidalEdge);
        let back = c.to_original(o);
        assert!((back.0 + 0.06).abs() < 1e-9 && (back.1 - 0.1).abs() < 1e-9);
    }

    #[test]
    fn h_fields() {
        let h = h_field_jet(&adapt_chart(&spec("CE0"), (0.0, 0.0)).unwrap(), (0.0, 0.0)).unwrap();
        assert_eq!(h.value(), [0.0, 2.0, 0.0]);
        assert_eq!(h.z.coeff(0, 1), 3.0);

        let circ = adapt_chart(&spec("CIRC"), (0.7, 0.0)).unwrap();
        let h = h_field_jet(&circ, (0.7, 0.0)).unwrap();
        let v = h.value();
        assert!((v[0] - 2.0 * 0.7_f64.cos()).abs() < 1e-14);
        assert!((v[1] - 2.0 * 0.7_f64.sin()).abs() < 1e-14);
        assert!((h.z.coeff(0, 1) - 3.0).abs() < 1e-14);

        let cet = adapt_chart(&spec("CE_T"), (0.0, 0.0)).unwrap();
        let fr = cet.frame((0.2, 0.0), cet.order()).unwrap();
        let h = fr.h.clone().unwrap();
        assert_eq!(h_field_jet(&cet, (0.0, 0.0)).unwrap().value(), [0.0, 2.0, 0.0]);
        assert!((h.z.coeff(1, 0) - 2.0).abs() < 1e-14);
        // f_v = Δv h coefficientwise
        let fv = fr.f_v();
        for d in 0..h.order() {
            for j in 0..=d {
                let i = d - j;
                for (a, b) in [(&fv.x, &h.x), (&fv.y, &h.y), (&fv.z, &h.z)] {
                    assert!((a.coeff(i, j + 1) - b.coeff(i, j)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reversed_normal_flips_lambda_v() {
        let c = adapt_chart(&spec("CE0"), (0.0, 0.0)).unwrap().with_reversed_normal();
        let lam = c.frame((0.0, 0.0), 4).unwrap().lambda();
        assert!(lam.coeff(0, 1) < 0.0);
        assert!(matches!(
            h_field_jet(&AdaptedChart::regular(&spec("SPHERE"), (0.0, 0.0)), (0.0, 0.0)),
            Err(Error::WrongKind { .. })
        ));
    }
}
