//! Edge invariants, principal curvature branches, principal vectors, ridges
//! and sub-parabolic points.
//!
//! Both kinds of singular chart share one algebraic shape. With `v` the
//! chart coordinate and `λ = v λ̃`,
//!
//! ```text
//! κ_bounded   = 2C / (A + σB)         B = sqrt(A² - 4vDC)
//! κ_unbounded = (A + σB) / (2vD)      κ̂ = λ κ_unbounded = λ̃ (A + σB) / (2D)
//! ```
//!
//! where `σ = sgn A` on the singular curve and, for the first kind,
//! `A = ẼÑ - 2vF̃M̃ + vG̃L̃`, `C = L̃Ñ - vM̃²`, `D = ẼG̃ - F̃²`; for the second
//! kind `A = Ĝ(L̂+eM̂) - 2vF̂M̂ + vÊN̂`, `C = (L̂+eM̂)N̂ - vM̂²`, `D = ÊĜ - F̂²`.

use std::fmt;

use crate::chart::{AdaptedChart, ChartFrame, ChartKind};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::vec3::{self, V3};

/// `Ẽ, F̃, G̃, L̃, M̃, Ñ` at a point of a first-kind chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalTilde {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

/// `Ê, F̂, Ĝ, L̂, M̂, N̂` and `e(u)` at a point of a second-kind chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalHat {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub e_u: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fundamental {
    Tilde(FundamentalTilde),
    Hat(FundamentalHat),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeInvariants {
    pub kappa_s: f64,
    pub kappa_nu: f64,
    pub kappa_c: f64,
    pub kappa_t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundedBranch {
    Kappa1,
    Kappa2,
    /// Regular point: both branches are bounded.
    Both,
    /// `A = 0` on the singular curve: the boundedness criterion does not apply.
    Indeterminate,
}

impl fmt::Display for BoundedBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundedBranch::Kappa1 => "kappa1",
            BoundedBranch::Kappa2 => "kappa2",
            BoundedBranch::Both => "both",
            BoundedBranch::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrincipalData {
    /// `2C/(A - B)`; infinite on the singular curve when unbounded.
    pub kappa1: f64,
    /// `2C/(A + B)`; infinite on the singular curve when unbounded.
    pub kappa2: f64,
    pub bounded_branch: BoundedBranch,
    pub kappa_bounded: Option<f64>,
    /// `λ · κ_unbounded`, smooth across the singular curve.
    pub hat_kappa: Option<f64>,
    pub v: Option<[f64; 2]>,
    pub v_ext: Option<[f64; 2]>,
}

/// The six functions of the chart's kind, as jets.
#[derive(Clone, Debug)]
pub(crate) struct FundamentalJets {
    pub e: Jet2,
    pub f: Jet2,
    pub g: Jet2,
    pub l: Jet2,
    pub m: Jet2,
    pub n: Jet2,
}

fn fundamental_jets(fr: &ChartFrame) -> Result<FundamentalJets> {
    let h = fr.h.as_ref().ok_or(Error::WrongKind {
        expected: "singular (first or second kind)",
    })?;
    let (fs, ft) = (fr.f_u(), fr.f_v());
    let (nu_s, nu_t) = (fr.nu.d_du(), fr.nu.d_dv());
    Ok(match fr.kind {
        ChartKind::First => FundamentalJets {
            e: fs.dot(&fs),
            f: fs.dot(h),
            g: h.dot(h),
            l: -fs.dot(&nu_s),
            m: -h.dot(&nu_s),
            n: -h.dot(&nu_t),
        },
        ChartKind::Second => FundamentalJets {
            e: h.dot(h),
            f: h.dot(&ft),
            g: ft.dot(&ft),
            l: -h.dot(&nu_s),
            m: -h.dot(&nu_t),
            n: -ft.dot(&nu_t),
        },
        ChartKind::Regular => unreachable!("regular frames carry no h"),
    })
}

/// Jets of the unified principal-curvature quantities at a chart point.
#[derive(Clone, Debug)]
pub(crate) struct Analysis {
    pub frame: ChartFrame,
    pub fj: FundamentalJets,
    pub a: Jet2,
    pub c: Jet2,
    pub d: Jet2,
    /// `λ̃ = λ / v`.
    pub lt: Jet2,
    /// `A + σB`.
    pub apb: Jet2,
    /// `sgn A` on the singular curve through the point; 0 when indeterminate.
    pub sigma: f64,
}

fn abcd(fr: &ChartFrame, fj: &FundamentalJets) -> (Jet2, Jet2, Jet2) {
    let t = &fr.t;
    let FundamentalJets { e, f, g, l, m, n } = fj;
    let d = e * g - f * f;
    match fr.kind {
        ChartKind::First => {
            let a = e * n - (t * f * m).scale(2.0) + t * g * l;
            let c = l * n - t * m * m;
            (a, c, d)
        }
        _ => {
            let p = l + fr.e.as_ref().expect("second kind carries e") * m;
            let a = g * &p - (t * f * m).scale(2.0) + t * e * n;
            let c = &p * n - t * m * m;
            (a, c, d)
        }
    }
}

fn sigma_of(a0: f64, scale: f64) -> f64 {
    if a0.abs() <= 1e-10 * scale {
        0.0
    } else {
        a0.signum()
    }
}

impl Analysis {
    pub fn new(chart: &AdaptedChart, point: (f64, f64), order: usize) -> Result<Self> {
        let frame = chart.frame(point, order)?;
        let fj = fundamental_jets(&frame)?;
        let (a, c, d) = abcd(&frame, &fj);
        let lt = frame.lambda_tilde().expect("singular frame");
        // σ is read on the singular curve, or at the point itself when the
        // curve point lies outside the surface's domain.
        let a_axis = if point.1 == 0.0 {
            a.value()
        } else {
            match chart.frame((point.0, 0.0), 4) {
                Ok(fr0) => abcd(&fr0, &fundamental_jets(&fr0)?).0.value(),
                Err(Error::OutsideDomain { .. }) => a.value(),
                Err(e) => return Err(e),
            }
        };
        let scale = 1.0 + fj.e.value().abs() * fj.g.value().abs();
        let sigma = sigma_of(a_axis, scale);
        let radicand = &a * &a - (&frame.t * &d * &c).scale(4.0);
        if radicand.value() < -1e-12 * (1.0 + a.value() * a.value()) {
            return Err(Error::NumericDomain(format!(
                "principal curvature discriminant is negative ({:e}) at ({}, {})",
                radicand.value(),
                point.0,
                point.1
            )));
        }
        let b = if radicand.value() > 0.0 {
            radicand.sqrt()?
        } else {
            return Err(Error::NumericDomain(format!(
                "principal curvatures coincide at ({}, {})",
                point.0, point.1
            )));
        };
        let apb = if sigma < 0.0 { &a - &b } else { &a + &b };
        Ok(Self {
            frame,
            fj,
            a,
            c,
            d,
            lt,
            apb,
            sigma,
        })
    }

    /// Bounded principal curvature `2C/(A + σB)`.
    pub fn kappa(&self) -> Result<Jet2> {
        if self.sigma == 0.0 {
            let p = self.frame.point;
            return Err(Error::NotApplicable { u: p.0, v: p.1 });
        }
        Ok(self.c.scale(2.0) / &self.apb)
    }

    /// `κ̂ = λ̃ (A + σB) / (2D)`.
    pub fn hat_kappa(&self) -> Jet2 {
        &self.lt * &self.apb / self.d.scale(2.0)
    }

    /// Principal vector of the bounded branch as jets.
    pub fn principal_vector(&self, kappa: &Jet2) -> (Jet2, Jet2) {
        let t = &self.frame.t;
        let FundamentalJets { e, f, g, l, m, .. } = &self.fj;
        match self.frame.kind {
            ChartKind::First => (&self.fj.n - &(t * kappa * g), -m + kappa * f),
            _ => {
                let ef = self.frame.e.as_ref().expect("second kind carries e") * f;
                (-m + kappa * f, l - &(kappa * &(t * e - ef)))
            }
        }
    }

    /// Extended principal vector `(v(λM̃ - κ̂F̃), -λL̃ + κ̂Ẽ)` (first kind).
    pub fn extended_principal_vector(&self) -> Option<(Jet2, Jet2)> {
        if self.frame.kind != ChartKind::First {
            return None;
        }
        let t = &self.frame.t;
        let lam = t * &self.lt;
        let hat = self.hat_kappa();
        let FundamentalJets { e, f, l, m, .. } = &self.fj;
        Some((
            t * &(&lam * m - &hat * f),
            -(&lam * l) + &hat * e,
        ))
    }
}

fn require_first(chart: &AdaptedChart) -> Result<()> {
    if chart.kind() != ChartKind::First {
        return Err(Error::WrongKind {
            expected: "first-kind",
        });
    }
    Ok(())
}

/// `Ẽ, …, Ñ` (first kind) or `Ê, …, N̂` with `e(u)` (second kind) at a chart point.
pub fn fundamental_quantities(chart: &AdaptedChart, point: (f64, f64)) -> Result<Fundamental> {
    let fr = chart.frame(point, 4)?;
    let fj = fundamental_jets(&fr)?;
    let (e, f, g, l, m, n) = (
        fj.e.value(),
        fj.f.value(),
        fj.g.value(),
        fj.l.value(),
        fj.m.value(),
        fj.n.value(),
    );
    Ok(match chart.kind() {
        ChartKind::First => Fundamental::Tilde(FundamentalTilde { e, f, g, l, m, n }),
        _ => Fundamental::Hat(FundamentalHat {
            e,
            f,
            g,
            l,
            m,
            n,
            e_u: chart.e_at(point.0),
        }),
    })
}

/// Derivatives of `f` and `ν` at `(u, 0)` entering the edge invariants.
struct EdgeData {
    fu: V3,
    fuu: V3,
    fvv: V3,
    fvvv: V3,
    fuvv: V3,
    nu: V3,
    lambda_v: f64,
}

fn edge_data(chart: &AdaptedChart, u: f64) -> Result<EdgeData> {
    require_first(chart)?;
    let fr = chart.frame((u, 0.0), 5)?;
    let data = EdgeData {
        fu: fr.f.partial(1, 0)?,
        fuu: fr.f.partial(2, 0)?,
        fvv: fr.f.partial(0, 2)?,
        fvvv: fr.f.partial(0, 3)?,
        fuvv: fr.f.partial(1, 2)?,
        nu: fr.nu.value(),
        lambda_v: fr.lambda().coeff(0, 1),
    };
    let c = vec3::norm(vec3::cross(data.fu, data.fvv));
    if c <= 1e-9 * (1.0 + vec3::norm(data.fu) * vec3::norm(data.fvv)) {
        return Err(Error::NotCuspidalEdge {
            u,
            reason: "f_u × f_vv vanishes".into(),
        });
    }
    Ok(data)
}

/// `κ_s, κ_ν, κ_c, κ_t` at `(u, 0)` from derivatives of `f`.
pub fn edge_invariants(chart: &AdaptedChart, u: f64) -> Result<EdgeInvariants> {
    let d = edge_data(chart, u)?;
    let nfu = vec3::norm(d.fu);
    let c = vec3::norm(vec3::cross(d.fu, d.fvv));
    let kappa_s = d.lambda_v.signum() * vec3::det(d.fu, d.fuu, d.nu) / nfu.powi(3);
    let kappa_nu = vec3::dot(d.fuu, d.nu) / (nfu * nfu);
    let kappa_c = nfu.powf(1.5) * vec3::det(d.fu, d.fvv, d.fvvv) / c.powf(2.5);
    let kappa_t = vec3::det(d.fu, d.fvv, d.fuvv) / (c * c)
        - vec3::det(d.fu, d.fvv, d.fuu) * vec3::dot(d.fu, d.fvv) / (nfu * nfu * c * c);
    Ok(EdgeInvariants {
        kappa_s,
        kappa_nu,
        kappa_c,
        kappa_t,
    })
}

/// The same invariants from the frame functions `Ẽ, …, Ñ`:
/// `κ_ν = L̃/Ẽ`, `κ_c = 2Ẽ^{3/4}Ñ/(ẼG̃-F̃²)^{3/4}`, `κ_t = (ẼM̃-F̃L̃)/(Ẽ√(ẼG̃-F̃²))`.
///
/// These agree with [`edge_invariants`] when `λ_v > 0`; with the opposite
/// orientation `κ_c` and `κ_t` change sign here.
pub fn edge_invariants_frame_form(chart: &AdaptedChart, u: f64) -> Result<EdgeInvariants> {
    let kappa_s = edge_invariants(chart, u)?.kappa_s;
    let Fundamental::Tilde(q) = fundamental_quantities(chart, (u, 0.0))? else {
        unreachable!("first-kind chart");
    };
    let d = q.e * q.g - q.f * q.f;
    Ok(EdgeInvariants {
        kappa_s,
        kappa_nu: q.l / q.e,
        kappa_c: 2.0 * q.e.powf(0.75) * q.n / d.powf(0.75),
        kappa_t: (q.e * q.m - q.f * q.l) / (q.e * d.sqrt()),
    })
}

/// `μ_c = ĜL̂/|h × f_v|²` at the origin of a second-kind chart.
pub fn normalized_cuspidal_curvature(chart: &AdaptedChart) -> Result<f64> {
    if chart.kind() != ChartKind::Second {
        return Err(Error::WrongKind {
            expected: "second-kind",
        });
    }
    let fr = chart.frame(chart.origin(), 4)?;
    let h = fr.h.as_ref().expect("second kind carries h");
    let ft = fr.f_v();
    let l = -h.dot(&fr.nu.d_du()).value();
    let g = ft.dot(&ft).value();
    let c = vec3::norm(vec3::cross(h.value(), ft.value()));
    if c <= 1e-12 {
        return Err(Error::FrameDegenerate("h × f_v vanishes".into()));
    }
    Ok(g * l / (c * c))
}

/// Gaussian and mean curvature `(K, H)` from the first and second
/// fundamental forms of `f` in chart coordinates, away from `S(f)`.
pub fn gauss_mean_curvature(chart: &AdaptedChart, point: (f64, f64)) -> Result<(f64, f64)> {
    let fr = chart.frame(point, 3)?;
    let (fu, fv) = (fr.f_u(), fr.f_v());
    let (nu, nv) = (fr.nu.d_du(), fr.nu.d_dv());
    let e = fu.dot(&fu).value();
    let f = fu.dot(&fv).value();
    let g = fv.dot(&fv).value();
    let l = -fu.dot(&nu).value();
    let m = -fu.dot(&nv).value();
    let n = -fv.dot(&nv).value();
    let det = e * g - f * f;
    if det <= 1e-14 * (1.0 + e * g) {
        return Err(Error::NotApplicable {
            u: point.0,
            v: point.1,
        });
    }
    Ok((
        (l * n - m * m) / det,
        (e * n - 2.0 * f * m + g * l) / (2.0 * det),
    ))
}

/// Eigenvector of the shape operator for `κ` at a regular point.
fn regular_principal_vector(chart: &AdaptedChart, point: (f64, f64), kappa: f64) -> Result<[f64; 2]> {
    let fr = chart.frame(point, 3)?;
    let (fu, fv) = (fr.f_u(), fr.f_v());
    let (nu, nv) = (fr.nu.d_du(), fr.nu.d_dv());
    let e = fu.dot(&fu).value();
    let f = fu.dot(&fv).value();
    let g = fv.dot(&fv).value();
    let l = -fu.dot(&nu).value();
    let m = -fu.dot(&nv).value();
    let n = -fv.dot(&nv).value();
    let a = [n - kappa * g, -(m - kappa * f)];
    let b = [-(m - kappa * f), l - kappa * e];
    let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    let scale = 1.0 + l.abs() + m.abs() + n.abs() + kappa.abs() * (e + f.abs() + g);
    if v[0].hypot(v[1]) <= 1e-9 * scale {
        return Err(Error::Umbilic);
    }
    Ok(v)
}

fn umbilic_check(v: [f64; 2], scale: f64) -> Result<[f64; 2]> {
    if v[0].hypot(v[1]) <= 1e-12 * scale {
        Err(Error::Umbilic)
    } else {
        Ok(v)
    }
}

/// Both principal curvature branches, which one is bounded, `κ̂` and the
/// principal vectors at a chart point.
pub fn principal_branches(chart: &AdaptedChart, point: (f64, f64)) -> Result<PrincipalData> {
    if chart.kind() == ChartKind::Regular {
        let (k, h) = gauss_mean_curvature(chart, point)?;
        let disc = (h * h - k).max(0.0).sqrt();
        let (k1, k2) = (h + disc, h - disc);
        return Ok(PrincipalData {
            kappa1: k1,
            kappa2: k2,
            bounded_branch: BoundedBranch::Both,
            kappa_bounded: Some(k2),
            hat_kappa: None,
            v: regular_principal_vector(chart, point, k2).ok(),
            v_ext: None,
        });
    }
    let an = Analysis::new(chart, point, 4)?;
    let t = point.1;
    let (a, c, d) = (an.a.value(), an.c.value(), an.d.value());
    let b = (a * a - 4.0 * t * d * c).max(0.0).sqrt();
    let unbounded_or_inf = |den: f64| {
        if t == 0.0 {
            f64::INFINITY
        } else {
            den / (2.0 * t * d)
        }
    };
    let scale = 1.0 + an.fj.e.value() + an.fj.g.value();
    if an.sigma == 0.0 {
        return Ok(PrincipalData {
            kappa1: if t == 0.0 { f64::NAN } else { (a - b) / (2.0 * t * d) },
            kappa2: if t == 0.0 { f64::NAN } else { (a + b) / (2.0 * t * d) },
            bounded_branch: BoundedBranch::Indeterminate,
            kappa_bounded: None,
            hat_kappa: None,
            v: None,
            v_ext: None,
        });
    }
    let kappa = an.kappa()?;
    let apb = an.apb.value();
    let bounded = kappa.value();
    let unbounded = unbounded_or_inf(apb);
    let (kappa1, kappa2, bounded_branch) = if an.sigma > 0.0 {
        (unbounded, bounded, BoundedBranch::Kappa2)
    } else {
        (bounded, unbounded, BoundedBranch::Kappa1)
    };
    let (v1, v2) = an.principal_vector(&kappa);
    let v = umbilic_check([v1.value(), v2.value()], scale).ok();
    let v_ext = an
        .extended_principal_vector()
        .map(|(a, b)| [a.value(), b.value()]);
    Ok(PrincipalData {
        kappa1,
        kappa2,
        bounded_branch,
        kappa_bounded: Some(bounded),
        hat_kappa: Some(an.hat_kappa().value()),
        v,
        v_ext,
    })
}

/// Principal vector `V` of the bounded branch and, on first-kind charts, the
/// extended principal vector `Ṽ` of the unbounded branch.
pub fn principal_vectors(
    chart: &AdaptedChart,
    point: (f64, f64),
) -> Result<([f64; 2], Option<[f64; 2]>)> {
    if chart.kind() == ChartKind::Regular {
        let (k, h) = gauss_mean_curvature(chart, point)?;
        let disc = (h * h - k).max(0.0).sqrt();
        return Ok((regular_principal_vector(chart, point, h - disc)?, None));
    }
    let an = Analysis::new(chart, point, 4)?;
    let kappa = an.kappa()?;
    let (v1, v2) = an.principal_vector(&kappa);
    let scale = 1.0 + an.fj.e.value() + an.fj.g.value();
    let v = umbilic_check([v1.value(), v2.value()], scale)?;
    let v_ext = an
        .extended_principal_vector()
        .map(|(a, b)| [a.value(), b.value()]);
    Ok((v, v_ext))
}

/// Jets of `κ = H - sqrt(H² - K)` and its principal vector field at a
/// regular point.
fn regular_kappa_field(chart: &AdaptedChart, p: (f64, f64)) -> Result<(Jet2, Jet2, Jet2)> {
    let fr = chart.frame(p, chart.order())?;
    let (fu, fv) = (fr.f_u(), fr.f_v());
    let (nu, nv) = (fr.nu.d_du(), fr.nu.d_dv());
    let e = fu.dot(&fu);
    let f = fu.dot(&fv);
    let g = fv.dot(&fv);
    let l = -fu.dot(&nu);
    let m = -fu.dot(&nv);
    let n = -fv.dot(&nv);
    let det = &e * &g - &f * &f;
    if det.value() <= 1e-14 * (1.0 + e.value() * g.value()) {
        return Err(Error::NotApplicable { u: p.0, v: p.1 });
    }
    let k = (&l * &n - &m * &m) / &det;
    let h = (&e * &n - (&f * &m).scale(2.0) + &g * &l) / det.scale(2.0);
    let disc = &h * &h - k;
    let scale = 1.0 + l.value().abs() + m.value().abs() + n.value().abs();
    if disc.value() <= 1e-12 * scale * scale {
        return Err(Error::Umbilic);
    }
    let kappa = &h - &disc.sqrt()?;
    let a = (&n - &(&kappa * &g), -(&m - &(&kappa * &f)));
    let b = (-(&m - &(&kappa * &f)), &l - &(&kappa * &e));
    let norm = |v: &(Jet2, Jet2)| v.0.value().hypot(v.1.value());
    let (v1, v2) = if norm(&a) >= norm(&b) { a } else { b };
    Ok((kappa, v1, v2))
}

/// Jet of the bounded principal curvature and its principal vector field.
pub(crate) fn kappa_and_field(
    chart: &AdaptedChart,
    p: (f64, f64),
) -> Result<(Jet2, Jet2, Jet2)> {
    if chart.kind() == ChartKind::Regular {
        return regular_kappa_field(chart, p);
    }
    let an = Analysis::new(chart, p, chart.order())?;
    let kappa = an.kappa()?;
    let (v1, v2) = an.principal_vector(&kappa);
    Ok((kappa, v1, v2))
}

/// Ridge order of the bounded branch at `p`: 0 if `Vκ(p) ≠ 0`, `k` if
/// `V^{(m)}κ(p) = 0` for `m ≤ k` and `V^{(k+1)}κ(p) ≠ 0`, and -1 if the
/// order exceeds `k_max`.
pub fn ridge_order(chart: &AdaptedChart, p: (f64, f64), k_max: usize) -> Result<i32> {
    let (kappa, v1, v2) = kappa_and_field(chart, p)?;
    if k_max + 1 > kappa.order() {
        return Err(Error::InvalidArgument(format!(
            "ridge order up to {k_max} needs jets of order {} (chart has {})",
            k_max + 1,
            kappa.order()
        )));
    }
    let vn = v1.value().hypot(v2.value());
    if vn <= 1e-12 {
        return Err(Error::Umbilic);
    }
    let k0 = kappa.value().abs();
    let mut g = kappa;
    for m in 1..=k_max + 1 {
        g = g.directional(&v1, &v2);
        if g.value().abs() > 1e-7 * (1.0 + k0) * vn.powi(m as i32) {
            return Ok(m as i32 - 1);
        }
    }
    Ok(-1)
}

/// `4κ_t² + κ_s κ_c²` at `(u, 0)`.
pub fn sub_parabolic_residual(chart: &AdaptedChart, u: f64) -> Result<f64> {
    let inv = edge_invariants(chart, u)?;
    Ok(4.0 * inv.kappa_t * inv.kappa_t + inv.kappa_s * inv.kappa_c * inv.kappa_c)
}

/// Direct and closed-form derivatives of the bounded branch across the edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubParabolicCheck {
    /// `4κ_t² + κ_s κ_c²`.
    pub residual: f64,
    /// `∂κ/∂v` at `(u, 0)` from jets.
    pub dkappa_dv: f64,
    /// `-(1/(2κ_c))(4κ_t² + κ_s κ_c²)(|f_u × h|/|f_u|)^{1/2}`, with `κ_c` in
    /// the orientation of `ν`.
    pub dkappa_dv_closed: f64,
    /// `Ṽκ` at `(u, 0)` from jets.
    pub v_ext_kappa: f64,
    /// `Ṽ₂ · ∂κ/∂v` with the closed-form derivative.
    pub v_ext_kappa_closed: f64,
}

pub fn sub_parabolic_check(chart: &AdaptedChart, u: f64) -> Result<SubParabolicCheck> {
    let inv = edge_invariants(chart, u)?;
    let residual = 4.0 * inv.kappa_t * inv.kappa_t + inv.kappa_s * inv.kappa_c * inv.kappa_c;
    let an = Analysis::new(chart, (u, 0.0), 6)?;
    let kappa = an.kappa()?;
    let fr = &an.frame;
    let fu = fr.f_u().value();
    let h = fr.h.as_ref().expect("first kind carries h").value();
    let sign = fr.lambda().coeff(0, 1).signum();
    let kc = sign * inv.kappa_c;
    let closed = -residual / (2.0 * kc) * (vec3::norm(vec3::cross(fu, h)) / vec3::norm(fu)).sqrt();
    let (w1, w2) = an
        .extended_principal_vector()
        .expect("first-kind chart");
    Ok(SubParabolicCheck {
        residual,
        dkappa_dv: kappa.coeff(0, 1),
        dkappa_dv_closed: closed,
        v_ext_kappa: kappa.directional(&w1, &w2).value(),
        v_ext_kappa_closed: w2.value() * closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::adapt_chart;
    use crate::dsl::builtin_surface;

    fn chart(name: &str, p: (f64, f64)) -> AdaptedChart {
        adapt_chart(&builtin_surface(name).unwrap(), p).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    /// Standard first and second fundamental form coefficients, for oracles.
    fn forms(ch: &AdaptedChart, p: (f64, f64)) -> [f64; 6] {
        let fr = ch.frame(p, 3).unwrap();
        let (fu, fv) = (fr.f_u(), fr.f_v());
        let (nu, nv) = (fr.nu.d_du(), fr.nu.d_dv());
        [
            fu.dot(&fu).value(),
            fu.dot(&fv).value(),
            fv.dot(&fv).value(),
            -fu.dot(&nu).value(),
            -fu.dot(&nv).value(),
            -fv.dot(&nv).value(),
        ]
    }

    #[test]
    fn cuspidal_edge_fundamentals() {
        let Fundamental::Tilde(q) = fundamental_quantities(&chart("CE0", (0.0, 0.0)), (0.0, 0.0)).unwrap()
        else {
            panic!("expected tilde record");
        };
        let want = [1.0, 0.0, 4.0, 0.0, 0.0, 3.0];
        for (got, want) in [q.e, q.f, q.g, q.l, q.m, q.n].into_iter().zip(want) {
            assert!(close(got, want, 1e-12), "{got} vs {want}");
        }
        let Fundamental::Tilde(c) = fundamental_quantities(&chart("CIRC", (0.0, 0.0)), (0.0, 0.0)).unwrap()
        else {
            panic!("expected tilde record");
        };
        assert!(close(c.e, 1.0, 1e-12) && close(c.g, 4.0, 1e-12) && c.f.abs() < 1e-12);
    }

    #[test]
    fn swallowtail_hat_record() {
        let Fundamental::Hat(q) = fundamental_quantities(&chart("SW", (0.0, 0.0)), (0.0, 0.0)).unwrap()
        else {
            panic!("expected hat record");
        };
        assert!((q.l + q.e_u * q.m).abs() > 1e-3);
        assert!(q.g > 0.0);
    }

    #[test]
    fn edge_invariant_values() {
        let r = 1.5 * 2f64.sqrt();
        for u in [-0.4, 0.0, 0.7] {
            let i = edge_invariants(&chart("CE0", (u, 0.0)), u).unwrap();
            assert!(i.kappa_s.abs() < 1e-12 && i.kappa_nu.abs() < 1e-12 && i.kappa_t.abs() < 1e-12);
            assert!(close(i.kappa_c, r, 1e-12));
            let c = edge_invariants(&chart("CIRC", (u, 0.0)), u).unwrap();
            assert!(close(c.kappa_s, -1.0, 1e-10) && close(c.kappa_c, -r, 1e-10));
            assert!(c.kappa_nu.abs() < 1e-10 && c.kappa_t.abs() < 1e-10);
        }
        let t = edge_invariants(&chart("CE_T", (0.0, 0.0)), 0.0).unwrap();
        assert!(t.kappa_t.abs() > 0.1);
    }

    #[test]
    fn frame_forms_agree() {
        for (name, u) in [("CE0", 0.2), ("CE_T", 0.0), ("CE_T", 0.35), ("CIRC", 1.0), ("CE_R", 0.3)] {
            let ch = chart(name, (u, 0.0));
            let o = ch.origin().0;
            let a = edge_invariants(&ch, o).unwrap();
            let b = edge_invariants_frame_form(&ch, o).unwrap();
            for (x, y) in [
                (a.kappa_nu, b.kappa_nu),
                (a.kappa_c, b.kappa_c),
                (a.kappa_t, b.kappa_t),
            ] {
                assert!(close(x, y, 1e-8), "{name}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn orientation_toggle() {
        for (name, u) in [("CE_T", 0.3), ("CIRC", 0.5), ("CE_R", 0.1)] {
            let ch = chart(name, (u, 0.0));
            let rev = ch.with_reversed_normal();
            let a = edge_invariants(&ch, u).unwrap();
            let b = edge_invariants(&rev, u).unwrap();
            assert!((a.kappa_s - b.kappa_s).abs() < 1e-10);
            assert!((a.kappa_c - b.kappa_c).abs() < 1e-10);
            assert!((a.kappa_nu + b.kappa_nu).abs() < 1e-10);
            let ra = sub_parabolic_residual(&ch, u).unwrap();
            let rb = sub_parabolic_residual(&rev, u).unwrap();
            assert!((ra - rb).abs() < 1e-10);
            let pa = principal_branches(&ch, (u, 0.0)).unwrap();
            let pb = principal_branches(&rev, (u, 0.0)).unwrap();
            assert!((pa.hat_kappa.unwrap() - pb.hat_kappa.unwrap()).abs() < 1e-10);
            assert!((pa.kappa_bounded.unwrap() + pb.kappa_bounded.unwrap()).abs() < 1e-10);
            let (Fundamental::Tilde(qa), Fundamental::Tilde(qb)) = (
                fundamental_quantities(&ch, (u, 0.0)).unwrap(),
                fundamental_quantities(&rev, (u, 0.0)).unwrap(),
            ) else {
                panic!()
            };
            assert!((qa.n + qb.n).abs() < 1e-10);
        }
    }

    #[test]
    fn bounded_branch_and_hat_kappa() {
        let p = principal_branches(&chart("CE0", (0.0, 0.0)), (0.0, 0.0)).unwrap();
        assert_eq!(p.bounded_branch, BoundedBranch::Kappa2);
        assert!(p.kappa_bounded.unwrap().abs() < 1e-12);
        assert!(close(p.hat_kappa.unwrap(), 1.5, 1e-12));
        assert!(p.kappa1.is_infinite());

        let c = principal_branches(&chart("CIRC", (0.0, 0.0)), (0.0, 0.0)).unwrap();
        assert_eq!(c.bounded_branch, BoundedBranch::Kappa1);
        assert!(close(c.hat_kappa.unwrap().abs(), 1.5, 1e-10));

        let sw = chart("SW", (0.0, 0.0));
        let s = principal_branches(&sw, (0.0, 0.0)).unwrap();
        assert_eq!(s.bounded_branch, BoundedBranch::Kappa2);
        assert!(normalized_cuspidal_curvature(&sw).unwrap() > 0.0);
    }

    #[test]
    fn hat_kappa_closed_form() {
        for (name, u) in [("CE_T", 0.3), ("CIRC", 0.5), ("CE_R", 0.2)] {
            let ch = chart(name, (u, 0.0));
            let Fundamental::Tilde(q) = fundamental_quantities(&ch, (u, 0.0)).unwrap() else {
                panic!()
            };
            let fr = ch.frame((u, 0.0), 3).unwrap();
            let c = vec3::norm(vec3::cross(fr.f_u().value(), fr.h.unwrap().value()));
            let hk = principal_branches(&ch, (u, 0.0)).unwrap().hat_kappa.unwrap();
            assert!(close(hk, q.e * q.n / c, 1e-10), "{name}");
            let kc = edge_invariants(&ch, u).unwrap().kappa_c;
            assert_eq!(hk > 0.0, kc > 0.0);
        }
    }

    #[test]
    fn bounded_branch_is_normal_curvature_on_edge() {
        for (name, u) in [("CE_T", 0.25), ("CIRC", 2.0), ("CE_R", 0.3)] {
            let ch = chart(name, (u, 0.0));
            let k = principal_branches(&ch, (u, 0.0)).unwrap().kappa_bounded.unwrap();
            assert!(close(k, edge_invariants(&ch, u).unwrap().kappa_nu, 1e-8), "{name}");
        }
    }

    #[test]
    fn extended_vector_is_null_on_axis() {
        for (name, u) in [("CE0", 0.0), ("CIRC", 0.9), ("CE_T", 0.4)] {
            let (v, w) = principal_vectors(&chart(name, (u, 0.0)), (u, 0.0)).unwrap();
            let w = w.unwrap();
            assert!(w[0].abs() < 1e-12 && w[1].abs() > 1e-3, "{name}: {w:?}");
            assert!(v[0].abs() > 1e-3);
        }
        let (v, w) = principal_vectors(&chart("CE0", (0.0, 0.0)), (0.0, 0.0)).unwrap();
        assert!(close(v[0], 3.0, 1e-12) && v[1].abs() < 1e-12);
        assert!(close(w.unwrap()[1], 1.5, 1e-12));
    }

    #[test]
    fn principal_vector_is_eigenvector_off_axis() {
        for (name, p) in [("CE_T", (0.3, 0.07)), ("CIRC", (0.5, -0.1)), ("CE_R", (0.2, 0.05)), ("SW", (0.0, 0.1))] {
            let ch = chart(name, (p.0, 0.0));
            let pd = principal_branches(&ch, p).unwrap();
            let k = pd.kappa_bounded.unwrap();
            let v = pd.v.unwrap();
            let [e, f, g, l, m, n] = forms(&ch, p);
            let r1 = (l - k * e) * v[0] + (m - k * f) * v[1];
            let r2 = (m - k * f) * v[0] + (n - k * g) * v[1];
            let scale = (1.0 + k.abs()) * (1.0 + e + g) * v[0].hypot(v[1]);
            assert!(r1.abs() < 1e-9 * scale && r2.abs() < 1e-9 * scale, "{name}: {r1} {r2}");
        }
    }

    #[test]
    fn branches_reproduce_gauss_and_mean_curvature() {
        for (name, p) in [("CE_T", (0.3, 0.07)), ("CIRC", (0.5, -0.1)), ("CE0", (0.1, 0.2)), ("SW", (0.0, 0.1))] {
            let ch = chart(name, (p.0, 0.0));
            let pd = principal_branches(&ch, p).unwrap();
            let (k, h) = gauss_mean_curvature(&ch, p).unwrap();
            assert!(close(pd.kappa1 * pd.kappa2, k, 1e-8), "{name}");
            assert!(close(pd.kappa1 + pd.kappa2, 2.0 * h, 1e-8), "{name}");
        }
    }

    #[test]
    fn sphere_is_umbilic() {
        let ch = chart("SPHERE", (0.3, 0.2));
        let pd = principal_branches(&ch, (0.3, 0.2)).unwrap();
        assert_eq!(pd.bounded_branch, BoundedBranch::Both);
        assert!(close(pd.kappa1.abs(), 1.0, 1e-10) && close(pd.kappa1, pd.kappa2, 1e-8));
        assert!(matches!(principal_vectors(&ch, (0.3, 0.2)), Err(Error::Umbilic)));
    }

    #[test]
    fn cuspidal_curvature_wrong_kind() {
        assert!(matches!(
            normalized_cuspidal_curvature(&chart("CE0", (0.0, 0.0))),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn cuspidal_curvature_is_limit_of_mean_curvature() {
        let ch = chart("SW", (0.0, 0.0));
        let mu = normalized_cuspidal_curvature(&ch).unwrap();
        let g = |v: f64| 2.0 * v * gauss_mean_curvature(&ch, (0.0, v)).unwrap().1;
        let h = 0.02;
        let limit = (4.0 * g(h / 2.0) - g(h)) / 3.0;
        assert!(mu.abs() > 1e-3);
        assert!((mu - limit).abs() < 1e-4, "{mu} vs {limit}");
    }

    #[test]
    fn sub_parabolic_values() {
        assert!(sub_parabolic_residual(&chart("CE0", (0.0, 0.0)), 0.0).unwrap().abs() < 1e-12);
        let c = sub_parabolic_residual(&chart("CIRC", (0.3, 0.0)), 0.3).unwrap();
        assert!(close(c, -4.5, 1e-10));
        assert!(sub_parabolic_residual(&chart("CE_T", (0.0, 0.0)), 0.0).unwrap() > 0.0);
    }

    #[test]
    fn sub_parabolic_identity() {
        for (name, u) in [("CE_T", 0.0), ("CE_T", 0.3), ("CIRC", 0.5), ("CE_R", 0.2)] {
            let ch = chart(name, (u, 0.0));
            let s = sub_parabolic_check(&ch, u).unwrap();
            assert!((s.dkappa_dv - s.dkappa_dv_closed).abs() < 1e-6, "{name}: {s:?}");
            assert!((s.v_ext_kappa - s.v_ext_kappa_closed).abs() < 1e-6, "{name}");
            let kb = |v: f64| principal_branches(&ch, (u, v)).unwrap().kappa_bounded.unwrap();
            let d = 1e-3;
            let fd = (8.0 * (kb(d) - kb(-d)) - (kb(2.0 * d) - kb(-2.0 * d))) / (12.0 * d);
            assert!((fd - s.dkappa_dv).abs() < 1e-6 * (1.0 + fd.abs()), "{name}: {fd} vs {s:?}");
        }
    }

    /// `V^{(m)}κ` at `p` as derivatives of `κ` along the integral curve of `V`.
    fn flow_derivatives(ch: &AdaptedChart, p: (f64, f64), ds: f64) -> [f64; 3] {
        let field = |q: (f64, f64)| principal_branches(ch, q).unwrap().v.unwrap();
        let step = |q: (f64, f64), h: f64| {
            let k1 = field(q);
            let k2 = field((q.0 + h / 2.0 * k1[0], q.1 + h / 2.0 * k1[1]));
            let k3 = field((q.0 + h / 2.0 * k2[0], q.1 + h / 2.0 * k2[1]));
            let k4 = field((q.0 + h * k3[0], q.1 + h * k3[1]));
            (
                q.0 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                q.1 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            )
        };
        let kappa = |q: (f64, f64)| principal_branches(ch, q).unwrap().kappa_bounded.unwrap();
        let mut s = [0.0; 5];
        let (mut fwd, mut bwd) = (p, p);
        s[2] = kappa(p);
        for i in 1..=2 {
            fwd = step(fwd, ds);
            bwd = step(bwd, -ds);
            s[2 + i] = kappa(fwd);
            s[2 - i] = kappa(bwd);
        }
        [
            (s[3] - s[1]) / (2.0 * ds),
            (s[3] - 2.0 * s[2] + s[1]) / (ds * ds),
            (s[4] - 2.0 * s[3] + 2.0 * s[1] - s[0]) / (2.0 * ds.powi(3)),
        ]
    }

    #[test]
    fn ridge_orders() {
        assert_eq!(ridge_order(&chart("CE0", (0.0, 0.0)), (0.0, 0.0), 2).unwrap(), -1);
        assert_ne!(ridge_order(&chart("CIRC", (0.7, 0.0)), (0.7, 0.0), 2).unwrap(), 0);
        assert_eq!(ridge_order(&chart("CE_T", (0.2, 0.0)), (0.2, 0.0), 2).unwrap(), 0);
        assert!(matches!(
            ridge_order(&chart("CE_T", (0.2, 0.0)), (0.2, 0.0), 9),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn ridge_order_matches_flow_sampling() {
        let ch = chart("CE_R", (0.0, 0.0));
        let d = flow_derivatives(&ch, (0.0, 0.0), 1e-2);
        assert!(d[0].abs() < 1e-6, "{d:?}");
        assert!(d[1].abs() > 1e-2, "{d:?}");
        assert_eq!(ridge_order(&ch, (0.0, 0.0), 2).unwrap(), 1);
        let q = (0.15, 0.0);
        let d = flow_derivatives(&ch, q, 1e-3);
        assert!(d[0].abs() > 1e-3, "{d:?}");
        assert_eq!(ridge_order(&ch, q, 2).unwrap(), 0);
    }
}
