//! OBJ meshes and CSV invariant tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::vec3::V3;

/// `x` with 12 significant digits, without trailing zeros.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..=15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        return format!("{x:.11e}");
    };
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// A rectangular grid of points with optional holes, plus named polylines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridMesh {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major samples; `None` marks a hole.
    pub points: Vec<Option<V3>>,
    pub polylines: Vec<(String, Vec<V3>)>,
}

impl GridMesh {
    pub fn new(name: impl Into<String>, rows: usize, cols: usize, points: Vec<Option<V3>>) -> Result<Self> {
        if points.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "grid of {rows}x{cols} needs {} samples, got {}",
                rows * cols,
                points.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            rows,
            cols,
            points,
            polylines: Vec::new(),
        })
    }

    pub fn with_polyline(mut self, name: impl Into<String>, points: Vec<V3>) -> Self {
        self.polylines.push((name.into(), points));
        self
    }

    /// Defined vertices in row-major order, quads split into two triangles,
    /// faces touching a hole omitted; polylines follow as `l` elements.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "o {}", self.name);
        let mut index = vec![0usize; self.points.len()];
        let mut next = 1;
        for (slot, p) in index.iter_mut().zip(&self.points) {
            if let Some(p) = p {
                let _ = writeln!(
                    out,
                    "v {} {} {}",
                    format_number(p[0]),
                    format_number(p[1]),
                    format_number(p[2])
                );
                *slot = next;
                next += 1;
            }
        }
        let at = |r: usize, c: usize| index[r * self.cols + c];
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols.saturating_sub(1) {
                let (a, b, d, e) = (at(r, c), at(r, c + 1), at(r + 1, c + 1), at(r + 1, c));
                if a == 0 || b == 0 || d == 0 || e == 0 {
                    continue;
                }
                let _ = writeln!(out, "f {a} {b} {d}");
                let _ = writeln!(out, "f {a} {d} {e}");
            }
        }
        for (name, line) in &self.polylines {
            if line.len() < 2 {
                continue;
            }
            let _ = writeln!(out, "o {name}");
            let first = next;
            for p in line {
                let _ = writeln!(
                    out,
                    "v {} {} {}",
                    format_number(p[0]),
                    format_number(p[1]),
                    format_number(p[2])
                );
                next += 1;
            }
            let ids: Vec<String> = (first..next).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "l {}", ids.join(" "));
        }
        out
    }

    pub fn write_obj(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_obj()).map_err(|e| Error::io(path, e))
    }
}

pub const CSV_COLUMNS: [&str; 21] = [
    "u",
    "v",
    "kind",
    "edge_type",
    "kappa_s",
    "kappa_nu",
    "kappa_c",
    "kappa_t",
    "mu_c",
    "kappa_bounded",
    "hat_kappa",
    "ridge_order",
    "subparab_residual",
    "K_closed",
    "K_direct",
    "H_abs_closed",
    "H_abs_direct",
    "kappa_g_hat",
    "kappa_n_hat",
    "point_type",
    "loc_residual",
];

/// One singular-curve sample; `None` becomes an empty cell.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantRow {
    pub u: f64,
    pub v: f64,
    pub kind: String,
    pub edge_type: String,
    pub kappa_s: Option<f64>,
    pub kappa_nu: Option<f64>,
    pub kappa_c: Option<f64>,
    pub kappa_t: Option<f64>,
    pub mu_c: Option<f64>,
    pub kappa_bounded: Option<f64>,
    pub hat_kappa: Option<f64>,
    pub ridge_order: Option<i32>,
    pub subparab_residual: Option<f64>,
    pub k_closed: Option<f64>,
    pub k_direct: Option<f64>,
    pub h_abs_closed: Option<f64>,
    pub h_abs_direct: Option<f64>,
    pub kappa_g_hat: Option<f64>,
    pub kappa_n_hat: Option<f64>,
    pub point_type: Option<String>,
    pub loc_residual: Option<f64>,
}

impl InvariantRow {
    pub fn cells(&self) -> Vec<String> {
        let num = |x: Option<f64>| x.map(format_number).unwrap_or_default();
        vec![
            format_number(self.u),
            format_number(self.v),
            self.kind.clone(),
            self.edge_type.clone(),
            num(self.kappa_s),
            num(self.kappa_nu),
            num(self.kappa_c),
            num(self.kappa_t),
            num(self.mu_c),
            num(self.kappa_bounded),
            num(self.hat_kappa),
            self.ridge_order.map(|r| r.to_string()).unwrap_or_default(),
            num(self.subparab_residual),
            num(self.k_closed),
            num(self.k_direct),
            num(self.h_abs_closed),
            num(self.h_abs_direct),
            num(self.kappa_g_hat),
            num(self.kappa_n_hat),
            self.point_type.clone().unwrap_or_default(),
            num(self.loc_residual),
        ]
    }
}

pub fn csv_string(rows: &[InvariantRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io {
        path: "<memory>".into(),
        message: e.to_string(),
    };
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record(r.cells()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<memory>".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(rows: &[InvariantRow], path: &Path) -> Result<()> {
    fs::write(path, csv_string(rows)?).map_err(|e| Error::io(path, e))
}
