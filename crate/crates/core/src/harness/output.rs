//! CSV writers. Floats use a fixed 17-significant-digit exponent format
//! and lines end in `\n`, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::particles::Point;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `x,u,v,w` in 1D or `x,y,u,v,w` in 2D, one row per cell centre, row-major.
pub fn field_csv(u: &ScalarField, v: &ScalarField) -> Result<String> {
    u.check_same_grid(v)?;
    let mut s = String::new();
    s.push_str(if u.grid.dim() == 1 { "x,u,v,w\n" } else { "x,y,u,v,w\n" });
    for k in 0..u.len() {
        let c = u.grid.center(k);
        let (a, b) = (u.values[k], v.values[k]);
        if u.grid.dim() == 1 {
            let _ = writeln!(s, "{},{},{},{}", fmt_f64(c[0]), fmt_f64(a), fmt_f64(b), fmt_f64(a + b));
        } else {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f64(c[0]),
                fmt_f64(c[1]),
                fmt_f64(a),
                fmt_f64(b),
                fmt_f64(a + b)
            );
        }
    }
    Ok(s)
}

/// `species,x[,y]` with species `X` then `Y`.
pub fn particles_csv(x: &[Point], y: &[Point], dim: usize) -> String {
    let mut s = String::from(if dim == 1 { "species,x\n" } else { "species,x,y\n" });
    for (name, pts) in [("X", x), ("Y", y)] {
        for p in pts {
            if dim == 1 {
                let _ = writeln!(s, "{name},{}", fmt_f64(p[0]));
            } else {
                let _ = writeln!(s, "{name},{},{}", fmt_f64(p[0]), fmt_f64(p[1]));
            }
        }
    }
    s
}

/// `t,mass_u,mass_v,H_uv,TV_uv,dt,pinsker_bound` followed by any other extras.
pub fn diagnostics_csv(record: &DiagnosticsRecord) -> String {
    let extras: Vec<String> = record.extra_names().into_iter().filter(|n| n != "dt").collect();
    let mut s = String::from("t,mass_u,mass_v,H_uv,TV_uv,dt,pinsker_bound");
    for name in &extras {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for row in &record.rows {
        let cells = [row.t, row.mass_u, row.mass_v, row.h_uv, row.tv_uv];
        let line: Vec<String> = cells
            .iter()
            .copied()
            .chain([row.extra("dt").unwrap_or(f64::NAN), row.pinsker_bound])
            .chain(extras.iter().map(|n| row.extra(n).unwrap_or(f64::NAN)))
            .map(fmt_f64)
            .collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub i: usize,
    pub r: f64,
    pub param_value: f64,
}

pub fn residuals_csv(rows: &[ResidualRow]) -> String {
    let mut s = String::from("i,r_i,param_value\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.i, fmt_f64(r.r), fmt_f64(r.param_value));
    }
    s
}

/// Tidy `x[,y],value` listing of one field.
pub fn tidy_field_csv(f: &ScalarField) -> String {
    let mut s = String::from(if f.grid.dim() == 1 { "x,value\n" } else { "x,y,value\n" });
    for (k, v) in f.values.iter().enumerate() {
        let c = f.grid.center(k);
        if f.grid.dim() == 1 {
            let _ = writeln!(s, "{},{}", fmt_f64(c[0]), fmt_f64(*v));
        } else {
            let _ = writeln!(s, "{},{},{}", fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(*v));
        }
    }
    s
}

/// Heatmap matrix of a 2D field: one line per grid row `j`, `nx` values each.
pub fn matrix_csv(f: &ScalarField) -> Option<String> {
    let Grid::D2(g) = f.grid else { return None };
    let mut s = String::new();
    for row in f.values.chunks_exact(g.nx) {
        let cells: Vec<String> = row.iter().copied().map(fmt_f64).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Some(s)
}

/// Two-column `key,value` series.
pub fn series_csv(key: &str, points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = format!("{key},value\n");
    for (a, b) in points {
        let _ = writeln!(s, "{},{}", fmt_f64(a), fmt_f64(b));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Grid2D};

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn field_headers_and_rows() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let u = ScalarField::from_fn_1d(g, |x| x);
        let s = field_csv(&u, &u).unwrap();
        assert!(s.starts_with("x,u,v,w\n"));
        assert_eq!(s.lines().count(), 5);
        let g2 = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 5).unwrap();
        let f = ScalarField::zeros(g2);
        let s = field_csv(&f, &f).unwrap();
        assert!(s.starts_with("x,y,u,v,w\n"));
        assert_eq!(s.lines().count(), 21);
        assert_eq!(tidy_field_csv(&f).lines().count(), 21);
        assert_eq!(matrix_csv(&f).unwrap().lines().count(), 5);
    }

    #[test]
    fn empty_diagnostics_is_header_only() {
        let s = diagnostics_csv(&DiagnosticsRecord::default());
        assert_eq!(s, "t,mass_u,mass_v,H_uv,TV_uv,dt,pinsker_bound\n");
    }

    #[test]
    fn particle_rows() {
        let s = particles_csv(&[[0.5, 0.0]], &[[0.25, 0.0], [0.75, 0.0]], 1);
        assert_eq!(s.lines().count(), 4);
        assert!(s.lines().nth(2).unwrap().starts_with("Y,"));
    }
}
