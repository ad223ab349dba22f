//! Discrete functionals on fields: mass, relative entropy, total variation,
//! L2 distance and residual sequences.
//!
//! All integrals use midpoint quadrature over cells, matching the
//! finite-volume representation. Relative entropy and total variation
//! normalise both arguments to unit mass first.

use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Default lower clamp for the reference density inside the logarithm.
pub const ENTROPY_FLOOR: f64 = 1e-300;

/// Compensated (Neumaier) summation.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mass(f: &ScalarField) -> f64 {
    stable_sum(f.values.iter().copied()) * f.cell_volume()
}

fn normalized(f: &ScalarField) -> Vec<f64> {
    let m = mass(f);
    if m > 0.0 {
        f.values.iter().map(|v| v / m).collect()
    } else {
        f.values.clone()
    }
}

/// `H(f || g) = sum f log(f / g) dV` on normalised inputs.
///
/// Cells with `f <= floor` are skipped and `g` is clamped below at `floor`.
/// Returns `+inf` when `f` carries mass where `g` is below the floor
/// (absolute continuity fails).
pub fn relative_entropy(f: &ScalarField, g: &ScalarField, floor: f64) -> Result<f64> {
    f.check_same_grid(g)?;
    let fh = normalized(f);
    let gh = normalized(g);
    let vol = f.cell_volume();
    let mut terms = Vec::with_capacity(fh.len());
    for (&fi, &gi) in fh.iter().zip(&gh) {
        if fi <= floor {
            continue;
        }
        if gi < floor {
            return Ok(f64::INFINITY);
        }
        terms.push(fi * (fi / gi.max(floor)).ln() * vol);
    }
    Ok(stable_sum(terms))
}

/// `TV(f, g) = ||f - g||_L1` on normalised inputs.
pub fn tv_distance(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    let fh = normalized(f);
    let gh = normalized(g);
    let vol = f.cell_volume();
    Ok(stable_sum(fh.iter().zip(&gh).map(|(a, b)| (a - b).abs())) * vol)
}

/// Unnormalised L2 distance.
pub fn l2_distance(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    let vol = f.cell_volume();
    Ok((stable_sum(f.values.iter().zip(&g.values).map(|(a, b)| (a - b) * (a - b))) * vol).sqrt())
}

/// Unnormalised L1 distance.
pub fn l1_distance(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    f.check_same_grid(g)?;
    let vol = f.cell_volume();
    Ok(stable_sum(f.values.iter().zip(&g.values).map(|(a, b)| (a - b).abs())) * vol)
}

/// `r_i = ||mu_i - mu_{i-1}||_L2` for consecutive estimates.
pub fn residual_sequence<F: AsRef<ScalarField>>(estimates: &[F]) -> Result<Vec<f64>> {
    if estimates.len() < 2 {
        return Err(Error::InvalidArgument(
            "residual sequence needs at least two estimates".into(),
        ));
    }
    estimates
        .windows(2)
        .map(|w| l2_distance(w[1].as_ref(), w[0].as_ref()))
        .collect()
}

impl AsRef<ScalarField> for ScalarField {
    fn as_ref(&self) -> &ScalarField {
        self
    }
}

/// One row of a [`DiagnosticsRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub h_uv: f64,
    pub tv_uv: f64,
    /// `sqrt(2 H(u || v))` at the same time.
    pub pinsker_bound: f64,
    pub extras: Vec<(String, f64)>,
}

impl DiagnosticsRow {
    /// Evaluates mass, entropy and total variation of a species pair.
    pub fn measure(t: f64, u: &ScalarField, v: &ScalarField) -> Result<Self> {
        let h = relative_entropy(u, v, ENTROPY_FLOOR)?;
        Ok(Self {
            t,
            mass_u: mass(u),
            mass_v: mass(v),
            h_uv: h,
            tv_uv: tv_distance(u, v)?,
            pinsker_bound: (2.0 * h).sqrt(),
            extras: Vec::new(),
        })
    }

    pub fn with_extra(mut self, name: &str, value: f64) -> Self {
        self.extras.push((name.to_string(), value));
        self
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// Time series of diagnostics with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a row; rows not strictly later than the last one are rejected.
    pub fn push(&mut self, row: DiagnosticsRow) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if row.t <= last.t {
                return Err(Error::InvalidArgument(format!(
                    "diagnostics time {} not after {}",
                    row.t, last.t
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Names of the extra columns, taken from the first row.
    pub fn extra_names(&self) -> Vec<String> {
        self.rows
            .first()
            .map(|r| r.extras.iter().map(|(k, _)| k.clone()).collect())
            .unwrap_or_default()
    }

    /// Largest relative mass change of either species against the first row.
    pub fn max_relative_mass_drift(&self) -> f64 {
        let Some(first) = self.rows.first() else {
            return 0.0;
        };
        let rel = |m: f64, m0: f64| if m0 != 0.0 { ((m - m0) / m0).abs() } else { m.abs() };
        self.rows
            .iter()
            .map(|r| rel(r.mass_u, first.mass_u).max(rel(r.mass_v, first.mass_v)))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Grid2D};
    use proptest::prelude::*;

    fn gaussian(mean: f64, sigma: f64) -> impl Fn(f64) -> f64 {
        move |x| {
            let z = (x - mean) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        }
    }

    #[test]
    fn mass_examples() {
        let g = Grid1D::new(0.0, 1.0, 7).unwrap();
        assert_eq!(mass(&ScalarField::zeros(g)), 0.0);
        let one = ScalarField::from_fn_1d(g, |_| 1.0);
        assert!((mass(&one) - 1.0).abs() < 1e-15);

        let mut prev = f64::INFINITY;
        for n in [50, 100, 200] {
            let g = Grid1D::new(-1.0, 1.0, n).unwrap();
            let w = ScalarField::from_fn_1d(g, |x| (1.0 - x * x).max(0.0));
            let err = (mass(&w) - 4.0 / 3.0).abs();
            assert!(err < 2.0 / (n * n) as f64 + 1e-14);
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn gaussian_kl_matches_closed_form() {
        let g = Grid1D::new(-12.0, 13.0, 5000).unwrap();
        let f = ScalarField::from_fn_1d(g, gaussian(0.0, 1.0));
        let q = ScalarField::from_fn_1d(g, gaussian(1.0, 1.0));
        let h = relative_entropy(&f, &q, ENTROPY_FLOOR).unwrap();
        assert!((h - 0.5).abs() < 1e-3, "{h}");
        assert_eq!(relative_entropy(&f, &f, ENTROPY_FLOOR).unwrap(), 0.0);
    }

    #[test]
    fn entropy_signals_absolute_continuity_violation() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let f = ScalarField::new(g, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let q = ScalarField::new(g, vec![0.0, 2.0, 1.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&f, &q, ENTROPY_FLOOR).unwrap(), f64::INFINITY);
        // the reverse direction is fine: q puts no mass where f vanishes
        assert!(relative_entropy(&q, &f, ENTROPY_FLOOR).unwrap().is_finite());
    }

    #[test]
    fn tv_examples() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let f = ScalarField::new(g, vec![2.0, 2.0, 0.0, 0.0]).unwrap();
        let q = ScalarField::new(g, vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        assert_eq!(tv_distance(&f, &f).unwrap(), 0.0);
        assert!((tv_distance(&f, &q).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn l2_examples() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let one = ScalarField::from_fn(g, |_| 1.0);
        let zero = ScalarField::zeros(g);
        assert!((l2_distance(&one, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(l2_distance(&one, &one).unwrap(), 0.0);
    }

    #[test]
    fn residual_examples() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let a = ScalarField::from_fn(g, |p| p[0] * p[1]);
        let b = ScalarField::from_fn(g, |p| p[0] * p[1] + 1.0);
        assert_eq!(residual_sequence(&[a.clone(), a.clone(), a.clone()]).unwrap(), vec![0.0, 0.0]);
        let r = residual_sequence(&[a.clone(), b]).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-14);
        assert!(residual_sequence(&[a.clone()]).is_err());

        let other = ScalarField::zeros(Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 9).unwrap());
        assert!(matches!(residual_sequence(&[a, other]), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn record_requires_increasing_time() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        let f = ScalarField::from_fn_1d(g, |x| 1.0 + x);
        let mut rec = DiagnosticsRecord::new();
        rec.push(DiagnosticsRow::measure(0.0, &f, &f).unwrap()).unwrap();
        assert!(rec.push(DiagnosticsRow::measure(0.0, &f, &f).unwrap()).is_err());
        rec.push(DiagnosticsRow::measure(0.1, &f, &f).unwrap()).unwrap();
        assert_eq!(rec.len(), 2);
        assert_eq!(rec.max_relative_mass_drift(), 0.0);
    }

    fn positive_field(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-3..10.0_f64, n)
    }

    proptest! {
        #[test]
        fn entropy_nonnegative_and_pinsker(a in positive_field(32), b in positive_field(32)) {
            let g = Grid1D::new(0.0, 2.0, 32).unwrap();
            let f = ScalarField::new(g, a).unwrap();
            let q = ScalarField::new(g, b).unwrap();
            let h = relative_entropy(&f, &q, ENTROPY_FLOOR).unwrap();
            let tv = tv_distance(&f, &q).unwrap();
            prop_assert!(h >= -1e-12);
            prop_assert!(tv <= (2.0 * h.max(0.0)).sqrt() + 1e-12);
            prop_assert!(tv <= 2.0 + 1e-12);
        }

        #[test]
        fn normalization_invariance(a in positive_field(16), b in positive_field(16),
                                    s in 0.01..100.0_f64, r in 0.01..100.0_f64) {
            let g = Grid1D::new(0.0, 1.0, 16).unwrap();
            let f = ScalarField::new(g, a).unwrap();
            let q = ScalarField::new(g, b).unwrap();
            let h0 = relative_entropy(&f, &q, ENTROPY_FLOOR).unwrap();
            let h1 = relative_entropy(&f.scaled(s), &q.scaled(r), ENTROPY_FLOOR).unwrap();
            prop_assert!((h0 - h1).abs() <= 1e-10 * (1.0 + h0.abs()));
            let t0 = tv_distance(&f, &q).unwrap();
            let t1 = tv_distance(&f.scaled(s), &q.scaled(r)).unwrap();
            prop_assert!((t0 - t1).abs() <= 1e-10);
        }

        #[test]
        fn l2_triangle_inequality(a in positive_field(16), b in positive_field(16), c in positive_field(16)) {
            let g = Grid1D::new(0.0, 1.0, 16).unwrap();
            let (f, q, p) = (
                ScalarField::new(g, a).unwrap(),
                ScalarField::new(g, b).unwrap(),
                ScalarField::new(g, c).unwrap(),
            );
            let lhs = l2_distance(&f, &p).unwrap();
            let rhs = l2_distance(&f, &q).unwrap() + l2_distance(&q, &p).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }
    }
}
