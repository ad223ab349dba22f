//! Two-species interacting particle system with Gaussian pair repulsion,
//! additive noise and reflective walls.
//!
//! Each particle of either species feels the repulsion of every other
//! particle, weighted by `1/n` of the source species:
//!
//! ```text
//! dX_i = (1/n_X) sum_j F(X_i - X_j) dt + (1/n_Y) sum_j F(X_i - Y_j) dt + eps dW_i
//! ```
//!
//! with `F = -grad V` and `V` the unit-mass Gaussian of width `c * eps`.
//! Stepping is Euler-Maruyama; the Gaussian increments come from a
//! counter-based stream so trajectories do not depend on thread scheduling.

mod celllist;
mod kde;
mod rng;
mod run;
mod sampling;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use celllist::{drift_celllist, drift_celllist_with_stats, CellListStats};
pub use kde::{density_estimate, density_estimate_with, DensityEstimate, KdeOptions};
pub use rng::{mix_seed, NoiseStream};
pub use run::{run_particles, ParticleRun, ParticleRunConfig, ParticleSnapshot};
pub use sampling::{sample_from_field, Sampling};

/// Particle position; the second component is unused in 1D.
pub type Point = [f64; 2];

/// Smallest admissible cutoff, in units of the larger of `eps` and the kernel width.
pub const MIN_CUTOFF_FACTOR: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    /// Interaction range `eps`.
    pub epsilon: f64,
    /// Multiplier `c` on the kernel width; the effective width is `c * eps`.
    pub range_scale: f64,
    /// Distance beyond which the force is zero; `f64::INFINITY` disables truncation.
    pub cutoff_radius: f64,
    pub dim: usize,
}

impl KernelSpec {
    /// Kernel with unit range scale and the cutoff at `6 eps`.
    pub fn new(epsilon: f64, dim: usize) -> Result<Self> {
        Self::with_range(epsilon, 1.0, MIN_CUTOFF_FACTOR, dim)
    }

    /// The cutoff is `cutoff_factor * max(c, 1) * eps`.
    pub fn with_range(epsilon: f64, range_scale: f64, cutoff_factor: f64, dim: usize) -> Result<Self> {
        let spec = Self {
            epsilon,
            range_scale,
            cutoff_radius: cutoff_factor * range_scale.max(1.0) * epsilon,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn untruncated(self) -> Self {
        Self {
            cutoff_radius: f64::INFINITY,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation("epsilon", "must be positive and finite"));
        }
        if !(self.range_scale > 0.0 && self.range_scale.is_finite()) {
            return Err(Error::validation("range_scale", "must be positive and finite"));
        }
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::validation("dim", "must be 1 or 2"));
        }
        if !(self.cutoff_radius >= MIN_CUTOFF_FACTOR * self.width().max(self.epsilon) * (1.0 - 1e-12)) {
            return Err(Error::validation(
                "cutoff_factor",
                format!("cutoff must be at least {MIN_CUTOFF_FACTOR} eps"),
            ));
        }
        Ok(())
    }

    /// Effective Gaussian width `c * eps`.
    #[inline]
    pub fn width(&self) -> f64 {
        self.range_scale * self.epsilon
    }

    /// Unit-mass Gaussian potential `V(r)`.
    #[inline]
    pub fn potential(&self, r: Point) -> f64 {
        let s = self.width();
        let r2 = r[0] * r[0] + if self.dim == 2 { r[1] * r[1] } else { 0.0 };
        gaussian_norm(s, self.dim) * (-0.5 * r2 / (s * s)).exp()
    }
}

#[inline]
fn gaussian_norm(width: f64, dim: usize) -> f64 {
    let c = 1.0 / (width * (2.0 * std::f64::consts::PI).sqrt());
    if dim == 2 {
        c * c
    } else {
        c
    }
}

/// Repulsive pair force `-grad V(r) = (r / s^2) V(r)`, zero beyond the cutoff.
#[inline]
pub fn kernel_force(r: Point, spec: &KernelSpec) -> Point {
    let s = spec.width();
    let r2 = r[0] * r[0] + if spec.dim == 2 { r[1] * r[1] } else { 0.0 };
    if r2 > spec.cutoff_radius * spec.cutoff_radius {
        return [0.0, 0.0];
    }
    let inv_s2 = 1.0 / (s * s);
    let scale = inv_s2 * gaussian_norm(s, spec.dim) * (-0.5 * r2 * inv_s2).exp();
    if spec.dim == 2 {
        [r[0] * scale, r[1] * scale]
    } else {
        [r[0] * scale, 0.0]
    }
}

/// Axis-aligned box `[lo, hi]` per dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    pub lo: Point,
    pub hi: Point,
    pub dim: usize,
}

impl BoxDomain {
    pub fn new(lo: Point, hi: Point, dim: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::validation("dim", "must be 1 or 2"));
        }
        for d in 0..dim {
            if !(hi[d] > lo[d] && lo[d].is_finite() && hi[d].is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "empty or unbounded box along axis {d}"
                )));
            }
        }
        Ok(Self { lo, hi, dim })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new([lo, 0.0], [hi, 0.0], 1)
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim).all(|d| p[d] >= self.lo[d] && p[d] <= self.hi[d])
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 2];
        for d in 0..self.dim {
            c[d] = 0.5 * (self.lo[d] + self.hi[d]);
        }
        c
    }
}

/// Mirror-folds `x` into `[lo, hi]`, equivalent to reflecting repeatedly
/// until the coordinate is inside. Non-finite input is returned unchanged.
pub fn reflect_into(x: f64, lo: f64, hi: f64) -> f64 {
    if !x.is_finite() || (lo..=hi).contains(&x) {
        return x;
    }
    // a few explicit folds keep small overshoots exact
    let mut y = x;
    for _ in 0..4 {
        if y > hi {
            y = 2.0 * hi - y;
        } else if y < lo {
            y = 2.0 * lo - y;
        } else {
            return y;
        }
    }
    let len = hi - lo;
    let m = (y - lo).rem_euclid(2.0 * len);
    let folded = if m > len { 2.0 * len - m } else { m };
    (lo + folded).clamp(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    X,
    Y,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriftMethod {
    Naive,
    #[default]
    CellList,
}

/// Positions of both species plus everything needed to advance them.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub x: Vec<Point>,
    pub y: Vec<Point>,
    pub domain: BoxDomain,
    pub kernel: KernelSpec,
    /// Noise amplitude; equals `kernel.epsilon` unless decoupled.
    pub noise_epsilon: f64,
    pub seed: u64,
    /// Noise stream ids used for the X and Y species.
    pub streams: [u64; 2],
    /// Number of completed steps, used as the noise counter.
    pub step_index: u64,
}

impl ParticleEnsemble {
    pub fn new(x: Vec<Point>, y: Vec<Point>, domain: BoxDomain, kernel: KernelSpec, seed: u64) -> Result<Self> {
        if domain.dim != kernel.dim {
            return Err(Error::InvalidArgument(
                "domain and kernel dimensions differ".into(),
            ));
        }
        if x.is_empty() || y.is_empty() {
            return Err(Error::validation("n_particles", "each species needs at least one particle"));
        }
        if let Some(p) = x.iter().chain(&y).find(|p| !domain.contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "particle at {p:?} lies outside the domain"
            )));
        }
        Ok(Self {
            x,
            y,
            domain,
            noise_epsilon: kernel.epsilon,
            kernel,
            seed,
            streams: [0, 1],
            step_index: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn positions(&self, species: Species) -> Vec<Point> {
        match species {
            Species::X => self.x.clone(),
            Species::Y => self.y.clone(),
            Species::Both => self.x.iter().chain(&self.y).copied().collect(),
        }
    }
}

/// Drift vectors for both species.
#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    pub x: Vec<Point>,
    pub y: Vec<Point>,
}

impl Drift {
    pub fn max_magnitude(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .map(|d| (d[0] * d[0] + d[1] * d[1]).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn mean_magnitude(&self) -> f64 {
        let n = (self.x.len() + self.y.len()) as f64;
        self.x
            .iter()
            .chain(&self.y)
            .map(|d| (d[0] * d[0] + d[1] * d[1]).sqrt())
            .sum::<f64>()
            / n
    }

    /// Equal-weight sum of all drift vectors.
    pub fn total(&self) -> Point {
        let mut s = [0.0; 2];
        for d in self.x.iter().chain(&self.y) {
            s[0] += d[0];
            s[1] += d[1];
        }
        s
    }
}

/// Kernel constants hoisted out of the pair loop.
#[derive(Clone, Copy)]
pub(crate) struct PairKernel {
    neg_half_inv_s2: f64,
    scale: f64,
    cut2: f64,
    two_d: bool,
}

impl PairKernel {
    pub(crate) fn new(spec: &KernelSpec) -> Self {
        let s = spec.width();
        Self {
            neg_half_inv_s2: -0.5 / (s * s),
            scale: gaussian_norm(s, spec.dim) / (s * s),
            cut2: spec.cutoff_radius * spec.cutoff_radius,
            two_d: spec.dim == 2,
        }
    }

    /// Repulsion felt at `p` from `sources`, summed in index order.
    #[inline]
    pub(crate) fn sum(&self, p: &Point, sources: &[Point]) -> Point {
        let (mut ax, mut ay) = (0.0, 0.0);
        if self.two_d {
            for q in sources {
                let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
                let r2 = dx * dx + dy * dy;
                if r2 <= self.cut2 {
                    let e = (r2 * self.neg_half_inv_s2).exp();
                    ax += dx * e;
                    ay += dy * e;
                }
            }
        } else {
            for q in sources {
                let dx = p[0] - q[0];
                let r2 = dx * dx;
                if r2 <= self.cut2 {
                    ax += dx * (r2 * self.neg_half_inv_s2).exp();
                }
            }
        }
        [ax * self.scale, ay * self.scale]
    }
}

/// Combines per-species sums; `a / na + b / nb` is symmetric under exchanging the species.
#[inline]
pub(crate) fn combine(own: Point, n_own: usize, other: Point, n_other: usize) -> Point {
    let (wo, wt) = (n_own as f64, n_other as f64);
    [own[0] / wo + other[0] / wt, own[1] / wo + other[1] / wt]
}

/// `O(n^2)` reference drift.
pub fn drift_naive(ens: &ParticleEnsemble) -> Drift {
    let k = PairKernel::new(&ens.kernel);
    let for_species = |targets: &[Point], own: &[Point], other: &[Point]| -> Vec<Point> {
        targets
            .par_iter()
            .map(|p| combine(k.sum(p, own), own.len(), k.sum(p, other), other.len()))
            .collect()
    };
    Drift {
        x: for_species(&ens.x, &ens.x, &ens.y),
        y: for_species(&ens.y, &ens.y, &ens.x),
    }
}

/// Drift with the requested method.
pub fn drift(ens: &ParticleEnsemble, method: DriftMethod) -> Drift {
    match method {
        DriftMethod::Naive => drift_naive(ens),
        DriftMethod::CellList => drift_celllist(ens),
    }
}

/// One Euler-Maruyama step followed by wall reflection.
pub fn em_step(ens: &mut ParticleEnsemble, dt: f64, method: DriftMethod) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("particle dt must be positive, got {dt}")));
    }
    let drift = drift(ens, method);
    let amp = ens.noise_epsilon * dt.sqrt();
    let noise = NoiseStream::new(ens.seed, ens.step_index);
    let dim = ens.dim();
    let domain = ens.domain;
    let step = ens.step_index;

    let advance = |positions: &mut [Point], drift: &[Point], stream: u64| -> Result<()> {
        positions
            .par_iter_mut()
            .zip(drift.par_iter())
            .enumerate()
            .try_for_each(|(i, (p, d))| {
                let xi = if amp > 0.0 { noise.normals(stream, i as u64) } else { [0.0; 2] };
                for c in 0..dim {
                    let moved = p[c] + d[c] * dt + amp * xi[c];
                    let r = reflect_into(moved, domain.lo[c], domain.hi[c]);
                    if !(r.is_finite() && r >= domain.lo[c] && r <= domain.hi[c]) {
                        return Err(Error::DtTooLarge { step });
                    }
                    p[c] = r;
                }
                Ok(())
            })
    };
    let [sx, sy] = ens.streams;
    advance(&mut ens.x, &drift.x, sx)?;
    advance(&mut ens.y, &drift.y, sy)?;
    ens.step_index += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1() -> KernelSpec {
        KernelSpec::new(1.0, 1).unwrap()
    }

    #[test]
    fn force_examples() {
        let s = spec1();
        assert_eq!(kernel_force([0.0, 0.0], &s), [0.0, 0.0]);
        let f = kernel_force([1.0, 0.0], &s);
        let expected = (-0.5_f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((f[0] - expected).abs() < 1e-15);
        assert!((f[0] - 0.241971).abs() < 1e-6);
        // beyond the cutoff the force vanishes
        assert_eq!(kernel_force([6.5, 0.0], &s), [0.0, 0.0]);
    }

    #[test]
    fn force_is_minus_gradient_of_potential() {
        for dim in [1, 2] {
            let s = KernelSpec::with_range(0.3, 0.7, 8.0, dim).unwrap();
            let h = 1e-6;
            for r in [[0.1, 0.05], [-0.2, 0.13], [0.05, -0.3]] {
                let f = kernel_force(r, &s);
                for c in 0..dim {
                    let mut a = r;
                    let mut b = r;
                    a[c] += h;
                    b[c] -= h;
                    let grad = (s.potential(a) - s.potential(b)) / (2.0 * h);
                    assert!((f[c] + grad).abs() < 1e-6 * (1.0 + grad.abs()), "{dim} {r:?}");
                }
            }
        }
    }

    #[test]
    fn potential_has_unit_mass() {
        for dim in [1, 2] {
            let s = KernelSpec::new(0.2, dim).unwrap();
            let h = 0.005;
            let k = (2.0 / h) as i64;
            let mut total = 0.0;
            for i in -k..k {
                let x = (i as f64 + 0.5) * h;
                if dim == 1 {
                    total += s.potential([x, 0.0]) * h;
                } else {
                    for j in -k..k {
                        let y = (j as f64 + 0.5) * h;
                        total += s.potential([x, y]) * h * h;
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-6, "{dim}: {total}");
        }
    }

    #[test]
    fn cutoff_below_six_widths_rejected() {
        assert!(KernelSpec::with_range(0.3, 1.0, 5.0, 1).is_err());
        assert!(KernelSpec::with_range(0.0, 1.0, 6.0, 1).is_err());
    }

    #[test]
    fn reflection() {
        assert!((reflect_into(1.1, 0.0, 1.0) - 0.9).abs() < 1e-15);
        assert!((reflect_into(-0.25, 0.0, 1.0) - 0.25).abs() < 1e-15);
        assert_eq!(reflect_into(0.5, 0.0, 1.0), 0.5);
        // several box lengths away still folds back inside
        let r = reflect_into(7.3, 0.0, 1.0);
        assert!((r - 0.7).abs() < 1e-12, "{r}");
        let r = reflect_into(-3.6, 0.0, 1.0);
        assert!((r - 0.4).abs() < 1e-12, "{r}");
    }

    fn ensemble(x: Vec<Point>, y: Vec<Point>) -> ParticleEnsemble {
        let d = BoxDomain::interval(-5.0, 5.0).unwrap();
        ParticleEnsemble::new(x, y, d, KernelSpec::new(0.3, 1).unwrap(), 7).unwrap()
    }

    #[test]
    fn coincident_pair_has_zero_drift() {
        let e = ensemble(vec![[0.2, 0.0]], vec![[0.2, 0.0]]);
        let d = drift_naive(&e);
        assert_eq!(d.x[0], [0.0, 0.0]);
        assert_eq!(d.y[0], [0.0, 0.0]);
    }

    #[test]
    fn pair_drifts_are_opposite_and_repulsive() {
        let e = ensemble(vec![[0.0, 0.0], [0.25, 0.0]], vec![[3.0, 0.0]]);
        let d = drift_naive(&e);
        assert_eq!(d.x[0][0], -d.x[1][0]);
        assert!(d.x[0][0] < 0.0, "left particle is pushed left");
    }

    #[test]
    fn em_step_without_noise_or_drift_is_identity() {
        let mut e = ensemble(vec![[-2.0, 0.0]], vec![[2.0, 0.0]]);
        e.noise_epsilon = 0.0;
        let before = e.clone();
        em_step(&mut e, 1e-3, DriftMethod::Naive).unwrap();
        assert_eq!(e.x, before.x);
        assert_eq!(e.y, before.y);
        assert!(em_step(&mut e, 0.0, DriftMethod::Naive).is_err());
    }

    #[test]
    fn positions_stay_in_box() {
        let d = BoxDomain::new([0.0, 0.0], [1.0, 1.0], 2).unwrap();
        let pts: Vec<Point> = (0..40).map(|i| [0.01 + 0.024 * i as f64, 0.5]).collect();
        let mut e = ParticleEnsemble::new(pts.clone(), pts, d, KernelSpec::new(0.05, 2).unwrap(), 3).unwrap();
        e.noise_epsilon = 0.5;
        for _ in 0..50 {
            em_step(&mut e, 1e-2, DriftMethod::CellList).unwrap();
            assert!(e.x.iter().chain(&e.y).all(|p| d.contains(p)));
        }
    }
}
