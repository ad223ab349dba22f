//! Closed-form reference solutions.
//!
//! The total density `w = u + v` of the cross-transport system solves the
//! Boussinesq equation `w_t = (w^2)_xx / 2`, which admits the self-similar
//! quadratic profile
//!
//! ```text
//! w(t, x) = a (6bt + 1)^(-1/3) - b / (6bt + 1) * x^2
//! ```
//!
//! Given `w`, each species is transported by the continuity equation
//! `u_t + (V u)_x = 0` with `V = -w_x`, which is solved here by the method of
//! characteristics: `u(x, t) = u0(G(x, t)) * dG/dx(x, t)` where `G` inverts the
//! forward flow of `dX/dt = V(X, t)`.
//!
//! Note on the curvature parameter: `b` is the initial value `B(0)` of the
//! quadratic coefficient, i.e. `w0(x) = a - b x^2`. With that convention
//! `w0(1) - w0(0) = -b`, not `+b`.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Quadratic Boussinesq profile `w0(x) = a - b x^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticProfile {
    pub a: f64,
    pub b: f64,
}

impl QuadraticProfile {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `6bt + 1`, checked to be positive.
    fn scale(&self, t: f64) -> Result<f64> {
        time_scale(self.b, t)
    }

    /// Peak value `A(t)`.
    pub fn peak(&self, t: f64) -> Result<f64> {
        Ok(self.a * self.scale(t)?.powf(-1.0 / 3.0))
    }

    /// Curvature `B(t)`.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        Ok(self.b / self.scale(t)?)
    }

    /// Half-width of the support of the positive part, when it is bounded.
    pub fn support_radius(&self, t: f64) -> Result<Option<f64>> {
        let (a, b) = (self.peak(t)?, self.curvature(t)?);
        if b > 0.0 && a > 0.0 {
            Ok(Some((a / b).sqrt()))
        } else {
            Ok(None)
        }
    }
}

fn time_scale(b: f64, t: f64) -> Result<f64> {
    let s = 6.0 * b * t + 1.0;
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(Error::Domain(format!(
            "6bt + 1 must be positive (b = {b}, t = {t})"
        )))
    }
}

/// Evaluates the quadratic Boussinesq solution at `(t, x)`.
///
/// With `positive_part` the value is truncated at zero, which gives the
/// nonnegative compactly supported profile.
pub fn special_w(profile: QuadraticProfile, t: f64, x: f64, positive_part: bool) -> Result<f64> {
    let value = profile.peak(t)? - profile.curvature(t)? * x * x;
    Ok(if positive_part { value.max(0.0) } else { value })
}

/// Transported companion density `u0(x / s) / s` with `s = (6bt + 1)^(1/3)`.
pub fn special_u(u0: impl Fn(f64) -> f64, b: f64, t: f64, x: f64) -> Result<f64> {
    let s = time_scale(b, t)?.cbrt();
    Ok(u0(x / s) / s)
}

/// Drift `V(x, t) = 2bx / (6bt + 1)` carrying `u` along the quadratic profile.
pub fn special_velocity(b: f64) -> impl Fn(f64, f64) -> f64 + Sync + Copy {
    move |x, t| 2.0 * b * x / (6.0 * b * t + 1.0)
}

fn rk4_scalar(
    velocity: &impl Fn(f64, f64) -> f64,
    x: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    let k1 = velocity(x, t);
    let k2 = velocity(x + 0.5 * h * k1, t + 0.5 * h);
    let k3 = velocity(x + 0.5 * h * k2, t + 0.5 * h);
    let k4 = velocity(x + h * k3, t + h);
    let next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::IntegrationFailure { time: t })
    }
}

/// Integrates `dX/dt = V(X, t)` from `(x0, t0)` to `t1` in `steps` RK4 steps.
/// `t1 < t0` integrates backward.
pub fn integrate_characteristic(
    velocity: impl Fn(f64, f64) -> f64,
    x0: f64,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let h = (t1 - t0) / steps as f64;
    let mut x = x0;
    for k in 0..steps {
        x = rk4_scalar(&velocity, x, t0 + k as f64 * h, h)?;
    }
    Ok(x)
}

/// Trajectory of `dX/dt = V(X, t)`, `X(0) = x0`, sampled at `steps + 1`
/// uniform times in `[0, t_end]`.
pub fn characteristic_flow(
    velocity: impl Fn(f64, f64) -> f64,
    x0: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let h = t_end / steps as f64;
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(x0);
    let mut x = x0;
    for k in 0..steps {
        x = rk4_scalar(&velocity, x, k as f64 * h, h)?;
        traj.push(x);
    }
    Ok(traj)
}

/// Forward flow `F(x, t)` and its inverse `G(y, t)` for a velocity field.
#[derive(Clone, Copy)]
pub struct CharacteristicMap<V> {
    velocity: V,
    steps: usize,
}

impl<V: Fn(f64, f64) -> f64> CharacteristicMap<V> {
    pub fn new(velocity: V, steps: usize) -> Self {
        Self {
            velocity,
            steps: steps.max(1),
        }
    }

    /// `F(x, t)`: position at time `t` of the characteristic leaving `x` at time 0.
    pub fn forward(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(x);
        }
        integrate_characteristic(&self.velocity, x, 0.0, t, self.steps)
    }

    /// `G(y, t)`: foot at time 0 of the characteristic through `y` at time `t`.
    pub fn inverse(&self, y: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(y);
        }
        integrate_characteristic(&self.velocity, y, t, 0.0, self.steps)
    }
}

/// Method-of-characteristics solution of a continuity equation on a set of
/// query points.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuitySolution {
    pub values: Vec<f64>,
    /// Inverse-flow foot points `G(x, t)`.
    pub feet: Vec<f64>,
    /// Number of points where the Jacobian estimate `dG/dx` was not positive.
    pub nonpositive_jacobians: usize,
}

/// Solves `f_t + (V f)_x = 0`, `f(., 0) = f0`, at time `t` on the sorted
/// query points `x_grid` via `f(x, t) = f0(G(x, t)) dG/dx(x, t)`.
///
/// `G` is obtained by integrating each characteristic backward from `(x, t)`
/// with `steps` RK4 steps; `dG/dx` uses central differences on `x_grid`
/// (one-sided at the ends).
pub fn continuity_solution(
    f0: impl Fn(f64) -> f64,
    velocity: impl Fn(f64, f64) -> f64 + Sync,
    t: f64,
    x_grid: &[f64],
    steps: usize,
) -> Result<ContinuitySolution> {
    if x_grid.len() < 2 {
        return Err(Error::InvalidArgument(
            "continuity_solution needs at least two query points".into(),
        ));
    }
    let map = CharacteristicMap::new(&velocity, steps);
    let feet: Vec<f64> = x_grid
        .par_iter()
        .map(|&x| map.inverse(x, t))
        .collect::<Result<_>>()?;

    let n = x_grid.len();
    let mut values = Vec::with_capacity(n);
    let mut nonpositive = 0;
    for i in 0..n {
        let (lo, hi) = match i {
            0 => (0, 1),
            i if i == n - 1 => (n - 2, n - 1),
            i => (i - 1, i + 1),
        };
        let jac = (feet[hi] - feet[lo]) / (x_grid[hi] - x_grid[lo]);
        if jac <= 0.0 {
            nonpositive += 1;
        }
        values.push(f0(feet[i]) * jac);
    }
    if nonpositive > 0 {
        log::warn!(
            "continuity_solution: {nonpositive} points with dG/dx <= 0 at t = {t} (characteristics crossing)"
        );
    }
    Ok(ContinuitySolution {
        values,
        feet,
        nonpositive_jacobians: nonpositive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(x: f64) -> f64 {
        (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn special_w_examples() {
        let p = QuadraticProfile::new(1.0, 0.0);
        assert_eq!(special_w(p, 5.0, 3.0, false).unwrap(), 1.0);

        let p = QuadraticProfile::new(1.0, 1.0);
        for x in [-1.5, -0.3, 0.0, 0.7] {
            let w = special_w(p, 0.0, x, false).unwrap();
            assert!((w - (1.0 - x * x)).abs() < 1e-15);
        }
        let w = special_w(p, 7.0 / 6.0, 0.0, false).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
    }

    #[test]
    fn positive_part_is_opt_in() {
        let p = QuadraticProfile::new(1.0, 1.0);
        assert!(special_w(p, 0.0, 2.0, false).unwrap() < 0.0);
        assert_eq!(special_w(p, 0.0, 2.0, true).unwrap(), 0.0);
    }

    #[test]
    fn domain_error_when_scale_nonpositive() {
        let p = QuadraticProfile::new(1.0, -1.0);
        assert!(matches!(special_w(p, 1.0 / 6.0, 0.0, false), Err(Error::Domain(_))));
        assert!(matches!(special_u(phi, -1.0, 0.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn special_w_satisfies_boussinesq_by_finite_differences() {
        let p = QuadraticProfile::new(1.0, 1.0);
        let w = |t: f64, x: f64| special_w(p, t, x, false).unwrap();
        let (t, x) = (0.3, 0.4);
        let mut prev = f64::INFINITY;
        for h in [1e-2, 5e-3, 2.5e-3] {
            let wt = (w(t + h, x) - w(t - h, x)) / (2.0 * h);
            let sq = |x: f64| w(t, x).powi(2);
            let wxx = (sq(x + h) - 2.0 * sq(x) + sq(x - h)) / (h * h);
            let residual = (wt - 0.5 * wxx).abs();
            assert!(residual <= prev + 1e-12);
            prev = residual;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn special_u_examples() {
        assert_eq!(special_u(phi, 0.0, 3.0, 0.4).unwrap(), phi(0.4));
        let indicator = |x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 };
        assert!((special_u(indicator, 1.0, 7.0 / 6.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let v = special_u(phi, 1.0, 7.0 / 6.0, 2.0).unwrap();
        assert!((v - phi(1.0) / 2.0).abs() < 1e-15);
        assert!((v - 0.120985).abs() < 1e-6);
    }

    #[test]
    fn special_u_preserves_mass() {
        // midpoint quadrature of the rescaled indicator over a wide interval
        let indicator = |x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 };
        let n = 40_000;
        let dx = 8.0 / n as f64;
        let mass: f64 = (0..n)
            .map(|i| -4.0 + (i as f64 + 0.5) * dx)
            .map(|x| special_u(indicator, 1.0, 7.0 / 6.0, x).unwrap() * dx)
            .sum();
        assert!((mass - 2.0).abs() < 1e-3);
    }

    #[test]
    fn characteristic_flow_examples() {
        let traj = characteristic_flow(|_, _| 0.0, 0.3, 1.0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.iter().all(|&x| x == 0.3));

        let traj = characteristic_flow(special_velocity(1.0), 1.0, 7.0 / 6.0, 400).unwrap();
        assert_eq!(traj[0], 1.0);
        assert!((traj.last().unwrap() - 2.0).abs() < 1e-9);

        let traj = characteristic_flow(|x, _| x, 1.0, 1.0, 200).unwrap();
        assert!((traj.last().unwrap() - std::f64::consts::E).abs() < 1e-8);
    }

    #[test]
    fn characteristic_flow_propagates_non_finite_velocity() {
        let r = characteristic_flow(|_, _| f64::NAN, 0.0, 1.0, 4);
        assert!(matches!(r, Err(Error::IntegrationFailure { .. })));
        assert!(characteristic_flow(|_, _| 0.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn flow_inversion_round_trip() {
        let v = |x: f64, t: f64| (x + t).sin() + 0.3 * x;
        let map = CharacteristicMap::new(v, 400);
        for x0 in [-1.0, -0.2, 0.5, 1.7] {
            let y = map.forward(x0, 0.8).unwrap();
            let back = map.inverse(y, 0.8).unwrap();
            assert!((back - x0).abs() < 1e-8, "{x0} -> {y} -> {back}");
        }
        assert_eq!(map.inverse(0.25, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn continuity_solution_identity_flow() {
        let xs: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        let sol = continuity_solution(phi, |_, _| 0.0, 0.7, &xs, 10).unwrap();
        for (x, f) in xs.iter().zip(&sol.values) {
            assert!((f - phi(*x)).abs() < 1e-14);
        }
    }

    #[test]
    fn continuity_solution_matches_special_u() {
        let xs = [-0.1, 0.0, 0.1];
        let sol = continuity_solution(phi, special_velocity(1.0), 7.0 / 6.0, &xs, 400).unwrap();
        assert!((sol.values[1] - phi(0.0) / 2.0).abs() < 1e-8);
        assert!((sol.values[1] - 0.199471).abs() < 1e-6);
        assert_eq!(sol.nonpositive_jacobians, 0);
    }

    #[test]
    fn continuity_solution_flags_crossing_characteristics() {
        // a single RK4 step over a long interval folds the discrete inverse flow
        let xs: Vec<f64> = (-20..=20).map(|i| 0.05 * i as f64).collect();
        let sol = continuity_solution(phi, |x: f64, _| -5.0 * (3.0 * x).sin(), 1.0, &xs, 1).unwrap();
        assert!(sol.nonpositive_jacobians > 0);
    }
}
