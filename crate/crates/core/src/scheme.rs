//! Building blocks shared by the 1D and 2D finite-volume solvers: the
//! pressure nonlinearity, upwind face fluxes with optional slope limiting,
//! classical RK4 and the adaptive time loop with snapshot capture.

use crate::diagnostics::{DiagnosticsRecord, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::grid::ScalarField;

/// Values below this after a step are treated as a loss of positivity.
pub const NEGATIVITY_TOLERANCE: f64 = -1e-12;

/// Pressure law `p = f(u + v)`.
#[derive(Debug, Clone, Copy)]
pub enum Nonlinearity {
    /// `f(z) = z`.
    Identity,
    /// `f(z) = z^(m-1)`, `m > 1`.
    Power(f64),
    /// Smooth monotone `f` with derivative `df`.
    Custom {
        f: fn(f64) -> f64,
        df: fn(f64) -> f64,
    },
}

impl Nonlinearity {
    pub fn power(m: f64) -> Result<Self> {
        if m > 1.0 && m.is_finite() {
            Ok(Nonlinearity::Power(m))
        } else {
            Err(Error::InvalidArgument(format!("power exponent m must exceed 1, got {m}")))
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Identity => z,
            Nonlinearity::Power(m) => z.max(0.0).powf(m - 1.0),
            Nonlinearity::Custom { f, .. } => f(z),
        }
    }

    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Power(m) => (m - 1.0) * z.max(0.0).powf(m - 2.0),
            Nonlinearity::Custom { df, .. } => df(z),
        }
    }

    /// Effective diffusivity `w f'(w)` of the total-density equation.
    #[inline]
    pub fn diffusivity(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        match *self {
            Nonlinearity::Identity => w,
            Nonlinearity::Power(m) => (m - 1.0) * w.powf(m - 1.0),
            Nonlinearity::Custom { df, .. } => w * df(w),
        }
    }

    /// `Phi(w) = int_0^w z f'(z) dz`, so that `w (f(w))_x = (Phi(w))_x`.
    /// Unavailable for custom laws.
    pub fn potential(&self, w: f64) -> Option<f64> {
        match *self {
            Nonlinearity::Identity => Some(0.5 * w * w),
            Nonlinearity::Power(m) => Some((m - 1.0) / m * w.max(0.0).powf(m)),
            Nonlinearity::Custom { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Nonlinearity::Identity => "identity".into(),
            Nonlinearity::Power(m) => format!("power(m={m})"),
            Nonlinearity::Custom { .. } => "custom".into(),
        }
    }
}

/// Slope limiter for the optional second-order flux correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Limiter {
    /// Pure first-order upwinding.
    #[default]
    None,
    Minmod,
    VanLeer,
}

impl Limiter {
    #[inline]
    fn slope(self, left: f64, right: f64) -> f64 {
        match self {
            Limiter::None => 0.0,
            Limiter::Minmod => {
                if left * right <= 0.0 {
                    0.0
                } else if left.abs() < right.abs() {
                    left
                } else {
                    right
                }
            }
            Limiter::VanLeer => {
                if left * right <= 0.0 {
                    0.0
                } else {
                    2.0 * left * right / (left + right)
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Limiter::None => "none",
            Limiter::Minmod => "minmod",
            Limiter::VanLeer => "vanleer",
        }
    }
}

/// Face velocities `-(p_{i+1} - p_i) / h` along one line of cells; the two
/// wall faces are zero. Output has `p.len() + 1` entries.
pub fn line_velocity(p: &[f64], h: f64, out: &mut [f64]) {
    let n = p.len();
    debug_assert_eq!(out.len(), n + 1);
    out[0] = 0.0;
    out[n] = 0.0;
    for i in 0..n.saturating_sub(1) {
        out[i + 1] = -(p[i + 1] - p[i]) / h;
    }
}

/// Upwind face fluxes `vel+ rho_L + vel- rho_R` along one line of cells.
///
/// With a limiter the face states are slope-limited reconstructions
/// `rho_i + s_i / 2` and `rho_{i+1} - s_{i+1} / 2`; boundary cells use zero
/// slope. Wall fluxes are exactly zero.
pub fn line_flux(rho: &[f64], vel: &[f64], limiter: Limiter, out: &mut [f64]) {
    let n = rho.len();
    debug_assert_eq!(vel.len(), n + 1);
    debug_assert_eq!(out.len(), n + 1);
    out[0] = 0.0;
    out[n] = 0.0;
    let slope = |i: usize| {
        if limiter == Limiter::None || i == 0 || i + 1 >= n {
            0.0
        } else {
            limiter.slope(rho[i] - rho[i - 1], rho[i + 1] - rho[i])
        }
    };
    for i in 0..n.saturating_sub(1) {
        let v = vel[i + 1];
        out[i + 1] = if v > 0.0 {
            v * (rho[i] + 0.5 * slope(i))
        } else if v < 0.0 {
            v * (rho[i + 1] - 0.5 * slope(i + 1))
        } else {
            0.0
        };
    }
}

/// A method-of-lines system advanced by the shared time loop.
pub(crate) trait SemiDiscrete {
    fn rhs(&self, state: &[f64], out: &mut [f64]);
    fn stable_dt(&self, state: &[f64]) -> f64;
    /// The `(u, v)` pair represented by a state.
    fn species(&self, state: &[f64]) -> (ScalarField, ScalarField);
}

/// Classical four-stage Runge-Kutta step.
pub(crate) fn rk4_step<S: SemiDiscrete + ?Sized>(sys: &S, y: &[f64], dt: f64) -> Vec<f64> {
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];

    sys.rhs(y, &mut k1);
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k1[i];
    }
    sys.rhs(&stage, &mut k2);
    for i in 0..n {
        stage[i] = y[i] + 0.5 * dt * k2[i];
    }
    sys.rhs(&stage, &mut k3);
    for i in 0..n {
        stage[i] = y[i] + dt * k3[i];
    }
    sys.rhs(&stage, &mut k4);
    (0..n)
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Returns the first offending entry if `state` is non-finite or negative.
pub(crate) fn check_state(state: &[f64]) -> Option<(usize, f64)> {
    state
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < NEGATIVITY_TOLERANCE)
        .map(|(i, v)| (i, *v))
}

/// Time-integration settings shared by the PDE solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub cfl: f64,
    pub limiter: Limiter,
    pub t_end: f64,
    /// Requested snapshot times, sorted, within `[0, t_end]`.
    pub snapshot_times: Vec<f64>,
    /// Upper cap on the adaptive step.
    pub dt_max: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            limiter: Limiter::None,
            t_end: 0.2,
            snapshot_times: vec![0.0, 0.1, 0.2],
            dt_max: 1e-2,
        }
    }
}

impl SolverParams {
    pub fn with_t_end(t_end: f64) -> Self {
        Self {
            t_end,
            snapshot_times: vec![0.0, t_end],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::validation("cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::validation("t_end", "must be finite and nonnegative"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::validation("dt_max", "must be positive"));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("snapshot_times", "must be sorted"));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(0.0..=self.t_end).contains(&t))
        {
            return Err(Error::validation("snapshot_times", "must lie within [0, t_end]"));
        }
        Ok(())
    }
}

/// Species fields captured at (or just after) a requested time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub seq: usize,
    pub t_requested: f64,
    pub t: f64,
    pub u: ScalarField,
    pub v: ScalarField,
}

impl Snapshot {
    pub fn w(&self) -> ScalarField {
        self.u.add(&self.v).expect("species share a grid")
    }
}

/// Result of a PDE run.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: DiagnosticsRecord,
    pub u: ScalarField,
    pub v: ScalarField,
    pub t: f64,
    pub steps: usize,
}

impl Solution {
    pub fn w(&self) -> ScalarField {
        self.u.add(&self.v).expect("species share a grid")
    }
}

/// Advances `sys` from `y0` to `params.t_end` with `dt = stable_dt`, the last
/// step shortened to land on `t_end`. Snapshots are taken at the first step
/// whose time reaches each requested time.
pub(crate) fn integrate<S: SemiDiscrete>(sys: &S, y0: Vec<f64>, params: &SolverParams) -> Result<Solution> {
    params.validate()?;
    if let Some((i, v)) = check_state(&y0) {
        return Err(Error::InvalidArgument(format!(
            "initial state entry {i} is {v}; densities must be finite and nonnegative"
        )));
    }
    let time_tol = 1e-12 * params.t_end.max(1.0);
    let mut y = y0;
    let mut t = 0.0_f64;
    let mut steps = 0usize;
    let mut last_dt = 0.0;
    let mut snapshots = Vec::new();
    let mut diagnostics = DiagnosticsRecord::new();
    let mut pending = params.snapshot_times.iter().copied().peekable();

    let capture = |t: f64, dt: f64, y: &[f64], snapshots: &mut Vec<Snapshot>, diagnostics: &mut DiagnosticsRecord, t_req: f64| -> Result<()> {
        let (u, v) = sys.species(y);
        if diagnostics.rows.last().map_or(true, |r| t > r.t) {
            diagnostics.push(DiagnosticsRow::measure(t, &u, &v)?.with_extra("dt", dt))?;
        }
        snapshots.push(Snapshot {
            seq: snapshots.len(),
            t_requested: t_req,
            t,
            u,
            v,
        });
        Ok(())
    };

    while let Some(&t_req) = pending.peek() {
        if t_req > t + time_tol {
            break;
        }
        capture(t, last_dt, &y, &mut snapshots, &mut diagnostics, t_req)?;
        pending.next();
    }

    while t < params.t_end {
        let remaining = params.t_end - t;
        let dt = sys.stable_dt(&y).min(remaining);
        if !(dt > 0.0 && dt.is_finite()) {
            let (u, v) = sys.species(&y);
            return Err(Error::Instability {
                time: t,
                reason: format!("non-positive time step {dt}"),
                last_valid: Some(Box::new((u, v))),
            });
        }
        let next = rk4_step(sys, &y, dt);
        if let Some((i, v)) = check_state(&next) {
            let (u_last, v_last) = sys.species(&y);
            return Err(Error::Instability {
                time: t + dt,
                reason: format!("state entry {i} became {v}"),
                last_valid: Some(Box::new((u_last, v_last))),
            });
        }
        y = next;
        t = if dt == remaining { params.t_end } else { t + dt };
        steps += 1;
        last_dt = dt;

        while let Some(&t_req) = pending.peek() {
            if t_req > t + time_tol {
                break;
            }
            capture(t, last_dt, &y, &mut snapshots, &mut diagnostics, t_req)?;
            pending.next();
        }
    }

    let (u, v) = sys.species(&y);
    Ok(Solution {
        snapshots,
        diagnostics,
        u,
        v,
        t,
        steps,
    })
}

/// `cfl * min(h / max|vel|, h^2 / (2 d max D))`, capped at `dt_max`.
pub(crate) fn cfl_dt(cfl: f64, h: f64, dim: usize, max_vel: f64, max_diffusivity: f64, dt_max: f64) -> f64 {
    let advective = if max_vel > 0.0 { h / max_vel } else { f64::INFINITY };
    let parabolic = if max_diffusivity > 0.0 {
        h * h / (2.0 * dim as f64 * max_diffusivity)
    } else {
        f64::INFINITY
    };
    (cfl * advective.min(parabolic)).min(dt_max)
}
