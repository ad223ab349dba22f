//! Explicit finite-volume solver for the coupled cross-transport system
//!
//! ```text
//! u_t = (u f(u + v)_x)_x,    v_t = (v f(u + v)_x)_x
//! ```
//!
//! on a bounded interval with zero-flux walls. Both species are advected by
//! the shared face velocity `-(f(w)_{i+1} - f(w)_i) / dx`, upwinded, and
//! advanced with classical RK4. The equivalent `(w, u)` formulation, in which
//! `w = u + v` solves `w_t = (w f(w)_x)_x` independently, is provided as
//! [`solve_wu`].

use crate::error::{Error, Result};
use crate::grid::{Grid, Grid1D, ScalarField};
use crate::scheme::{self, cfl_dt, line_flux, line_velocity, Limiter, Nonlinearity, SemiDiscrete};

pub use crate::scheme::{Solution, SolverParams};

fn grid_1d(field: &ScalarField) -> Result<Grid1D> {
    match field.grid {
        Grid::D1(g) => Ok(g),
        Grid::D2(_) => Err(Error::GridMismatch("expected a 1D grid".into())),
    }
}

/// Face velocities `-(p_{i+1} - p_i) / dx`, zero at both walls.
pub fn interface_velocity(p: &ScalarField) -> Result<Vec<f64>> {
    let g = grid_1d(p)?;
    let mut vel = vec![0.0; p.len() + 1];
    line_velocity(&p.values, g.dx, &mut vel);
    Ok(vel)
}

/// Upwind face fluxes of `density` transported by `vel`.
pub fn upwind_flux(density: &ScalarField, vel: &[f64], limiter: Limiter) -> Result<Vec<f64>> {
    if vel.len() != density.len() + 1 {
        return Err(Error::GridMismatch(format!(
            "{} face velocities for {} cells",
            vel.len(),
            density.len()
        )));
    }
    let mut flux = vec![0.0; vel.len()];
    line_flux(&density.values, vel, limiter, &mut flux);
    Ok(flux)
}

/// Semi-discrete system for the `(u, v)` pair; state is `[u; v]`.
pub(crate) struct Coupled1d {
    pub grid: Grid1D,
    pub f: Nonlinearity,
    pub limiter: Limiter,
    pub cfl: f64,
    pub dt_max: f64,
}

impl Coupled1d {
    fn velocity(&self, state: &[f64]) -> Vec<f64> {
        let n = self.grid.n_cells;
        let (u, v) = state.split_at(n);
        let p: Vec<f64> = u.iter().zip(v).map(|(a, b)| self.f.eval(a + b)).collect();
        let mut vel = vec![0.0; n + 1];
        line_velocity(&p, self.grid.dx, &mut vel);
        vel
    }
}

fn divergence(flux: &[f64], dx: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = -(flux[i + 1] - flux[i]) / dx;
    }
}

impl SemiDiscrete for Coupled1d {
    fn rhs(&self, state: &[f64], out: &mut [f64]) {
        let n = self.grid.n_cells;
        let vel = self.velocity(state);
        let mut flux = vec![0.0; n + 1];
        let (du, dv) = out.split_at_mut(n);
        line_flux(&state[..n], &vel, self.limiter, &mut flux);
        divergence(&flux, self.grid.dx, du);
        line_flux(&state[n..], &vel, self.limiter, &mut flux);
        divergence(&flux, self.grid.dx, dv);
    }

    fn stable_dt(&self, state: &[f64]) -> f64 {
        let n = self.grid.n_cells;
        let vel = self.velocity(state);
        let max_vel = vel.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_diff = (0..n)
            .map(|i| self.f.diffusivity(state[i] + state[n + i]))
            .fold(0.0_f64, f64::max);
        cfl_dt(self.cfl, self.grid.dx, 1, max_vel, max_diff, self.dt_max)
    }

    fn species(&self, state: &[f64]) -> (ScalarField, ScalarField) {
        let n = self.grid.n_cells;
        (
            ScalarField {
                grid: Grid::D1(self.grid),
                values: state[..n].to_vec(),
            },
            ScalarField {
                grid: Grid::D1(self.grid),
                values: state[n..].to_vec(),
            },
        )
    }
}

fn coupled(u: &ScalarField, v: &ScalarField, f: Nonlinearity, limiter: Limiter) -> Result<(Coupled1d, Vec<f64>)> {
    u.check_same_grid(v)?;
    let grid = grid_1d(u)?;
    let mut state = u.values.clone();
    state.extend_from_slice(&v.values);
    Ok((
        Coupled1d {
            grid,
            f,
            limiter,
            cfl: 0.4,
            dt_max: f64::INFINITY,
        },
        state,
    ))
}

/// `(du/dt, dv/dt)` of the semi-discrete system.
pub fn rhs(u: &ScalarField, v: &ScalarField, f: Nonlinearity, limiter: Limiter) -> Result<(Vec<f64>, Vec<f64>)> {
    let (sys, state) = coupled(u, v, f, limiter)?;
    let mut out = vec![0.0; state.len()];
    sys.rhs(&state, &mut out);
    let dv = out.split_off(u.len());
    Ok((out, dv))
}

/// One classical RK4 step of size `dt`.
pub fn step_rk4(
    u: &ScalarField,
    v: &ScalarField,
    f: Nonlinearity,
    limiter: Limiter,
    dt: f64,
) -> Result<(ScalarField, ScalarField)> {
    let (sys, state) = coupled(u, v, f, limiter)?;
    let next = scheme::rk4_step(&sys, &state, dt);
    if let Some((i, value)) = scheme::check_state(&next) {
        return Err(Error::Instability {
            time: dt,
            reason: format!("state entry {i} became {value}"),
            last_valid: Some(Box::new((u.clone(), v.clone()))),
        });
    }
    Ok(sys.species(&next))
}

/// Largest admissible step `cfl * min(dx / max|vel|, dx^2 / (2 max w f'(w)))`,
/// capped at `dt_max`.
pub fn stable_dt(u: &ScalarField, v: &ScalarField, f: Nonlinearity, cfl: f64, dt_max: f64) -> Result<f64> {
    let (mut sys, state) = coupled(u, v, f, Limiter::None)?;
    sys.cfl = cfl;
    sys.dt_max = dt_max;
    Ok(sys.stable_dt(&state))
}

/// Advances `(u0, v0)` to `params.t_end`.
pub fn solve(u0: &ScalarField, v0: &ScalarField, f: Nonlinearity, params: &SolverParams) -> Result<Solution> {
    let (mut sys, state) = coupled(u0, v0, f, params.limiter)?;
    sys.cfl = params.cfl;
    sys.dt_max = params.dt_max;
    scheme::integrate(&sys, state, params)
}

/// `(w, u)` formulation; state is `[w; u]`.
pub(crate) struct TotalDensity1d {
    pub grid: Grid1D,
    pub f: Nonlinearity,
    pub limiter: Limiter,
    pub cfl: f64,
    pub dt_max: f64,
}

impl TotalDensity1d {
    fn velocity(&self, w: &[f64]) -> Vec<f64> {
        let p: Vec<f64> = w.iter().map(|&z| self.f.eval(z)).collect();
        let mut vel = vec![0.0; w.len() + 1];
        line_velocity(&p, self.grid.dx, &mut vel);
        vel
    }
}

impl SemiDiscrete for TotalDensity1d {
    fn rhs(&self, state: &[f64], out: &mut [f64]) {
        let n = self.grid.n_cells;
        let dx = self.grid.dx;
        let (w, u) = state.split_at(n);
        let vel = self.velocity(w);
        let (dw, du) = out.split_at_mut(n);

        // w_t = (Phi(w))_xx as a centred conservative difference
        let mut flux = vec![0.0; n + 1];
        for i in 0..n - 1 {
            flux[i + 1] = match (self.f.potential(w[i]), self.f.potential(w[i + 1])) {
                (Some(a), Some(b)) => -(b - a) / dx,
                _ => 0.5 * (w[i] + w[i + 1]) * vel[i + 1],
            };
        }
        divergence(&flux, dx, dw);

        line_flux(u, &vel, self.limiter, &mut flux);
        divergence(&flux, dx, du);
    }

    fn stable_dt(&self, state: &[f64]) -> f64 {
        let n = self.grid.n_cells;
        let w = &state[..n];
        let vel = self.velocity(w);
        let max_vel = vel.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_diff = w.iter().map(|&z| self.f.diffusivity(z)).fold(0.0_f64, f64::max);
        cfl_dt(self.cfl, self.grid.dx, 1, max_vel, max_diff, self.dt_max)
    }

    fn species(&self, state: &[f64]) -> (ScalarField, ScalarField) {
        let n = self.grid.n_cells;
        let (w, u) = state.split_at(n);
        (
            ScalarField {
                grid: Grid::D1(self.grid),
                values: u.to_vec(),
            },
            ScalarField {
                grid: Grid::D1(self.grid),
                values: w.iter().zip(u).map(|(a, b)| a - b).collect(),
            },
        )
    }
}

/// Solves the one-sided coupled `(w, u)` system from `w0 = u0 + v0`.
/// The returned solution reports the species pair `(u, w - u)`.
pub fn solve_wu(w0: &ScalarField, u0: &ScalarField, f: Nonlinearity, params: &SolverParams) -> Result<Solution> {
    w0.check_same_grid(u0)?;
    let grid = grid_1d(w0)?;
    let sys = TotalDensity1d {
        grid,
        f,
        limiter: params.limiter,
        cfl: params.cfl,
        dt_max: params.dt_max,
    };
    let mut state = w0.values.clone();
    state.extend_from_slice(&u0.values);
    scheme::integrate(&sys, state, params)
}
