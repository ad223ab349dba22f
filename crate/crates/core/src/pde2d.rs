//! The cross-transport system on a rectangle, discretised with unsplit
//! dimension-by-dimension upwind face fluxes and zero normal flux on the
//! boundary. Corner cells need no special treatment: only face fluxes enter.

use crate::error::{Error, Result};
use crate::grid::{Grid, Grid2D, ScalarField};
use crate::scheme::{self, cfl_dt, line_flux, line_velocity, Limiter, Nonlinearity, SemiDiscrete};

pub use crate::scheme::{Solution, SolverParams};

pub(crate) struct Coupled2d {
    pub grid: Grid2D,
    pub f: Nonlinearity,
    pub limiter: Limiter,
    pub cfl: f64,
    pub dt_max: f64,
}

/// Face velocities: `vx[j * (nx + 1) + i]` on x-faces, `vy[i * (ny + 1) + j]` on y-faces.
struct FaceVelocities {
    vx: Vec<f64>,
    vy: Vec<f64>,
}

impl Coupled2d {
    fn velocities(&self, state: &[f64]) -> FaceVelocities {
        let g = &self.grid;
        let n = g.n_cells();
        let (u, v) = state.split_at(n);
        let p: Vec<f64> = u.iter().zip(v).map(|(a, b)| self.f.eval(a + b)).collect();

        let mut vx = vec![0.0; g.ny * (g.nx + 1)];
        for (j, row) in p.chunks_exact(g.nx).enumerate() {
            line_velocity(row, g.dx, &mut vx[j * (g.nx + 1)..(j + 1) * (g.nx + 1)]);
        }
        let mut vy = vec![0.0; g.nx * (g.ny + 1)];
        let mut column = vec![0.0; g.ny];
        for i in 0..g.nx {
            for (j, c) in column.iter_mut().enumerate() {
                *c = p[g.index(i, j)];
            }
            line_velocity(&column, g.dy, &mut vy[i * (g.ny + 1)..(i + 1) * (g.ny + 1)]);
        }
        FaceVelocities { vx, vy }
    }

    fn species_rhs(&self, rho: &[f64], vel: &FaceVelocities, out: &mut [f64]) {
        let g = &self.grid;
        let mut flux = vec![0.0; g.nx.max(g.ny) + 1];

        for j in 0..g.ny {
            let row = &rho[j * g.nx..(j + 1) * g.nx];
            let fx = &mut flux[..g.nx + 1];
            line_flux(row, &vel.vx[j * (g.nx + 1)..(j + 1) * (g.nx + 1)], self.limiter, fx);
            for i in 0..g.nx {
                out[g.index(i, j)] = -(fx[i + 1] - fx[i]) / g.dx;
            }
        }

        let mut column = vec![0.0; g.ny];
        for i in 0..g.nx {
            for (j, c) in column.iter_mut().enumerate() {
                *c = rho[g.index(i, j)];
            }
            let fy = &mut flux[..g.ny + 1];
            line_flux(&column, &vel.vy[i * (g.ny + 1)..(i + 1) * (g.ny + 1)], self.limiter, fy);
            for j in 0..g.ny {
                let k = g.index(i, j);
                out[k] = out[k] - (fy[j + 1] - fy[j]) / g.dy;
            }
        }
    }
}

impl SemiDiscrete for Coupled2d {
    fn rhs(&self, state: &[f64], out: &mut [f64]) {
        let n = self.grid.n_cells();
        let vel = self.velocities(state);
        let (du, dv) = out.split_at_mut(n);
        self.species_rhs(&state[..n], &vel, du);
        self.species_rhs(&state[n..], &vel, dv);
    }

    fn stable_dt(&self, state: &[f64]) -> f64 {
        let n = self.grid.n_cells();
        let vel = self.velocities(state);
        let max_vel = vel.vx.iter().chain(&vel.vy).fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_diff = (0..n)
            .map(|k| self.f.diffusivity(state[k] + state[n + k]))
            .fold(0.0_f64, f64::max);
        cfl_dt(
            self.cfl,
            self.grid.dx.min(self.grid.dy),
            2,
            max_vel,
            max_diff,
            self.dt_max,
        )
    }

    fn species(&self, state: &[f64]) -> (ScalarField, ScalarField) {
        let n = self.grid.n_cells();
        (
            ScalarField {
                grid: Grid::D2(self.grid),
                values: state[..n].to_vec(),
            },
            ScalarField {
                grid: Grid::D2(self.grid),
                values: state[n..].to_vec(),
            },
        )
    }
}

fn coupled(u: &ScalarField, v: &ScalarField, f: Nonlinearity, limiter: Limiter) -> Result<(Coupled2d, Vec<f64>)> {
    u.check_same_grid(v)?;
    let Grid::D2(grid) = u.grid else {
        return Err(Error::GridMismatch("expected a 2D grid".into()));
    };
    let mut state = u.values.clone();
    state.extend_from_slice(&v.values);
    Ok((
        Coupled2d {
            grid,
            f,
            limiter,
            cfl: 0.4,
            dt_max: f64::INFINITY,
        },
        state,
    ))
}

/// `(du/dt, dv/dt)` on a 2D grid.
pub fn rhs2d(u: &ScalarField, v: &ScalarField, f: Nonlinearity, limiter: Limiter) -> Result<(Vec<f64>, Vec<f64>)> {
    let (sys, state) = coupled(u, v, f, limiter)?;
    let mut out = vec![0.0; state.len()];
    sys.rhs(&state, &mut out);
    let dv = out.split_off(u.len());
    Ok((out, dv))
}

/// Stable step with the parabolic bound taken for `d = 2`.
pub fn stable_dt2d(u: &ScalarField, v: &ScalarField, f: Nonlinearity, cfl: f64, dt_max: f64) -> Result<f64> {
    let (mut sys, state) = coupled(u, v, f, Limiter::None)?;
    sys.cfl = cfl;
    sys.dt_max = dt_max;
    Ok(sys.stable_dt(&state))
}

pub fn solve2d(u0: &ScalarField, v0: &ScalarField, f: Nonlinearity, params: &SolverParams) -> Result<Solution> {
    let (mut sys, state) = coupled(u0, v0, f, params.limiter)?;
    sys.cfl = params.cfl;
    sys.dt_max = params.dt_max;
    scheme::integrate(&sys, state, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::mass;
    use crate::grid::Grid1D;
    use crate::pde1d;

    fn blob(cx: f64, cy: f64, s: f64) -> impl Fn([f64; 2]) -> f64 {
        move |p| 0.02 + (-((p[0] - cx).powi(2) + (p[1] - cy).powi(2)) / (2.0 * s * s)).exp()
    }

    #[test]
    fn constant_state_is_stationary() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 6).unwrap();
        let c = ScalarField::from_fn(g, |_| 0.4);
        let (du, dv) = rhs2d(&c, &c, Nonlinearity::Identity, Limiter::None).unwrap();
        assert!(du.iter().chain(&dv).all(|d| *d == 0.0));
    }

    #[test]
    fn conservation_form_sums_to_zero() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 12, 10).unwrap();
        let u = ScalarField::from_fn(g, blob(0.3, 0.4, 0.15));
        let v = ScalarField::from_fn(g, blob(0.6, 0.7, 0.1));
        for lim in [Limiter::None, Limiter::VanLeer] {
            let (du, dv) = rhs2d(&u, &v, Nonlinearity::Identity, lim).unwrap();
            assert!(du.iter().sum::<f64>().abs() < 1e-11);
            assert!(dv.iter().sum::<f64>().abs() < 1e-11);
        }
    }

    #[test]
    fn reduces_to_1d_for_x_independent_data() {
        let g = Grid2D::new(0.0, 2.0, -1.0, 1.0, 5, 16).unwrap();
        let prof_u = |y: f64| 0.1 + (-(y - 0.2) * (y - 0.2) * 8.0).exp();
        let prof_v = |y: f64| 0.1 + 0.5 * (-(y + 0.3) * (y + 0.3) * 5.0).exp();
        let u = ScalarField::from_fn(g, |p| prof_u(p[1]));
        let v = ScalarField::from_fn(g, |p| prof_v(p[1]));
        let (du, _) = rhs2d(&u, &v, Nonlinearity::Identity, Limiter::None).unwrap();

        let gy = Grid1D::new(-1.0, 1.0, 16).unwrap();
        let u1 = ScalarField::from_fn_1d(gy, prof_u);
        let v1 = ScalarField::from_fn_1d(gy, prof_v);
        let (du1, _) = pde1d::rhs(&u1, &v1, Nonlinearity::Identity, Limiter::None).unwrap();
        for j in 0..16 {
            for i in 0..5 {
                assert!((du[g.index(i, j)] - du1[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_conserves_mass_and_symmetry() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 16, 16).unwrap();
        let u = ScalarField::from_fn(g, blob(0.4, 0.4, 0.12));
        let params = SolverParams::with_t_end(0.02);
        let sol = solve2d(&u, &u, Nonlinearity::Identity, &params).unwrap();
        assert_eq!(sol.u, sol.v);
        assert!(((mass(&sol.u) - mass(&u)) / mass(&u)).abs() < 1e-12);
    }

    #[test]
    fn radial_data_keeps_square_symmetry() {
        let n = 16;
        let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, n, n).unwrap();
        let u = ScalarField::from_fn(g, |p| 0.05 + (-(p[0] * p[0] + p[1] * p[1]) * 6.0).exp());
        let v = ScalarField::from_fn(g, |p| 0.05 + 0.5 * (-(p[0] * p[0] + p[1] * p[1]) * 3.0).exp());
        let sol = solve2d(&u, &v, Nonlinearity::Identity, &SolverParams::with_t_end(0.02)).unwrap();
        let at = |i: usize, j: usize| sol.u.values[g.index(i, j)];
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                let (mi, mj) = (n - 1 - i, n - 1 - j);
                for other in [at(j, i), at(mi, j), at(i, mj), at(mi, mj), at(mj, mi), at(j, mi), at(mj, i)] {
                    worst = worst.max((at(i, j) - other).abs());
                }
            }
        }
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn rejects_1d_fields() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let f = ScalarField::zeros(g);
        assert!(rhs2d(&f, &f, Nonlinearity::Identity, Limiter::None).is_err());
    }
}
