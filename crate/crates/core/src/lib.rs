//! Simulation and verification toolkit for a symmetric two-species
//! cross-transport system
//!
//! ```text
//! u_t = div(u grad f(u + v)),    v_t = div(v grad f(u + v))
//! ```
//!
//! and for the stochastic interacting-particle system approximating it.
//!
//! * [`analytic`]: quadratic Boussinesq profile and method-of-characteristics solutions.
//! * [`pde1d`], [`pde2d`]: explicit finite-volume / RK4 solvers with zero-flux walls.
//! * [`particles`]: Gaussian-kernel particle system, Euler-Maruyama stepping,
//!   reflective walls, cell lists and kernel density estimates.
//! * [`diagnostics`]: mass, relative entropy, total variation, L2 residuals.
//! * [`harness`]: config format, experiment orchestration and CSV output.

pub mod analytic;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod pde1d;
pub mod particles;
pub mod pde2d;
pub mod scheme;

pub use diagnostics::{DiagnosticsRecord, DiagnosticsRow};
pub use error::{Error, Result};
pub use grid::{Grid, Grid1D, Grid2D, ScalarField};
pub use scheme::{Limiter, Nonlinearity, Snapshot, Solution, SolverParams};
