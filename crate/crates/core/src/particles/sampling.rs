//! Initial particle positions drawn from a non-negative grid density,
//! read as piecewise constant on cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{mix_seed, Point};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// One jittered draw per quantile stratum `[k/n, (k+1)/n)`.
    #[default]
    Stratified,
    /// Independent draws.
    Iid,
}

impl Sampling {
    pub fn name(&self) -> &'static str {
        match self {
            Sampling::Stratified => "stratified",
            Sampling::Iid => "iid",
        }
    }
}

/// Draws `n` positions distributed like `density`.
pub fn sample_from_field(density: &ScalarField, n: usize, method: Sampling, seed: u64, stream: u64) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::validation("n_particles", "must be positive"));
    }
    if density.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Domain("sampling density must be finite and non-negative".into()));
    }
    let cell_mass: Vec<f64> = density.values.clone();
    let total: f64 = cell_mass.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Domain("sampling density has zero mass".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, stream));

    if method == Sampling::Iid {
        if let Grid::D2(_) = density.grid {
            return Ok(rejection(density, n, &mut rng));
        }
    }

    // cumulative mass at the right edge of each cell, row-major in 2D
    let mut cdf = Vec::with_capacity(cell_mass.len());
    let mut acc = 0.0;
    for m in &cell_mass {
        acc += m / total;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    cdf[last] = 1.0;

    let quantile = |q: f64, rng: &mut ChaCha8Rng| -> Point {
        let k = cdf.partition_point(|&c| c <= q).min(last);
        let below = if k == 0 { 0.0 } else { cdf[k - 1] };
        let frac = if cdf[k] > below {
            ((q - below) / (cdf[k] - below)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        match &density.grid {
            Grid::D1(g) => [g.x_min + (k as f64 + frac) * g.dx, 0.0],
            Grid::D2(g) => {
                let (i, j) = (k % g.nx, k / g.nx);
                [
                    g.x_min + (i as f64 + rng.random::<f64>()) * g.dx,
                    g.y_min + (j as f64 + rng.random::<f64>()) * g.dy,
                ]
            }
        }
    };

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let q = match method {
            Sampling::Stratified => (k as f64 + rng.random::<f64>()) / n as f64,
            Sampling::Iid => rng.random::<f64>(),
        };
        out.push(quantile(q, &mut rng));
    }
    Ok(out)
}

fn rejection(density: &ScalarField, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let Grid::D2(g) = density.grid else { unreachable!() };
    let top = density.max();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let i = rng.random_range(0..g.nx);
        let j = rng.random_range(0..g.ny);
        if rng.random::<f64>() * top < density.values[g.index(i, j)] {
            out.push([
                g.x_min + (i as f64 + rng.random::<f64>()) * g.dx,
                g.y_min + (j as f64 + rng.random::<f64>()) * g.dy,
            ]);
        }
    }
    out
}
