//! Gaussian kernel density estimates of particle clouds on a grid.

use rayon::prelude::*;

use super::{ParticleEnsemble, Point, Species};
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdeOptions {
    /// Kernel support in units of `h`.
    pub truncation: f64,
    /// Add mirror images across the grid boundary so mass near the walls is not lost.
    pub reflect: bool,
}

impl Default for KdeOptions {
    fn default() -> Self {
        Self {
            truncation: 6.0,
            reflect: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub field: ScalarField,
    pub species: Species,
    pub bandwidth: f64,
}

impl AsRef<ScalarField> for DensityEstimate {
    fn as_ref(&self) -> &ScalarField {
        &self.field
    }
}

/// Estimate with default options. Each particle carries mass `1/n` of its
/// species; `Species::Both` is the sum of the two species estimates.
pub fn density_estimate(ens: &ParticleEnsemble, species: Species, grid: &Grid, h: f64) -> Result<DensityEstimate> {
    density_estimate_with(ens, species, grid, h, KdeOptions::default())
}

pub fn density_estimate_with(
    ens: &ParticleEnsemble,
    species: Species,
    grid: &Grid,
    h: f64,
    opts: KdeOptions,
) -> Result<DensityEstimate> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::validation("smoothing_h", "must be positive and finite"));
    }
    if grid.dim() != ens.dim() {
        return Err(Error::GridMismatch(format!(
            "{}D grid for {}D particles",
            grid.dim(),
            ens.dim()
        )));
    }
    let values = match species {
        Species::X => accumulate(&ens.x, grid, h, opts),
        Species::Y => accumulate(&ens.y, grid, h, opts),
        Species::Both => {
            let a = accumulate(&ens.x, grid, h, opts);
            let b = accumulate(&ens.y, grid, h, opts);
            a.iter().zip(&b).map(|(p, q)| p + q).collect()
        }
    };
    Ok(DensityEstimate {
        field: ScalarField::new(*grid, values)?,
        species,
        bandwidth: h,
    })
}

/// Axis description: first centre, spacing, count, bounds.
#[derive(Clone, Copy)]
struct Axis {
    first: f64,
    step: f64,
    n: usize,
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Normalised 1D Gaussian weights at cell centres within the truncation window.
    fn weights(&self, p: f64, h: f64, opts: &KdeOptions, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
        let reach = opts.truncation * h;
        let images: &[f64] = if opts.reflect {
            &[p, 2.0 * self.lo - p, 2.0 * self.hi - p]
        } else {
            &[p]
        };
        for &c in images {
            let a = ((c - reach - self.first) / self.step).ceil().max(0.0);
            let b = ((c + reach - self.first) / self.step).floor();
            if b < 0.0 || a >= self.n as f64 {
                continue;
            }
            let (a, b) = (a as usize, (b as usize).min(self.n - 1));
            for i in a..=b {
                let z = (self.first + i as f64 * self.step - c) / h;
                out.push((i, norm * (-0.5 * z * z).exp()));
            }
        }
    }
}

fn axes(grid: &Grid) -> [Axis; 2] {
    match grid {
        Grid::D1(g) => {
            let ax = Axis {
                first: g.center(0),
                step: g.dx,
                n: g.n_cells,
                lo: g.x_min,
                hi: g.x_max,
            };
            [ax, Axis { first: 0.0, step: 1.0, n: 1, lo: 0.0, hi: 0.0 }]
        }
        Grid::D2(g) => {
            let (x0, y0) = g.center(0, 0);
            [
                Axis { first: x0, step: g.dx, n: g.nx, lo: g.x_min, hi: g.x_max },
                Axis { first: y0, step: g.dy, n: g.ny, lo: g.y_min, hi: g.y_max },
            ]
        }
    }
}

fn accumulate(points: &[Point], grid: &Grid, h: f64, opts: KdeOptions) -> Vec<f64> {
    let n_cells = grid.n_cells();
    if points.is_empty() {
        return vec![0.0; n_cells];
    }
    let [ax, ay] = axes(grid);
    let dim = grid.dim();
    let weight = 1.0 / points.len() as f64;
    // fixed chunking keeps the summation order independent of scheduling
    let partials: Vec<Vec<f64>> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n_cells];
            let (mut wx, mut wy) = (Vec::new(), Vec::new());
            for p in chunk {
                ax.weights(p[0], h, &opts, &mut wx);
                if dim == 1 {
                    for &(i, w) in &wx {
                        acc[i] += weight * w;
                    }
                } else {
                    ay.weights(p[1], h, &opts, &mut wy);
                    for &(j, wj) in &wy {
                        let row = &mut acc[j * ax.n..(j + 1) * ax.n];
                        for &(i, wi) in &wx {
                            row[i] += weight * wi * wj;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; n_cells];
    for part in &partials {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    out
}
