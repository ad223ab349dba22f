//! Uniform cell lists for the truncated kernel sum.
//!
//! Cells are at least one cutoff wide, so every interacting pair lies in
//! the `3^d` block around the target cell. Each species is binned
//! separately and the per-species sums are combined exactly as in the
//! naive drift.

use rayon::prelude::*;

use super::{combine, drift_naive, Drift, PairKernel, ParticleEnsemble, Point};

/// Upper bound on cells per axis; keeps memory bounded for tiny kernels.
const MAX_CELLS_PER_AXIS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellListStats {
    /// Candidate pairs examined, summed over all targets and both source species.
    pub pair_visits: u64,
    pub cells: [usize; 2],
    /// True when the box is too small for three cells per axis and the naive sum ran.
    pub fell_back: bool,
}

struct Layout {
    lo: Point,
    width: Point,
    cells: [usize; 2],
    dim: usize,
}

impl Layout {
    fn cell_coords(&self, p: &Point) -> [usize; 2] {
        let mut c = [0usize; 2];
        for d in 0..self.dim {
            let k = ((p[d] - self.lo[d]) / self.width[d]).floor();
            c[d] = if k <= 0.0 {
                0
            } else {
                (k as usize).min(self.cells[d] - 1)
            };
        }
        c
    }

    fn flat(&self, c: [usize; 2]) -> usize {
        c[1] * self.cells[0] + c[0]
    }

    fn n_cells(&self) -> usize {
        self.cells[0] * if self.dim == 2 { self.cells[1] } else { 1 }
    }
}

/// Particles of one species sorted by cell.
struct Binned {
    start: Vec<usize>,
    points: Vec<Point>,
}

impl Binned {
    fn new(layout: &Layout, pts: &[Point]) -> Self {
        let nc = layout.n_cells();
        let cell_of: Vec<usize> = pts.iter().map(|p| layout.flat(layout.cell_coords(p))).collect();
        let mut start = vec![0usize; nc + 1];
        for &c in &cell_of {
            start[c + 1] += 1;
        }
        for c in 0..nc {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut points = vec![[0.0; 2]; pts.len()];
        // stable: preserves index order within each cell
        for (p, &c) in pts.iter().zip(&cell_of) {
            points[fill[c]] = *p;
            fill[c] += 1;
        }
        Self { start, points }
    }

    fn cell(&self, c: usize) -> &[Point] {
        &self.points[self.start[c]..self.start[c + 1]]
    }
}

fn layout(ens: &ParticleEnsemble) -> Option<Layout> {
    let dim = ens.dim();
    let cutoff = ens.kernel.cutoff_radius;
    let mut cells = [1usize; 2];
    let mut width = [1.0; 2];
    for d in 0..dim {
        let len = ens.domain.hi[d] - ens.domain.lo[d];
        let n = (len / cutoff).floor();
        if !(n >= 3.0) {
            return None;
        }
        cells[d] = (n as usize).min(MAX_CELLS_PER_AXIS);
        width[d] = len / cells[d] as f64;
    }
    Some(Layout {
        lo: ens.domain.lo,
        width,
        cells,
        dim,
    })
}

fn neighbour_sum(p: &Point, layout: &Layout, bins: &Binned, k: &PairKernel) -> (Point, u64) {
    let c = layout.cell_coords(p);
    let range = |d: usize| {
        if d < layout.dim {
            c[d].saturating_sub(1)..=(c[d] + 1).min(layout.cells[d] - 1)
        } else {
            0..=0
        }
    };
    let mut acc = [0.0; 2];
    let mut visits = 0u64;
    for cy in range(1) {
        for cx in range(0) {
            let pts = bins.cell(layout.flat([cx, cy]));
            visits += pts.len() as u64;
            let f = k.sum(p, pts);
            acc[0] += f[0];
            acc[1] += f[1];
        }
    }
    (acc, visits)
}

pub fn drift_celllist(ens: &ParticleEnsemble) -> Drift {
    drift_celllist_with_stats(ens).0
}

pub fn drift_celllist_with_stats(ens: &ParticleEnsemble) -> (Drift, CellListStats) {
    let Some(layout) = layout(ens) else {
        let n = (ens.x.len() + ens.y.len()) as u64;
        let stats = CellListStats {
            pair_visits: n * n,
            cells: [1, 1],
            fell_back: true,
        };
        return (drift_naive(ens), stats);
    };
    let bx = Binned::new(&layout, &ens.x);
    let by = Binned::new(&layout, &ens.y);
    let k = PairKernel::new(&ens.kernel);

    let for_species = |targets: &[Point], own: &Binned, n_own: usize, other: &Binned, n_other: usize| {
        targets
            .par_iter()
            .map(|p| {
                let (a, va) = neighbour_sum(p, &layout, own, &k);
                let (b, vb) = neighbour_sum(p, &layout, other, &k);
                (combine(a, n_own, b, n_other), va + vb)
            })
            .unzip::<_, _, Vec<Point>, Vec<u64>>()
    };
    let (nx, ny) = (ens.x.len(), ens.y.len());
    let (dx, vx) = for_species(&ens.x, &bx, nx, &by, ny);
    let (dy, vy) = for_species(&ens.y, &by, ny, &bx, nx);
    let stats = CellListStats {
        pair_visits: vx.iter().chain(&vy).sum(),
        cells: layout.cells,
        fell_back: false,
    };
    (Drift { x: dx, y: dy }, stats)
}

#[cfg(test)]
mod tests {
    use super::super::{BoxDomain, KernelSpec};
    use super::*;
    use crate::particles::rng::NoiseStream;

    fn random_ensemble(n: usize, dim: usize, eps: f64, seed: u64) -> ParticleEnsemble {
        let d = if dim == 1 {
            BoxDomain::interval(0.0, 4.0).unwrap()
        } else {
            BoxDomain::new([0.0, 0.0], [4.0, 3.0], 2).unwrap()
        };
        let s = NoiseStream::new(seed, 0);
        let pt = |stream: u64, i: usize| {
            let z = s.normals(stream, i as u64);
            let u = |t: f64| 0.5 * (1.0 + (t / 2.0).tanh());
            [d.lo[0] + u(z[0]) * (d.hi[0] - d.lo[0]), if dim == 2 { d.lo[1] + u(z[1]) * (d.hi[1] - d.lo[1]) } else { 0.0 }]
        };
        let x = (0..n).map(|i| pt(0, i)).collect();
        let y = (0..n + 3).map(|i| pt(1, i)).collect();
        ParticleEnsemble::new(x, y, d, KernelSpec::new(eps, dim).unwrap(), seed).unwrap()
    }

    #[test]
    fn matches_naive() {
        for dim in [1, 2] {
            let e = random_ensemble(300, dim, 0.05, 9);
            let (fast, stats) = drift_celllist_with_stats(&e);
            assert!(!stats.fell_back);
            let slow = drift_naive(&e);
            for (a, b) in fast.x.iter().chain(&fast.y).zip(slow.x.iter().chain(&slow.y)) {
                assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn falls_back_for_wide_kernels() {
        let e = random_ensemble(50, 2, 0.3, 1);
        let (d, stats) = drift_celllist_with_stats(&e);
        assert!(stats.fell_back);
        assert_eq!(d, drift_naive(&e));
    }

    #[test]
    fn pair_visits_grow_linearly_at_fixed_density() {
        let visits = |n: usize| {
            let spacing = 0.01;
            let len = n as f64 * spacing;
            let d = BoxDomain::interval(0.0, len).unwrap();
            let pts: Vec<Point> = (0..n).map(|i| [(i as f64 + 0.5) * spacing, 0.0]).collect();
            let e = ParticleEnsemble::new(pts.clone(), pts, d, KernelSpec::new(0.01, 1).unwrap(), 0).unwrap();
            drift_celllist_with_stats(&e).1.pair_visits as f64
        };
        for n in [500, 1000, 2000] {
            let ratio = visits(2 * n) / visits(n);
            assert!((ratio - 2.0).abs() < 0.1, "{n}: {ratio}");
        }
    }
}
