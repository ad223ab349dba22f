//! Equidistant cell-centred grids and the scalar fields living on them.

use crate::error::{Error, Result};

/// Uniform 1D grid of `n_cells` cells on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 4 cells, got {n_cells}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidArgument(format!(
                "invalid interval [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx: (x_max - x_min) / n_cells as f64,
        })
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Position of interface `i` (interface 0 is the left wall).
    #[inline]
    pub fn interface(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
}

/// Uniform rectangular grid, stored row-major with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let gx = Grid1D::new(x_min, x_max, nx)?;
        let gy = Grid1D::new(y_min, y_max, ny)?;
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            dx: gx.dx,
            dy: gy.dx,
        })
    }

    /// 20x20 grid on the unit square.
    pub fn paper20() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0, 20, 20).expect("static grid is valid")
    }

    pub fn x_axis(&self) -> Grid1D {
        Grid1D {
            x_min: self.x_min,
            x_max: self.x_max,
            n_cells: self.nx,
            dx: self.dx,
        }
    }

    pub fn y_axis(&self) -> Grid1D {
        Grid1D {
            x_min: self.y_min,
            x_max: self.y_max,
            n_cells: self.ny,
            dx: self.dy,
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx,
            self.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    D1(Grid1D),
    D2(Grid2D),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::D1(_) => 1,
            Grid::D2(_) => 2,
        }
    }

    pub fn n_cells(&self) -> usize {
        match self {
            Grid::D1(g) => g.n_cells,
            Grid::D2(g) => g.n_cells(),
        }
    }

    pub fn cell_volume(&self) -> f64 {
        match self {
            Grid::D1(g) => g.dx,
            Grid::D2(g) => g.dx * g.dy,
        }
    }

    /// Cell centre as `[x, y]`; `y` is zero on 1D grids.
    pub fn center(&self, k: usize) -> [f64; 2] {
        match self {
            Grid::D1(g) => [g.center(k), 0.0],
            Grid::D2(g) => {
                let (x, y) = g.center(k % g.nx, k / g.nx);
                [x, y]
            }
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::D1(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::D2(g)
    }
}

/// Cell-averaged density values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: impl Into<Grid>, values: Vec<f64>) -> Result<Self> {
        let grid = grid.into();
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: impl Into<Grid>) -> Self {
        let grid = grid.into();
        Self {
            values: vec![0.0; grid.n_cells()],
            grid,
        }
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(grid: impl Into<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let grid = grid.into();
        let values = (0..grid.n_cells()).map(|k| f(grid.center(k))).collect();
        Self { grid, values }
    }

    pub fn from_fn_1d(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.centers().into_iter().map(f).collect(),
            grid: Grid::D1(grid),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        self.grid.cell_volume()
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    pub fn scaled(&self, factor: f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Cell-wise sum of two fields on the same grid.
    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.check_same_grid(other)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
