//! Cell-centred residuals of the isotropy and Legendrian conditions.
//!
//! Cell `(i, j)` spans nodes `(i, j)`, `(i+1, j)`, `(i, j+1)`, `(i+1, j+1)` and
//! is stored at `j * (nx - 1) + i`. Derivatives at the cell centre are the
//! bilinear ones, e.g. `d1 f = ((f10 - f00) + (f11 - f01)) / (2 hx)`.

use crate::error::Result;
use crate::map::{Grid, SampledMap};

#[derive(Debug, Clone, Copy)]
pub(crate) struct CellNodes {
    pub k00: usize,
    pub k10: usize,
    pub k01: usize,
    pub k11: usize,
}

impl CellNodes {
    #[inline]
    pub fn new(grid: &Grid, i: usize, j: usize) -> Self {
        let k00 = grid.index(i, j);
        CellNodes {
            k00,
            k10: k00 + 1,
            k01: k00 + grid.nx,
            k11: k00 + grid.nx + 1,
        }
    }

    /// `(d1 f, d2 f, mean f)` at the cell centre for a nodal scalar accessor.
    #[inline]
    pub fn centre<F: Fn(usize) -> f64>(&self, grid: &Grid, f: F) -> (f64, f64, f64) {
        let (f00, f10, f01, f11) = (f(self.k00), f(self.k10), f(self.k01), f(self.k11));
        (
            ((f10 - f00) + (f11 - f01)) / (2.0 * grid.hx),
            ((f01 - f00) + (f11 - f10)) / (2.0 * grid.hy),
            0.25 * (f00 + f10 + f01 + f11),
        )
    }
}

pub(crate) fn cells(grid: &Grid) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..grid.ny - 1).flat_map(move |j| (0..grid.nx - 1).map(move |i| (i, j)))
}

/// Isotropy residual `d1 x . d2 y - d2 x . d1 y` per cell, zero exactly when
/// the pull-back of the symplectic form vanishes on the cell.
pub fn isotropy_residual(u: &SampledMap) -> Vec<f64> {
    let grid = u.grid();
    let m = u.m();
    cells(grid)
        .map(|(i, j)| {
            let c = CellNodes::new(grid, i, j);
            (0..m)
                .map(|k| {
                    let (x1, x2, _) = c.centre(grid, |n| u.z_at(n)[k]);
                    let (y1, y2, _) = c.centre(grid, |n| u.z_at(n)[m + k]);
                    x1 * y2 - x2 * y1
                })
                .sum()
        })
        .collect()
}

/// Legendrian residual `d_i t - 2 (y . d_i x - x . d_i y)`, `i = 1, 2`, per cell.
pub fn legendrian_residual(u: &SampledMap) -> Result<Vec<[f64; 2]>> {
    let t = u.require_t()?;
    let grid = u.grid();
    let m = u.m();
    Ok(cells(grid)
        .map(|(i, j)| {
            let c = CellNodes::new(grid, i, j);
            let (t1, t2, _) = c.centre(grid, |n| t[n]);
            let mut rhs = [0.0; 2];
            for k in 0..m {
                let (x1, x2, xm) = c.centre(grid, |n| u.z_at(n)[k]);
                let (y1, y2, ym) = c.centre(grid, |n| u.z_at(n)[m + k]);
                rhs[0] += ym * x1 - xm * y1;
                rhs[1] += ym * x2 - xm * y2;
            }
            [t1 - 2.0 * rhs[0], t2 - 2.0 * rhs[1]]
        })
        .collect())
}

/// Largest absolute entry of a residual field.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
}
