//! Rectangular grids and maps sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{HeisError, Result};
use crate::group::HPoint;

/// A rectangular node grid over `[x0, x0 + (nx-1) hx] x [y0, y0 + (ny-1) hy]`
/// with row-major node order (`index = j * nx + i`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, hx: f64, hy: f64) -> Result<Self> {
        let g = Grid {
            nx,
            ny,
            x0,
            y0,
            hx,
            hy,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid with `nx x ny` nodes spanning `[x0, x1] x [y0, y1]`.
    pub fn spanning(nx: usize, ny: usize, x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(HeisError::input("grid needs at least 2 nodes per direction"));
        }
        Grid::new(
            nx,
            ny,
            x0,
            y0,
            (x1 - x0) / (nx - 1) as f64,
            (y1 - y0) / (ny - 1) as f64,
        )
    }

    /// Unit square `[0, 1]^2`.
    pub fn unit_square(nx: usize, ny: usize) -> Result<Self> {
        Grid::spanning(nx, ny, 0.0, 0.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(HeisError::input("grid needs at least 2 nodes per direction"));
        }
        if !(self.hx > 0.0 && self.hy > 0.0) || !self.hx.is_finite() || !self.hy.is_finite() {
            return Err(HeisError::input("grid spacings must be positive and finite"));
        }
        if !self.x0.is_finite() || !self.y0.is_finite() {
            return Err(HeisError::input("grid origin must be finite"));
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_cells(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy)
    }

    pub fn x1(&self) -> f64 {
        self.x0 + (self.nx - 1) as f64 * self.hx
    }

    pub fn y1(&self) -> f64 {
        self.y0 + (self.ny - 1) as f64 * self.hy
    }

    pub fn area(&self) -> f64 {
        (self.nx - 1) as f64 * self.hx * (self.ny - 1) as f64 * self.hy
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }

    /// Euclidean distance from node `(i, j)` to the boundary of the domain.
    pub fn boundary_distance(&self, i: usize, j: usize) -> f64 {
        let (px, py) = self.coords(i, j);
        (px - self.x0)
            .min(self.x1() - px)
            .min(py - self.y0)
            .min(self.y1() - py)
    }

    /// Trapezoid-rule weight of node `(i, j)`.
    pub fn trapezoid_weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx - 1 { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.ny - 1 { 0.5 } else { 1.0 };
        wx * wy * self.hx * self.hy
    }

    /// Boundary node indices enumerated counterclockwise from the origin
    /// corner: bottom row, right column, top row, left column.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = Vec::with_capacity(2 * (nx + ny) - 4);
        for i in 0..nx {
            out.push(self.index(i, 0));
        }
        for j in 1..ny {
            out.push(self.index(nx - 1, j));
        }
        for i in (0..nx - 1).rev() {
            out.push(self.index(i, ny - 1));
        }
        for j in (1..ny - 1).rev() {
            out.push(self.index(0, j));
        }
        out
    }
}

/// A map `Omega -> H^m` sampled at grid nodes: horizontal part `z` (2m values
/// per node, layout `[x.., y..]`) and an optional vertical part `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledMapJson", into = "SampledMapJson")]
pub struct SampledMap {
    grid: Grid,
    m: usize,
    z: Vec<f64>,
    t: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SampledMapJson {
    m: usize,
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    z: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<f64>>,
}

impl TryFrom<SampledMapJson> for SampledMap {
    type Error = HeisError;
    fn try_from(j: SampledMapJson) -> Result<Self> {
        let grid = Grid::new(j.nx, j.ny, j.x0, j.y0, j.hx, j.hy)?;
        SampledMap::new(grid, j.m, j.z, j.t)
    }
}

impl From<SampledMap> for SampledMapJson {
    fn from(s: SampledMap) -> Self {
        let w = 2 * s.m;
        SampledMapJson {
            m: s.m,
            nx: s.grid.nx,
            ny: s.grid.ny,
            x0: s.grid.x0,
            y0: s.grid.y0,
            hx: s.grid.hx,
            hy: s.grid.hy,
            z: s.z.chunks(w).map(|c| c.to_vec()).collect(),
            t: s.t,
        }
    }
}

impl SampledMap {
    pub fn new(grid: Grid, m: usize, z: Vec<Vec<f64>>, t: Option<Vec<f64>>) -> Result<Self> {
        grid.validate()?;
        if m == 0 {
            return Err(HeisError::input("target dimension m must be >= 1"));
        }
        if z.len() != grid.n_nodes() {
            return Err(HeisError::input(format!(
                "expected {} z entries, got {}",
                grid.n_nodes(),
                z.len()
            )));
        }
        let mut flat = Vec::with_capacity(grid.n_nodes() * 2 * m);
        for (k, node) in z.iter().enumerate() {
            if node.len() != 2 * m {
                return Err(HeisError::input(format!(
                    "node {k} carries {} values, expected 2m = {}",
                    node.len(),
                    2 * m
                )));
            }
            flat.extend_from_slice(node);
        }
        Self::from_flat(grid, m, flat, t)
    }

    pub(crate) fn from_flat(grid: Grid, m: usize, z: Vec<f64>, t: Option<Vec<f64>>) -> Result<Self> {
        if z.len() != grid.n_nodes() * 2 * m {
            return Err(HeisError::input("z buffer has the wrong length"));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(HeisError::input("z values must be finite"));
        }
        if let Some(t) = &t {
            if t.len() != grid.n_nodes() {
                return Err(HeisError::input(format!(
                    "expected {} t entries, got {}",
                    grid.n_nodes(),
                    t.len()
                )));
            }
            if t.iter().any(|v| !v.is_finite()) {
                return Err(HeisError::input("t values must be finite"));
            }
        }
        Ok(SampledMap { grid, m, z, t })
    }

    /// Samples `f(px, py) -> z` (length `2m`) at every node; `t` is left unset.
    pub fn from_fn<F>(grid: Grid, m: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let mut z = Vec::with_capacity(grid.n_nodes());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (px, py) = grid.coords(i, j);
                z.push(f(px, py));
            }
        }
        SampledMap::new(grid, m, z, None)
    }

    /// Samples a full map `f(px, py) -> (z, t)`.
    pub fn from_fn_with_t<F>(grid: Grid, m: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> (Vec<f64>, f64),
    {
        let mut z = Vec::with_capacity(grid.n_nodes());
        let mut t = Vec::with_capacity(grid.n_nodes());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (px, py) = grid.coords(i, j);
                let (zi, ti) = f(px, py);
                z.push(zi);
                t.push(ti);
            }
        }
        SampledMap::new(grid, m, z, Some(t))
    }

    pub fn with_t(mut self, t: Vec<f64>) -> Result<Self> {
        self.t = None;
        SampledMap::from_flat(self.grid, self.m, std::mem::take(&mut self.z), Some(t))
    }

    pub fn without_t(mut self) -> Self {
        self.t = None;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Horizontal values at node `k` (`[x_1..x_m, y_1..y_m]`).
    #[inline]
    pub fn z_at(&self, k: usize) -> &[f64] {
        let w = 2 * self.m;
        &self.z[k * w..(k + 1) * w]
    }

    pub fn z_flat(&self) -> &[f64] {
        &self.z
    }

    pub fn t(&self) -> Option<&[f64]> {
        self.t.as_deref()
    }

    pub(crate) fn require_t(&self) -> Result<&[f64]> {
        self.t.as_deref().ok_or_else(|| {
            HeisError::precondition("map has no vertical component t; lift it first")
        })
    }

    /// Value at node `k` as a point of `H^m` (`t = 0` when absent).
    pub fn point(&self, k: usize) -> HPoint {
        let z = self.z_at(k);
        let t = self.t.as_ref().map_or(0.0, |t| t[k]);
        HPoint::from_parts_unchecked(z[..self.m].to_vec(), z[self.m..].to_vec(), t)
    }

    /// Bilinear interpolation at `(px, py)`, written into `z_out`; returns
    /// the interpolated `t` (0 when absent). Points outside the grid are
    /// clamped to the nearest cell.
    pub fn interpolate(&self, px: f64, py: f64, z_out: &mut [f64]) -> f64 {
        let g = &self.grid;
        let fx = ((px - g.x0) / g.hx).clamp(0.0, (g.nx - 1) as f64);
        let fy = ((py - g.y0) / g.hy).clamp(0.0, (g.ny - 1) as f64);
        let i = (fx.floor() as usize).min(g.nx - 2);
        let j = (fy.floor() as usize).min(g.ny - 2);
        let a = fx - i as f64;
        let b = fy - j as f64;
        let k00 = g.index(i, j);
        let k10 = k00 + 1;
        let k01 = k00 + g.nx;
        let k11 = k01 + 1;
        // nested lerps reproduce constant data exactly
        let lerp2 = |f00: f64, f10: f64, f01: f64, f11: f64| {
            let lo = f00 + a * (f10 - f00);
            let hi = f01 + a * (f11 - f01);
            lo + b * (hi - lo)
        };
        let (z00, z10, z01, z11) = (self.z_at(k00), self.z_at(k10), self.z_at(k01), self.z_at(k11));
        for (c, out) in z_out.iter_mut().enumerate() {
            *out = lerp2(z00[c], z10[c], z01[c], z11[c]);
        }
        match &self.t {
            Some(t) => lerp2(t[k00], t[k10], t[k01], t[k11]),
            None => 0.0,
        }
    }

    /// Nodal gradient of `z`: central differences inside, one-sided
    /// differences on the boundary. Returns `(d/dp1 z, d/dp2 z)`.
    pub fn nodal_gradient(&self, i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let diff = |lo: usize, hi: usize, h: f64| -> Vec<f64> {
            let (a, b) = (self.z_at(lo), self.z_at(hi));
            a.iter().zip(b).map(|(a, b)| (b - a) / h).collect()
        };
        let d1 = if i == 0 {
            diff(g.index(0, j), g.index(1, j), g.hx)
        } else if i == g.nx - 1 {
            diff(g.index(i - 1, j), g.index(i, j), g.hx)
        } else {
            diff(g.index(i - 1, j), g.index(i + 1, j), 2.0 * g.hx)
        };
        let d2 = if j == 0 {
            diff(g.index(i, 0), g.index(i, 1), g.hy)
        } else if j == g.ny - 1 {
            diff(g.index(i, j - 1), g.index(i, j), g.hy)
        } else {
            diff(g.index(i, j - 1), g.index(i, j + 1), 2.0 * g.hy)
        };
        (d1, d2)
    }

    /// Left translation of the whole map by a constant group element `g`.
    pub fn left_translate(&self, g: &HPoint) -> Result<SampledMap> {
        if g.m() != self.m {
            return Err(HeisError::DimensionMismatch {
                expected: self.m,
                found: g.m(),
            });
        }
        let n = self.grid.n_nodes();
        let mut z = Vec::with_capacity(self.z.len());
        let mut t = Vec::with_capacity(n);
        for k in 0..n {
            let p = crate::group::mul_unchecked(g, &self.point(k));
            z.extend_from_slice(p.x());
            z.extend_from_slice(p.y());
            t.push(p.t());
        }
        SampledMap::from_flat(self.grid, self.m, z, self.t.as_ref().map(|_| t))
    }
}
