//! Legendrian lifting: recover the vertical component `t` of a weakly
//! contact map from its horizontal part `z`.
//!
//! Along a grid edge from node `a` to node `b` the horizontal increment of
//! `t` is `2 omega(z_a, z_b)`, the midpoint discretisation of
//! `dt = 2 (y dx - x dy)`. These increments are matched in least squares (a
//! Neumann Poisson problem) and the solution is shifted so the origin corner
//! takes the anchor value. The circulation of the increments around a cell
//! equals `-4 hx hy` times the cell isotropy residual, so isotropic data is
//! matched exactly.

use crate::error::{HeisError, Result};
use crate::group::symplectic;
use crate::map::{Grid, SampledMap};
use crate::variational::residual::{isotropy_residual, max_abs};

/// A lifted map together with integrability diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifted {
    pub map: SampledMap,
    /// `max |d1 zeta_2 - d2 zeta_1|` over cells.
    pub curl_max: f64,
    /// Mismatch of `t` after integrating once around the domain boundary.
    pub boundary_closure: f64,
    pub isotropy_max: f64,
    pub cg_iterations: usize,
}

fn edge_increment(u: &SampledMap, a: usize, b: usize) -> f64 {
    let m = u.m();
    let (za, zb) = (u.z_at(a), u.z_at(b));
    2.0 * symplectic(&za[..m], &za[m..], &zb[..m], &zb[m..])
}

/// Edge targets: slopes along horizontal edges `(i,j)->(i+1,j)` and
/// vertical edges `(i,j)->(i,j+1)`.
struct EdgeSlopes {
    gx: Vec<f64>,
    gy: Vec<f64>,
}

fn edge_slopes(u: &SampledMap) -> EdgeSlopes {
    let g = u.grid();
    let mut gx = Vec::with_capacity((g.nx - 1) * g.ny);
    for j in 0..g.ny {
        for i in 0..g.nx - 1 {
            gx.push(edge_increment(u, g.index(i, j), g.index(i + 1, j)) / g.hx);
        }
    }
    let mut gy = Vec::with_capacity(g.nx * (g.ny - 1));
    for j in 0..g.ny - 1 {
        for i in 0..g.nx {
            gy.push(edge_increment(u, g.index(i, j), g.index(i, j + 1)) / g.hy);
        }
    }
    EdgeSlopes { gx, gy }
}

/// `D^T D t` for the edge difference operator `D`.
fn normal_apply(g: &Grid, t: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let (wx, wy) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    for j in 0..g.ny {
        for i in 0..g.nx - 1 {
            let (a, b) = (g.index(i, j), g.index(i + 1, j));
            let d = (t[b] - t[a]) * wx;
            out[b] += d;
            out[a] -= d;
        }
    }
    for j in 0..g.ny - 1 {
        for i in 0..g.nx {
            let (a, b) = (g.index(i, j), g.index(i, j + 1));
            let d = (t[b] - t[a]) * wy;
            out[b] += d;
            out[a] -= d;
        }
    }
}

/// `D^T g`.
fn normal_rhs(g: &Grid, s: &EdgeSlopes) -> Vec<f64> {
    let mut out = vec![0.0; g.n_nodes()];
    for j in 0..g.ny {
        for i in 0..g.nx - 1 {
            let (a, b) = (g.index(i, j), g.index(i + 1, j));
            let d = s.gx[j * (g.nx - 1) + i] / g.hx;
            out[b] += d;
            out[a] -= d;
        }
    }
    for j in 0..g.ny - 1 {
        for i in 0..g.nx {
            let (a, b) = (g.index(i, j), g.index(i, j + 1));
            let d = s.gy[j * g.nx + i] / g.hy;
            out[b] += d;
            out[a] -= d;
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lifts the horizontal part of `u` to a weakly contact map with
/// `t(origin corner) = anchor_t`. Any `t` already carried by `u` is ignored.
///
/// Fails when the isotropy residual exceeds `isotropy_tol`, in which case
/// the increments are not closed and no lift exists.
pub fn lift(u: &SampledMap, anchor_t: f64, isotropy_tol: f64) -> Result<Lifted> {
    if !anchor_t.is_finite() {
        return Err(HeisError::input("anchor t must be finite"));
    }
    let g = *u.grid();
    let isotropy_max = max_abs(&isotropy_residual(u));
    if isotropy_max > isotropy_tol {
        return Err(HeisError::precondition(format!(
            "isotropy residual {isotropy_max:e} exceeds {isotropy_tol:e}; z is not liftable"
        )));
    }
    let slopes = edge_slopes(u);

    // Path integration gives the exact lift when the increments are closed
    // and a good starting point otherwise.
    let mut t = vec![0.0; g.n_nodes()];
    for i in 1..g.nx {
        t[g.index(i, 0)] = t[g.index(i - 1, 0)] + g.hx * slopes.gx[i - 1];
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            t[g.index(i, j)] = t[g.index(i, j - 1)] + g.hy * slopes.gy[(j - 1) * g.nx + i];
        }
    }

    // Conjugate gradients on the consistent singular normal equations.
    let b = normal_rhs(&g, &slopes);
    let mut ap = vec![0.0; g.n_nodes()];
    normal_apply(&g, &t, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let b_norm = dot(&b, &b).sqrt().max(1.0 / (g.hx * g.hy));
    let mut iterations = 0;
    let max_iter = 10 * g.n_nodes();
    while rr.sqrt() > 1e-14 * b_norm && iterations < max_iter {
        normal_apply(&g, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        t.iter_mut().zip(&p).for_each(|(t, p)| *t += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, a)| *r -= alpha * a);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        p.iter_mut().zip(&r).for_each(|(p, r)| *p = r + beta * *p);
        rr = rr_new;
        iterations += 1;
    }

    let shift = anchor_t - t[0];
    t.iter_mut().for_each(|v| *v += shift);

    let mut curl_max = 0.0_f64;
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let bottom = slopes.gx[j * (g.nx - 1) + i];
            let top = slopes.gx[(j + 1) * (g.nx - 1) + i];
            let left = slopes.gy[j * g.nx + i];
            let right = slopes.gy[j * g.nx + i + 1];
            let curl = (right - left) / g.hx - (top - bottom) / g.hy;
            curl_max = curl_max.max(curl.abs());
        }
    }
    let ring = g.boundary_nodes();
    let closure: f64 = ring
        .iter()
        .zip(ring.iter().cycle().skip(1))
        .map(|(&a, &b)| edge_increment(u, a, b))
        .sum();

    let map = u.clone().with_t(t)?;
    Ok(Lifted {
        map,
        curl_max,
        boundary_closure: closure.abs(),
        isotropy_max,
        cg_iterations: iterations,
    })
}
