//! Isotropically constrained Dirichlet problem and Legendrian lifting.
//!
//! For `alpha >= 2`, minimising the horizontal energy of `u = (z, t)` with
//! Dirichlet data reduces to minimising `E(z) = int |grad z|^alpha` over maps
//! `z` with the prescribed trace whose pull-back of the symplectic form
//! vanishes, followed by lifting `z` to recover `t`.
//!
//! The discrete problem keeps `z` at the nodes, integrates the energy with
//! 2x2 Gauss quadrature on bilinear cells, and imposes the isotropy
//! residual at cell centres. It is solved by a quadratic penalty with
//! growing weight followed by augmented-Lagrangian refinement; every inner
//! solve is L-BFGS with Armijo backtracking.

mod lift;
mod optim;
mod residual;

pub use lift::{lift, Lifted};
pub use residual::{isotropy_residual, legendrian_residual, max_abs};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{horizontal_energy, EnergyReport};
use crate::error::{HeisError, Result};
use crate::map::{Grid, SampledMap};
use optim::{cg_quadratic, lbfgs, LbfgsOptions};
use residual::{cells, CellNodes};

/// Regularisation of `|grad z|^{alpha-2}` for `alpha > 2`.
const DELTA: f64 = 1e-8;

/// Solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeConfig {
    pub alpha: f64,
    pub penalty_mu0: f64,
    pub penalty_growth: f64,
    pub penalty_stages: usize,
    /// Augmented-Lagrangian stages run after the penalty stages.
    pub al_stages: usize,
    /// Stopping tolerance on `max |grad F| / (hx hy)`.
    pub inner_tol: f64,
    /// Required `max |isotropy residual|`.
    pub constraint_tol: f64,
    pub max_inner_iters: usize,
    pub seed: u64,
    /// Additional randomly perturbed starts.
    pub restarts: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            alpha: 2.0,
            penalty_mu0: 10.0,
            penalty_growth: 10.0,
            penalty_stages: 3,
            al_stages: 30,
            inner_tol: 1e-8,
            constraint_tol: 1e-8,
            max_inner_iters: 20_000,
            seed: 0,
            restarts: 0,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 2.0) || !self.alpha.is_finite() {
            return Err(HeisError::input(format!(
                "the constrained reduction needs alpha >= 2, got {}",
                self.alpha
            )));
        }
        if !(self.penalty_mu0 > 0.0) || !(self.penalty_growth > 1.0) {
            return Err(HeisError::input("penalty needs mu0 > 0 and growth > 1"));
        }
        if self.penalty_stages == 0 {
            return Err(HeisError::input("at least one penalty stage is required"));
        }
        if !(self.inner_tol > 0.0) || !(self.constraint_tol > 0.0) {
            return Err(HeisError::input("tolerances must be positive"));
        }
        if self.max_inner_iters == 0 {
            return Err(HeisError::input("max_inner_iters must be positive"));
        }
        Ok(())
    }
}

/// Dirichlet data: `z` at the boundary nodes, enumerated counterclockwise
/// from the origin corner (see [`Grid::boundary_nodes`]), and the value of
/// `t` at the origin corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub m: usize,
    pub values: Vec<Vec<f64>>,
    pub anchor_t: f64,
}

impl BoundaryData {
    pub fn from_fn<F>(grid: &Grid, m: usize, anchor_t: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> Vec<f64>,
    {
        let values = grid
            .boundary_nodes()
            .into_iter()
            .map(|k| {
                let (px, py) = grid.coords(k % grid.nx, k / grid.nx);
                f(px, py)
            })
            .collect();
        BoundaryData {
            m,
            values,
            anchor_t,
        }
    }

    /// Boundary trace of a sampled map; `anchor_t` defaults to its `t` at
    /// the origin corner (0 when absent).
    pub fn from_map(map: &SampledMap) -> Self {
        let grid = map.grid();
        let values = grid
            .boundary_nodes()
            .into_iter()
            .map(|k| map.z_at(k).to_vec())
            .collect();
        BoundaryData {
            m: map.m(),
            values,
            anchor_t: map.t().map_or(0.0, |t| t[0]),
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        grid.validate()?;
        if self.m == 0 {
            return Err(HeisError::input("target dimension m must be >= 1"));
        }
        let expected = 2 * (grid.nx + grid.ny) - 4;
        if self.values.len() != expected {
            return Err(HeisError::input(format!(
                "grid {}x{} has {expected} boundary nodes, boundary data has {}",
                grid.nx,
                grid.ny,
                self.values.len()
            )));
        }
        for (k, v) in self.values.iter().enumerate() {
            if v.len() != 2 * self.m {
                return Err(HeisError::input(format!(
                    "boundary value {k} has {} entries, expected {}",
                    v.len(),
                    2 * self.m
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(HeisError::input("boundary values must be finite"));
            }
        }
        if !self.anchor_t.is_finite() {
            return Err(HeisError::input("anchor_t must be finite"));
        }
        Ok(())
    }
}

/// One convergence-log row, written at the end of every stage. Stages
/// `0..penalty_stages` are pure penalty stages, later ones are
/// augmented-Lagrangian stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub stage: usize,
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub constraint_inf_norm: f64,
}

/// CSV rendering of a convergence log.
pub fn log_csv(rows: &[LogRow]) -> String {
    let mut out = String::from("stage,iter,energy,grad_norm,constraint_inf_norm\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.stage, r.iter, r.energy, r.grad_norm, r.constraint_inf_norm
        ));
    }
    out
}

/// Result of [`minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimized {
    /// Solution with the lifted `t`.
    pub map: SampledMap,
    /// Energy report of the solution. `value` is the minimised discrete
    /// energy; `density` is the nodal horizontal energy density.
    pub report: EnergyReport,
    pub log: Vec<LogRow>,
    pub converged: bool,
    /// Value of the discrete (Gauss-quadrature) energy that was minimised.
    pub objective: f64,
    pub constraint_inf_norm: f64,
    pub grad_norm: f64,
}

/// The discrete functional on node-major `z` (`2m` values per node).
pub(crate) struct Discrete {
    grid: Grid,
    m: usize,
    alpha: f64,
}

const GAUSS: [f64; 2] = [
    0.5 - 0.288_675_134_594_812_9,
    0.5 + 0.288_675_134_594_812_9,
];

impl Discrete {
    pub(crate) fn new(grid: Grid, m: usize, alpha: f64) -> Self {
        Discrete { grid, m, alpha }
    }

    fn phi(&self, s: f64) -> (f64, f64) {
        if self.alpha == 2.0 {
            (s, 1.0)
        } else {
            let half = 0.5 * self.alpha;
            let base = s + DELTA * DELTA;
            (
                base.powf(half) - DELTA.powf(self.alpha),
                half * base.powf(half - 1.0),
            )
        }
    }

    /// Energy `sum_cells sum_gauss (hx hy / 4) |grad z|^alpha`, accumulating
    /// its gradient into `grad` when given.
    pub(crate) fn energy(&self, z: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let g = &self.grid;
        let w2 = 2 * self.m;
        let weight = 0.25 * g.hx * g.hy;
        let mut d1 = vec![0.0; w2];
        let mut d2 = vec![0.0; w2];
        let mut total = 0.0;
        for (i, j) in cells(g) {
            let c = CellNodes::new(g, i, j);
            let (o00, o10, o01, o11) = (c.k00 * w2, c.k10 * w2, c.k01 * w2, c.k11 * w2);
            for &a in &GAUSS {
                for &b in &GAUSS {
                    let mut s = 0.0;
                    for q in 0..w2 {
                        let (f00, f10, f01, f11) = (z[o00 + q], z[o10 + q], z[o01 + q], z[o11 + q]);
                        d1[q] = ((f10 - f00) * (1.0 - b) + (f11 - f01) * b) / g.hx;
                        d2[q] = ((f01 - f00) * (1.0 - a) + (f11 - f10) * a) / g.hy;
                        s += d1[q] * d1[q] + d2[q] * d2[q];
                    }
                    let (val, dval) = self.phi(s);
                    total += weight * val;
                    if let Some(gr) = grad.as_deref_mut() {
                        let coef = 2.0 * weight * dval;
                        for q in 0..w2 {
                            let g1 = coef * d1[q] / g.hx;
                            let g2 = coef * d2[q] / g.hy;
                            gr[o00 + q] += -g1 * (1.0 - b) - g2 * (1.0 - a);
                            gr[o10 + q] += g1 * (1.0 - b) - g2 * a;
                            gr[o01 + q] += -g1 * b + g2 * (1.0 - a);
                            gr[o11 + q] += g1 * b + g2 * a;
                        }
                    }
                }
            }
        }
        total
    }

    /// Cell isotropy residuals of node-major `z`.
    pub(crate) fn constraint(&self, z: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let (m, w2) = (self.m, 2 * self.m);
        cells(g)
            .map(|(i, j)| {
                let c = CellNodes::new(g, i, j);
                (0..m)
                    .map(|k| {
                        let (x1, x2, _) = c.centre(g, |n| z[n * w2 + k]);
                        let (y1, y2, _) = c.centre(g, |n| z[n * w2 + m + k]);
                        x1 * y2 - x2 * y1
                    })
                    .sum()
            })
            .collect()
    }

    /// `E(z) + sum_cells hx hy (lambda r + mu/2 r^2)` and its gradient.
    pub(crate) fn penalized(&self, z: &[f64], grad: &mut [f64], mu: f64, lambda: &[f64]) -> f64 {
        grad.iter_mut().for_each(|v| *v = 0.0);
        let mut total = self.energy(z, Some(grad));
        let g = &self.grid;
        let (m, w2) = (self.m, 2 * self.m);
        let area = g.hx * g.hy;
        let (s1, s2) = (0.5 / g.hx, 0.5 / g.hy);
        for (cell, (i, j)) in cells(g).enumerate() {
            let c = CellNodes::new(g, i, j);
            let mut r = 0.0;
            let mut parts = Vec::with_capacity(m);
            for k in 0..m {
                let (x1, x2, _) = c.centre(g, |n| z[n * w2 + k]);
                let (y1, y2, _) = c.centre(g, |n| z[n * w2 + m + k]);
                r += x1 * y2 - x2 * y1;
                parts.push((x1, x2, y1, y2));
            }
            let lam = lambda[cell];
            total += area * (lam * r + 0.5 * mu * r * r);
            let dr = area * (lam + mu * r);
            // d1 / d2 stencil weights of the four corners
            let corners = [
                (c.k00, -s1, -s2),
                (c.k10, s1, -s2),
                (c.k01, -s1, s2),
                (c.k11, s1, s2),
            ];
            for (k, &(x1, x2, y1, y2)) in parts.iter().enumerate() {
                for &(n, a1, a2) in &corners {
                    grad[n * w2 + k] += dr * (y2 * a1 - y1 * a2);
                    grad[n * w2 + m + k] += dr * (x1 * a2 - x2 * a1);
                }
            }
        }
        total
    }
}

struct Run {
    z: Vec<f64>,
    log: Vec<LogRow>,
    converged: bool,
    objective: f64,
    constraint: f64,
    grad_norm: f64,
}

fn solve_from(disc: &Discrete, mut z: Vec<f64>, free: &[bool], config: &MinimizeConfig) -> Run {
    let g = disc.grid;
    let n_cells = g.n_cells();
    let opts = LbfgsOptions {
        tol: config.inner_tol,
        max_iters: config.max_inner_iters,
        memory: 12,
        grad_scale: g.hx * g.hy,
    };
    let mut lambda = vec![0.0; n_cells];
    let mut log = Vec::new();
    let mut mu = config.penalty_mu0;
    let mut grad_norm = f64::INFINITY;
    let mut constraint = max_abs(&disc.constraint(&z));

    let total_stages = config.penalty_stages + config.al_stages;
    for stage in 0..total_stages {
        if stage < config.penalty_stages {
            mu = config.penalty_mu0 * config.penalty_growth.powi(stage as i32);
        } else {
            if constraint <= config.constraint_tol && grad_norm <= config.inner_tol {
                break;
            }
            let r = disc.constraint(&z);
            lambda.iter_mut().zip(&r).for_each(|(l, r)| *l += mu * r);
        }
        let out = lbfgs(
            |x, gr| disc.penalized(x, gr, mu, &lambda),
            &mut z,
            free,
            &opts,
        );
        grad_norm = out.grad_norm;
        constraint = max_abs(&disc.constraint(&z));
        log.push(LogRow {
            stage,
            iter: out.iterations,
            energy: disc.energy(&z, None),
            grad_norm,
            constraint_inf_norm: constraint,
        });
    }
    Run {
        objective: disc.energy(&z, None),
        converged: constraint <= config.constraint_tol && grad_norm <= config.inner_tol,
        z,
        log,
        constraint,
        grad_norm,
    }
}

/// Harmonic (alpha = 2, unconstrained) extension of the boundary data.
fn harmonic_extension(grid: Grid, m: usize, z: &mut [f64], free: &[bool]) {
    let quad = Discrete::new(grid, m, 2.0);
    cg_quadratic(
        |x, gr| {
            gr.iter_mut().for_each(|v| *v = 0.0);
            quad.energy(x, Some(gr));
        },
        z,
        free,
        1e-15,
        20 * grid.n_nodes(),
    );
}

/// Solves the isotropically constrained Dirichlet problem on `grid` and
/// lifts the minimiser. A run that misses the tolerances still returns its
/// final iterate with `converged == false`.
pub fn minimize(boundary: &BoundaryData, grid: &Grid, config: &MinimizeConfig) -> Result<Minimized> {
    config.validate()?;
    boundary.validate(grid)?;
    if grid.nx < 3 || grid.ny < 3 {
        return Err(HeisError::input("the solver needs at least 3 nodes per direction"));
    }
    let m = boundary.m;
    let w2 = 2 * m;
    let n = grid.n_nodes();
    // interior starts at the boundary mean, so constant data is a fixed point
    let mut mean = vec![0.0; w2];
    for v in &boundary.values {
        mean.iter_mut().zip(v).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= boundary.values.len() as f64);
    let mut z0: Vec<f64> = (0..n).flat_map(|_| mean.iter().copied()).collect();
    let mut free = vec![true; n * w2];
    for (k, v) in grid.boundary_nodes().into_iter().zip(&boundary.values) {
        z0[k * w2..(k + 1) * w2].copy_from_slice(v);
        free[k * w2..(k + 1) * w2].iter_mut().for_each(|f| *f = false);
    }
    harmonic_extension(*grid, m, &mut z0, &free);

    let disc = Discrete::new(*grid, m, config.alpha);
    let mut best = solve_from(&disc, z0.clone(), &free, config);

    if config.restarts > 0 {
        let (lo, hi) = boundary
            .values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let amplitude = 0.1 * (hi - lo).max(1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.restarts {
            let mut z = z0.clone();
            z.iter_mut().zip(&free).for_each(|(v, &f)| {
                if f {
                    *v += amplitude * rng.gen_range(-1.0..1.0);
                }
            });
            let run = solve_from(&disc, z, &free, config);
            let better = match (run.converged, best.converged) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => run.objective < best.objective,
                (false, false) => run.constraint < best.constraint,
            };
            if better {
                best = run;
            }
        }
    }

    let z_map = SampledMap::from_flat(*grid, m, best.z, None)?;
    let lift_tol = if best.converged {
        config.constraint_tol
    } else {
        f64::INFINITY
    };
    let lifted = lift(&z_map, boundary.anchor_t, lift_tol)?;
    let legendrian = legendrian_residual(&lifted.map)?;
    let leg_max = legendrian
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |a, &b| a.max(b.abs()));

    // the value is the minimised Gauss-quadrature energy; density and the
    // nodal-quadrature value come from the horizontal energy of the output
    let mut report = horizontal_energy(&lifted.map, config.alpha)?;
    let nodal = std::mem::replace(&mut report.value, best.objective);
    let d = &mut report.diagnostics;
    d.insert("nodal_quadrature_value".into(), nodal);
    d.insert("isotropy_residual_max".into(), best.constraint);
    d.insert("grad_norm".into(), best.grad_norm);
    d.insert("legendrian_residual_max".into(), leg_max);
    d.insert("lift_curl_max".into(), lifted.curl_max);
    d.insert("boundary_closure".into(), lifted.boundary_closure);
    d.insert("converged".into(), if best.converged { 1.0 } else { 0.0 });
    d.insert("stages".into(), best.log.len() as f64);

    Ok(Minimized {
        map: lifted.map,
        report,
        log: best.log,
        converged: best.converged,
        objective: best.objective,
        constraint_inf_norm: best.constraint,
        grad_norm: best.grad_norm,
    })
}
