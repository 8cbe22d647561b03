//! Energy functionals of sampled maps `Omega -> H^m`.
//!
//! * [`ks_energy`]: Korevaar-Schoen approximate energy
//!   `E_eps(w; u) = int w(p) avg_{B(p, eps)} (d(u(p), u(q)) / eps)^alpha dq dp`.
//! * [`pansu_energy`]: the limit representation
//!   `int avg_{|omega| <= 1} |grad z(p) omega|^alpha d omega dp` valid for contact maps.
//! * [`horizontal_energy`]: `int |grad z|^alpha dp`.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HeisError, Result};
use crate::geodesic::cc_distance;
use crate::group::{symplectic, HPoint};
use crate::map::{Grid, SampledMap};
use crate::quadrature::{disk_points, QmcSettings};
use crate::variational::legendrian_residual;

/// Distance used on the target group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetMetric {
    /// Gauge distance `||p^{-1} q||`.
    #[default]
    Gauge,
    /// Carnot-Caratheodory distance.
    Cc,
}

impl FromStr for TargetMetric {
    type Err = HeisError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauge" => Ok(TargetMetric::Gauge),
            "cc" => Ok(TargetMetric::Cc),
            other => Err(HeisError::input(format!(
                "unknown metric '{other}', expected 'gauge' or 'cc'"
            ))),
        }
    }
}

/// Energy value with its per-node density field.
///
/// `value` is the trapezoid-rule integral of `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub value: f64,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub density: Vec<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EnergyReport {
    fn from_density(grid: &Grid, alpha: f64, epsilon: Option<f64>, density: Vec<f64>) -> Self {
        let value = integrate(grid, &density);
        EnergyReport {
            value,
            alpha,
            epsilon,
            density,
            diagnostics: BTreeMap::new(),
        }
    }
}

/// Trapezoid-rule integral of a nodal field.
pub fn integrate(grid: &Grid, field: &[f64]) -> f64 {
    let mut sum = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            sum += grid.trapezoid_weight(i, j) * field[grid.index(i, j)];
        }
    }
    sum
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(HeisError::input(format!("alpha must be >= 1, got {alpha}")));
    }
    Ok(())
}

/// Tensor-product bump `b(s) = exp(1 - 1/(1 - s^2))` supported in the grid
/// domain shrunk by `margin` on every side, sampled at the nodes.
pub fn bump_weight(grid: &Grid, margin: f64) -> Result<Vec<f64>> {
    let (cx, cy) = (0.5 * (grid.x0 + grid.x1()), 0.5 * (grid.y0 + grid.y1()));
    let rx = 0.5 * (grid.x1() - grid.x0) - margin;
    let ry = 0.5 * (grid.y1() - grid.y0) - margin;
    if !(rx > 0.0 && ry > 0.0) {
        return Err(HeisError::precondition(format!(
            "bump margin {margin} leaves no interior support"
        )));
    }
    let b = |s: f64| {
        if s.abs() < 1.0 {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        } else {
            0.0
        }
    };
    let mut w = Vec::with_capacity(grid.n_nodes());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (px, py) = grid.coords(i, j);
            w.push(b((px - cx) / rx) * b((py - cy) / ry));
        }
    }
    Ok(w)
}

/// Target distance between the node value `(zp, tp)` and `(zq, tq)`.
fn target_distance(m: usize, zp: &[f64], tp: f64, zq: &[f64], tq: f64, metric: TargetMetric) -> f64 {
    match metric {
        TargetMetric::Gauge => {
            let dz2: f64 = zp.iter().zip(zq).map(|(a, b)| (b - a) * (b - a)).sum();
            let dt = tq - tp - 2.0 * symplectic(&zp[..m], &zp[m..], &zq[..m], &zq[m..]);
            dz2.hypot(dt).sqrt()
        }
        TargetMetric::Cc => {
            let p = HPoint::from_parts_unchecked(zp[..m].to_vec(), zp[m..].to_vec(), tp);
            let q = HPoint::from_parts_unchecked(zq[..m].to_vec(), zq[m..].to_vec(), tq);
            cc_distance(&p, &q).expect("same dimension")
        }
    }
}

fn ks_density_with_points(
    u: &SampledMap,
    t: &[f64],
    node: (usize, usize),
    epsilon: f64,
    alpha: f64,
    metric: TargetMetric,
    points: &[[f64; 2]],
) -> f64 {
    let grid = u.grid();
    let (i, j) = node;
    let k = grid.index(i, j);
    let (px, py) = grid.coords(i, j);
    let zp = u.z_at(k);
    let tp = t[k];
    let mut zq = vec![0.0; 2 * u.m()];
    let mut sum = 0.0;
    for w in points {
        let tq = u.interpolate(px + epsilon * w[0], py + epsilon * w[1], &mut zq);
        let d = target_distance(u.m(), zp, tp, &zq, tq, metric);
        sum += (d / epsilon).powf(alpha);
    }
    sum / points.len() as f64
}

fn check_ks_args(u: &SampledMap, epsilon: f64, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(HeisError::input(format!("epsilon must be positive, got {epsilon}")));
    }
    u.require_t()?;
    Ok(())
}

/// Averaged `eps`-approximate energy density at node `(i, j)`, computed by
/// quasi-Monte-Carlo over the Euclidean `eps`-ball with bilinear
/// interpolation of `u`.
pub fn ks_density(
    u: &SampledMap,
    node: (usize, usize),
    epsilon: f64,
    alpha: f64,
    metric: TargetMetric,
    qmc: QmcSettings,
) -> Result<f64> {
    check_ks_args(u, epsilon, alpha)?;
    let grid = u.grid();
    if node.0 >= grid.nx || node.1 >= grid.ny {
        return Err(HeisError::input("node index outside the grid"));
    }
    if grid.boundary_distance(node.0, node.1) <= epsilon {
        return Err(HeisError::precondition(format!(
            "node {node:?} lies within epsilon = {epsilon} of the boundary"
        )));
    }
    let points = disk_points(qmc);
    let t = u.require_t()?;
    Ok(ks_density_with_points(u, t, node, epsilon, alpha, metric, &points))
}

/// Weighted Korevaar-Schoen approximate energy. The report's density is
/// `weight * e_eps`; nodes with zero weight are not evaluated.
pub fn ks_energy(
    u: &SampledMap,
    weight: &[f64],
    epsilon: f64,
    alpha: f64,
    metric: TargetMetric,
    qmc: QmcSettings,
) -> Result<EnergyReport> {
    check_ks_args(u, epsilon, alpha)?;
    let grid = *u.grid();
    if weight.len() != grid.n_nodes() {
        return Err(HeisError::input(format!(
            "weight has {} entries, grid has {} nodes",
            weight.len(),
            grid.n_nodes()
        )));
    }
    if weight.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
        return Err(HeisError::input("weights must lie in [0, 1]"));
    }
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if weight[grid.index(i, j)] > 0.0 && grid.boundary_distance(i, j) <= epsilon {
                return Err(HeisError::precondition(format!(
                    "weight support reaches within epsilon = {epsilon} of the boundary at node ({i}, {j})"
                )));
            }
        }
    }
    let t = u.require_t()?;
    let points = disk_points(qmc);
    let density: Vec<f64> = (0..grid.n_nodes())
        .into_par_iter()
        .map(|k| {
            let w = weight[k];
            if w == 0.0 {
                return 0.0;
            }
            let node = (k % grid.nx, k / grid.nx);
            w * ks_density_with_points(u, t, node, epsilon, alpha, metric, &points)
        })
        .collect();
    let evaluated = weight.iter().filter(|&&w| w > 0.0).count();
    let mut report = EnergyReport::from_density(&grid, alpha, Some(epsilon), density);
    report
        .diagnostics
        .insert("weight_mass".into(), integrate(&grid, weight));
    report
        .diagnostics
        .insert("nodes_evaluated".into(), evaluated as f64);
    report
        .diagnostics
        .insert("qmc_points".into(), qmc.n_points as f64);
    Ok(report)
}

/// Settings of [`pansu_energy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PansuSettings {
    pub qmc: QmcSettings,
    /// Largest admissible cell Legendrian residual.
    pub legendrian_tol: f64,
}

impl Default for PansuSettings {
    fn default() -> Self {
        PansuSettings {
            qmc: QmcSettings::default(),
            legendrian_tol: 1e-3,
        }
    }
}

/// Energy through the Pansu-derivative representation. For a Euclidean
/// domain the derivative acts as `omega -> grad z(p) omega` with no vertical
/// part, so the density is `avg_{|omega| <= 1} |grad z(p) omega|^alpha`.
pub fn pansu_energy(u: &SampledMap, alpha: f64, settings: PansuSettings) -> Result<EnergyReport> {
    check_alpha(alpha)?;
    let grid = *u.grid();
    let residual = legendrian_residual(u)?;
    let leg_max = residual
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |a, &b| a.max(b.abs()));
    if leg_max > settings.legendrian_tol {
        return Err(HeisError::precondition(format!(
            "map is not contact: Legendrian residual {leg_max:e} exceeds {:e}",
            settings.legendrian_tol
        )));
    }

    // The density only depends on M = G^T G, so equal metrics share one
    // quadrature.
    let metrics: Vec<[f64; 3]> = (0..grid.n_nodes())
        .map(|k| {
            let (d1, d2) = u.nodal_gradient(k % grid.nx, k / grid.nx);
            let m11 = d1.iter().map(|v| v * v).sum();
            let m12 = d1.iter().zip(&d2).map(|(a, b)| a * b).sum();
            let m22 = d2.iter().map(|v| v * v).sum();
            [m11, m12, m22]
        })
        .collect();
    let mut slot: HashMap<[u64; 3], usize> = HashMap::new();
    let mut unique: Vec<[f64; 3]> = Vec::new();
    let node_slot: Vec<usize> = metrics
        .iter()
        .map(|mm| {
            let key = [mm[0].to_bits(), mm[1].to_bits(), mm[2].to_bits()];
            *slot.entry(key).or_insert_with(|| {
                unique.push(*mm);
                unique.len() - 1
            })
        })
        .collect();

    let points = disk_points(settings.qmc);
    let half = 0.5 * alpha;
    let values: Vec<f64> = unique
        .par_iter()
        .map(|mm| {
            if mm[0] == 0.0 && mm[1] == 0.0 && mm[2] == 0.0 {
                return 0.0;
            }
            let sum: f64 = points
                .iter()
                .map(|w| {
                    let q = mm[0] * w[0] * w[0] + 2.0 * mm[1] * w[0] * w[1] + mm[2] * w[1] * w[1];
                    if alpha == 2.0 {
                        q
                    } else {
                        q.max(0.0).powf(half)
                    }
                })
                .sum();
            sum / points.len() as f64
        })
        .collect();
    let density = node_slot.iter().map(|&s| values[s]).collect();
    let mut report = EnergyReport::from_density(&grid, alpha, None, density);
    report.diagnostics.insert("legendrian_residual_max".into(), leg_max);
    report
        .diagnostics
        .insert("qmc_points".into(), settings.qmc.n_points as f64);
    Ok(report)
}

/// `int_Omega |grad z|^alpha`, with central differences inside and one-sided
/// differences on the boundary. The vertical component does not enter.
pub fn horizontal_energy(u: &SampledMap, alpha: f64) -> Result<EnergyReport> {
    check_alpha(alpha)?;
    let grid = *u.grid();
    if grid.nx < 3 || grid.ny < 3 {
        return Err(HeisError::input(
            "horizontal energy needs at least 3 nodes per direction",
        ));
    }
    let density = (0..grid.n_nodes())
        .map(|k| {
            let (d1, d2) = u.nodal_gradient(k % grid.nx, k / grid.nx);
            let g2: f64 = d1.iter().chain(&d2).map(|v| v * v).sum();
            if alpha == 2.0 {
                g2
            } else {
                g2.powf(0.5 * alpha)
            }
        })
        .collect();
    Ok(EnergyReport::from_density(&grid, alpha, None, density))
}
