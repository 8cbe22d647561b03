//! Spherical geodesic coordinates on `H^1`, geodesic contraction maps and
//! their Jacobians.
//!
//! `A(theta, phi, rho)` is the endpoint of the unit-speed geodesic with
//! `A = cos theta`, `B = sin theta`, curvature `phi` and length `rho`. The
//! contraction `B_{p0}^s(p) = p0 gamma_{p0^{-1} p}(s)` has Jacobian
//!
//! ```text
//! det J B = s (s tau sin(s tau) - 2 (1 - cos(s tau))) / (tau sin tau - 2 (1 - cos tau))
//! ```
//!
//! with `tau = phi rho` read off `p0^{-1} p`. As `tau -> 0` this tends to
//! `s^5`, below the `C s^4` lower bound a measure contraction property with
//! the homogeneous dimension `Q = 4` would need.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HeisError, Result};
use crate::geodesic::{geodesic_between, geodesic_from_origin};
use crate::group::{left_difference, mul_unchecked, HPoint};
use crate::trig::{cos_quot, jacobian_quot, sin_defect, sinc};

const TWO_PI: f64 = 2.0 * PI;

/// Spherical geodesic coordinates `(theta, phi, rho)` of a point of `H^1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCoords {
    pub theta: f64,
    pub phi: f64,
    pub rho: f64,
}

impl SphericalCoords {
    pub fn new(theta: f64, phi: f64, rho: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && rho.is_finite()) || rho < 0.0 {
            return Err(HeisError::input(
                "spherical coordinates need finite values and rho >= 0",
            ));
        }
        if (phi * rho).abs() > TWO_PI * (1.0 + 4.0 * f64::EPSILON) {
            return Err(HeisError::input(format!(
                "|phi rho| must not exceed 2 pi, got {}",
                phi * rho
            )));
        }
        Ok(SphericalCoords { theta, phi, rho })
    }

    pub fn tau(&self) -> f64 {
        self.phi * self.rho
    }
}

fn require_h1(p: &HPoint) -> Result<()> {
    if p.m() != 1 {
        return Err(HeisError::input(format!(
            "Jacobian computations are implemented for H^1 only, got m = {}",
            p.m()
        )));
    }
    Ok(())
}

/// The spherical parametrization `A(theta, phi, rho)`.
pub fn chart_a(c: &SphericalCoords) -> HPoint {
    let tau = c.tau();
    let (sn, cs) = c.theta.sin_cos();
    let ca = cos_quot(tau);
    let sb = sinc(tau);
    let x = c.rho * (cs * ca + sn * sb);
    let y = c.rho * (sn * ca - cs * sb);
    let t = 2.0 * c.rho * c.rho * sin_defect(tau);
    HPoint::h1(x, y, t)
}

/// Inverse of [`chart_a`] through the geodesic from the origin. Points on
/// the `t`-axis get the canonical `theta = 0`.
pub fn spherical_from_point(p: &HPoint) -> Result<SphericalCoords> {
    require_h1(p)?;
    if p.is_identity() {
        return Ok(SphericalCoords {
            theta: 0.0,
            phi: 0.0,
            rho: 0.0,
        });
    }
    let chart = geodesic_from_origin(p)?;
    let theta = chart.b()[0].atan2(chart.a()[0]).rem_euclid(TWO_PI);
    Ok(SphericalCoords {
        theta,
        phi: chart.phi(),
        rho: chart.rho(),
    })
}

/// `det J A = 4 (phi rho sin(phi rho) - 2 (1 - cos(phi rho))) / phi^4`,
/// evaluated as `4 rho^4 q(phi rho)` so the `phi -> 0` limit `-rho^4/3` is
/// regular. Independent of `theta`.
///
/// The sign is that of the determinant of `d(x, y, t)/d(phi, theta, rho)`;
/// with the columns in `(theta, phi, rho)` order the determinant is the
/// negative of this value.
pub fn jacobian_a(c: &SphericalCoords) -> f64 {
    let r2 = c.rho * c.rho;
    4.0 * r2 * r2 * jacobian_quot(c.tau())
}

/// Jacobian of the contraction toward the origin for a point with curvature
/// parameter `tau`: `s^5 q(s tau) / q(tau)`.
pub fn contraction_jacobian_from_tau(sbar: f64, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sbar) {
        return Err(HeisError::input(format!("sbar must lie in [0, 1], got {sbar}")));
    }
    if !(tau.abs() < TWO_PI) {
        return Err(HeisError::DegenerateChart(format!(
            "tau = {tau} is on the cut locus |tau| = 2 pi"
        )));
    }
    if sbar == 1.0 {
        return Ok(1.0);
    }
    let s2 = sbar * sbar;
    Ok(s2 * s2 * sbar * jacobian_quot(sbar * tau) / jacobian_quot(tau))
}

/// Contraction map `p -> p0 gamma_{p0^{-1} p}(sbar)`.
pub fn contract(p0: &HPoint, sbar: f64, p: &HPoint) -> Result<HPoint> {
    if !(0.0..=1.0).contains(&sbar) {
        return Err(HeisError::input(format!("sbar must lie in [0, 1], got {sbar}")));
    }
    geodesic_between(p0, p, sbar)
}

/// Closed-form Jacobian determinant of [`contract`] at `p`.
pub fn jacobian_contract(p0: &HPoint, sbar: f64, p: &HPoint) -> Result<f64> {
    require_h1(p0)?;
    require_h1(p)?;
    let q = left_difference(p0, p)?;
    if q.z_norm_sq() == 0.0 {
        return Err(HeisError::DegenerateChart(
            "p0^{-1} p lies on the t-axis".into(),
        ));
    }
    let chart = geodesic_from_origin(&q)?;
    contraction_jacobian_from_tau(sbar, chart.tau())
}

/// One row of the measure-contraction scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McpRow {
    pub threshold: f64,
    pub n_samples: usize,
    /// Infimum of `det J B / sbar^4` over the sampled band.
    pub inf_ratio: f64,
}

/// Sampling plan for [`mcp_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpConfig {
    /// Band half-widths on the plane residual `|t - t0 + 2 (x0 y - y0 x)|`.
    pub thresholds: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    /// Range of `|z|` of `p0^{-1} p` for sampled points.
    pub radius_min: f64,
    pub radius_max: f64,
}

impl Default for McpConfig {
    fn default() -> Self {
        McpConfig {
            thresholds: (1..=6).map(|k| 10f64.powi(-k)).collect(),
            n_samples: 10_000,
            seed: 0,
            radius_min: 0.1,
            radius_max: 1.0,
        }
    }
}

/// Scans `inf det J B / sbar^4` over bands of shrinking width around the
/// horizontal plane through `p0`.
///
/// The same seeded base sample `(theta, r, u)` is reused at every threshold
/// `delta`, placed at `p = p0 (r cos theta, r sin theta, delta u)`, so the
/// infimum is monotone in the threshold and the scan is reproducible.
pub fn mcp_scan(sbar: f64, p0: &HPoint, config: &McpConfig) -> Result<Vec<McpRow>> {
    require_h1(p0)?;
    if !(sbar > 0.0 && sbar <= 1.0) {
        return Err(HeisError::input(format!("sbar must lie in (0, 1], got {sbar}")));
    }
    if config.n_samples == 0 || config.thresholds.is_empty() {
        return Err(HeisError::precondition("mcp scan needs samples and thresholds"));
    }
    if !(config.radius_min > 0.0 && config.radius_max >= config.radius_min) {
        return Err(HeisError::input("mcp scan radius range must satisfy 0 < min <= max"));
    }
    if config.thresholds.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(HeisError::input("mcp thresholds must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let base: Vec<(f64, f64, f64)> = (0..config.n_samples)
        .map(|_| {
            let theta = rng.gen_range(0.0..TWO_PI);
            let r = rng.gen_range(config.radius_min..=config.radius_max);
            let magnitude: f64 = rng.gen_range(0.0..0.999);
            let u = if rng.gen::<bool>() { 1.0 } else { -1.0 } * (0.001 + magnitude);
            (theta, r, u)
        })
        .collect();

    let scale = sbar.powi(4);
    let mut rows = Vec::with_capacity(config.thresholds.len());
    for &delta in &config.thresholds {
        let ratios: Vec<Option<f64>> = base
            .par_iter()
            .map(|&(theta, r, u)| {
                let (sn, cs) = theta.sin_cos();
                let q = HPoint::h1(r * cs, r * sn, delta * u);
                let p = mul_unchecked(p0, &q);
                let residual = left_difference(p0, &p).ok()?.t();
                if residual.abs() >= delta {
                    return None;
                }
                jacobian_contract(p0, sbar, &p).ok().map(|j| j / scale)
            })
            .collect();
        let kept: Vec<f64> = ratios.into_iter().flatten().collect();
        if kept.is_empty() {
            return Err(HeisError::precondition(format!(
                "no admissible samples at threshold {delta}"
            )));
        }
        let inf_ratio = kept.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(McpRow {
            threshold: delta,
            n_samples: kept.len(),
            inf_ratio,
        });
    }
    Ok(rows)
}

/// CSV rendering `threshold,n_samples,inf_ratio` of a scan.
pub fn mcp_csv(rows: &[McpRow]) -> String {
    let mut out = String::from("threshold,n_samples,inf_ratio\n");
    for r in rows {
        out.push_str(&format!("{:e},{},{}\n", r.threshold, r.n_samples, r.inf_ratio));
    }
    out
}
