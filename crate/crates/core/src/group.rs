//! Arithmetic of the Heisenberg group `H^m = R^{2m} x R`.
//!
//! Points are `(z, t)` with `z = (x, y)`. The group law is
//! `(z, t)(z', t') = (z + z', t + t' + 2 omega(z, z'))` with the symplectic form
//! `omega(z, z') = sum_i (y_i x'_i - x_i y'_i)`. With this sign the
//! left-invariant horizontal frame is `X_i = d/dx_i + 2 y_i d/dt`,
//! `Y_i = d/dy_i - 2 x_i d/dt`, and a curve is horizontal iff
//! `t' = 2 (y . x' - x . y')`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HeisError, Result};

/// A point of `H^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
}

impl HPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, t: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(HeisError::input("H^m requires m >= 1"));
        }
        if x.len() != y.len() {
            return Err(HeisError::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if !t.is_finite() || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(HeisError::input("point components must be finite"));
        }
        Ok(HPoint { x, y, t })
    }

    /// Builds a point from the flat layout `[x_1..x_m, y_1..y_m, t]`.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() < 3 || v.len() % 2 == 0 {
            return Err(HeisError::input(format!(
                "a point of H^m has 2m+1 >= 3 components, got {}",
                v.len()
            )));
        }
        let m = (v.len() - 1) / 2;
        HPoint::new(v[..m].to_vec(), v[m..2 * m].to_vec(), v[2 * m])
    }

    /// Convenience constructor for `H^1`.
    pub fn h1(x: f64, y: f64, t: f64) -> Self {
        HPoint::new(vec![x], vec![y], t).expect("finite H^1 point")
    }

    pub fn identity(m: usize) -> Self {
        assert!(m >= 1, "H^m requires m >= 1");
        HPoint {
            x: vec![0.0; m],
            y: vec![0.0; m],
            t: 0.0,
        }
    }

    pub(crate) fn from_parts_unchecked(x: Vec<f64>, y: Vec<f64>, t: f64) -> Self {
        debug_assert_eq!(x.len(), y.len());
        HPoint { x, y, t }
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Squared Euclidean norm of the horizontal part.
    pub fn z_norm_sq(&self) -> f64 {
        self.x.iter().chain(&self.y).map(|v| v * v).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0.0 && self.x.iter().chain(&self.y).all(|&v| v == 0.0)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.m() + 1);
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v.push(self.t);
        v
    }

    fn check_same_m(&self, other: &HPoint) -> Result<()> {
        if self.m() != other.m() {
            return Err(HeisError::DimensionMismatch {
                expected: self.m(),
                found: other.m(),
            });
        }
        Ok(())
    }
}

impl Serialize for HPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(deserializer)?;
        HPoint::from_slice(&v).map_err(D::Error::custom)
    }
}

/// `omega(z, z') = sum_i (y_i x'_i - x_i y'_i)` for `z = (x, y)`, `z' = (x', y')`.
pub fn symplectic(x: &[f64], y: &[f64], xp: &[f64], yp: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(xp.iter().zip(yp))
        .map(|((&xi, &yi), (&xpi, &ypi))| yi * xpi - xi * ypi)
        .sum()
}

pub fn group_mul(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    p.check_same_m(q)?;
    Ok(mul_unchecked(p, q))
}

pub(crate) fn mul_unchecked(p: &HPoint, q: &HPoint) -> HPoint {
    let x = p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect();
    let y = p.y.iter().zip(&q.y).map(|(a, b)| a + b).collect();
    let t = p.t + q.t + 2.0 * symplectic(&p.x, &p.y, &q.x, &q.y);
    HPoint { x, y, t }
}

pub fn group_inv(p: &HPoint) -> HPoint {
    HPoint {
        x: p.x.iter().map(|v| -v).collect(),
        y: p.y.iter().map(|v| -v).collect(),
        t: -p.t,
    }
}

/// `p^{-1} q`, the displacement used by every left-invariant quantity.
pub fn left_difference(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    p.check_same_m(q)?;
    Ok(left_difference_unchecked(p, q))
}

pub(crate) fn left_difference_unchecked(p: &HPoint, q: &HPoint) -> HPoint {
    let x = q.x.iter().zip(&p.x).map(|(a, b)| a - b).collect();
    let y = q.y.iter().zip(&p.y).map(|(a, b)| a - b).collect();
    let t = q.t - p.t - 2.0 * symplectic(&p.x, &p.y, &q.x, &q.y);
    HPoint { x, y, t }
}

/// Anisotropic dilation `(z, t) -> (lambda z, lambda^2 t)`.
pub fn dilate(lambda: f64, p: &HPoint) -> Result<HPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(HeisError::input(format!(
            "dilation factor must be positive and finite, got {lambda}"
        )));
    }
    Ok(HPoint {
        x: p.x.iter().map(|v| lambda * v).collect(),
        y: p.y.iter().map(|v| lambda * v).collect(),
        t: lambda * lambda * p.t,
    })
}

/// Gauge norm `(|z|^4 + t^2)^{1/4}`.
pub fn gauge_norm(p: &HPoint) -> f64 {
    p.z_norm_sq().hypot(p.t).sqrt()
}

/// Left-invariant gauge quasi-distance `||p^{-1} q||`.
pub fn gauge_dist(p: &HPoint, q: &HPoint) -> Result<f64> {
    Ok(gauge_norm(&left_difference(p, q)?))
}

/// Left-invariant horizontal frame at `p` as coordinate vectors in
/// `R^{2m+1}` (layout `[x.., y.., t]`), ordered `X_1..X_m, Y_1..Y_m`.
pub fn horizontal_frame(p: &HPoint) -> Vec<Vec<f64>> {
    let m = p.m();
    let dim = 2 * m + 1;
    let mut frame = Vec::with_capacity(2 * m);
    for i in 0..m {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v[2 * m] = 2.0 * p.y[i];
        frame.push(v);
    }
    for i in 0..m {
        let mut v = vec![0.0; dim];
        v[m + i] = 1.0;
        v[2 * m] = -2.0 * p.x[i];
        frame.push(v);
    }
    frame
}

/// Vertical defect `t' - 2 (y . x' - x . y')` of a tangent vector
/// `(x', y', t')` at `p`; zero iff the vector is horizontal.
pub fn horizontality_defect(p: &HPoint, dx: &[f64], dy: &[f64], dt: f64) -> f64 {
    dt - 2.0 * symplectic(&p.x, &p.y, dx, dy)
}
