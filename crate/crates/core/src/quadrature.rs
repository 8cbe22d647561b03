//! Quasi-Monte-Carlo averages over the unit disk.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of points and scrambling seed of a disk point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QmcSettings {
    pub n_points: usize,
    pub seed: u64,
}

impl Default for QmcSettings {
    fn default() -> Self {
        QmcSettings {
            n_points: 1 << 16,
            seed: 0,
        }
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while k > 0 {
        r += f * (k % base) as f64;
        k /= base;
        f *= inv;
    }
    r
}

/// Halton (2, 3) points with a seeded Cranley-Patterson shift, mapped to the
/// unit disk by the area-preserving polar map `(u, v) -> sqrt(u) e^{2 pi i v}`.
pub fn disk_points(settings: QmcSettings) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let shift_u: f64 = rng.gen();
    let shift_v: f64 = rng.gen();
    (0..settings.n_points as u64)
        .map(|k| {
            let u = (radical_inverse(k + 1, 2) + shift_u).fract();
            let v = (radical_inverse(k + 1, 3) + shift_v).fract();
            let r = u.sqrt();
            let (s, c) = (2.0 * PI * v).sin_cos();
            [r * c, r * s]
        })
        .collect()
}

/// Average of `f` over the point set.
pub fn disk_average<F: Fn([f64; 2]) -> f64>(points: &[[f64; 2]], f: F) -> f64 {
    points.iter().map(|&w| f(w)).sum::<f64>() / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_in_disk() {
        let pts = disk_points(QmcSettings {
            n_points: 4096,
            seed: 3,
        });
        assert!(pts.iter().all(|w| w[0] * w[0] + w[1] * w[1] <= 1.0));
    }

    #[test]
    fn second_moments_match_disk() {
        // mean of w1^2 over the unit disk is 1/4, of w1 w2 is 0, of |w|^4 is 1/3
        let pts = disk_points(QmcSettings::default());
        let m11 = disk_average(&pts, |w| w[0] * w[0]);
        let m12 = disk_average(&pts, |w| w[0] * w[1]);
        let m4 = disk_average(&pts, |w| (w[0] * w[0] + w[1] * w[1]).powi(2));
        assert!((m11 - 0.25).abs() < 1e-4);
        assert!(m12.abs() < 1e-4);
        assert!((m4 - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn seed_changes_points_deterministically() {
        let s = QmcSettings {
            n_points: 16,
            seed: 1,
        };
        assert_eq!(disk_points(s), disk_points(s));
        assert_ne!(disk_points(s), disk_points(QmcSettings { seed: 2, ..s }));
    }
}
