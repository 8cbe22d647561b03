//! Cancellation-free forms of the trigonometric quotients that appear in the
//! closed-form geodesics and their Jacobians.

/// Below this magnitude the power series replace the direct quotients.
const SERIES_CUTOFF: f64 = 1.0;

/// `(cos u - 1) / u`, zero at `u = 0`.
pub fn cos_quot(u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    // -2 sin^2(u/2) / u
    -(0.5 * u).sin() * sinc(0.5 * u)
}

/// `sin u / u`, one at `u = 0`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `(u - sin u) / u^2`, odd, `~ u/6` near zero.
pub fn sin_defect(u: f64) -> f64 {
    if u.abs() < SERIES_CUTOFF {
        // sum_k (-1)^k u^{2k+1} / (2k+3)!
        let u2 = u * u;
        let mut term = u / 6.0;
        let mut sum = term;
        for k in 1..12 {
            let k = k as f64;
            term *= -u2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
        }
        sum
    } else {
        (u - u.sin()) / (u * u)
    }
}

/// `(1 - cos tau) / (tau - sin tau)`, the left-hand side of the equation that
/// determines the geodesic curvature parameter. Odd in `tau`, `+inf` at zero.
pub fn tau_ratio(tau: f64) -> f64 {
    if tau == 0.0 {
        return f64::INFINITY;
    }
    // 2 sin^2(tau/2) / (tau^2 c(tau)) without underflow for tiny tau
    let half = sinc(0.5 * tau);
    half * half / (2.0 * sin_defect(tau))
}

/// `(u sin u - 2 (1 - cos u)) / u^4`, even, `-1/12` at zero. Negative on
/// `(-2 pi, 2 pi)` and zero at `|u| = 2 pi`.
pub fn jacobian_quot(u: f64) -> f64 {
    if u.abs() < SERIES_CUTOFF {
        // sum_{k>=2} (-1)^{k-1} (2k-2)/(2k)! u^{2k-4}
        let u2 = u * u;
        let mut inv_fact = 1.0 / 24.0; // 1/(2k)! at k = 2
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 2..16 {
            let kf = k as f64;
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * (2.0 * kf - 2.0) * inv_fact * pow;
            inv_fact /= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
            pow *= u2;
        }
        sum
    } else {
        let v = 0.5 * u;
        // u sin u - 2(1 - cos u) = 4 sin v (v cos v - sin v)
        4.0 * v.sin() * (v * v.cos() - v.sin()) / (u * u * u * u)
    }
}
