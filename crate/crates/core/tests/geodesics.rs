mod common;

use std::f64::consts::PI;

use common::{f_reference, random_point, rng};
use heisenberg::geodesic::geodesic_velocity;
use heisenberg::group::horizontality_defect;
use heisenberg::trig::tau_ratio;
use heisenberg::{
    cc_distance, dilate, eval_geodesic, gauge_dist, gauge_norm, geodesic_from_origin, group_inv,
    group_mul, solve_tau, GeodesicChart, HPoint,
};
use proptest::prelude::*;
use rand::Rng;

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn h_point(m: usize) -> impl Strategy<Value = HPoint> {
    prop::collection::vec(coord(), 2 * m + 1).prop_map(|c| HPoint::from_slice(&c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity(p in h_point(2), q in h_point(2), r in h_point(2)) {
        let a = group_mul(&group_mul(&p, &q).unwrap(), &r).unwrap();
        let b = group_mul(&p, &group_mul(&q, &r).unwrap()).unwrap();
        let scale = 1.0 + gauge_norm(&a).powi(2);
        for (u, v) in a.to_vec().iter().zip(b.to_vec()) {
            prop_assert!((u - v).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn inverse_and_gauge_symmetry(p in h_point(1), q in h_point(1)) {
        let e = group_mul(&p, &group_inv(&p)).unwrap();
        prop_assert!(e.is_identity());
        let d1 = gauge_dist(&p, &q).unwrap();
        let d2 = gauge_dist(&q, &p).unwrap();
        prop_assert_eq!(d1, d2);
    }

    #[test]
    fn gauge_is_homogeneous(p in h_point(3), lambda in 1e-3..1e3f64) {
        let n = gauge_norm(&dilate(lambda, &p).unwrap());
        prop_assert!((n - lambda * gauge_norm(&p)).abs() <= 1e-12 * n.max(1e-300));
    }

    #[test]
    fn triangle_inequality(p in h_point(1), q in h_point(1), r in h_point(1)) {
        let pq = cc_distance(&p, &q).unwrap();
        let qr = cc_distance(&q, &r).unwrap();
        let pr = cc_distance(&p, &r).unwrap();
        prop_assert!(pr <= pq + qr + 1e-9);
    }

    #[test]
    fn analytic_velocity_is_horizontal(g in h_point(2), s in 0.0..1.0f64) {
        prop_assume!(!g.is_identity());
        let chart = geodesic_from_origin(&g).unwrap();
        let p = eval_geodesic(&chart, s);
        let (dx, dy, dt) = geodesic_velocity(&chart, s);
        let scale = 1.0 + chart.rho() * chart.rho();
        prop_assert!(horizontality_defect(&p, &dx, &dy, dt).abs() <= 1e-10 * scale);
    }

    #[test]
    fn left_invariance_and_homogeneity(g in h_point(1), p in h_point(1), q in h_point(1), lambda in 0.01..100.0f64) {
        let d = cc_distance(&p, &q).unwrap();
        let moved = cc_distance(&group_mul(&g, &p).unwrap(), &group_mul(&g, &q).unwrap()).unwrap();
        prop_assert!((moved - d).abs() <= 1e-9 * d.max(1.0));
        let scaled = cc_distance(&dilate(lambda, &p).unwrap(), &dilate(lambda, &q).unwrap()).unwrap();
        prop_assert!((scaled - lambda * d).abs() <= 1e-9 * (lambda * d).max(1.0));
    }
}

#[test]
fn ratio_function_is_strictly_decreasing() {
    let n = 10_000;
    let values: Vec<f64> = (1..n).map(|k| tau_ratio(2.0 * PI * k as f64 / n as f64)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    for k in [1, 10, 100, 1000, 5000, 9999] {
        let tau = 2.0 * PI * k as f64 / n as f64;
        let (a, b) = (tau_ratio(tau), f_reference(tau));
        assert!((a - b).abs() <= 1e-13 * b.max(1.0), "tau {tau}: {a} vs {b}");
    }
}

#[test]
fn tau_solver_residual() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let ratio = 10f64.powf(r.gen_range(-8.0..8.0));
        let tau = solve_tau(ratio, 1.0).unwrap();
        assert!((0.0..=2.0 * PI).contains(&tau));
        let residual = (f_reference(tau) - ratio).abs();
        assert!(residual <= 1e-12 * ratio.max(1.0), "ratio {ratio}: residual {residual}");
        assert_eq!(solve_tau(ratio, -1.0).unwrap(), -tau);
    }
}

#[test]
fn vertical_distance_matches_circle_construction() {
    // A clockwise circle of perimeter L through the origin gains
    // t = L^2 / pi; sum it over an inscribed polygon.
    let length = PI.sqrt();
    let radius = length / (2.0 * PI);
    let n = 200_000;
    let point = |s: f64| {
        let a = 2.0 * PI * s;
        (radius * (a.cos() - 1.0), -radius * a.sin())
    };
    let mut t = 0.0;
    for k in 0..n {
        let (s0, s1) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
        let (x0, y0) = point(s0);
        let (x1, y1) = point(s1);
        let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        t += 2.0 * (ym * (x1 - x0) - xm * (y1 - y0));
    }
    assert!((t - 1.0).abs() < 1e-8);
    let d = cc_distance(&HPoint::identity(1), &HPoint::h1(0.0, 0.0, 1.0)).unwrap();
    assert!((d - length).abs() < 1e-10);
    // the chart returned for the vertical point is that circle
    let chart = geodesic_from_origin(&HPoint::h1(0.0, 0.0, 1.0)).unwrap();
    assert!((chart.rho() - length).abs() < 1e-12);
    assert!((chart.tau() - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn geodesics_have_constant_speed() {
    let mut r = rng(5);
    for _ in 0..100 {
        let g = random_point(&mut r, 1, 10.0);
        let chart = geodesic_from_origin(&g).unwrap();
        let start = eval_geodesic(&chart, 0.0);
        for k in 0..=16 {
            let s = k as f64 / 16.0;
            let d = cc_distance(&start, &eval_geodesic(&chart, s)).unwrap();
            assert!((d - s * chart.rho()).abs() <= 1e-6 * chart.rho());
        }
    }
}

#[test]
fn higher_dimensional_endpoints_and_lengths() {
    let mut r = rng(9);
    for m in [2, 3, 5] {
        for _ in 0..50 {
            let g = random_point(&mut r, m, 10.0);
            let chart = geodesic_from_origin(&g).unwrap();
            assert!(gauge_dist(&eval_geodesic(&chart, 1.0), &g).unwrap() <= 1e-9);
            assert_eq!(cc_distance(&HPoint::identity(m), &g).unwrap(), chart.rho());
        }
    }
}

#[test]
fn explicit_charts_reach_their_endpoint() {
    let chart = GeodesicChart::new(vec![0.6, 0.0], vec![0.0, 0.8], 1.5, 2.0).unwrap();
    let end = eval_geodesic(&chart, 1.0);
    let back = geodesic_from_origin(&end).unwrap();
    assert!((back.rho() - 2.0).abs() < 1e-10);
    assert!((back.tau() - 3.0).abs() < 1e-10);
}

#[test]
fn metric_equivalence_bracket() {
    let mut r = rng(3);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..10_000 {
        let p = random_point(&mut r, 1, 10.0);
        let q = random_point(&mut r, 1, 10.0);
        let ratio = cc_distance(&p, &q).unwrap() / gauge_dist(&p, &q).unwrap();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    // d_c is at least the gauge distance on the plane and at most
    // sqrt(pi) times it on the vertical axis.
    assert!(lo >= 1.0 - 1e-12, "lower bracket {lo}");
    assert!(hi <= PI.sqrt() + 1e-12, "upper bracket {hi}");
    println!("cc/gauge bracket over 10^4 pairs: [{lo:.6}, {hi:.6}]");
}
