mod common;

use common::{disk_average_polar, random_point, rng};
use heisenberg::energy::{bump_weight, integrate};
use heisenberg::{
    horizontal_energy, ks_density, ks_energy, pansu_energy, Grid, PansuSettings,
    QmcSettings, SampledMap, TargetMetric,
};

fn linear_isotropic(n: usize) -> SampledMap {
    SampledMap::from_fn_with_t(Grid::unit_square(n, n).unwrap(), 1, |x, _| (vec![x, x], 0.0)).unwrap()
}

/// `z = (cos h, sin h)`, `t = -2 h` with `h = p1 + p2^2 / 2` is an exact
/// contact map whose density is `|grad h|^2 / 4` for alpha = 2.
fn circle_contact_map(n: usize) -> SampledMap {
    SampledMap::from_fn_with_t(Grid::unit_square(n, n).unwrap(), 1, |x, y| {
        let h = x + 0.5 * y * y;
        (vec![h.cos(), h.sin()], -2.0 * h)
    })
    .unwrap()
}

fn qmc(n_points: usize) -> QmcSettings {
    QmcSettings { n_points, seed: 0 }
}

#[test]
fn linear_density_matches_disk_integral() {
    let oracle = disk_average_polar(|w1, _| 2.0 * w1 * w1, 400);
    assert!((oracle - 0.5).abs() < 1e-5);
    let u = linear_isotropic(9);
    let report = pansu_energy(&u, 2.0, PansuSettings::default()).unwrap();
    for d in &report.density {
        assert!((d - oracle).abs() <= 0.005 * oracle);
    }
    let ks = ks_density(&u, (4, 4), 0.1, 2.0, TargetMetric::Gauge, qmc(1 << 16)).unwrap();
    assert!((ks - oracle).abs() <= 0.005 * oracle);
    let ks_cc = ks_density(&u, (4, 4), 0.1, 2.0, TargetMetric::Cc, qmc(1 << 12)).unwrap();
    assert!((ks_cc - oracle).abs() <= 0.02 * oracle);
}

#[test]
fn ks_energy_converges_for_linear_map() {
    let u = linear_isotropic(41);
    let w = bump_weight(u.grid(), 0.05).unwrap();
    let target = 0.5 * integrate(u.grid(), &w);
    let mut values = Vec::new();
    for eps in [0.04, 0.02, 0.01] {
        let r = ks_energy(&u, &w, eps, 2.0, TargetMetric::Gauge, qmc(1 << 12)).unwrap();
        assert!((r.value - target).abs() <= 0.02 * target, "eps {eps}: {} vs {target}", r.value);
        values.push(r.value);
    }
    // linear maps scale exactly with eps
    for v in &values[1..] {
        assert!((v - values[0]).abs() <= 1e-12 * values[0]);
    }
}

#[test]
fn ks_agrees_with_pansu_on_smooth_contact_map() {
    let u = circle_contact_map(51);
    let eps = 0.01;
    let w = bump_weight(u.grid(), eps).unwrap();
    let ks = ks_energy(&u, &w, eps, 2.0, TargetMetric::Gauge, qmc(1 << 12)).unwrap();
    let pansu = pansu_energy(&u, 2.0, PansuSettings { qmc: qmc(1 << 12), legendrian_tol: 1e-3 }).unwrap();
    let weighted: Vec<f64> = pansu.density.iter().zip(&w).map(|(d, w)| d * w).collect();
    let pansu_value = integrate(u.grid(), &weighted);
    // analytic weighted energy
    let grid = u.grid();
    let analytic: Vec<f64> = (0..grid.n_nodes())
        .map(|k| {
            let (_, y) = grid.coords(k % grid.nx, k / grid.nx);
            w[k] * (1.0 + y * y) / 4.0
        })
        .collect();
    let analytic = integrate(grid, &analytic);
    assert!((pansu_value - analytic).abs() <= 0.005 * analytic);
    let rel = (ks.value - pansu_value).abs() / pansu_value;
    assert!(rel <= 0.05, "ks {} pansu {pansu_value} rel {rel}", ks.value);
}

#[test]
fn energies_are_left_invariant() {
    let u = circle_contact_map(21);
    let mut r = rng(31);
    let w = bump_weight(u.grid(), 0.1).unwrap();
    let base_ks = ks_energy(&u, &w, 0.05, 2.0, TargetMetric::Gauge, qmc(1 << 10)).unwrap().value;
    let base_pansu = pansu_energy(&u, 3.0, PansuSettings { qmc: qmc(1 << 10), legendrian_tol: 1e-2 }).unwrap().value;
    let base_h = horizontal_energy(&u, 2.5).unwrap().value;
    for _ in 0..3 {
        let g = random_point(&mut r, 1, 3.0);
        let v = u.left_translate(&g).unwrap();
        let ks = ks_energy(&v, &w, 0.05, 2.0, TargetMetric::Gauge, qmc(1 << 10)).unwrap().value;
        let pansu = pansu_energy(&v, 3.0, PansuSettings { qmc: qmc(1 << 10), legendrian_tol: 1e-2 }).unwrap().value;
        let h = horizontal_energy(&v, 2.5).unwrap().value;
        assert!((ks - base_ks).abs() <= 1e-10 * base_ks, "{ks} vs {base_ks}");
        assert!((pansu - base_pansu).abs() <= 1e-10 * base_pansu);
        assert!((h - base_h).abs() <= 1e-10 * base_h);
    }
}

#[test]
fn horizontal_energy_scales_with_power_alpha() {
    let grid = Grid::spanning(13, 9, -1.0, 0.0, 1.0, 2.0).unwrap();
    let f = |c: f64| move |x: f64, y: f64| vec![c * (x * y).sin(), c * x * x, c * y, c * (x - y).exp()];
    let base = SampledMap::from_fn(grid, 2, f(1.0)).unwrap();
    for alpha in [1.0, 2.0, 3.5] {
        let e = horizontal_energy(&base, alpha).unwrap().value;
        for c in [-2.0, 0.5, 3.0] {
            let scaled = SampledMap::from_fn(grid, 2, f(c)).unwrap();
            let ec = horizontal_energy(&scaled, alpha).unwrap().value;
            let expected = c.abs().powf(alpha) * e;
            assert!((ec - expected).abs() <= 1e-12 * expected);
        }
    }
}

#[test]
fn ks_energy_is_monotone_in_weight() {
    let u = circle_contact_map(21);
    let w2 = bump_weight(u.grid(), 0.1).unwrap();
    let w1: Vec<f64> = w2.iter().enumerate().map(|(k, w)| if k % 3 == 0 { 0.5 * w } else { *w }).collect();
    let w0: Vec<f64> = bump_weight(u.grid(), 0.3).unwrap().iter().map(|w| 0.5 * w).collect();
    assert!(w0.iter().zip(&w1).all(|(a, b)| a <= b));
    let e = |w: &[f64]| ks_energy(&u, w, 0.05, 2.0, TargetMetric::Gauge, qmc(1 << 10)).unwrap().value;
    let (e0, e1, e2) = (e(&w0), e(&w1), e(&w2));
    assert!(e0 <= e1 && e1 <= e2, "{e0} {e1} {e2}");
}

#[test]
fn report_value_is_quadrature_of_density() {
    let u = circle_contact_map(17);
    let w = bump_weight(u.grid(), 0.2).unwrap();
    let reports = [
        ks_energy(&u, &w, 0.1, 2.0, TargetMetric::Cc, qmc(256)).unwrap(),
        pansu_energy(&u, 2.0, PansuSettings { qmc: qmc(1024), legendrian_tol: 1e-2 }).unwrap(),
        horizontal_energy(&u, 4.0).unwrap(),
    ];
    for r in reports {
        let q = integrate(u.grid(), &r.density);
        assert!((q - r.value).abs() <= 1e-12 * q.abs());
        assert!(r.density.iter().all(|d| *d >= 0.0));
    }
}

#[test]
fn constant_and_closed_form_horizontal_energies() {
    let grid = Grid::unit_square(11, 11).unwrap();
    let constant = SampledMap::from_fn(grid, 1, |_, _| vec![1.0, 2.0]).unwrap();
    assert_eq!(horizontal_energy(&constant, 2.0).unwrap().value, 0.0);
    let plane = SampledMap::from_fn(grid, 1, |x, _| vec![x, 0.0]).unwrap();
    assert!((horizontal_energy(&plane, 2.0).unwrap().value - 1.0).abs() < 1e-10);
    let (a, b) = (1.5, -0.7);
    let rect = Grid::spanning(9, 7, 0.0, 0.0, 2.0, 0.5).unwrap();
    let tilted = SampledMap::from_fn(rect, 1, |x, y| vec![a * x + b * y, 0.0]).unwrap();
    let expected = (a * a + b * b) * (a * a + b * b) * 1.0;
    assert!((horizontal_energy(&tilted, 4.0).unwrap().value - expected).abs() < 1e-10);
}
