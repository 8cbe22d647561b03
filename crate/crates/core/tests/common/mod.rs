#![allow(dead_code)]

use heisenberg::{BoundaryData, Grid};
use serde::Deserialize;

#[derive(Deserialize)]
pub struct DirichletFixture {
    pub grid: Grid,
    pub boundary: BoundaryData,
    pub oracle_energy: f64,
    pub oracle_interior: Vec<Vec<f64>>,
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn dirichlet_fixture() -> DirichletFixture {
    let text = std::fs::read_to_string(fixture_path("dirichlet_5x5.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

use heisenberg::HPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point<R: Rng>(rng: &mut R, m: usize, half_width: f64) -> HPoint {
    let c: Vec<f64> = (0..2 * m + 1).map(|_| rng.gen_range(-half_width..half_width)).collect();
    HPoint::from_slice(&c).unwrap()
}

/// `f(tau) = (1 - cos tau) / (tau - sin tau)`, with Taylor series of the
/// numerator and denominator for small arguments.
pub fn f_reference(tau: f64) -> f64 {
    if tau < 0.5 {
        let t2 = tau * tau;
        let (mut num, mut den) = (0.0, 0.0);
        let (mut a, mut b) = (0.5, tau / 6.0);
        for k in 1..20 {
            num += a;
            den += b;
            let k = k as f64;
            a *= -t2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            b *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        num / den
    } else {
        (1.0 - tau.cos()) / (tau - tau.sin())
    }
}

pub fn det3(a: [[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Central-difference Jacobian determinant of `f: R^3 -> R^3`.
pub fn fd_det<F: Fn([f64; 3]) -> [f64; 3]>(f: F, at: [f64; 3], h: f64) -> f64 {
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let (mut plus, mut minus) = (at, at);
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (f(plus), f(minus));
        for row in 0..3 {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    det3(jac)
}

pub fn coords3(p: &HPoint) -> [f64; 3] {
    [p.x()[0], p.y()[0], p.t()]
}

/// Average of `g` over the unit disk by a polar midpoint rule.
pub fn disk_average_polar<G: Fn(f64, f64) -> f64>(g: G, n: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        let r = (i as f64 + 0.5) / n as f64;
        for j in 0..4 * n {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / (4 * n) as f64;
            total += g(r * th.cos(), r * th.sin()) * r;
        }
    }
    total * (1.0 / n as f64) * (2.0 * std::f64::consts::PI / (4 * n) as f64) / std::f64::consts::PI
}

/// Bilinear-cell energy `int |grad z|^2` by 2x2 Gauss quadrature on
/// node-major `z`.
pub fn q1_dirichlet_energy(grid: &Grid, m: usize, z: &[f64]) -> f64 {
    let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let w2 = 2 * m;
    let mut total = 0.0;
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let k00 = grid.index(i, j);
            let (k10, k01, k11) = (k00 + 1, k00 + grid.nx, k00 + grid.nx + 1);
            for &a in &g {
                for &b in &g {
                    for c in 0..w2 {
                        let f = |k: usize| z[k * w2 + c];
                        let d1 = ((f(k10) - f(k00)) * (1.0 - b) + (f(k11) - f(k01)) * b) / grid.hx;
                        let d2 = ((f(k01) - f(k00)) * (1.0 - a) + (f(k11) - f(k10)) * a) / grid.hy;
                        total += 0.25 * grid.hx * grid.hy * (d1 * d1 + d2 * d2);
                    }
                }
            }
        }
    }
    total
}

/// Cell-centre isotropy residuals of node-major `z`.
pub fn cell_residuals(grid: &Grid, m: usize, z: &[f64]) -> Vec<f64> {
    let w2 = 2 * m;
    let mut out = Vec::new();
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let k00 = grid.index(i, j);
            let (k10, k01, k11) = (k00 + 1, k00 + grid.nx, k00 + grid.nx + 1);
            let d = |c: usize| {
                let f = |k: usize| z[k * w2 + c];
                (
                    (f(k10) - f(k00) + f(k11) - f(k01)) / (2.0 * grid.hx),
                    (f(k01) - f(k00) + f(k11) - f(k10)) / (2.0 * grid.hy),
                )
            };
            let r: f64 = (0..m)
                .map(|k| {
                    let (x1, x2) = d(k);
                    let (y1, y2) = d(m + k);
                    x1 * y2 - x2 * y1
                })
                .sum();
            out.push(r);
        }
    }
    out
}

/// Solves the symmetric positive definite system `a x = b` in place by
/// Cholesky factorisation.
fn cholesky_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for j in 0..n {
        for k in 0..j {
            let l = a[j][k];
            for i in j..n {
                a[i][j] -= a[i][k] * l;
            }
        }
        let d = a[j][j].sqrt();
        for i in j..n {
            a[i][j] /= d;
        }
    }
    for i in 0..n {
        for k in 0..i {
            b[i] -= a[i][k] * b[k];
        }
        b[i] /= a[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            b[i] -= a[k][i] * b[k];
        }
        b[i] /= a[i][i];
    }
    b
}

/// Gauss-Newton projection of `z` onto the discrete isotropic set, moving
/// only entries with `free[k]`. Returns the final residual norm.
pub fn project_isotropic(grid: &Grid, m: usize, z: &mut [f64], free: &[bool]) -> f64 {
    let cols: Vec<usize> = (0..z.len()).filter(|&k| free[k]).collect();
    for _ in 0..50 {
        let r = cell_residuals(grid, m, z);
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return norm;
        }
        // Jacobian by central differences (exact for a quadratic)
        let h = 1e-4;
        let jac: Vec<Vec<f64>> = cols
            .iter()
            .map(|&c| {
                let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
                zp[c] += h;
                zm[c] -= h;
                let (rp, rm) = (cell_residuals(grid, m, &zp), cell_residuals(grid, m, &zm));
                rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            })
            .collect();
        let nr = r.len();
        let mut jjt = vec![vec![0.0; nr]; nr];
        for col in &jac {
            for a in 0..nr {
                for b in 0..nr {
                    jjt[a][b] += col[a] * col[b];
                }
            }
        }
        for (a, row) in jjt.iter_mut().enumerate() {
            row[a] += 1e-12;
        }
        let y = cholesky_solve(jjt, r);
        for (col, &c) in jac.iter().zip(&cols) {
            z[c] -= col.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    let r = cell_residuals(grid, m, z);
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn heisenberg_cli(args: &[&str]) -> CliRun {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_heisenberg"))
        .args(args)
        .output()
        .expect("binary runs");
    CliRun {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn fixture(name: &str) -> String {
    fixture_path(name).display().to_string()
}

/// Value of `key` in a two-column `name value` table.
pub fn table_value(stdout: &str, key: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no '{key}' in {stdout}"))
}

/// Manifest JSON with the wall-clock entry removed.
pub fn manifest_without_time(path: &std::path::Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s").expect("wall time recorded");
    v
}
