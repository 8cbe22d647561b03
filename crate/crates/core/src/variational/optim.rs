//! Unconstrained minimisation over the free entries of a vector.

use std::collections::VecDeque;

/// Outcome of an inner solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct InnerOutcome {
    pub iterations: usize,
    pub value: f64,
    /// `max |grad|` over free entries, divided by `grad_scale`.
    pub grad_norm: f64,
}

pub(crate) struct LbfgsOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub memory: usize,
    /// Divides the raw gradient before the stopping test.
    pub grad_scale: f64,
}

fn masked_inf_norm(g: &[f64], free: &[bool]) -> f64 {
    g.iter()
        .zip(free)
        .filter(|(_, &f)| f)
        .fold(0.0_f64, |a, (v, _)| a.max(v.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L-BFGS with backtracking on the Armijo or approximate Wolfe conditions. `f(x, grad)` returns the value and
/// writes the full gradient; entries with `free[k] == false` never move.
pub(crate) fn lbfgs<F>(mut f: F, x: &mut [f64], free: &[bool], opts: &LbfgsOptions) -> InnerOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut fx = f(x, &mut g);
    mask(&mut g, free);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let gnorm = masked_inf_norm(&g, free) / opts.grad_scale;
        if gnorm <= opts.tol {
            return InnerOutcome {
                iterations,
                value: fx,
                grad_norm: gnorm,
            };
        }

        // Two-loop recursion.
        dir.iter_mut().zip(&g).for_each(|(d, g)| *d = -g);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &dir);
            dir.iter_mut().zip(y).for_each(|(d, y)| *d -= a * y);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            dir.iter_mut().for_each(|d| *d *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &dir);
            dir.iter_mut().zip(s).for_each(|(d, s)| *d += (a - b) * s);
        }
        mask(&mut dir, free);

        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir.iter_mut().zip(&g).for_each(|(d, g)| *d = -g);
            slope = dot(&g, &dir);
        }
        let mut step = if history.is_empty() {
            let dn = dot(&dir, &dir).sqrt();
            (1.0 / dn).min(1.0)
        } else {
            1.0
        };

        let mut accepted = false;
        for _ in 0..60 {
            x_new.iter_mut().zip(x.iter().zip(&dir)).for_each(|(xn, (x, d))| *xn = x + step * d);
            let f_new = f(&x_new, &mut g_new);
            let armijo = f_new <= fx + 1e-4 * step * slope;
            // Approximate Wolfe test: near a minimiser the Armijo decrease is
            // below the rounding error of f, so trust the directional
            // derivative instead.
            let approx_wolfe = || {
                let slope_new = dot(&g_new, &dir);
                f_new <= fx + 1e-14 * (1.0 + fx.abs())
                    && slope_new <= (2.0 * 1e-4 - 1.0) * slope
                    && slope_new >= 0.9 * slope
            };
            if armijo || approx_wolfe() {
                mask(&mut g_new, free);
                let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-16 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
                x.copy_from_slice(&x_new);
                g.copy_from_slice(&g_new);
                fx = f_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted {
            if history.is_empty() {
                // No descent possible at working precision.
                break;
            }
            history.clear();
        }
    }
    InnerOutcome {
        iterations,
        value: fx,
        grad_norm: masked_inf_norm(&g, free) / opts.grad_scale,
    }
}

fn mask(v: &mut [f64], free: &[bool]) {
    v.iter_mut().zip(free).for_each(|(v, &f)| {
        if !f {
            *v = 0.0
        }
    });
}

/// Conjugate gradients for a convex quadratic given only its gradient map:
/// minimises over the free entries of `x`, starting from `x`.
pub(crate) fn cg_quadratic<F>(mut grad: F, x: &mut [f64], free: &[bool], rel_tol: f64, max_iters: usize)
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = x.len();
    let mut r = vec![0.0; n];
    grad(x, &mut r);
    r.iter_mut().for_each(|v| *v = -*v);
    mask(&mut r, free);
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let r0 = rr.sqrt();
    if r0 == 0.0 {
        return;
    }
    // A p = grad(x + p) - grad(x) for a quadratic.
    let mut g0 = vec![0.0; n];
    let mut g1 = vec![0.0; n];
    let zero = vec![0.0; n];
    grad(&zero, &mut g0);
    let mut probe = vec![0.0; n];
    for _ in 0..max_iters {
        if rr.sqrt() <= rel_tol * r0 {
            break;
        }
        probe.copy_from_slice(&p);
        grad(&probe, &mut g1);
        let mut ap: Vec<f64> = g1.iter().zip(&g0).map(|(a, b)| a - b).collect();
        mask(&mut ap, free);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, a)| *r -= alpha * a);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        p.iter_mut().zip(&r).for_each(|(p, r)| *p = r + beta * *p);
        rr = rr_new;
    }
}
