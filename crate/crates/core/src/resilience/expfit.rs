//! Least-squares fit of `y = a * exp(b * t) + c`.
//!
//! Each start fixes a trial rate `b0`, solves the linear problem for
//! `(a, c)` exactly, then refines all three parameters with damped
//! Gauss-Newton steps. The damping follows the usual Levenberg-Marquardt
//! schedule: the diagonal of `J'WJ` is scaled by `1 + lambda`, `lambda`
//! shrinks by 10x after an accepted step and grows by 10x after a rejected
//! one. The best converged start wins; equal SSEs keep the earlier start.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::FitError;

/// Trial rates, in start order.
pub const START_RATES: [f64; 8] = [0.1, -0.1, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0];

/// Relative gradient (cosine between the residual vector and each
/// Jacobian column) below which a fit counts as converged.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;

const MAX_ITERATIONS: usize = 2_000;
const MAX_RATE: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExpParams {
    pub fn eval(&self, t: f64) -> f64 {
        self.a * (self.b * t).exp() + self.c
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub params: ExpParams,
    pub sse: f64,
    /// Index into [`START_RATES`] of the winning start; `None` for the
    /// constant-data shortcut.
    pub start: Option<usize>,
    pub iterations: usize,
    pub relative_gradient: f64,
}

/// Weighted sum of squared residuals.
pub fn sse(params: &ExpParams, ts: &[f64], ys: &[f64], ws: &[f64]) -> f64 {
    ts.iter()
        .zip(ys)
        .zip(ws)
        .map(|((&t, &y), &w)| {
            let r = y - params.eval(t);
            w * r * r
        })
        .sum()
}

/// Analytic gradient of the weighted SSE with respect to `(a, b, c)`.
pub fn sse_gradient(params: &ExpParams, ts: &[f64], ys: &[f64], ws: &[f64]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for ((&t, &y), &w) in ts.iter().zip(ys).zip(ws) {
        let e = (params.b * t).exp();
        let r = y - (params.a * e + params.c);
        g[0] += -2.0 * w * r * e;
        g[1] += -2.0 * w * r * params.a * t * e;
        g[2] += -2.0 * w * r;
    }
    g
}

fn is_constant(ys: &[f64]) -> bool {
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    let scale = lo.abs().max(hi.abs()).max(1.0);
    hi - lo <= 1e-12 * scale
}

/// Weighted linear regression of `y` on `exp(b t)` with intercept.
fn linear_start(b: f64, ts: &[f64], ys: &[f64], ws: &[f64]) -> Option<(f64, f64)> {
    let mut m = Matrix2::<f64>::zeros();
    let mut v = Vector2::<f64>::zeros();
    for ((&t, &y), &w) in ts.iter().zip(ys).zip(ws) {
        let e = (b * t).exp();
        m[(0, 0)] += w * e * e;
        m[(0, 1)] += w * e;
        m[(1, 1)] += w;
        v[0] += w * e * y;
        v[1] += w * y;
    }
    m[(1, 0)] = m[(0, 1)];
    let sol = m.lu().solve(&v)?;
    (sol[0].is_finite() && sol[1].is_finite()).then_some((sol[0], sol[1]))
}

struct Normal {
    jtj: Matrix3<f64>,
    jtr: Vector3<f64>,
    col_norm2: Vector3<f64>,
    sse: f64,
}

fn normal_equations(p: &ExpParams, ts: &[f64], ys: &[f64], ws: &[f64]) -> Normal {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    let mut sse = 0.0;
    for ((&t, &y), &w) in ts.iter().zip(ys).zip(ws) {
        let e = (p.b * t).exp();
        let j = Vector3::new(e, p.a * t * e, 1.0);
        let r = y - (p.a * e + p.c);
        jtj += w * j * j.transpose();
        jtr += w * r * j;
        sse += w * r * r;
    }
    Normal {
        col_norm2: jtj.diagonal(),
        jtj,
        jtr,
        sse,
    }
}

fn relative_gradient(n: &Normal) -> f64 {
    if n.sse <= 0.0 {
        return 0.0;
    }
    let rnorm = n.sse.sqrt();
    (0..3)
        .map(|j| {
            let cn = n.col_norm2[j].sqrt();
            if cn == 0.0 {
                0.0
            } else {
                n.jtr[j].abs() / (cn * rnorm)
            }
        })
        .fold(0.0, f64::max)
}

struct Refined {
    params: ExpParams,
    sse: f64,
    iterations: usize,
    relative_gradient: f64,
    converged: bool,
}

fn refine(start: ExpParams, ts: &[f64], ys: &[f64], ws: &[f64], sse_floor: f64) -> Refined {
    let mut p = start;
    let mut normal = normal_equations(&p, ts, ys, ws);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    loop {
        let rg = relative_gradient(&normal);
        if rg <= GRADIENT_TOLERANCE || normal.sse <= sse_floor {
            return Refined {
                params: p,
                sse: normal.sse,
                iterations,
                relative_gradient: rg,
                converged: true,
            };
        }
        if iterations >= MAX_ITERATIONS || lambda > 1e16 || !p.is_finite() || p.b.abs() > MAX_RATE {
            return Refined {
                params: p,
                sse: normal.sse,
                iterations,
                relative_gradient: rg,
                converged: false,
            };
        }
        iterations += 1;

        let mut damped = normal.jtj;
        for j in 0..3 {
            damped[(j, j)] += lambda * normal.col_norm2[j].max(1e-300);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&normal.jtr)) else {
            lambda *= 10.0;
            continue;
        };
        let trial = ExpParams {
            a: p.a + step[0],
            b: p.b + step[1],
            c: p.c + step[2],
        };
        if !trial.is_finite() {
            lambda *= 10.0;
            continue;
        }
        let trial_normal = normal_equations(&trial, ts, ys, ws);
        if trial_normal.sse.is_finite() && trial_normal.sse < normal.sse {
            let small_step = step
                .iter()
                .zip([p.a, p.b, p.c])
                .all(|(s, x)| s.abs() <= 1e-15 * (x.abs() + 1e-15));
            p = trial;
            normal = trial_normal;
            lambda = (lambda / 10.0).max(1e-15);
            if small_step {
                let rg = relative_gradient(&normal);
                return Refined {
                    params: p,
                    sse: normal.sse,
                    iterations,
                    relative_gradient: rg,
                    converged: rg <= GRADIENT_TOLERANCE,
                };
            }
        } else {
            lambda *= 10.0;
        }
    }
}

/// Fit with equal weights.
pub fn fit_exponential(ts: &[f64], ys: &[f64]) -> Result<ExpFit, FitError> {
    let ws = vec![1.0; ts.len()];
    fit_exponential_weighted(ts, ys, &ws)
}

/// Fit minimizing `sum w_i (y_i - a e^{b t_i} - c)^2`.
///
/// Constant data returns `a = 0, b = 0, c = y` by convention. At least four
/// points are required.
pub fn fit_exponential_weighted(ts: &[f64], ys: &[f64], ws: &[f64]) -> Result<ExpFit, FitError> {
    assert!(ts.len() == ys.len() && ts.len() == ws.len());
    let fail = |reason: String, best: Option<(ExpParams, f64)>| FitError {
        family: "exponential",
        reason,
        best,
    };
    if ts.len() < 4 {
        return Err(fail(
            format!("{} points, at least 4 required", ts.len()),
            None,
        ));
    }
    if ts.iter().chain(ys).chain(ws).any(|v| !v.is_finite()) || ws.iter().any(|&w| w < 0.0) {
        return Err(fail("non-finite input".into(), None));
    }
    let wsum: f64 = ws.iter().sum();
    if is_constant(ys) {
        let c = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
        let params = ExpParams { a: 0.0, b: 0.0, c };
        return Ok(ExpFit {
            params,
            sse: sse(&params, ts, ys, ws),
            start: None,
            iterations: 0,
            relative_gradient: 0.0,
        });
    }

    let ymean = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let tss: f64 = ys
        .iter()
        .zip(ws)
        .map(|(y, w)| w * (y - ymean) * (y - ymean))
        .sum();
    let sse_floor = 1e-28 * tss;

    let mut best: Option<ExpFit> = None;
    let mut best_any: Option<(ExpParams, f64)> = None;
    for (idx, &b0) in START_RATES.iter().enumerate() {
        let Some((a0, c0)) = linear_start(b0, ts, ys, ws) else {
            continue;
        };
        let r = refine(
            ExpParams {
                a: a0,
                b: b0,
                c: c0,
            },
            ts,
            ys,
            ws,
            sse_floor,
        );
        if r.sse.is_finite() && best_any.is_none_or(|(_, s)| r.sse < s) {
            best_any = Some((r.params, r.sse));
        }
        if r.converged && best.is_none_or(|b| r.sse < b.sse) {
            best = Some(ExpFit {
                params: r.params,
                sse: r.sse,
                start: Some(idx),
                iterations: r.iterations,
                relative_gradient: r.relative_gradient,
            });
        }
    }
    best.ok_or_else(|| fail("no start converged".into(), best_any))
}
