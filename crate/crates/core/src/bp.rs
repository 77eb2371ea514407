//! Belief-propagation recursions for the frozen-variable fraction.
//!
//! `psi_hat` is the clause update, `psi_dot` the variable update and `psi`
//! their composition. On the degree window the composition has a unique
//! fixed point in `[1/2 - 2^-k, 1/2]`, found here by bisection.

use serde::Serialize;

use crate::error::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Clause size `k` and (real) variable degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub k: u32,
    pub d: f64,
}

impl ModelParams {
    pub fn new(k: u32, d: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!("k must be >= 3, got {k}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidParameter(format!("d must be positive, got {d}")));
        }
        Ok(ModelParams { k, d })
    }

    /// Clause density m/n = d/k.
    pub fn alpha(&self) -> f64 {
        self.d / self.k as f64
    }

    pub fn window(&self) -> DegreeWindow {
        DegreeWindow::for_k(self.k)
    }

    /// Left end of the search interval, `1/2 - 2^-k`.
    pub fn x_min(&self) -> f64 {
        0.5 - (-(self.k as f64)).exp2()
    }
}

/// Degrees between which the fixed point and the sign change of the
/// threshold function are guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeWindow {
    pub d_lbd: f64,
    pub d_ubd: f64,
}

impl DegreeWindow {
    pub fn for_k(k: u32) -> Self {
        let kf = k as f64;
        match k {
            0..=2 => panic!("degree window is defined for k >= 3"),
            3 => DegreeWindow { d_lbd: 6.74, d_ubd: 7.5 },
            4 => DegreeWindow { d_lbd: 16.7, d_ubd: 32.0 * LN2 },
            _ => {
                let half = (kf - 1.0).exp2();
                DegreeWindow {
                    d_lbd: (half - 2.0) * kf * LN2,
                    d_ubd: half * kf * LN2,
                }
            }
        }
    }

    pub fn contains(&self, d: f64) -> bool {
        let slack = 1e-12 * self.d_ubd;
        d >= self.d_lbd - slack && d <= self.d_ubd + slack
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.d_lbd + self.d_ubd)
    }
}

/// `v^e` for `v` in [0,1] and real `e > 0`, with `0^e = 0`.
pub(crate) fn pow_unit(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        (e * v.ln()).exp()
    }
}

/// Clause recursion `(1 - 2x^(k-1)) / (1 - x^(k-1))`.
pub fn psi_hat(k: u32, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("psi_hat needs 0 <= x < 1, got {x}")));
    }
    let y = x.powi(k as i32 - 1);
    Ok((1.0 - 2.0 * y) / (1.0 - y))
}

/// Variable recursion `(1 - v^(d-1)) / (2 - v^(d-1))`, valued in [0, 1/2].
pub fn psi_dot(d: f64, v: f64) -> f64 {
    let w = pow_unit(v, d - 1.0);
    (1.0 - w) / (2.0 - w)
}

pub fn psi(params: ModelParams, x: f64) -> Result<f64> {
    Ok(psi_dot(params.d, psi_hat(params.k, x)?))
}

/// Closed-form derivative of `psi`:
/// `(k-1)(d-1) v^(d-2) (2-v)(1-v) / (2 - v^(d-1))^2 / x` with `v = psi_hat(x)`.
pub fn psi_derivative(params: ModelParams, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(Error::Domain(format!("psi_derivative needs 0 < x <= 1/2, got {x}")));
    }
    let ModelParams { k, d } = params;
    let v = psi_hat(k, x)?;
    let w = pow_unit(v, d - 1.0);
    let num = (k as f64 - 1.0) * (d - 1.0) * pow_unit(v, d - 2.0) * (2.0 - v) * (1.0 - v);
    Ok(num / ((2.0 - w) * (2.0 - w)) / x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BpFixedPoint {
    pub x: f64,
    /// `|psi(x) - x|`
    pub residual: f64,
    /// Final bisection interval.
    pub bracket: (f64, f64),
    /// Grid estimate of `max |psi'|` over the search interval.
    pub max_derivative: f64,
    /// Limits of plain iteration started from each end of the interval.
    pub iteration_witness: (f64, f64),
}

const MAX_ITER: usize = 200_000;

/// Iterate `psi` from `x0` until successive steps fall below `step_tol`.
pub fn iterate_psi(params: ModelParams, x0: f64, step_tol: f64, max_iter: usize) -> Result<f64> {
    let mut x = x0;
    for _ in 0..max_iter {
        let next = psi(params, x)?;
        if (next - x).abs() <= step_tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        what: format!("psi iteration from {x0} (k={}, d={})", params.k, params.d),
    })
}

/// Solve `psi(x) = x` on `[1/2 - 2^-k, 1/2]`.
///
/// Bisection is run after checking `g = psi - id` is positive on the left and
/// negative on the right. Iteration from both endpoints must land within
/// `10 * tol` of the bisection answer.
pub fn solve_fixed_point(params: ModelParams, tol: f64) -> Result<BpFixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let window = params.window();
    if !window.contains(params.d) {
        return Err(Error::InvalidParameter(format!(
            "d = {} is outside the degree window [{}, {}] for k = {}",
            params.d, window.d_lbd, window.d_ubd, params.k
        )));
    }
    let g = |x: f64| psi(params, x).map(|p| p - x);
    let (left, right) = (params.x_min(), 0.5);
    let (g_left, g_right) = (g(left)?, g(right)?);
    if !(g_left > 0.0 && g_right < 0.0) {
        return Err(Error::Bracket {
            k: params.k,
            d: params.d,
            left,
            right,
            g_left,
            g_right,
        });
    }

    let (mut lo, mut hi) = (left, right);
    let mut iterations = 0;
    while hi - lo > 0.25 * tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 2000 {
            return Err(Error::NoConvergence {
                iterations,
                what: "fixed-point bisection".into(),
            });
        }
    }
    let x = 0.5 * (lo + hi);
    let residual = g(x)?.abs();
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            what: format!("fixed-point residual {residual:e} above tol {tol:e}"),
        });
    }

    let step_tol = 0.01 * tol;
    let from_left = iterate_psi(params, left, step_tol, MAX_ITER)?;
    let from_right = iterate_psi(params, right, step_tol, MAX_ITER)?;
    if (from_left - x).abs() > 10.0 * tol || (from_right - x).abs() > 10.0 * tol {
        return Err(Error::NoConvergence {
            iterations: MAX_ITER,
            what: format!(
                "iteration limits {from_left} and {from_right} disagree with bisection root {x}"
            ),
        });
    }

    Ok(BpFixedPoint {
        x,
        residual,
        bracket: (lo, hi),
        max_derivative: contraction_certificate(params, 1000)?,
        iteration_witness: (from_left, from_right),
    })
}

/// Max of `|psi'|` over a uniform grid (endpoints included) on
/// `[1/2 - 2^-k, 1/2]`. A grid estimate, not a proof.
pub fn contraction_certificate(params: ModelParams, grid_size: usize) -> Result<f64> {
    if grid_size < 1000 {
        return Err(Error::InvalidParameter(format!(
            "grid_size must be >= 1000, got {grid_size}"
        )));
    }
    let a = params.x_min();
    let step = (0.5 - a) / (grid_size - 1) as f64;
    let mut best: f64 = 0.0;
    for i in 0..grid_size {
        let x = if i + 1 == grid_size { 0.5 } else { a + i as f64 * step };
        best = best.max(psi_derivative(params, x)?.abs());
    }
    Ok(best)
}
