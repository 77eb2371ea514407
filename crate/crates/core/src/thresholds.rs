//! The threshold function `phi_star(d)`, its largest zero `d_star(k)` and the
//! first-moment threshold `d_1(k)`.

use serde::Serialize;

use crate::bp::{solve_fixed_point, DegreeWindow, ModelParams};
use crate::error::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Number of downward scan steps across the degree window.
pub const SCAN_STEPS: usize = 1000;

/// Fixed-point tolerance used inside `d_star` scans.
pub const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub k: u32,
    pub d_star: f64,
    pub d_first_moment: f64,
    pub window: DegreeWindow,
    pub tol: f64,
    pub ceil_d_star: u64,
    pub ceil_d1: u64,
    /// Every scan cell `(d_low, d_high)` on which `phi_star` changed sign,
    /// highest first. Diagnostic only.
    pub sign_changes: Vec<(f64, f64)>,
}

pub fn degree_window(k: u32) -> DegreeWindow {
    DegreeWindow::for_k(k)
}

/// `-ln(1-x) - d(1 - 1/k - 1/d) ln(1 - 2x^k) + (d-1) ln(1 - x^(k-1))`
pub fn phi(params: ModelParams, x: f64) -> Result<f64> {
    let ModelParams { k, d } = params;
    if !(x > 0.0 && x <= 0.5) {
        return Err(Error::Domain(format!("phi needs 0 < x <= 1/2, got {x}")));
    }
    let xk1 = x.powi(k as i32 - 1);
    let a = 1.0 - x;
    let b = 1.0 - 2.0 * xk1 * x;
    let c = 1.0 - xk1;
    if a <= 0.0 || b <= 0.0 || c <= 0.0 {
        return Err(Error::Domain(format!("phi: non-positive log argument at x = {x}")));
    }
    let kf = k as f64;
    Ok(-a.ln() - d * (1.0 - 1.0 / kf - 1.0 / d) * b.ln() + (d - 1.0) * c.ln())
}

/// `phi` evaluated at the fixed point `x(k, d)`.
pub fn phi_star(params: ModelParams, tol: f64) -> Result<f64> {
    let fp = solve_fixed_point(params, tol)?;
    phi(params, fp.x)
}

/// `k ln 2 / -ln(1 - 2^(1-k))`
pub fn d_first_moment(k: u32) -> f64 {
    let kf = k as f64;
    kf * LN2 / -(-(2f64.powf(1.0 - kf))).ln_1p()
}

fn phi_star_at(k: u32, d: f64) -> Result<f64> {
    phi_star(ModelParams::new(k, d)?, INNER_TOL)
}

/// Largest zero of `phi_star` in the degree window.
///
/// Scans downward from `d_ubd` in `SCAN_STEPS` steps, takes the first cell
/// where the sign goes from negative (above) to positive (below), and bisects
/// it to `tol`. All sign changes seen over the full scan are reported.
pub fn d_star(k: u32, tol: f64) -> Result<ThresholdReport> {
    if !(3..=20).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must be in [3, 20], got {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let window = degree_window(k);
    let step = (window.d_ubd - window.d_lbd) / SCAN_STEPS as f64;
    let grid = |i: usize| {
        if i == SCAN_STEPS {
            window.d_lbd
        } else {
            window.d_ubd - i as f64 * step
        }
    };

    let mut sign_changes = Vec::new();
    let mut root_cell = None;
    let mut prev = phi_star_at(k, grid(0))?;
    for i in 1..=SCAN_STEPS {
        let cur = phi_star_at(k, grid(i))?;
        if (prev < 0.0) != (cur < 0.0) {
            sign_changes.push((grid(i), grid(i - 1)));
            if root_cell.is_none() && prev < 0.0 && cur >= 0.0 {
                root_cell = Some((grid(i), grid(i - 1)));
            }
        }
        prev = cur;
    }
    let (mut lo, mut hi) = root_cell.ok_or(Error::NoRoot { k })?;

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi_star_at(k, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d_star = 0.5 * (lo + hi);
    let d1 = d_first_moment(k);
    Ok(ThresholdReport {
        k,
        d_star,
        d_first_moment: d1,
        window,
        tol,
        ceil_d_star: d_star.ceil() as u64,
        ceil_d1: d1.ceil() as u64,
        sign_changes,
    })
}

/// `d_star/k - (2^(k-1) - 1/2 - 1/(4 ln 2)) ln 2` for an already computed `d_star`.
pub fn asymptotic_gap_from(k: u32, d_star: f64) -> f64 {
    let kf = k as f64;
    d_star / kf - ((kf - 1.0).exp2() - 0.5 - 0.25 / LN2) * LN2
}

pub fn asymptotic_gap(k: u32, tol: f64) -> Result<f64> {
    Ok(asymptotic_gap_from(k, d_star(k, tol)?.d_star))
}

/// Threshold reports for k = 3..=15, ordered by k.
pub fn table_one(tol: f64) -> Result<Vec<ThresholdReport>> {
    (3..=15).map(|k| d_star(k, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: u32, d: f64) -> ModelParams {
        ModelParams::new(k, d).unwrap()
    }

    /// Independent route to `d_star`: parametrize the fixed-point curve by x.
    /// At a fixed point `v^(d-1) = (1-2x)/(1-x)` with `v = psi_hat(x)`, which
    /// gives `d(x)` explicitly; then bisect `phi(d(x), x)` in x.
    fn d_star_by_x(k: u32) -> f64 {
        let kf = k as f64;
        let d_of = |x: f64| {
            let v = (1.0 - 2.0 * x.powf(kf - 1.0)) / (1.0 - x.powf(kf - 1.0));
            1.0 + ((1.0 - 2.0 * x) / (1.0 - x)).ln() / v.ln()
        };
        let f = |x: f64| {
            let d = d_of(x);
            -(1.0 - x).ln() - d * (1.0 - 1.0 / kf - 1.0 / d) * (1.0 - 2.0 * x.powf(kf)).ln()
                + (d - 1.0) * (1.0 - x.powf(kf - 1.0)).ln()
        };
        let w = degree_window(k);
        // d(x) increases in x; locate the x-range that maps onto the window.
        let x_for = |target: f64| {
            let (mut a, mut b) = (0.5 - (-kf).exp2(), 0.5 - 1e-15);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if d_of(m) < target {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let (mut lo, mut hi) = (x_for(w.d_lbd), x_for(w.d_ubd));
        assert!(f(lo) > 0.0 && f(hi) < 0.0, "k={k}: f({lo})={}, f({hi})={}", f(lo), f(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        d_of(0.5 * (lo + hi))
    }

    #[test]
    fn phi_examples() {
        assert!(phi(p(3, 6.74), 0.4464).unwrap() > 4e-5);
        assert!(phi(p(3, 7.5), 0.48).unwrap() < -0.04);
        assert!(phi(p(4, 32.0 * LN2), 7.0 / 16.0).unwrap() < -0.08);
        assert!(phi(p(3, 7.0), 0.0).is_err());
    }

    #[test]
    fn phi_star_endpoint_signs() {
        assert!(phi_star(p(3, 6.74), 1e-12).unwrap() > 0.0);
        assert!(phi_star(p(3, 7.5), 1e-12).unwrap() < 0.0);
        for k in 3..=15 {
            let w = degree_window(k);
            assert!(phi_star(p(k, w.d_lbd), 1e-13).unwrap() > 0.0, "k={k}");
            assert!(phi_star(p(k, w.d_ubd), 1e-13).unwrap() < 0.0, "k={k}");
        }
    }

    #[test]
    fn first_moment_threshold() {
        assert!((d_first_moment(3) - 7.228).abs() < 1e-3);
        assert_eq!(d_first_moment(3).ceil(), 8.0);
        assert_eq!(d_first_moment(4).ceil(), 21.0);
        assert_eq!(d_first_moment(12).ceil(), 17031.0);
    }

    #[test]
    fn d_star_small_rows() {
        let r3 = d_star(3, 1e-9).unwrap();
        assert_eq!(r3.ceil_d_star, 7);
        assert_eq!(r3.ceil_d1, 8);
        assert_eq!(d_star(10, 1e-9).unwrap().ceil_d_star, 3543);
        let r7 = d_star(7, 1e-9).unwrap();
        assert_eq!((r7.ceil_d_star, r7.ceil_d1), (307, 309));
        let r11 = d_star(11, 1e-9).unwrap();
        assert_eq!((r11.ceil_d_star, r11.ceil_d1), (7802, 7804));
    }

    #[test]
    fn d_star_matches_x_parametrized_oracle() {
        for k in 3..=15 {
            let r = d_star(k, 1e-9).unwrap();
            let oracle = d_star_by_x(k);
            assert!(
                (r.d_star - oracle).abs() < 1e-6 * oracle,
                "k={k}: {} vs {oracle}",
                r.d_star
            );
        }
    }

    #[test]
    fn report_invariants() {
        for k in 3..=15 {
            let r = d_star(k, 1e-9).unwrap();
            assert!(r.window.d_lbd < r.d_star && r.d_star < r.window.d_ubd);
            assert!(r.d_star < r.d_first_moment);
            assert!(phi_star(p(k, r.d_star + 1e-6 * r.d_star), INNER_TOL).unwrap() < 0.0);
            assert!(phi_star(p(k, r.d_star - 1e-6 * r.d_star), INNER_TOL).unwrap() >= 0.0);
            assert_eq!(r.sign_changes.len(), 1, "k={k}");
        }
    }

    #[test]
    fn gap_to_first_moment_tends_to_quarter_k() {
        let mut prev = f64::INFINITY;
        for k in 8..=15 {
            let r = d_star(k, 1e-9).unwrap();
            let ratio = (r.d_first_moment - r.d_star) / k as f64;
            assert!((ratio - 0.25).abs() < 0.01, "k={k}: {ratio}");
            assert!(ratio < prev, "k={k}");
            prev = ratio;
        }
    }

    #[test]
    fn asymptotic_gap_shrinks() {
        let gaps: Vec<f64> = (8..=15).map(|k| asymptotic_gap(k, 1e-9).unwrap()).collect();
        for w in gaps.windows(2) {
            assert!(w[1].abs() < w[0].abs());
        }
        assert!(gaps.last().unwrap().abs() < 1.0);
        assert!(asymptotic_gap(3, 1e-9).unwrap().is_finite());
    }

    #[test]
    fn phi_star_continuous() {
        for k in [3, 5, 9] {
            let w = degree_window(k);
            let h = 1e-6 * (w.d_ubd - w.d_lbd);
            for i in 0..20 {
                let d = w.d_lbd + (w.d_ubd - w.d_lbd - h) * i as f64 / 19.0;
                let a = phi_star(p(k, d), INNER_TOL).unwrap();
                let b = phi_star(p(k, d + h), INNER_TOL).unwrap();
                assert!((a - b).abs() < 1e-5, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn phi_uniform_signs_on_interval() {
        for k in 4..=15 {
            let w = degree_window(k);
            let lower = p(k, w.d_lbd);
            let upper = p(k, w.d_ubd);
            let a = lower.x_min();
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=200 {
                let x = a + (0.5 - a) * i as f64 / 200.0;
                assert!(phi(lower, x).unwrap() > 0.0, "k={k} x={x}");
                if k >= 5 {
                    let y = phi(upper, x).unwrap();
                    assert!(y > prev, "k={k} x={x}");
                    prev = y;
                }
            }
        }
    }

    #[test]
    fn rejects_bad_k() {
        assert!(d_star(2, 1e-9).is_err());
        assert!(d_star(21, 1e-9).is_err());
    }
}
