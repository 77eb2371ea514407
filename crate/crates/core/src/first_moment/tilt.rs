use serde::Serialize;

use crate::bp::ModelParams;
use crate::error::{Error, Result};

/// Half-width of the gamma neighborhood of 1/2 where `lagrange_lambda` runs.
pub const SAFE_HALF_WIDTH: f64 = 0.1;

/// Bracket expansion for the Lagrange parameter stops here.
pub const LAMBDA_BRACKET_MAX: f64 = 50.0;

fn ln_binomial_pmf(k: u32, j: u32, gamma: f64) -> f64 {
    let ln_choose = ln_choose(k, j);
    ln_choose + j as f64 * gamma.ln() + (k - j) as f64 * (-gamma).ln_1p()
}

fn ln_choose(k: u32, j: u32) -> f64 {
    (1..=j).map(|i| ((k - j + i) as f64 / i as f64).ln()).sum()
}

/// Binomial(k, gamma) restricted to `1..=k-1` and tilted by `e^(lambda j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltedClauseLaw {
    pub gamma: f64,
    pub lambda: f64,
    /// `pmf[i]` is the mass at `j = i + 1`.
    pub pmf: Vec<f64>,
}

impl TiltedClauseLaw {
    pub fn new(k: u32, gamma: f64, lambda: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
        }
        let logs: Vec<f64> = (1..k)
            .map(|j| ln_binomial_pmf(k, j, gamma) + lambda * j as f64)
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = w.iter().sum();
        Ok(TiltedClauseLaw {
            gamma,
            lambda,
            pmf: w.into_iter().map(|x| x / z).collect(),
        })
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| ((i + 1) as f64 - mu).powi(2) * p)
            .sum()
    }
}

/// `k gamma lambda - ln sum_{j=1}^{k-1} Binom(k,gamma)(j) e^(lambda j)`
pub fn xi(gamma: f64, lambda: f64, k: u32) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let logs: Vec<f64> = (1..k)
        .map(|j| ln_binomial_pmf(k, j, gamma) + lambda * j as f64)
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    Ok(k as f64 * gamma * lambda - lse)
}

/// The tilt `lambda(gamma)` at which the tilted clause law has mean `k gamma`.
pub fn lagrange_lambda(gamma: f64, k: u32, tol: f64) -> Result<f64> {
    if (gamma - 0.5).abs() > SAFE_HALF_WIDTH + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} is outside the neighborhood |gamma - 1/2| <= {SAFE_HALF_WIDTH}"
        )));
    }
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be >= 3, got {k}")));
    }
    let target = k as f64 * gamma;
    let mean = |l: f64| TiltedClauseLaw::new(k, gamma, l).map(|t| t.mean());
    let mut width = 1.0;
    while !(mean(-width)? <= target && mean(width)? >= target) {
        width *= 2.0;
        if width > LAMBDA_BRACKET_MAX {
            return Err(Error::NoConvergence {
                iterations: 0,
                what: format!("lambda bracket exceeded |lambda| > {LAMBDA_BRACKET_MAX} at gamma = {gamma}"),
            });
        }
    }
    let (mut lo, mut hi) = (-width, width);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary entropy in nats.
pub fn binary_entropy(gamma: f64) -> f64 {
    -(gamma * gamma.ln() + (1.0 - gamma) * (-gamma).ln_1p())
}

/// `H(gamma) + alpha ln(1 - gamma^k - (1-gamma)^k)`
pub fn f_alpha(gamma: f64, params: ModelParams) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let k = params.k as i32;
    let inner = 1.0 - gamma.powi(k) - (1.0 - gamma).powi(k);
    Ok(binary_entropy(gamma) + params.alpha() * inner.ln())
}

/// `H(gamma) - alpha xi(gamma, lambda(gamma))`
pub fn g_alpha(gamma: f64, params: ModelParams, tol: f64) -> Result<f64> {
    let lambda = lagrange_lambda(gamma, params.k, tol)?;
    Ok(binary_entropy(gamma) - params.alpha() * xi(gamma, lambda, params.k)?)
}

/// Local-CLT estimate of the conditioned probability `p_gamma` for `m` clauses:
/// `sqrt(Var Binom(k,gamma) / Var tilted) * exp(-m xi(gamma, lambda(gamma)))`.
/// Only meant for side-by-side comparison with the exact value.
pub fn local_clt_estimate(gamma: f64, k: u32, m: u64, tol: f64) -> Result<f64> {
    let lambda = lagrange_lambda(gamma, k, tol)?;
    let tilted = TiltedClauseLaw::new(k, gamma, lambda)?;
    let var = k as f64 * gamma * (1.0 - gamma);
    Ok((var / tilted.variance()).sqrt() * (-(m as f64) * xi(gamma, lambda, k)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn pmf_normalized_and_positive() {
        let t = TiltedClauseLaw::new(5, 0.47, 0.3).unwrap();
        assert!(t.pmf.iter().all(|&p| p > 0.0));
        assert!((t.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // proportional to C(k,j) g^j (1-g)^(k-j) e^(lambda j)
        let raw: Vec<f64> = (1..5)
            .map(|j| {
                let c = [0.0, 5.0, 10.0, 10.0, 5.0][j as usize];
                c * 0.47f64.powi(j) * 0.53f64.powi(5 - j) * (0.3 * j as f64).exp()
            })
            .collect();
        let z: f64 = raw.iter().sum();
        for (a, b) in t.pmf.iter().zip(raw) {
            assert!((a - b / z).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda_at_half_is_zero() {
        for k in 3..10 {
            assert!(lagrange_lambda(0.5, k, 1e-13).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn lambda_defining_equation() {
        let l = lagrange_lambda(0.52, 3, 1e-13).unwrap();
        let t = TiltedClauseLaw::new(3, 0.52, l).unwrap();
        assert!((t.mean() - 1.56).abs() < 1e-10);
    }

    #[test]
    fn lambda_symmetry() {
        let tol = 1e-13;
        let a = lagrange_lambda(0.48, 3, tol).unwrap();
        let b = lagrange_lambda(0.52, 3, tol).unwrap();
        assert!((a + b).abs() <= 2.0 * tol);
    }

    #[test]
    fn lambda_outside_neighborhood_refused() {
        assert!(lagrange_lambda(0.7, 3, 1e-12).is_err());
    }

    #[test]
    fn xi_values() {
        assert!((xi(0.5, 0.0, 3).unwrap() + 0.75f64.ln()).abs() < 1e-15);
        for k in 3..12 {
            let expect = -(1.0 - 2f64.powi(1 - k as i32)).ln();
            assert!((xi(0.5, 0.0, k).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn xi_stationary_at_lambda() {
        let h = 1e-5;
        for k in [3, 4, 6] {
            for i in 0..=20 {
                let g = 0.4 + 0.01 * i as f64;
                let l = lagrange_lambda(g, k, 1e-13).unwrap();
                let fd = (xi(g, l + h, k).unwrap() - xi(g, l - h, k).unwrap()) / (2.0 * h);
                assert!(fd.abs() < 1e-8, "k={k} gamma={g}: {fd}");
            }
        }
    }

    #[test]
    fn f_alpha_properties() {
        let p = ModelParams::new(3, 7.0).unwrap();
        let half = f_alpha(0.5, p).unwrap();
        assert!((half - (LN2 + p.alpha() * 0.75f64.ln())).abs() < 1e-15);
        for g in [0.1, 0.3, 0.45] {
            assert!((f_alpha(g, p).unwrap() - f_alpha(1.0 - g, p).unwrap()).abs() < 1e-14);
        }
        let h = 1e-4;
        let second = (f_alpha(0.5 + h, p).unwrap() - 2.0 * half + f_alpha(0.5 - h, p).unwrap()) / (h * h);
        assert!(second < 0.0);
        assert!(f_alpha(0.0, p).is_err());
    }

    #[test]
    fn g_alpha_properties() {
        let p = ModelParams::new(3, 7.0).unwrap();
        let tol = 1e-13;
        assert!((g_alpha(0.5, p, tol).unwrap() - f_alpha(0.5, p).unwrap()).abs() < 1e-12);
        assert!(g_alpha(0.52, p, tol).unwrap() <= f_alpha(0.52, p).unwrap() + 1e-12);
        let grid: Vec<f64> = (0..=100).map(|i| 0.45 + 0.001 * i as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&g| g_alpha(g, p, tol).unwrap()).collect();
        let best = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(best, 50);
        for (g, v) in grid.iter().zip(&vals) {
            assert!(*v <= f_alpha(*g, p).unwrap() + 1e-12);
        }
    }

    #[test]
    fn local_clt_tracks_exact_near_half() {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use num_traits::ToPrimitive;
        // m = 70 clauses of size 3 with S = 105 ones (gamma = 1/2).
        let exact = super::super::p_gamma(30, 70, 3, &BigRational::new(BigInt::from(1), BigInt::from(2)))
            .unwrap()
            .to_f64()
            .unwrap();
        let est = local_clt_estimate(0.5, 3, 70, 1e-13).unwrap();
        let ratio = est / exact;
        assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
    }
}
