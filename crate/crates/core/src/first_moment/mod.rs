//! Exact first moments of the number of NAE solutions and proper 2-colorings
//! in the configuration model, plus the exponential tilt used to estimate
//! the conditioned probabilities.

mod exact;
pub mod oracle;
mod tilt;

pub use exact::{
    binomial, ez_col, ez_col_float, ez_nae, gamma_rows, ln_big_rational, p_gamma,
    p_gamma_by_convolution, ratio_scan, FirstMomentReport, GammaRow, EXACT_N_MAX,
};
pub use tilt::{
    binary_entropy, f_alpha, g_alpha, lagrange_lambda, local_clt_estimate, xi, TiltedClauseLaw,
    LAMBDA_BRACKET_MAX, SAFE_HALF_WIDTH,
};
