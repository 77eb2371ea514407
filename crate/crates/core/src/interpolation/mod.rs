//! The interpolation functional for atomic measures on `[0, 1]`.

mod functional;
mod measure;

pub use functional::{
    beta_scaling_scan, clause_message_law_raw, default_lambda, default_spec, functional_exact,
    functional_monte_carlo, functional_with_literals, literal_invariance_check,
    literal_invariance_check_for, ln_moment_from_product, ln_moment_of_sum, product_law,
    scaling_trend_holds, InvarianceReport, LiteralAssignment, MonteCarloEstimate, ProductPoint,
    ScanRow, INVARIANCE_SEED, INVARIANCE_TOL, MAX_ATOMS, MIXED_ASSIGNMENTS, PRODUCT_BUDGET,
};
pub use measure::{
    clause_message_law, clause_message_law_with, eta_cluster, eta_from_fraction, root_law,
    theta_value, Atom, AtomicMeasure, ClauseMessageLaw, LawPoint, ThetaSpec,
};
