use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::measure::{
    clause_message_law, clause_message_law_with, eta_cluster, ln_one_minus, root_law,
    AtomicMeasure, ClauseMessageLaw, ThetaSpec,
};
use crate::bp::ModelParams;
use crate::error::{Error, Result};
use crate::model::Model;

/// Cap on the number of compositions enumerated for the clause product.
pub const PRODUCT_BUDGET: u128 = 25_000_000;

/// Largest atom count accepted by the exact evaluator.
pub const MAX_ATOMS: usize = 5;

/// Seed of the random mixed literal assignments in `literal_invariance_check`.
pub const INVARIANCE_SEED: u64 = 0x11_7e_7a_15;

/// Number of random mixed literal assignments in `literal_invariance_check`.
pub const MIXED_ASSIGNMENTS: usize = 10;

/// Deviation below which the literal invariance check passes.
pub const INVARIANCE_TOL: f64 = 1e-10;

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Running log-sum-exp.
struct StreamingLse {
    max: f64,
    sum: f64,
}

impl StreamingLse {
    fn new() -> Self {
        StreamingLse { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn push(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v > self.max {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        } else {
            self.sum += (v - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}

fn binom_u128(n: u128, r: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of leaves visited when `count` clauses draw from `support` points.
fn compositions(support: usize, count: usize) -> u128 {
    if support == 0 {
        return 0;
    }
    binom_u128((count + support - 1) as u128, (support - 1) as u128)
}

struct Prepared {
    ln_p: Vec<f64>,
    ln_u0: Vec<f64>,
    ln_u1: Vec<f64>,
    count: usize,
}

fn prepare(law: &ClauseMessageLaw, count: usize) -> Prepared {
    let pts: Vec<_> = law.support.iter().filter(|p| p.prob > 0.0).collect();
    Prepared {
        ln_p: pts.iter().map(|p| p.prob.ln()).collect(),
        ln_u0: pts.iter().map(|p| p.ln_u0).collect(),
        ln_u1: pts.iter().map(|p| p.ln_u1).collect(),
        count,
    }
}

struct Walk<'a> {
    groups: &'a [Prepared],
    ln_fact: Vec<f64>,
    lambda: f64,
    acc: StreamingLse,
}

impl Walk<'_> {
    fn enter_group(&mut self, g: usize, lw: f64, a0: f64, a1: f64) {
        if g == self.groups.len() {
            self.acc.push(lw + self.lambda * ln_add(a0, a1));
            return;
        }
        let c = self.groups[g].count;
        self.step(g, 0, c, lw + self.ln_fact[c], a0, a1);
    }

    fn step(&mut self, g: usize, t: usize, remaining: usize, lw: f64, a0: f64, a1: f64) {
        let grp = &self.groups[g];
        let last = t + 1 == grp.ln_p.len();
        let (lp, l0, l1) = (grp.ln_p[t], grp.ln_u0[t], grp.ln_u1[t]);
        if last {
            let c = remaining as f64;
            let lw = lw + c * lp - self.ln_fact[remaining];
            self.enter_group(g + 1, lw, a0 + c * l0, a1 + c * l1);
            return;
        }
        for c in 0..=remaining {
            let cf = c as f64;
            self.step(
                g,
                t + 1,
                remaining - c,
                lw + cf * lp - self.ln_fact[c],
                a0 + cf * l0,
                a1 + cf * l1,
            );
        }
    }
}

/// `ln E[(prod_a u_a(0) + prod_a u_a(1))^lambda]` for independent clauses,
/// given as `(law, multiplicity)` groups. Enumerates multinomial compositions
/// of each group over its support.
pub fn ln_moment_of_sum(groups: &[(&ClauseMessageLaw, usize)], lambda: f64) -> Result<f64> {
    let size = product_size(groups);
    if size > PRODUCT_BUDGET {
        return Err(Error::SupportBlowUp { size, budget: PRODUCT_BUDGET });
    }
    let prepared: Vec<Prepared> = groups
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(law, c)| prepare(law, *c))
        .collect();
    let max_count = prepared.iter().map(|p| p.count).max().unwrap_or(0);
    let mut walk = Walk {
        groups: &prepared,
        ln_fact: ln_factorials(max_count),
        lambda,
        acc: StreamingLse::new(),
    };
    walk.enter_group(0, 0.0, 0.0, 0.0);
    Ok(walk.acc.value())
}

fn product_size(groups: &[(&ClauseMessageLaw, usize)]) -> u128 {
    groups
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(law, c)| compositions(law.support.iter().filter(|p| p.prob > 0.0).count(), *c))
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// `ln E[u_0^lambda]`
fn ln_root_moment(eta: &AtomicMeasure, spec: &ThetaSpec, lambda: f64) -> Result<f64> {
    let mut acc = StreamingLse::new();
    for (ln_u, p) in root_law(eta, spec)? {
        if p > 0.0 {
            acc.push(p.ln() + lambda * ln_u);
        }
    }
    Ok(acc.value())
}

/// Integer degrees and weights with mean `d`.
fn degree_mixture(d: f64) -> Vec<(usize, f64)> {
    let lo = d.floor();
    let frac = d - lo;
    if frac == 0.0 {
        vec![(lo as usize, 1.0)]
    } else {
        vec![(lo as usize, 1.0 - frac), (lo as usize + 1, frac)]
    }
}

fn check_inputs(params: ModelParams, eta: &AtomicMeasure, spec: &ThetaSpec, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if spec.k != params.k {
        return Err(Error::InvalidParameter(format!(
            "clause size {} of the factor differs from k = {}",
            spec.k, params.k
        )));
    }
    if eta.atoms.is_empty() || eta.atoms.len() > MAX_ATOMS {
        return Err(Error::InvalidParameter(format!(
            "measure must have 1..={MAX_ATOMS} atoms, got {}",
            eta.atoms.len()
        )));
    }
    Ok(())
}

fn all_literal_vectors(k: u32) -> Vec<Vec<u8>> {
    (0u32..(1 << k))
        .map(|bits| (0..k).map(|i| (bits >> i & 1) as u8).collect())
        .collect()
}

/// Distinct clause laws over all `2^k` literal vectors with their multiplicities.
fn literal_classes(eta: &AtomicMeasure, spec: &ThetaSpec) -> Result<Vec<(ClauseMessageLaw, usize)>> {
    let mut classes: Vec<(ClauseMessageLaw, usize)> = Vec::new();
    for lits in all_literal_vectors(spec.k) {
        let law = clause_message_law(eta, &spec.with_literals(lits)?)?;
        match classes.iter_mut().find(|(l, _)| l.same_as(&law)) {
            Some((_, c)) => *c += 1,
            None => classes.push((law, 1)),
        }
    }
    Ok(classes)
}

/// Calls `f` with every vector of non-negative counts of length `parts` summing to `total`.
fn for_each_split(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if i + 1 == cur.len() {
            cur[i] = left;
            f(cur);
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            rec(i + 1, left - c, cur, f);
        }
    }
    let mut cur = vec![0; parts];
    rec(0, total, &mut cur, f);
}

/// First term averaged over iid uniform literal vectors on each clause.
fn first_term_random_literals(
    classes: &[(ClauseMessageLaw, usize)],
    degree: usize,
    k: u32,
    lambda: f64,
) -> Result<f64> {
    let total: f64 = (1u64 << k) as f64;
    let ln_fact = ln_factorials(degree);
    let mut budget: u128 = 0;
    for_each_split(degree, classes.len(), &mut |split| {
        let groups: Vec<(&ClauseMessageLaw, usize)> =
            classes.iter().zip(split).map(|((l, _), &c)| (l, c)).collect();
        budget = budget.saturating_add(product_size(&groups));
    });
    if budget > PRODUCT_BUDGET {
        return Err(Error::SupportBlowUp { size: budget, budget: PRODUCT_BUDGET });
    }
    let mut value = 0.0;
    let mut failure = None;
    for_each_split(degree, classes.len(), &mut |split| {
        let mut ln_w = ln_fact[degree];
        for ((_, cnt), &c) in classes.iter().zip(split) {
            ln_w += c as f64 * (*cnt as f64 / total).ln() - ln_fact[c];
        }
        let groups: Vec<(&ClauseMessageLaw, usize)> =
            classes.iter().zip(split).map(|((l, _), &c)| (l, c)).collect();
        match ln_moment_of_sum(&groups, lambda) {
            Ok(m) => value += ln_w.exp() * m,
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(value / lambda),
    }
}

/// The interpolation functional for the point mass at `eta`:
///
/// `lambda^-1 E ln E'[(sum_x prod_{a<=d} u_a(x))^lambda]
///   - (k-1)(d/k) lambda^-1 E ln E'[u_0^lambda]`.
///
/// For non-integer `d` the first term averages degrees `floor(d)` and
/// `ceil(d)` with mean `d`. NAE with unspecified literals is averaged exactly
/// over iid uniform literal vectors.
pub fn functional_exact(params: ModelParams, eta: &AtomicMeasure, spec: &ThetaSpec, lambda: f64) -> Result<f64> {
    check_inputs(params, eta, spec, lambda)?;
    let k = params.k;
    let coef = (k as f64 - 1.0) * params.d / k as f64;
    let degrees = degree_mixture(params.d);

    if spec.fixed_literals().is_some() {
        let law = clause_message_law(eta, spec)?;
        let mut first = 0.0;
        for (deg, w) in degrees {
            first += w * ln_moment_of_sum(&[(&law, deg)], lambda)? / lambda;
        }
        let second = ln_root_moment(eta, spec, lambda)? / lambda;
        return Ok(first - coef * second);
    }

    let classes = literal_classes(eta, spec)?;
    let mut first = 0.0;
    for (deg, w) in degrees {
        first += w * first_term_random_literals(&classes, deg, k, lambda)?;
    }
    let vectors = all_literal_vectors(k);
    let mut second = 0.0;
    for lits in &vectors {
        second += ln_root_moment(eta, &spec.with_literals(lits.clone())?, lambda)?;
    }
    second /= vectors.len() as f64 * lambda;
    Ok(first - coef * second)
}

/// Literal vectors for the root clause and for each of the `d` clauses at the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiteralAssignment {
    pub root: Vec<u8>,
    pub clauses: Vec<Vec<u8>>,
}

impl LiteralAssignment {
    pub fn random(k: u32, d: usize, rng: &mut impl Rng) -> Self {
        let mut vec = || (0..k).map(|_| rng.gen_range(0..=1u8)).collect::<Vec<u8>>();
        let root = vec();
        let clauses = (0..d).map(|_| vec()).collect();
        LiteralAssignment { root, clauses }
    }
}

fn integer_degree(params: ModelParams) -> Result<usize> {
    if params.d.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "an integer degree is required here, got d = {}",
            params.d
        )));
    }
    Ok(params.d as usize)
}

/// The functional for NAE with a given literal vector on every clause.
pub fn functional_with_literals(
    params: ModelParams,
    eta: &AtomicMeasure,
    beta: f64,
    lambda: f64,
    assignment: &LiteralAssignment,
) -> Result<f64> {
    let d = integer_degree(params)?;
    if assignment.clauses.len() != d {
        return Err(Error::InvalidParameter(format!(
            "{} clause literal vectors given for degree {d}",
            assignment.clauses.len()
        )));
    }
    let root_spec = ThetaSpec::nae(params.k, beta, Some(assignment.root.clone()))?;
    check_inputs(params, eta, &root_spec, lambda)?;
    let mut groups: Vec<(ClauseMessageLaw, usize)> = Vec::new();
    for lits in &assignment.clauses {
        let law = clause_message_law(eta, &ThetaSpec::nae(params.k, beta, Some(lits.clone()))?)?;
        match groups.iter_mut().find(|(l, _)| l.same_as(&law)) {
            Some((_, c)) => *c += 1,
            None => groups.push((law, 1)),
        }
    }
    let refs: Vec<(&ClauseMessageLaw, usize)> = groups.iter().map(|(l, c)| (l, *c)).collect();
    let first = ln_moment_of_sum(&refs, lambda)? / lambda;
    let second = ln_root_moment(eta, &root_spec, lambda)? / lambda;
    let coef = (params.k as f64 - 1.0) * params.d / params.k as f64;
    Ok(first - coef * second)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub passed: bool,
    pub max_deviation: f64,
    /// Values for the `2^k` uniform literal vectors, then the mixed assignments.
    pub values: Vec<f64>,
    pub symmetric: bool,
}

/// Evaluates the functional under every uniform literal vector and under
/// `MIXED_ASSIGNMENTS` random per-clause assignments for the cluster measure.
pub fn literal_invariance_check(params: ModelParams, beta: f64, lambda: f64) -> Result<InvarianceReport> {
    let eta = eta_cluster(params, beta, 1e-12)?;
    literal_invariance_check_for(params, &eta, beta, lambda, INVARIANCE_SEED)
}

/// As `literal_invariance_check` for an arbitrary measure. Reports the
/// deviation; a non-symmetric measure is allowed and may fail.
pub fn literal_invariance_check_for(
    params: ModelParams,
    eta: &AtomicMeasure,
    beta: f64,
    lambda: f64,
    seed: u64,
) -> Result<InvarianceReport> {
    let d = integer_degree(params)?;
    let mut values = Vec::new();
    for lits in all_literal_vectors(params.k) {
        let spec = ThetaSpec::nae(params.k, beta, Some(lits))?;
        values.push(functional_exact(params, eta, &spec, lambda)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MIXED_ASSIGNMENTS {
        let assignment = LiteralAssignment::random(params.k, d, &mut rng);
        values.push(functional_with_literals(params, eta, beta, lambda, &assignment)?);
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_deviation = hi - lo;
    Ok(InvarianceReport {
        passed: max_deviation < INVARIANCE_TOL,
        max_deviation,
        values,
        symmetric: eta.symmetric,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub beta: f64,
    pub lambda: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "P_over_sqrt_beta")]
    pub p_over_sqrt_beta: Option<f64>,
}

/// `lambda = beta^(-1/2)`, capped at 1.
pub fn default_lambda(beta: f64) -> f64 {
    if beta <= 1.0 {
        1.0
    } else {
        beta.powf(-0.5)
    }
}

/// The functional for 2-coloring at each beta with the cluster measure and
/// `lambda = min(1, beta^(-1/2))`.
pub fn beta_scaling_scan(params: ModelParams, betas: &[f64], tol: f64) -> Result<Vec<ScanRow>> {
    betas
        .iter()
        .map(|&beta| {
            let eta = eta_cluster(params, beta, tol)?;
            let spec = ThetaSpec::coloring(params.k, beta)?;
            let lambda = default_lambda(beta);
            let p = functional_exact(params, &eta, &spec, lambda)?;
            Ok(ScanRow {
                beta,
                lambda,
                p,
                p_over_sqrt_beta: (beta > 0.0).then(|| p / beta.sqrt()),
            })
        })
        .collect()
}

/// On the three largest betas: `P/sqrt(beta)` strictly decreasing and the
/// last value below `phi_star / 2`.
pub fn scaling_trend_holds(rows: &[ScanRow], phi_star: f64) -> bool {
    let mut sorted: Vec<&ScanRow> = rows.iter().filter(|r| r.beta > 0.0).collect();
    sorted.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    if sorted.len() < 3 {
        return false;
    }
    let tail: Vec<f64> = sorted[sorted.len() - 3..]
        .iter()
        .map(|r| r.p_over_sqrt_beta.unwrap_or(f64::NAN))
        .collect();
    tail[0] > tail[1] && tail[1] > tail[2] && tail[2] < phi_star / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn sample_atom(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Plain Monte Carlo estimate of the functional with a delta-method standard error.
pub fn functional_monte_carlo(
    params: ModelParams,
    eta: &AtomicMeasure,
    spec: &ThetaSpec,
    lambda: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_inputs(params, eta, spec, lambda)?;
    let d = integer_degree(params)?;
    let lits = spec
        .fixed_literals()
        .ok_or_else(|| Error::InvalidParameter("Monte Carlo needs fixed literals".into()))?;
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    let k = params.k as usize;
    let (eps, c) = (spec.epsilon(), spec.strength());
    let mut cdf = Vec::with_capacity(eta.atoms.len());
    let mut run = 0.0;
    for a in &eta.atoms {
        run += a.mass;
        cdf.push(run);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sy, mut syy, mut sw, mut sww) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let (mut a0, mut a1) = (0.0, 0.0);
        for _ in 0..d {
            let (mut s0, mut s1) = (0.0, 0.0);
            for j in 1..k {
                let atom = &eta.atoms[sample_atom(&cdf, &mut rng)];
                s0 += atom.ln_at(lits[0] ^ lits[j]);
                s1 += atom.ln_at(1 ^ lits[0] ^ lits[j]);
            }
            a0 += ln_one_minus(s0, eps, c);
            a1 += ln_one_minus(s1, eps, c);
        }
        let y = (lambda * ln_add(a0, a1)).exp();
        sy += y;
        syy += y * y;

        let (mut r0, mut r1) = (0.0, 0.0);
        for &l in lits.iter().take(k) {
            let atom = &eta.atoms[sample_atom(&cdf, &mut rng)];
            r0 += atom.ln_at(l);
            r1 += atom.ln_at(1 ^ l);
        }
        let u0 = 1.0 - c * (r0.exp() + r1.exp());
        let w = u0.max(0.0).powf(lambda);
        sw += w;
        sww += w * w;
    }
    let n = samples as f64;
    let (my, mw) = (sy / n, sw / n);
    let vy = (syy / n - my * my).max(0.0) * n / (n - 1.0);
    let vw = (sww / n - mw * mw).max(0.0) * n / (n - 1.0);
    let coef = (k as f64 - 1.0) * params.d / k as f64;
    let value = my.ln() / lambda - coef * mw.ln() / lambda;
    let std_error = (vy / (n * my * my) + coef * coef * vw / (n * mw * mw)).sqrt() / lambda;
    Ok(MonteCarloEstimate { value, std_error, samples })
}

/// Point of the materialized `d`-fold product law: `A_x = sum_a ln u_a(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductPoint {
    pub a0: f64,
    pub a1: f64,
    pub prob: f64,
}

fn key15(v: f64) -> String {
    format!("{v:.14e}")
}

/// Materializes the law of `(A_0, A_1)` for `d` iid clauses. With
/// `compress`, points whose coordinates agree to 15 significant digits are
/// merged after each factor.
pub fn product_law(law: &ClauseMessageLaw, d: usize, compress: bool) -> Result<Vec<ProductPoint>> {
    let mut cur = vec![ProductPoint { a0: 0.0, a1: 0.0, prob: 1.0 }];
    for _ in 0..d {
        let size = (cur.len() as u128) * (law.support.len() as u128);
        if size > PRODUCT_BUDGET {
            return Err(Error::SupportBlowUp { size, budget: PRODUCT_BUDGET });
        }
        let mut next = Vec::with_capacity(size as usize);
        for p in &cur {
            for q in &law.support {
                next.push(ProductPoint { a0: p.a0 + q.ln_u0, a1: p.a1 + q.ln_u1, prob: p.prob * q.prob });
            }
        }
        if compress {
            let mut merged: BTreeMap<(String, String), ProductPoint> = BTreeMap::new();
            for p in next {
                merged
                    .entry((key15(p.a0), key15(p.a1)))
                    .and_modify(|q| q.prob += p.prob)
                    .or_insert(p);
            }
            next = merged.into_values().collect();
        }
        cur = next;
    }
    Ok(cur)
}

/// `ln E[(e^A_0 + e^A_1)^lambda]` over a materialized product law.
pub fn ln_moment_from_product(points: &[ProductPoint], lambda: f64) -> f64 {
    let mut acc = StreamingLse::new();
    for p in points {
        if p.prob > 0.0 {
            acc.push(p.prob.ln() + lambda * ln_add(p.a0, p.a1));
        }
    }
    acc.value()
}

/// Raw (unmerged) clause law, exposed for compression checks.
pub fn clause_message_law_raw(eta: &AtomicMeasure, spec: &ThetaSpec) -> Result<ClauseMessageLaw> {
    clause_message_law_with(eta, spec, false)
}

/// Model-level default spec: coloring, or NAE with random literals.
pub fn default_spec(model: Model, k: u32, beta: f64) -> Result<ThetaSpec> {
    match model {
        Model::Coloring => ThetaSpec::coloring(k, beta),
        Model::Nae => ThetaSpec::nae(k, beta, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::measure::{eta_from_fraction, Atom};
    use crate::thresholds::phi_star;

    const LN2: f64 = std::f64::consts::LN_2;

    fn p(k: u32, d: f64) -> ModelParams {
        ModelParams::new(k, d).unwrap()
    }

    #[test]
    fn zero_beta_gives_ln2() {
        let params = p(3, 7.0);
        let eta = eta_cluster(params, 0.0, 1e-12).unwrap();
        for lambda in [0.2, 0.5, 1.0] {
            let v = functional_exact(params, &eta, &ThetaSpec::coloring(3, 0.0).unwrap(), lambda).unwrap();
            assert!((v - LN2).abs() < 1e-12, "{v}");
        }
        let other = eta_from_fraction(0.3, 2.0).unwrap();
        let v = functional_exact(params, &other, &ThetaSpec::coloring(3, 0.0).unwrap(), 0.4).unwrap();
        assert!((v - LN2).abs() < 1e-12);
        let tiny = functional_exact(params, &eta_cluster(params, 1e-14, 1e-12).unwrap(), &ThetaSpec::coloring(3, 1e-14).unwrap(), 0.5).unwrap();
        assert!((tiny - LN2).abs() < 1e-12);
    }

    #[test]
    fn point_mass_closed_form() {
        let eta = AtomicMeasure::point_mass(0.5);
        for (k, d, beta, lambda) in [(3u32, 7.0, 2.0, 0.3), (4, 20.0, 1.0, 0.7), (5, 3.0, 40.0, 0.5), (3, 7.4, 4.0, 0.5)] {
            let params = p(k, d);
            let v = functional_exact(params, &eta, &ThetaSpec::coloring(k, beta).unwrap(), lambda).unwrap();
            let expect = LN2
                + params.alpha() * (1.0 - (1.0 - (-beta).exp()) * 2f64.powi(1 - k as i32)).ln();
            assert!((v - expect).abs() < 1e-12, "k={k} d={d}: {v} vs {expect}");
        }
    }

    #[test]
    fn nae_fixed_literals_equal_coloring() {
        let params = p(3, 7.0);
        let (beta, lambda) = (4.0, 0.5);
        let eta = eta_cluster(params, beta, 1e-12).unwrap();
        let col = functional_exact(params, &eta, &ThetaSpec::coloring(3, beta).unwrap(), lambda).unwrap();
        for bits in 0..8u8 {
            let l: Vec<u8> = (0..3).map(|i| bits >> i & 1).collect();
            let v = functional_exact(params, &eta, &ThetaSpec::nae(3, beta, Some(l)).unwrap(), lambda).unwrap();
            assert!((v - col).abs() < 1e-12);
        }
        let avg = functional_exact(params, &eta, &ThetaSpec::nae(3, beta, None).unwrap(), lambda).unwrap();
        assert!((avg - col).abs() < 1e-12);
    }

    #[test]
    fn invariance_k3() {
        let r = literal_invariance_check(p(3, 7.0), 2.0, 0.3).unwrap();
        assert!(r.passed, "{}", r.max_deviation);
        assert_eq!(r.values.len(), 8 + MIXED_ASSIGNMENTS);
    }

    #[test]
    fn invariance_reports_for_asymmetric_measure() {
        let eta = AtomicMeasure::new(vec![Atom::from_value(0.3, 0.6), Atom::from_value(0.6, 0.4)]).unwrap();
        let r = literal_invariance_check_for(p(3, 4.0), &eta, 2.0, 0.5, 7).unwrap();
        assert!(!r.symmetric);
        assert!(r.max_deviation.is_finite());
    }

    #[test]
    fn compression_preserves_product() {
        let params = p(3, 4.0);
        let eta = eta_from_fraction(0.45, 1.5).unwrap();
        let spec = ThetaSpec::coloring(3, 1.5).unwrap();
        let raw = clause_message_law_raw(&eta, &spec).unwrap();
        let merged = clause_message_law(&eta, &spec).unwrap();
        let lambda = 0.6;
        let a = ln_moment_from_product(&product_law(&raw, 4, false).unwrap(), lambda);
        let b = ln_moment_from_product(&product_law(&raw, 4, true).unwrap(), lambda);
        let c = ln_moment_from_product(&product_law(&merged, 4, true).unwrap(), lambda);
        let e = ln_moment_of_sum(&[(&merged, 4)], lambda).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12 && (a - e).abs() < 1e-12);
        let _ = params;
    }

    #[test]
    fn relabeling_and_flip_invariance() {
        let params = p(3, 7.0);
        let beta = 3.0;
        let eta = eta_cluster(params, beta, 1e-12).unwrap();
        let spec = ThetaSpec::coloring(3, beta).unwrap();
        let base = functional_exact(params, &eta, &spec, 0.4).unwrap();
        let mut rev = eta.clone();
        rev.atoms.reverse();
        assert!((functional_exact(params, &rev, &spec, 0.4).unwrap() - base).abs() < 1e-12);
        let flipped = AtomicMeasure {
            atoms: eta.atoms.iter().map(|a| a.mirror()).collect(),
            symmetric: true,
        };
        assert!((functional_exact(params, &flipped, &spec, 0.4).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_agrees() {
        let params = p(3, 7.0);
        let beta = 2.0;
        let eta = eta_cluster(params, beta, 1e-12).unwrap();
        let spec = ThetaSpec::coloring(3, beta).unwrap();
        let exact = functional_exact(params, &eta, &spec, 0.5).unwrap();
        let mc = functional_monte_carlo(params, &eta, &spec, 0.5, 1_000_000, 2024).unwrap();
        assert!((mc.value - exact).abs() < 5.0 * mc.std_error, "{} vs {exact} (se {})", mc.value, mc.std_error);
    }

    #[test]
    fn budget_enforced() {
        let eta = eta_from_fraction(0.49, 1.0).unwrap();
        let spec = ThetaSpec::coloring(5, 1.0).unwrap();
        let r = functional_exact(p(5, 60.0), &eta, &spec, 0.5);
        assert!(matches!(r, Err(Error::SupportBlowUp { .. })));
    }

    #[test]
    fn lambda_range_enforced() {
        let eta = AtomicMeasure::point_mass(0.5);
        let spec = ThetaSpec::coloring(3, 1.0).unwrap();
        assert!(functional_exact(p(3, 7.0), &eta, &spec, 0.0).is_err());
        assert!(functional_exact(p(3, 7.0), &eta, &spec, 1.5).is_err());
    }

    #[test]
    fn scan_sanity_small_beta() {
        let params = p(3, 6.74);
        let rows = beta_scaling_scan(params, &[1.0], 1e-12).unwrap();
        let bound = LN2 + params.alpha() * (1.0 - (1.0 - (-1f64).exp()) / 4.0).ln() - 1.0;
        assert!(rows[0].p >= bound);
        let zero = beta_scaling_scan(params, &[0.0], 1e-12).unwrap();
        assert!((zero[0].p - LN2).abs() < 1e-12);
        assert!(zero[0].p_over_sqrt_beta.is_none());
    }

    #[test]
    fn scan_trend_k3_d74() {
        let params = p(3, 7.4);
        let rows = beta_scaling_scan(params, &[16.0, 64.0, 256.0], 1e-12).unwrap();
        let ps = phi_star(params, 1e-12).unwrap();
        assert!(ps < 0.0);
        assert!(scaling_trend_holds(&rows, ps), "{rows:?}");
        assert!(rows[2].p_over_sqrt_beta.unwrap() < 0.0);
    }

    #[test]
    fn lse_matches_direct_sum() {
        let mut s = StreamingLse::new();
        let vals = [-3.0, 2.0, 0.5, -700.0, 1.0];
        for v in vals {
            s.push(v);
        }
        let direct: f64 = vals.iter().map(|v: &f64| v.exp()).sum::<f64>().ln();
        assert!((s.value() - direct).abs() < 1e-14);
    }
}
