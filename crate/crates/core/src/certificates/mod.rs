//! High-precision checks of the numerical inequalities behind the threshold
//! bounds. Each check is evaluated at the requested precision and again at
//! twice that precision; a check only passes when the inequality holds with a
//! margin that clearly dominates the observed evaluation error.

mod exprs;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::Hp;

pub use exprs::{
    alpha_k, beta_k, epsilon_k, l_function, phi_hp, phi_x_derivative_hp, psi_hat_exact, psi_hp,
};

/// Default and minimum working precision in decimal digits.
pub const DEFAULT_DIGITS: usize = 50;
pub const MAX_DIGITS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "=")]
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::Greater => ">",
            Relation::Equal => "=",
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            Relation::Equal => Relation::Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The inequality holds but the margin is not clearly above roundoff.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub id: String,
    pub group: String,
    pub expression: String,
    pub computed: String,
    pub claimed_bound: String,
    pub relation: Relation,
    pub margin: String,
    /// Change in the computed value between the two precisions.
    pub error_estimate: String,
    pub digits: usize,
    pub status: Status,
    pub passed: bool,
    pub reference: String,
    pub note: Option<String>,
}

pub(crate) type FloatEval = fn(&mut Hp) -> Result<BigFloat>;
pub(crate) type ExactEval = fn() -> Result<BigRational>;

#[derive(Clone, Copy)]
pub(crate) enum Kind {
    Float { bound: &'static str, eval: FloatEval },
    Exact { bound: (i64, i64), eval: ExactEval },
}

#[derive(Clone, Copy)]
pub struct Certificate {
    pub id: &'static str,
    pub group: &'static str,
    pub expression: &'static str,
    pub relation: Relation,
    pub reference: &'static str,
    pub note: Option<&'static str>,
    pub(crate) kind: Kind,
}

impl Certificate {
    pub fn bound(&self) -> String {
        match self.kind {
            Kind::Float { bound, .. } => bound.to_string(),
            Kind::Exact { bound: (p, q), .. } => format!("{p}/{q}"),
        }
    }

    /// The same check with `<` and `>` exchanged; used as a negative control.
    pub fn flipped(mut self) -> Self {
        self.relation = self.relation.flipped();
        self
    }

    pub fn evaluate(&self, digits: usize) -> Result<CertificateReport> {
        if !(DEFAULT_DIGITS..=MAX_DIGITS).contains(&digits) {
            return Err(Error::InvalidParameter(format!(
                "digits must lie in [{DEFAULT_DIGITS}, {MAX_DIGITS}], got {digits}"
            )));
        }
        match self.kind {
            Kind::Float { bound, eval } => self.evaluate_float(digits, bound, eval),
            Kind::Exact { bound, eval } => self.evaluate_exact(digits, bound, eval),
        }
    }

    fn report(
        &self,
        digits: usize,
        computed: String,
        margin: String,
        err: String,
        status: Status,
    ) -> CertificateReport {
        CertificateReport {
            id: self.id.to_string(),
            group: self.group.to_string(),
            expression: self.expression.to_string(),
            computed,
            claimed_bound: self.bound(),
            relation: self.relation,
            margin,
            error_estimate: err,
            digits,
            status,
            passed: status == Status::Pass,
            reference: self.reference.to_string(),
            note: self.note.map(str::to_string),
        }
    }

    fn evaluate_float(&self, digits: usize, bound: &str, eval: FloatEval) -> Result<CertificateReport> {
        let mut lo = Hp::with_digits(digits);
        let mut hi = Hp::with_digits(2 * digits);
        let v_lo = eval(&mut lo)?;
        let v_hi = eval(&mut hi)?;
        if !Hp::is_valid(&v_lo) || !Hp::is_valid(&v_hi) {
            return Err(Error::Domain(format!(
                "certificate {} evaluated to a non-finite value",
                self.id
            )));
        }
        let b = parse_bound(&mut hi, bound);
        let margin = hi.sub(&v_hi, &b);
        let v_lo_wide = hi.num(&lo.format(&v_lo));
        let err = hi.sub(&v_hi, &v_lo_wide).abs();

        let m = hi.to_f64(&margin);
        let e = hi.to_f64(&err);
        let holds = match self.relation {
            Relation::Less => m < 0.0,
            Relation::Greater => m > 0.0,
            Relation::Equal => m == 0.0,
        };
        let floor = 10f64.powf(-(digits as f64) / 2.0);
        let guarded = m.abs() > 10.0 * e && m.abs() > floor && e < m.abs() / 100.0;
        let status = match (holds, guarded) {
            (false, _) => Status::Fail,
            (true, true) => Status::Pass,
            (true, false) => Status::Inconclusive,
        };
        Ok(self.report(
            digits,
            hi.to_sci(&v_hi, digits),
            hi.to_sci(&margin, digits),
            hi.to_sci(&err, 3),
            status,
        ))
    }

    fn evaluate_exact(&self, digits: usize, bound: (i64, i64), eval: ExactEval) -> Result<CertificateReport> {
        let v = eval()?;
        let b = BigRational::new(BigInt::from(bound.0), BigInt::from(bound.1));
        let diff = &v - &b;
        let holds = match self.relation {
            Relation::Equal => diff.is_zero(),
            Relation::Less => diff < BigRational::zero(),
            Relation::Greater => diff > BigRational::zero(),
        };
        let status = if holds { Status::Pass } else { Status::Fail };
        Ok(self.report(
            digits,
            format!("{}/{}", v.numer(), v.denom()),
            format!("{}/{}", diff.numer(), diff.denom()),
            "0".into(),
            status,
        ))
    }
}

/// Decimal literal or `p/q`.
fn parse_bound(hp: &mut Hp, bound: &str) -> BigFloat {
    match bound.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (hp.num(p), hp.num(q));
            hp.div(&p, &q)
        }
        None => hp.num(bound),
    }
}

/// All registered checks in report order.
pub fn registry() -> Vec<Certificate> {
    exprs::registry()
}

/// Distinct groups in report order.
pub fn groups() -> Vec<&'static str> {
    let mut out: Vec<&'static str> = Vec::new();
    for c in registry() {
        if !out.contains(&c.group) {
            out.push(c.group);
        }
    }
    out
}

pub fn find(id: &str) -> Result<Certificate> {
    registry()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCertificate(id.to_string()))
}

pub fn evaluate(id: &str, digits: usize) -> Result<CertificateReport> {
    find(id)?.evaluate(digits)
}

pub fn verify_all(digits: usize) -> Result<Vec<CertificateReport>> {
    registry().iter().map(|c| c.evaluate(digits)).collect()
}

/// Evaluates `id` with its relation reversed. A sound harness reports failure.
pub fn negative_control(id: &str, digits: usize) -> Result<CertificateReport> {
    find(id)?.flipped().evaluate(digits)
}
