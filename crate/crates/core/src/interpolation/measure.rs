use serde::Serialize;

use crate::bp::{solve_fixed_point, ModelParams};
use crate::error::{Error, Result};
use crate::model::Model;

/// A probability measure on {0,1}, stored by its mass at 1 together with
/// both log-masses so extreme atoms keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    /// Mass at 1.
    pub value: f64,
    pub ln_one: f64,
    pub ln_zero: f64,
    /// Weight of this atom in the enclosing measure.
    pub mass: f64,
}

impl Atom {
    pub fn from_value(value: f64, mass: f64) -> Self {
        Atom {
            value,
            ln_one: value.ln(),
            ln_zero: (-value).ln_1p(),
            mass,
        }
    }

    /// Atom with mass `1 / (1 + e^-t)` at 1.
    pub fn logistic(t: f64, mass: f64) -> Self {
        let tail = (-t).exp().ln_1p();
        Atom {
            value: 1.0 / (1.0 + (-t).exp()),
            ln_one: -tail,
            ln_zero: -t - tail,
            mass,
        }
    }

    /// The atom `1 - value`, built bit-exactly from this one.
    pub fn mirror(&self) -> Self {
        Atom {
            value: self.ln_zero.exp(),
            ln_one: self.ln_zero,
            ln_zero: self.ln_one,
            mass: self.mass,
        }
    }

    pub fn ln_at(&self, bit: u8) -> f64 {
        if bit == 1 {
            self.ln_one
        } else {
            self.ln_zero
        }
    }

    fn same_point(&self, other: &Atom) -> bool {
        self.ln_one == other.ln_one && self.ln_zero == other.ln_zero
    }
}

/// Finitely supported probability measure on [0,1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    /// Invariant under `value -> 1 - value`.
    pub symmetric: bool,
}

impl AtomicMeasure {
    /// Validates masses, merges coinciding atoms and drops massless ones.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidParameter(format!("atom masses sum to {total}, not 1")));
        }
        let mut merged: Vec<Atom> = Vec::new();
        for a in atoms {
            if a.mass < 0.0 || !(0.0..=1.0).contains(&a.value) {
                return Err(Error::InvalidParameter(format!("invalid atom {a:?}")));
            }
            if a.mass == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|b| b.same_point(&a) || b.value == a.value) {
                Some(b) => b.mass += a.mass,
                None => merged.push(a),
            }
        }
        let symmetric = merged.iter().all(|a| {
            merged.iter().any(|b| {
                (b.value - (1.0 - a.value)).abs() <= 1e-15 && (b.mass - a.mass).abs() <= 1e-14
            })
        });
        Ok(AtomicMeasure { atoms: merged, symmetric })
    }

    pub fn point_mass(value: f64) -> Self {
        AtomicMeasure::new(vec![Atom::from_value(value, 1.0)]).expect("valid point mass")
    }
}

/// Cluster measure at inverse temperature `beta`: mass `x` at
/// `e^b / (e^b + e^-b)`, mass `x` at its mirror and `1 - 2x` at 1/2, where
/// `x = x(k, d)` is the fixed point.
pub fn eta_cluster(params: ModelParams, beta: f64, tol: f64) -> Result<AtomicMeasure> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
    }
    let x = solve_fixed_point(params, tol)?.x;
    eta_from_fraction(x, beta)
}

/// The cluster measure for a given frozen fraction `x`.
pub fn eta_from_fraction(x: f64, beta: f64) -> Result<AtomicMeasure> {
    let hi = Atom::logistic(2.0 * beta, x);
    let lo = hi.mirror();
    let half = Atom::from_value(0.5, 1.0 - 2.0 * x);
    AtomicMeasure::new(vec![hi, lo, half])
}

/// Clause factor of the positive-temperature model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSpec {
    pub model: Model,
    pub k: u32,
    pub beta: f64,
    /// Literal vector (NAE only). `None` for NAE means literals are iid fair
    /// bits and are averaged over exactly.
    pub literals: Option<Vec<u8>>,
}

impl ThetaSpec {
    pub fn coloring(k: u32, beta: f64) -> Result<Self> {
        Self::check(k, beta)?;
        Ok(ThetaSpec { model: Model::Coloring, k, beta, literals: None })
    }

    pub fn nae(k: u32, beta: f64, literals: Option<Vec<u8>>) -> Result<Self> {
        Self::check(k, beta)?;
        if let Some(l) = &literals {
            if l.len() != k as usize || l.iter().any(|&b| b > 1) {
                return Err(Error::InvalidParameter(format!(
                    "literal vector must be {k} bits, got {l:?}"
                )));
            }
        }
        Ok(ThetaSpec { model: Model::Nae, k, beta, literals })
    }

    fn check(k: u32, beta: f64) -> Result<()> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        Ok(())
    }

    /// `e^-beta`
    pub fn epsilon(&self) -> f64 {
        (-self.beta).exp()
    }

    /// `1 - e^-beta`
    pub fn strength(&self) -> f64 {
        -(-self.beta).exp_m1()
    }

    /// Literal vector in force when it is fixed; zeros for coloring.
    pub fn fixed_literals(&self) -> Option<Vec<u8>> {
        match self.model {
            Model::Coloring => Some(vec![0; self.k as usize]),
            Model::Nae => self.literals.clone(),
        }
    }

    /// Same factor with a different fixed literal vector.
    pub fn with_literals(&self, literals: Vec<u8>) -> Result<Self> {
        ThetaSpec::nae(self.k, self.beta, Some(literals))
    }
}

/// `(1 - e^-beta)` if `x xor L` is constant, else 0.
pub fn theta_value(spec: &ThetaSpec, x: &[u8]) -> Result<f64> {
    if x.len() != spec.k as usize {
        return Err(Error::InvalidParameter(format!(
            "assignment has {} entries, clause size is {}",
            x.len(),
            spec.k
        )));
    }
    let lits = spec
        .fixed_literals()
        .ok_or_else(|| Error::InvalidParameter("theta needs fixed literals".into()))?;
    let first = x[0] ^ lits[0];
    let constant = x.iter().zip(&lits).all(|(a, l)| a ^ l == first);
    Ok(if constant { spec.strength() } else { 0.0 })
}

/// `ln(1 - c e^s)` with `c = 1 - eps`, accurate when the result is tiny.
pub(crate) fn ln_one_minus(s: f64, eps: f64, c: f64) -> f64 {
    let t = c * s.exp();
    if t < 0.5 {
        (-t).ln_1p()
    } else {
        (-s.exp_m1() + eps * s.exp()).ln()
    }
}

fn sum_sorted(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

fn product_sorted(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().product()
}

/// One support point of the joint law of `(u(0), u(1))`, kept in logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawPoint {
    pub ln_u0: f64,
    pub ln_u1: f64,
    pub prob: f64,
}

impl LawPoint {
    pub fn u0(&self) -> f64 {
        self.ln_u0.exp()
    }

    pub fn u1(&self) -> f64 {
        self.ln_u1.exp()
    }
}

/// Exact law of the clause-to-variable message pair `(u(0), u(1))` when the
/// other `k - 1` incoming measures are iid draws from an atomic measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseMessageLaw {
    /// Sorted by `(ln_u0, ln_u1)`.
    pub support: Vec<LawPoint>,
}

impl ClauseMessageLaw {
    /// Same support points with probabilities equal up to `1e-14`.
    pub fn same_as(&self, other: &ClauseMessageLaw) -> bool {
        self.support.len() == other.support.len()
            && self.support.iter().zip(&other.support).all(|(a, b)| {
                a.ln_u0 == b.ln_u0 && a.ln_u1 == b.ln_u1 && (a.prob - b.prob).abs() <= 1e-14
            })
    }

    pub fn total_probability(&self) -> f64 {
        self.support.iter().map(|p| p.prob).sum()
    }
}

/// Calls `f` with every index vector in `0..base` of the given length.
fn for_each_draw(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            idx[i] += 1;
            if idx[i] < base {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn aggregate(mut points: Vec<LawPoint>) -> Vec<LawPoint> {
    points.sort_by(|a, b| a.ln_u0.total_cmp(&b.ln_u0).then(a.ln_u1.total_cmp(&b.ln_u1)));
    let mut out: Vec<LawPoint> = Vec::with_capacity(points.len());
    for p in points {
        match out.last_mut() {
            Some(q) if q.ln_u0 == p.ln_u0 && q.ln_u1 == p.ln_u1 => q.prob += p.prob,
            _ => out.push(p),
        }
    }
    out
}

/// Law of `(u(0), u(1))` with `u(x) = 1 - (1 - e^-beta) prod_{j>=2} rho_j(x ^ L_1 ^ L_j)`,
/// enumerating all `|atoms|^(k-1)` draws and merging identical pairs.
pub fn clause_message_law(eta: &AtomicMeasure, spec: &ThetaSpec) -> Result<ClauseMessageLaw> {
    clause_message_law_with(eta, spec, true)
}

/// As `clause_message_law`; with `merge = false` every draw stays a separate point.
pub fn clause_message_law_with(
    eta: &AtomicMeasure,
    spec: &ThetaSpec,
    merge: bool,
) -> Result<ClauseMessageLaw> {
    let lits = spec
        .fixed_literals()
        .ok_or_else(|| Error::InvalidParameter("clause law needs fixed literals".into()))?;
    let k = spec.k as usize;
    let (eps, c) = (spec.epsilon(), spec.strength());
    let atoms = &eta.atoms;
    let mut points = Vec::new();
    for_each_draw(atoms.len(), k - 1, |draw| {
        let prob = product_sorted(draw.iter().map(|&i| atoms[i].mass).collect());
        let side = |x: u8| {
            sum_sorted(
                draw.iter()
                    .enumerate()
                    .map(|(pos, &i)| atoms[i].ln_at(x ^ lits[0] ^ lits[pos + 1]))
                    .collect(),
            )
        };
        points.push(LawPoint {
            ln_u0: ln_one_minus(side(0), eps, c),
            ln_u1: ln_one_minus(side(1), eps, c),
            prob,
        });
    });
    let support = if merge { aggregate(points) } else { points };
    Ok(ClauseMessageLaw { support })
}

/// Support of `ln u_0` with
/// `u_0 = 1 - (1 - e^-beta)(prod_i rho_i(L_i) + prod_i rho_i(1 ^ L_i))`
/// over all `|atoms|^k` draws, as `(ln u_0, probability)` pairs.
pub fn root_law(eta: &AtomicMeasure, spec: &ThetaSpec) -> Result<Vec<(f64, f64)>> {
    let lits = spec
        .fixed_literals()
        .ok_or_else(|| Error::InvalidParameter("root law needs fixed literals".into()))?;
    let k = spec.k as usize;
    let eps = spec.epsilon();
    let atoms = &eta.atoms;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for_each_draw(atoms.len(), k, |draw| {
        let prob = product_sorted(draw.iter().map(|&i| atoms[i].mass).collect());
        let side = |flip: u8| {
            sum_sorted(
                draw.iter()
                    .enumerate()
                    .map(|(pos, &i)| atoms[i].ln_at(lits[pos] ^ flip))
                    .collect(),
            )
        };
        let (a, b) = (side(0), side(1));
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        let mass = hi.exp() + lo.exp();
        let ln_u = if spec.beta == 0.0 {
            0.0
        } else {
            let deficit = (-hi.exp_m1() - lo.exp()).max(0.0);
            (deficit + eps * mass).ln()
        };
        out.push((ln_u, prob));
    });
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (v, p) in out {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => merged.push((v, p)),
        }
    }
    Ok(merged)
}
