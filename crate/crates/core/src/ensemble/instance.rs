use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Model;

/// Random generator for substream `stream` of a master seed. Trial `i` of
/// any experiment uses stream `i`, so single trials can be replayed alone.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A configuration-model instance. Clause `a` holds variables
/// `clauses[a][0..k]` with literal bits `literals[a][0..k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaeInstance {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub d: usize,
    pub clauses: Vec<Vec<usize>>,
    pub literals: Vec<Vec<u8>>,
    /// No clause repeats a variable.
    pub simple: bool,
}

fn check_shape(n: usize, k: usize, d: usize) -> Result<usize> {
    if n == 0 || d == 0 || k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1, d >= 1, k >= 2 (got n = {n}, k = {k}, d = {d})"
        )));
    }
    if !(n * d).is_multiple_of(k) {
        return Err(Error::Divisibility { n: n as u64, k: k as u64, d: d as u64 });
    }
    Ok(n * d / k)
}

fn no_repeats(clause: &[usize]) -> bool {
    clause.iter().enumerate().all(|(i, v)| !clause[..i].contains(v))
}

impl NaeInstance {
    /// Builds an instance and checks every structural invariant.
    pub fn from_parts(
        model: Model,
        n: usize,
        k: usize,
        d: usize,
        clauses: Vec<Vec<usize>>,
        literals: Vec<Vec<u8>>,
    ) -> Result<Self> {
        let m = check_shape(n, k, d).map_err(|e| match e {
            Error::Divisibility { .. } => {
                Error::InvalidInstance(format!("n*d = {} is not a multiple of k = {k}", n * d))
            }
            e => e,
        })?;
        if clauses.len() != m || literals.len() != m {
            return Err(Error::InvalidInstance(format!(
                "expected {m} clauses, got {} clause and {} literal rows",
                clauses.len(),
                literals.len()
            )));
        }
        let mut degree = vec![0usize; n];
        for (a, (c, l)) in clauses.iter().zip(&literals).enumerate() {
            if c.len() != k || l.len() != k {
                return Err(Error::InvalidInstance(format!("clause {} does not have {k} slots", a + 1)));
            }
            for &v in c {
                if v >= n {
                    return Err(Error::InvalidInstance(format!(
                        "clause {} names variable {} beyond n = {n}",
                        a + 1,
                        v + 1
                    )));
                }
                degree[v] += 1;
            }
            if l.iter().any(|&b| b > 1) {
                return Err(Error::InvalidInstance(format!("clause {} has a literal other than 0/1", a + 1)));
            }
            if model == Model::Coloring && l.iter().any(|&b| b != 0) {
                return Err(Error::InvalidInstance(format!(
                    "clause {} has a nonzero literal in a coloring instance",
                    a + 1
                )));
            }
        }
        if let Some(v) = degree.iter().position(|&x| x != d) {
            return Err(Error::InvalidInstance(format!(
                "variable {} appears {} times, expected degree {d}",
                v + 1,
                degree[v]
            )));
        }
        let simple = clauses.iter().all(|c| no_repeats(c));
        Ok(NaeInstance { model, n, m, k, d, clauses, literals, simple })
    }

    /// Uniform matching of half-edges to clause slots, drawn from `rng`.
    pub fn sample_with(n: usize, k: usize, d: usize, model: Model, rng: &mut impl Rng) -> Result<Self> {
        let m = check_shape(n, k, d)?;
        let mut half_edges: Vec<usize> = (0..n * d).map(|i| i / d).collect();
        half_edges.shuffle(rng);
        let clauses: Vec<Vec<usize>> = half_edges.chunks(k).map(|c| c.to_vec()).collect();
        let literals: Vec<Vec<u8>> = (0..m)
            .map(|_| match model {
                Model::Coloring => vec![0; k],
                Model::Nae => (0..k).map(|_| rng.gen_range(0..=1u8)).collect(),
            })
            .collect();
        let simple = clauses.iter().all(|c| no_repeats(c));
        Ok(NaeInstance { model, n, m, k, d, clauses, literals, simple })
    }

    /// Variable indices of every slot, clause by clause.
    pub fn slots(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.clauses
            .iter()
            .zip(&self.literals)
            .flat_map(|(c, l)| c.iter().copied().zip(l.iter().copied()))
    }

    /// Overwrites the variable of every slot from a flat word of length `m*k`.
    pub fn with_slot_word(&self, word: &[usize]) -> Result<Self> {
        let clauses = word.chunks(self.k).map(|c| c.to_vec()).collect();
        NaeInstance::from_parts(self.model, self.n, self.k, self.d, clauses, self.literals.clone())
    }
}

/// Samples an instance from substream 0 of `seed`. With `require_simple`,
/// rejected draws are retried from the same stream up to `max_retries` times.
pub fn sample_instance(
    n: usize,
    k: usize,
    d: usize,
    seed: u64,
    model: Model,
    require_simple: bool,
    max_retries: usize,
) -> Result<NaeInstance> {
    sample_instance_from(&mut substream(seed, 0), n, k, d, model, require_simple, max_retries)
}

pub(crate) fn sample_instance_from(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: usize,
    d: usize,
    model: Model,
    require_simple: bool,
    max_retries: usize,
) -> Result<NaeInstance> {
    let mut tries = 0;
    loop {
        let inst = NaeInstance::sample_with(n, k, d, model, rng)?;
        if !require_simple || inst.simple {
            return Ok(inst);
        }
        tries += 1;
        if tries > max_retries {
            return Err(Error::RetriesExhausted { retries: max_retries });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_instance_shape() {
        let inst = sample_instance(6, 3, 2, 1, Model::Nae, false, 0).unwrap();
        assert_eq!(inst.m, 4);
        let mut deg = [0; 6];
        for (v, _) in inst.slots() {
            deg[v] += 1;
        }
        assert_eq!(deg, [2; 6]);
    }

    #[test]
    fn deterministic() {
        let a = sample_instance(12, 3, 4, 99, Model::Nae, false, 0).unwrap();
        let b = sample_instance(12, 3, 4, 99, Model::Nae, false, 0).unwrap();
        assert_eq!(a, b);
        let c = sample_instance(12, 3, 4, 100, Model::Nae, false, 0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn coloring_literals_zero() {
        let inst = sample_instance(12, 3, 4, 5, Model::Coloring, false, 0).unwrap();
        assert!(inst.literals.iter().flatten().all(|&b| b == 0));
    }

    #[test]
    fn divisibility_refused() {
        assert!(matches!(
            sample_instance(5, 3, 2, 1, Model::Nae, false, 0),
            Err(Error::Divisibility { .. })
        ));
        assert!(sample_instance(6, 3, 0, 1, Model::Nae, false, 0).is_err());
    }

    #[test]
    fn simple_sampling_usually_succeeds() {
        let ok = (0..100)
            .filter(|&s| sample_instance(30, 3, 7, s, Model::Coloring, true, 1000).is_ok())
            .count();
        assert!(ok > 50, "{ok}");
        let inst = sample_instance(30, 3, 7, 3, Model::Coloring, true, 1000).unwrap();
        assert!(inst.simple);
    }

    #[test]
    fn retries_exhausted() {
        // two variables of degree 3 in clauses of size 3: every clause repeats
        let r = sample_instance(2, 3, 3, 1, Model::Nae, true, 5);
        assert!(matches!(r, Err(Error::RetriesExhausted { retries: 5 })));
    }

    #[test]
    fn degree_violation_names_variable() {
        let err = NaeInstance::from_parts(
            Model::Coloring,
            3,
            3,
            1,
            vec![vec![0, 0, 2]],
            vec![vec![0, 0, 0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("variable 1 appears 2 times"), "{err}");
    }

    proptest! {
        #[test]
        fn sampled_instances_are_valid(n in 1usize..20, k in 2usize..6, d in 1usize..6, seed: u64) {
            prop_assume!((n * d) % k == 0);
            let inst = sample_instance(n, k, d, seed, Model::Nae, false, 0).unwrap();
            let rebuilt = NaeInstance::from_parts(inst.model, n, k, d, inst.clauses.clone(), inst.literals.clone()).unwrap();
            prop_assert_eq!(rebuilt, inst);
        }
    }
}
