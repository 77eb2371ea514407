use rand::Rng;
use serde::Serialize;

use super::instance::{substream, NaeInstance};
use super::solve::{is_satisfiable, log_partition_from_histogram, violation_histogram};
use crate::error::{Error, Result};
use crate::model::Model;

/// Largest `n` for the resampling experiment.
pub const RESAMPLE_MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResampleReport {
    pub beta: f64,
    pub trials: usize,
    pub max_abs_delta: f64,
    /// `2 beta`; a swap touches at most two clauses.
    pub bound: f64,
    pub within_bound: bool,
    pub deltas: Vec<f64>,
}

/// Repeatedly swaps one slot of a random clause with another random slot and
/// records the change in `ln Z`. Every trial starts from `inst`.
pub fn clause_resample_sensitivity(inst: &NaeInstance, beta: f64, trials: usize, seed: u64) -> Result<ResampleReport> {
    Ok(clause_resample_multi(inst, &[beta], trials, seed)?.remove(0))
}

/// `clause_resample_sensitivity` for several betas, sharing the exhaustive
/// enumeration of each resampled instance.
pub fn clause_resample_multi(inst: &NaeInstance, betas: &[f64], trials: usize, seed: u64) -> Result<Vec<ResampleReport>> {
    if inst.n > RESAMPLE_MAX_N {
        return Err(Error::SizeCap { n: inst.n, cap: RESAMPLE_MAX_N });
    }
    if let Some(b) = betas.iter().find(|b| !(**b >= 0.0) || b.is_infinite()) {
        return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {b}")));
    }
    let base_hist = violation_histogram(inst)?;
    let base: Vec<f64> = betas.iter().map(|&b| log_partition_from_histogram(&base_hist, inst.n, b)).collect();
    let total = inst.m * inst.k;
    let mut deltas = vec![Vec::with_capacity(trials); betas.len()];
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        let a = rng.gen_range(0..inst.m);
        let s = a * inst.k + rng.gen_range(0..inst.k);
        let other = if total > 1 {
            let r = rng.gen_range(0..total - 1);
            if r >= s { r + 1 } else { r }
        } else {
            s
        };
        let mut word: Vec<usize> = inst.clauses.iter().flatten().copied().collect();
        word.swap(s, other);
        let moved = inst.with_slot_word(&word)?;
        let hist = violation_histogram(&moved)?;
        for (i, &b) in betas.iter().enumerate() {
            deltas[i].push(log_partition_from_histogram(&hist, moved.n, b) - base[i]);
        }
    }
    Ok(betas
        .iter()
        .zip(deltas)
        .map(|(&beta, deltas)| {
            let max_abs_delta = deltas.iter().fold(0.0f64, |a, d| a.max(d.abs()));
            ResampleReport {
                beta,
                trials,
                max_abs_delta,
                bound: 2.0 * beta,
                within_bound: max_abs_delta <= 2.0 * beta + 1e-9,
                deltas,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    /// Sample standard deviation of `ln Z / n`; absent for a single sample.
    pub std: Option<f64>,
    /// Approximate standard error of `std`, `std / sqrt(2 (samples - 1))`.
    pub std_error: Option<f64>,
}

/// Mean and spread of `ln Z / n` over seeded instances for each `n`.
/// Sample `s` at list position `i` uses substream `i * samples + s`.
pub fn concentration_experiment(
    n_list: &[usize],
    k: usize,
    d: usize,
    beta: f64,
    samples: usize,
    seed: u64,
    model: Model,
) -> Result<Vec<ConcentrationRow>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let mut vals = Vec::with_capacity(samples);
        for s in 0..samples {
            let mut rng = substream(seed, (i * samples + s) as u64);
            let inst = NaeInstance::sample_with(n, k, d, model, &mut rng)?;
            let hist = violation_histogram(&inst)?;
            vals.push(log_partition_from_histogram(&hist, n, beta) / n as f64);
        }
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let (std, std_error) = if samples > 1 {
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
            let sd = var.sqrt();
            (Some(sd), Some(sd / (2.0 * (samples - 1) as f64).sqrt()))
        } else {
            (None, None)
        };
        rows.push(ConcentrationRow { n, samples, mean, std, std_error });
    }
    Ok(rows)
}

/// Standard deviation non-increasing along the rows, up to two standard errors.
pub fn spread_non_increasing(rows: &[ConcentrationRow]) -> bool {
    rows.windows(2).all(|w| match (w[0].std, w[1].std, w[0].std_error, w[1].std_error) {
        (Some(a), Some(b), Some(ea), Some(eb)) => b <= a + 2.0 * (ea * ea + eb * eb).sqrt(),
        _ => false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: usize,
    pub trials: usize,
    pub satisfiable: usize,
    pub fraction: f64,
}

/// Fraction of satisfiable instances at each degree. Trial `t` at list
/// position `i` uses substream `i * trials + t`.
pub fn sat_sweep(k: usize, n: usize, d_list: &[usize], trials: usize, seed: u64, model: Model) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if let Some(&d) = d_list.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidParameter(format!("degree must be >= 1, got {d}")));
    }
    let mut rows = Vec::with_capacity(d_list.len());
    for (i, &d) in d_list.iter().enumerate() {
        let mut sat = 0;
        for t in 0..trials {
            let mut rng = substream(seed, (i * trials + t) as u64);
            let inst = NaeInstance::sample_with(n, k, d, model, &mut rng)?;
            sat += is_satisfiable(&inst)? as usize;
        }
        rows.push(SweepRow { d, trials, satisfiable: sat, fraction: sat as f64 / trials as f64 });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::sample_instance;

    #[test]
    fn resample_bound() {
        let inst = sample_instance(12, 3, 4, 11, Model::Nae, false, 0).unwrap();
        let r = clause_resample_sensitivity(&inst, 1.0, 50, 3).unwrap();
        assert!(r.within_bound, "{}", r.max_abs_delta);
        assert!(r.max_abs_delta <= 2.0 + 1e-9);
        assert!(r.deltas.iter().any(|d| *d != 0.0));
    }

    #[test]
    fn resample_zero_beta() {
        let inst = sample_instance(12, 3, 4, 11, Model::Coloring, false, 0).unwrap();
        let r = clause_resample_sensitivity(&inst, 0.0, 20, 3).unwrap();
        assert!(r.deltas.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn resample_single_clause() {
        let inst = NaeInstance::from_parts(Model::Nae, 3, 3, 1, vec![vec![0, 1, 2]], vec![vec![0, 1, 0]]).unwrap();
        let r = clause_resample_sensitivity(&inst, 2.5, 10, 1).unwrap();
        assert!(r.max_abs_delta <= 5.0 + 1e-9);
    }

    #[test]
    fn resample_cap() {
        let inst = sample_instance(27, 3, 1, 0, Model::Nae, false, 0).unwrap();
        assert!(clause_resample_sensitivity(&inst, 1.0, 1, 0).is_err());
    }

    #[test]
    fn concentration_degenerate_cases() {
        let one = concentration_experiment(&[12], 3, 4, 2.0, 1, 5, Model::Nae).unwrap();
        assert!(one[0].std.is_none());
        let zero = concentration_experiment(&[12, 18], 3, 4, 0.0, 5, 5, Model::Nae).unwrap();
        assert!(zero.iter().all(|r| r.std == Some(0.0)));
        assert!(concentration_experiment(&[12], 3, 4, 1.0, 0, 5, Model::Nae).is_err());
    }

    #[test]
    fn sweep_direction_and_determinism() {
        let a = sat_sweep(3, 12, &[2, 8], 40, 9, Model::Coloring).unwrap();
        assert!(a[0].fraction > a[1].fraction, "{a:?}");
        assert_eq!(a, sat_sweep(3, 12, &[2, 8], 40, 9, Model::Coloring).unwrap());
        assert!(sat_sweep(3, 12, &[0], 5, 9, Model::Coloring).is_err());
    }
}
