use serde::Serialize;

use super::instance::NaeInstance;
use crate::error::{Error, Result};

/// Largest `n` for exhaustive counting.
pub const COUNT_MAX_N: usize = 34;
/// Largest `n` for the exact partition function.
pub const PARTITION_MAX_N: usize = 30;

/// Clause indices grouped by their highest-indexed variable.
fn closing_clauses(inst: &NaeInstance) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); inst.n];
    for (a, c) in inst.clauses.iter().enumerate() {
        out[*c.iter().max().expect("clauses are nonempty")].push(a);
    }
    out
}

fn monochromatic(inst: &NaeInstance, a: usize, x: &[u8]) -> bool {
    let ones = inst.clauses[a]
        .iter()
        .zip(&inst.literals[a])
        .filter(|(&v, &l)| x[v] ^ l == 1)
        .count();
    ones == 0 || ones == inst.k
}

struct Search<'a> {
    inst: &'a NaeInstance,
    closing: Vec<Vec<usize>>,
    x: Vec<u8>,
    count: u64,
    stop_at_first: bool,
}

impl Search<'_> {
    fn run(&mut self, v: usize) {
        if v == self.inst.n {
            self.count += 1;
            return;
        }
        for bit in 0..=1u8 {
            // flipping every variable maps solutions to solutions, so fix x_0 = 0
            if v == 0 && bit == 1 {
                break;
            }
            self.x[v] = bit;
            if self.closing[v].iter().all(|&a| !monochromatic(self.inst, a, &self.x)) {
                self.run(v + 1);
                if self.stop_at_first && self.count > 0 {
                    return;
                }
            }
        }
    }
}

fn search(inst: &NaeInstance, stop_at_first: bool) -> Result<u64> {
    if inst.n > COUNT_MAX_N {
        return Err(Error::SizeCap { n: inst.n, cap: COUNT_MAX_N });
    }
    let mut s = Search {
        inst,
        closing: closing_clauses(inst),
        x: vec![0; inst.n],
        count: 0,
        stop_at_first,
    };
    s.run(0);
    Ok(2 * s.count)
}

/// Exact number of NAE solutions (proper 2-colorings for coloring instances),
/// by depth-first search that prunes on completed monochromatic clauses.
pub fn count_solutions(inst: &NaeInstance) -> Result<u64> {
    search(inst, false)
}

/// Whether at least one solution exists.
pub fn is_satisfiable(inst: &NaeInstance) -> Result<bool> {
    search(inst, true).map(|c| c > 0)
}

/// `hist[j]` is the number of assignments violating exactly `j` clauses.
/// Walks all `2^n` assignments in Gray-code order.
pub fn violation_histogram(inst: &NaeInstance) -> Result<Vec<u64>> {
    if inst.n > PARTITION_MAX_N {
        return Err(Error::SizeCap { n: inst.n, cap: PARTITION_MAX_N });
    }
    // occurrences of each variable, flattened: clause index and literal bit
    let mut start = vec![0usize; inst.n + 1];
    for (v, _) in inst.slots() {
        start[v + 1] += 1;
    }
    for v in 0..inst.n {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut occ = vec![(0u32, 0u8); inst.m * inst.k];
    for (a, (c, l)) in inst.clauses.iter().zip(&inst.literals).enumerate() {
        for (&v, &b) in c.iter().zip(l) {
            occ[fill[v]] = (a as u32, b);
            fill[v] += 1;
        }
    }
    let mut bad = vec![0i64; inst.k + 1];
    bad[0] = 1;
    bad[inst.k] = 1;
    let mut x = vec![0u8; inst.n];
    let mut ones: Vec<usize> = inst
        .literals
        .iter()
        .map(|l| l.iter().map(|&b| b as usize).sum())
        .collect();
    let mut violated: i64 = ones.iter().map(|&o| bad[o]).sum();
    let mut hist = vec![0u64; inst.m + 1];
    hist[violated as usize] += 1;
    for i in 1u64..(1u64 << inst.n) {
        let v = i.trailing_zeros() as usize;
        x[v] ^= 1;
        let xv = x[v];
        for &(a, b) in &occ[start[v]..start[v + 1]] {
            let o = &mut ones[a as usize];
            violated -= bad[*o];
            // the slot value x_v ^ b just flipped
            *o = if xv ^ b == 1 { *o + 1 } else { *o - 1 };
            violated += bad[*o];
        }
        hist[violated as usize] += 1;
    }
    Ok(hist)
}

/// `ln sum_j hist[j] e^(-beta j)`. At `beta = 0` this is exactly `n ln 2`.
pub fn log_partition_from_histogram(hist: &[u64], n: usize, beta: f64) -> f64 {
    if beta == 0.0 {
        return n as f64 * std::f64::consts::LN_2;
    }
    let terms: Vec<f64> = hist
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(j, &h)| (h as f64).ln() - beta * j as f64)
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsSummary {
    pub beta: f64,
    pub log_z: f64,
    pub solution_count: Option<u64>,
    pub free_energy_per_var: f64,
}

/// Exact `ln Z` where each violated clause contributes a factor `e^(-beta)`.
pub fn partition_function(inst: &NaeInstance, beta: f64) -> Result<GibbsSummary> {
    if !(beta >= 0.0) || beta.is_infinite() {
        return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
    }
    let hist = violation_histogram(inst)?;
    let log_z = log_partition_from_histogram(&hist, inst.n, beta);
    Ok(GibbsSummary {
        beta,
        log_z,
        solution_count: Some(hist[0]),
        free_energy_per_var: log_z / inst.n as f64,
    })
}
