//! Brute-force enumerators over configuration-model matchings.
//!
//! Variable `v` owns half-edges `v*d .. v*d + d`; clause `a` owns slots
//! `a*k .. a*k + k`. A matching sends half-edge `i` to slot `perm[i]`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest `n*d` accepted by the full permutation enumerators.
pub const PERMUTATION_LIMIT: u64 = 10;

/// Largest number of distinct slot words accepted by the word enumerators.
pub const WORD_LIMIT: u128 = 5_000_000;

fn check(n: u64, k: u64, d: u64) -> Result<u64> {
    if k < 2 || n == 0 || d == 0 {
        return Err(Error::InvalidParameter("need n, d >= 1 and k >= 2".into()));
    }
    if !(n * d).is_multiple_of(k) {
        return Err(Error::Divisibility { n, k, d });
    }
    Ok(n * d / k)
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Heap's algorithm; calls `f` on every permutation of `0..len`.
fn for_each_permutation(len: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..len).collect();
    let mut c = vec![0usize; len];
    f(&a);
    let mut i = 0;
    while i < len {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Every word over variables `0..n` using each variable exactly `d` times.
fn for_each_word(n: usize, d: usize, mut f: impl FnMut(&[usize])) {
    fn rec(pos: usize, word: &mut [usize], left: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if pos == word.len() {
            f(word);
            return;
        }
        for v in 0..left.len() {
            if left[v] > 0 {
                left[v] -= 1;
                word[pos] = v;
                rec(pos + 1, word, left, f);
                left[v] += 1;
            }
        }
    }
    let mut word = vec![0; n * d];
    let mut left = vec![d; n];
    rec(0, &mut word, &mut left, &mut f);
}

fn word_count(n: u64, d: u64) -> BigUint {
    factorial(n * d) / factorial(d).pow(n as u32)
}

/// Proper 2-colorings of the hypergraph whose slot `j` holds variable `word[j]`.
fn proper_colorings(word: &[usize], n: usize, k: usize) -> u64 {
    let mut total = 0;
    for x in 0u64..(1 << n) {
        let ok = word.chunks(k).all(|clause| {
            let ones = clause.iter().filter(|&&v| x >> v & 1 == 1).count();
            ones != 0 && ones != k
        });
        total += ok as u64;
    }
    total
}

/// Sum over assignments of the number of literal patterns making every
/// clause not-all-equal, found by trying all `2^k` literal vectors per clause.
fn nae_pattern_weight(word: &[usize], n: usize, k: usize) -> BigUint {
    let mut total = BigUint::zero();
    for x in 0u64..(1 << n) {
        let mut prod = BigUint::one();
        for clause in word.chunks(k) {
            let mut good = 0u64;
            for lits in 0u64..(1 << k) {
                let ones = clause
                    .iter()
                    .enumerate()
                    .filter(|(i, &v)| ((x >> v) ^ (lits >> i)) & 1 == 1)
                    .count();
                good += (ones != 0 && ones != k) as u64;
            }
            prod *= good;
        }
        total += prod;
    }
    total
}

fn slot_word(perm: &[usize], d: usize) -> Vec<usize> {
    let mut word = vec![0; perm.len()];
    for (half_edge, &slot) in perm.iter().enumerate() {
        word[slot] = half_edge / d;
    }
    word
}

/// Average number of proper 2-colorings over all `(nd)!` matchings.
pub fn matching_average_col(n: u64, k: u64, d: u64) -> Result<BigRational> {
    check(n, k, d)?;
    if n * d > PERMUTATION_LIMIT {
        return Err(Error::SizeCap { n: (n * d) as usize, cap: PERMUTATION_LIMIT as usize });
    }
    let mut total = 0u64;
    for_each_permutation((n * d) as usize, |perm| {
        total += proper_colorings(&slot_word(perm, d as usize), n as usize, k as usize);
    });
    Ok(BigRational::new(BigInt::from(total), BigInt::from(factorial(n * d))))
}

/// Fraction of all `(nd)!` matchings under which the fixed `coloring` is proper.
pub fn matching_fraction_proper(n: u64, k: u64, d: u64, coloring: &[bool]) -> Result<BigRational> {
    check(n, k, d)?;
    if coloring.len() != n as usize {
        return Err(Error::InvalidParameter("coloring length must equal n".into()));
    }
    if n * d > PERMUTATION_LIMIT {
        return Err(Error::SizeCap { n: (n * d) as usize, cap: PERMUTATION_LIMIT as usize });
    }
    let mut good = 0u64;
    for_each_permutation((n * d) as usize, |perm| {
        let word = slot_word(perm, d as usize);
        let ok = word.chunks(k as usize).all(|clause| {
            let ones = clause.iter().filter(|&&v| coloring[v]).count();
            ones != 0 && ones != k as usize
        });
        good += ok as u64;
    });
    Ok(BigRational::new(BigInt::from(good), BigInt::from(factorial(n * d))))
}

/// Average NAE solution count over all `(nd)!` matchings and all `2^(nd)`
/// literal patterns.
pub fn matching_average_nae(n: u64, k: u64, d: u64) -> Result<BigRational> {
    check(n, k, d)?;
    if n * d > PERMUTATION_LIMIT {
        return Err(Error::SizeCap { n: (n * d) as usize, cap: PERMUTATION_LIMIT as usize });
    }
    let mut total = BigUint::zero();
    for_each_permutation((n * d) as usize, |perm| {
        total += nae_pattern_weight(&slot_word(perm, d as usize), n as usize, k as usize);
    });
    let den = factorial(n * d) << (n * d) as usize;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(den)))
}

fn check_words(n: u64, d: u64) -> Result<()> {
    let count = word_count(n, d);
    if count > BigUint::from(WORD_LIMIT) {
        return Err(Error::InvalidParameter(format!(
            "{count} slot words exceed the enumeration limit of {WORD_LIMIT}"
        )));
    }
    Ok(())
}

/// Same average as `matching_average_col`, enumerating slot words instead.
///
/// Each word is the image of exactly `(d!)^n` matchings, so averaging over
/// words is exact.
pub fn word_average_col(n: u64, k: u64, d: u64) -> Result<BigRational> {
    check(n, k, d)?;
    check_words(n, d)?;
    let mut total = 0u64;
    for_each_word(n as usize, d as usize, |w| {
        total += proper_colorings(w, n as usize, k as usize);
    });
    Ok(BigRational::new(BigInt::from(total), BigInt::from(word_count(n, d))))
}

/// Same average as `matching_average_nae`, enumerating slot words.
pub fn word_average_nae(n: u64, k: u64, d: u64) -> Result<BigRational> {
    check(n, k, d)?;
    check_words(n, d)?;
    let mut total = BigUint::zero();
    for_each_word(n as usize, d as usize, |w| {
        total += nae_pattern_weight(w, n as usize, k as usize);
    });
    let den = word_count(n, d) << (n * d) as usize;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(den)))
}

/// Calls `f` on every slot word of the `(n, k, d)` configuration model.
pub fn for_each_slot_word(n: u64, k: u64, d: u64, f: impl FnMut(&[usize])) -> Result<()> {
    check(n, k, d)?;
    check_words(n, d)?;
    for_each_word(n as usize, d as usize, f);
    Ok(())
}
