use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::Hp;

/// Largest n handled with exact rationals in `ratio_scan`.
pub const EXACT_N_MAX: u64 = 400;

/// Working precision (bits) of the float path used above `EXACT_N_MAX`.
const FLOAT_BITS: usize = 128;

fn clause_count(n: u64, k: u64, d: u64) -> Result<u64> {
    if k < 2 || n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 1, d >= 1, k >= 2 (got n={n}, k={k}, d={d})"
        )));
    }
    if !(n * d).is_multiple_of(k) {
        return Err(Error::Divisibility { n, k, d });
    }
    Ok(n * d / k)
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn rational(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Coefficients of `((1+z)^k - 1 - z^k)^m`, indices `0..=k*m`.
///
/// Entry `s` counts the ways to place `s` ones among `m` blocks of size `k`
/// with no block all-zero or all-one.
fn proper_coefficients(k: u64, m: u64) -> Vec<BigUint> {
    let kk = k as usize;
    let weights: Vec<BigUint> = (0..=k).map(|j| binomial(k, j)).collect();
    let len = kk * m as usize + 1;
    let mut cur = vec![BigUint::zero(); len];
    let mut next = vec![BigUint::zero(); len];
    cur[0] = BigUint::one();
    for i in 0..m as usize {
        // support of cur is [i, i(k-1)]
        for s in i + 1..=(i + 1) * (kk - 1) {
            let mut acc = BigUint::zero();
            for j in 1..kk {
                if s >= j && s - j >= i && s - j <= i * (kk - 1) {
                    acc += &cur[s - j] * &weights[j];
                }
            }
            next[s] = acc;
        }
        for v in cur.iter_mut() {
            v.set_zero();
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `2^n (1 - 2^(1-k))^m` with `m = nd/k`.
pub fn ez_nae(n: u64, k: u64, d: u64) -> Result<BigRational> {
    let m = clause_count(n, k, d)?;
    let two = BigUint::from(2u32);
    let num = two.pow(n as u32) * (two.pow(k as u32 - 1) - 1u32).pow(m as u32);
    let den = two.pow(((k - 1) * m) as u32);
    Ok(rational(num, den))
}

fn ones_total(k: u64, m: u64, gamma: &BigRational) -> Result<usize> {
    if gamma.is_negative() || *gamma > BigRational::one() {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0,1], got {gamma}")));
    }
    let s = gamma * BigRational::from_integer(BigInt::from(k * m));
    if !s.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "k*m*gamma must be an integer (k={k}, m={m}, gamma={gamma})"
        )));
    }
    Ok(s.to_integer().to_usize().expect("non-negative"))
}

/// `P(X_i not in {0,k} for all i | sum X_i = k m gamma)` for iid `Binom(k, gamma)`.
///
/// Conditioned on the sum, the `km` Bernoulli trials are a uniform subset of
/// size `S = k m gamma`, so the answer is the number of proper placements
/// divided by `C(km, S)`; gamma itself drops out.
pub fn p_gamma(n: u64, m: u64, k: u64, gamma: &BigRational) -> Result<BigRational> {
    if n == 0 || m == 0 || k < 2 {
        return Err(Error::InvalidParameter(format!("need n, m >= 1 and k >= 2 (n={n}, m={m}, k={k})")));
    }
    let s = ones_total(k, m, gamma)?;
    let coeffs = proper_coefficients(k, m);
    Ok(rational(coeffs[s].clone(), binomial(k * m, s as u64)))
}

/// Same probability by convolving the truncated `Binom(k, gamma)` law `m`
/// times and dividing by the `Binom(km, gamma)` mass, with gamma kept.
pub fn p_gamma_by_convolution(m: u64, k: u64, gamma: &BigRational) -> Result<BigRational> {
    let s = ones_total(k, m, gamma)?;
    let one = BigRational::one();
    let q = &one - gamma;
    let pow = |b: &BigRational, e: u64| -> BigRational {
        let mut acc = BigRational::one();
        for _ in 0..e {
            acc *= b;
        }
        acc
    };
    let bin = |n: u64, r: u64| BigRational::from_integer(BigInt::from(binomial(n, r)));
    let pmf: Vec<BigRational> = (0..=k).map(|j| bin(k, j) * pow(gamma, j) * pow(&q, k - j)).collect();

    let len = (k * m) as usize + 1;
    let mut dist = vec![BigRational::zero(); len];
    dist[0] = one.clone();
    for _ in 0..m {
        let mut next = vec![BigRational::zero(); len];
        for (t, w) in dist.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for j in 1..k as usize {
                if t + j < len {
                    next[t + j] += w * &pmf[j];
                }
            }
        }
        dist = next;
    }
    let den = bin(k * m, s as u64) * pow(gamma, s as u64) * pow(&q, k * m - s as u64);
    if den.is_zero() {
        return Err(Error::EmptyConditioning);
    }
    Ok(&dist[s] / den)
}

/// One term of the sum over color classes.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow {
    pub n: u64,
    /// Number of variables colored 1.
    pub ones: u64,
    pub gamma: BigRational,
    pub binom: BigUint,
    pub p_gamma: BigRational,
    pub contribution: BigRational,
    /// `|gamma - 1/2| <= n^(-1/3)`
    pub in_window: bool,
}

/// All terms `C(n, t) p_{t/n}` for `t = 0..=n`.
pub fn gamma_rows(n: u64, k: u64, d: u64) -> Result<Vec<GammaRow>> {
    let m = clause_count(n, k, d)?;
    let coeffs = proper_coefficients(k, m);
    let radius = (n as f64).powf(-1.0 / 3.0);
    Ok((0..=n)
        .map(|t| {
            let s = t * d;
            let p = rational(coeffs[s as usize].clone(), binomial(n * d, s));
            let binom = binomial(n, t);
            let contribution = &p * BigRational::from_integer(BigInt::from(binom.clone()));
            GammaRow {
                n,
                ones: t,
                gamma: BigRational::new(BigInt::from(t), BigInt::from(n)),
                binom,
                p_gamma: p,
                contribution,
                in_window: (t as f64 / n as f64 - 0.5).abs() <= radius,
            }
        })
        .collect())
}

/// `sum_t C(n, t) p_{t/n}`: the expected number of proper 2-colorings.
pub fn ez_col(n: u64, k: u64, d: u64) -> Result<BigRational> {
    Ok(gamma_rows(n, k, d)?
        .into_iter()
        .fold(BigRational::zero(), |acc, r| acc + r.contribution))
}

fn hp_from_biguint(hp: &mut Hp, v: &BigUint) -> BigFloat {
    hp.num(&v.to_string())
}

/// `ez_col` in floating point at `bits` precision, for n beyond the exact range.
pub fn ez_col_float(n: u64, k: u64, d: u64, bits: usize) -> Result<BigFloat> {
    let m = clause_count(n, k, d)?;
    let mut hp = Hp::with_bits(bits);
    let kk = k as usize;
    let weights: Vec<BigFloat> = (0..=k).map(|j| hp_from_biguint(&mut hp, &binomial(k, j))).collect();
    let len = kk * m as usize + 1;
    let zero = hp.int(0);
    let mut cur = vec![zero.clone(); len];
    cur[0] = hp.int(1);
    for i in 0..m as usize {
        let mut next = vec![zero.clone(); len];
        for s in i + 1..=(i + 1) * (kk - 1) {
            let mut acc = zero.clone();
            for j in 1..kk {
                if s >= j && s - j >= i && s - j <= i * (kk - 1) {
                    acc = hp.add(&acc, &hp.mul(&cur[s - j], &weights[j]));
                }
            }
            next[s] = acc;
        }
        cur = next;
    }
    // Binomials built incrementally to stay in floating point.
    let nd = n * d;
    let mut binom_nd = vec![hp.int(1); nd as usize + 1];
    for s in 1..=nd as usize {
        let r = hp.ratio((nd - s as u64 + 1) as i64, s as i64);
        binom_nd[s] = hp.mul(&binom_nd[s - 1], &r);
    }
    let mut binom_n = hp.int(1);
    let mut total = zero;
    for t in 0..=n {
        if t > 0 {
            let r = hp.ratio((n - t + 1) as i64, t as i64);
            binom_n = hp.mul(&binom_n, &r);
        }
        let s = (t * d) as usize;
        let p = hp.div(&cur[s], &binom_nd[s]);
        total = hp.add(&total, &hp.mul(&binom_n, &p));
    }
    Ok(total)
}

fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational of any size.
pub fn ln_big_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "ln of a non-positive rational");
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstMomentReport {
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub d: u64,
    /// Decimal rendering, 30 significant digits.
    pub ez_nae: String,
    pub ez_col: String,
    pub ratio: f64,
    pub ln_ez_nae_per_n: f64,
    pub ln_ez_col_per_n: f64,
    pub exact: bool,
    #[serde(skip)]
    pub exact_values: Option<(BigRational, BigRational)>,
}

fn decimal_of_rational(hp: &mut Hp, r: &BigRational) -> String {
    let num = hp_from_biguint(hp, r.numer().magnitude());
    let den = hp_from_biguint(hp, r.denom().magnitude());
    let q = hp.div(&num, &den);
    hp.to_sci(&q, 30)
}

fn report(n: u64, k: u64, d: u64) -> Result<FirstMomentReport> {
    let m = clause_count(n, k, d)?;
    if n <= EXACT_N_MAX {
        let nae = ez_nae(n, k, d)?;
        let col = ez_col(n, k, d)?;
        let ratio = (&col / &nae).to_f64().unwrap_or(f64::NAN);
        let mut hp = Hp::with_bits(FLOAT_BITS);
        return Ok(FirstMomentReport {
            n,
            m,
            k,
            d,
            ez_nae: decimal_of_rational(&mut hp, &nae),
            ez_col: decimal_of_rational(&mut hp, &col),
            ratio,
            ln_ez_nae_per_n: ln_big_rational(&nae) / n as f64,
            ln_ez_col_per_n: ln_big_rational(&col) / n as f64,
            exact: true,
            exact_values: Some((nae, col)),
        });
    }
    let mut hp = Hp::with_bits(FLOAT_BITS);
    let col = ez_col_float(n, k, d, FLOAT_BITS)?;
    let two = hp.int(2);
    let base = hp.sub(&hp.int(1), &hp.div(&hp.int(1), &hp.powi(&two, (k - 1) as usize)));
    let nae = hp.mul(&hp.powi(&two, n as usize), &hp.powi(&base, m as usize));
    let ratio = hp.div(&col, &nae);
    let (ln_nae, ln_col) = (hp.ln(&nae), hp.ln(&col));
    Ok(FirstMomentReport {
        n,
        m,
        k,
        d,
        ez_nae: hp.to_sci(&nae, 30),
        ez_col: hp.to_sci(&col, 30),
        ratio: hp.to_f64(&ratio),
        ln_ez_nae_per_n: hp.to_f64(&ln_nae) / n as f64,
        ln_ez_col_per_n: hp.to_f64(&ln_col) / n as f64,
        exact: false,
        exact_values: None,
    })
}

/// `E Z_col / E Z_nae` for each n, exact up to `EXACT_N_MAX` and at 128-bit
/// precision beyond.
pub fn ratio_scan(k: u64, d: u64, n_list: &[u64]) -> Result<Vec<FirstMomentReport>> {
    n_list.iter().map(|&n| report(n, k, d)).collect()
}
