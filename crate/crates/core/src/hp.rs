//! Thin wrapper over `astro_float` with a fixed working precision.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Guard bits added on top of the requested decimal digits.
const GUARD_BITS: usize = 64;

pub struct Hp {
    bits: usize,
    cc: Consts,
}

impl Hp {
    pub fn with_bits(bits: usize) -> Self {
        Hp {
            bits,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    /// Working precision for `digits` significant decimal digits.
    pub fn with_digits(digits: usize) -> Self {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS;
        Self::with_bits(bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.bits)
    }

    pub fn ratio(&self, num: i64, den: i64) -> BigFloat {
        self.div(&self.int(num), &self.int(den))
    }

    /// Exact decimal literal such as `"0.4464"`, rounded once to working precision.
    pub fn num(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.bits)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.bits, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }

    /// `a^y = exp(y ln a)` for `a > 0`.
    pub fn pow(&mut self, a: &BigFloat, y: &BigFloat) -> Result<BigFloat> {
        if !a.is_positive() || a.is_zero() {
            return Err(Error::Domain("real power of a non-positive base".into()));
        }
        let l = self.ln(a);
        let t = self.mul(y, &l);
        Ok(self.exp(&t))
    }

    pub fn ln2(&mut self) -> BigFloat {
        let two = self.int(2);
        self.ln(&two)
    }

    /// Full-precision scientific decimal string, e.g. `6.93147...e-1`.
    pub fn format(&mut self, a: &BigFloat) -> String {
        a.format(Radix::Dec, RM, &mut self.cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }

    /// Scientific decimal string rounded to `sig` significant digits.
    pub fn to_sci(&mut self, a: &BigFloat, sig: usize) -> String {
        round_sci(&self.format(a), sig)
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        self.to_sci(a, 19).parse().unwrap_or(f64::NAN)
    }

    pub fn is_valid(a: &BigFloat) -> bool {
        !(a.is_nan() || a.is_inf())
    }
}

/// Round a string of the form `[-]d.ddd[e[+-]N]` to `sig` significant digits.
pub fn round_sci(s: &str, sig: usize) -> String {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mant, exp) = match body.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let digits: Vec<u8> = mant.bytes().filter(|b| b.is_ascii_digit()).map(|b| b - b'0').collect();
    let point = mant.find('.').unwrap_or(mant.len()) as i64;
    // Value = 0.d1d2d3... * 10^(point + exp)
    let lead = digits.iter().position(|&d| d != 0);
    let Some(lead) = lead else {
        return "0".to_string();
    };
    let mut exp10 = point + exp - lead as i64 - 1;
    let mut kept: Vec<u8> = digits[lead..].iter().copied().chain(std::iter::repeat(0)).take(sig + 1).collect();
    let round_up = kept[sig] >= 5;
    kept.truncate(sig);
    if round_up {
        let mut i = sig;
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.truncate(sig);
                exp10 += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + kept[0]) as char);
    if sig > 1 {
        out.push('.');
        for &d in &kept[1..] {
            out.push((b'0' + d) as char);
        }
    }
    out.push_str(&format!("e{exp10}"));
    out
}
