use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Certificate, Kind, Relation};
use crate::error::{Error, Result};
use crate::hp::Hp;

fn pow2(hp: &Hp, e: u32) -> BigFloat {
    hp.int(1i64 << e)
}

fn rational(hp: &mut Hp, q: &BigRational) -> BigFloat {
    let n = hp.num(&q.numer().to_string());
    let d = hp.num(&q.denom().to_string());
    hp.div(&n, &d)
}

fn max_of(values: Vec<BigFloat>) -> BigFloat {
    values
        .into_iter()
        .reduce(|a, b| if b > a { b } else { a })
        .expect("nonempty")
}

fn min_of(values: Vec<BigFloat>) -> BigFloat {
    values
        .into_iter()
        .reduce(|a, b| if b < a { b } else { a })
        .expect("nonempty")
}

/// `2(k-1)k ln2 / 2^k + (4k ln2 + c) / 2^k * (1 - 2(k-1)/2^k)`
fn eps_like(hp: &mut Hp, k: u32, c: i64) -> BigFloat {
    let ln2 = hp.ln2();
    let p = pow2(hp, k);
    let kk = hp.int(k as i64);
    let a = hp.mul(&hp.int(2 * (k as i64 - 1) * k as i64), &ln2);
    let a = hp.div(&a, &p);
    let b = hp.add(&hp.mul(&hp.int(4), &hp.mul(&kk, &ln2)), &hp.int(c));
    let b = hp.div(&b, &p);
    let tail = hp.sub(&hp.int(1), &hp.div(&hp.int(2 * (k as i64 - 1)), &p));
    hp.add(&a, &hp.mul(&b, &tail))
}

pub fn epsilon_k(hp: &mut Hp, k: u32) -> BigFloat {
    eps_like(hp, k, 4)
}

pub fn beta_k(hp: &mut Hp, k: u32) -> BigFloat {
    eps_like(hp, k, 2)
}

/// Derivative bound for `k >= 5`:
/// `2k(k-1) ln2/2^k (1 - 1/(2^(k-1) k ln2)) e^eps / ((1 - 2^(1-k))^2 (2 - 2^-k e^eps)^2)`.
pub fn alpha_k(hp: &mut Hp, k: u32) -> BigFloat {
    let ln2 = hp.ln2();
    let one = hp.int(1);
    let p = pow2(hp, k);
    let half_p = pow2(hp, k - 1);
    let kk = hp.int(k as i64);
    let lead = hp.div(&hp.mul(&hp.int(2 * k as i64 * (k as i64 - 1)), &ln2), &p);
    let corr = hp.sub(&one, &hp.div(&one, &hp.mul(&half_p, &hp.mul(&kk, &ln2))));
    let eps = epsilon_k(hp, k);
    let e = hp.exp(&eps);
    let a = hp.sub(&one, &hp.div(&one, &half_p));
    let b = hp.sub(&hp.int(2), &hp.div(&e, &p));
    let den = hp.mul(&hp.mul(&a, &a), &hp.mul(&b, &b));
    hp.div(&hp.mul(&hp.mul(&lead, &corr), &e), &den)
}

/// `(1 - 2x^(k-1)) / (1 - x^(k-1))` in exact arithmetic.
pub fn psi_hat_exact(k: u32, x: &BigRational) -> BigRational {
    let one = BigRational::from_integer(BigInt::from(1));
    let y = num_traits::pow(x.clone(), k as usize - 1);
    (&one - &y * BigInt::from(2)) / (&one - &y)
}

fn psi_hat_hp(hp: &Hp, k: u32, x: &BigFloat) -> BigFloat {
    let one = hp.int(1);
    let y = hp.powi(x, k as usize - 1);
    hp.div(&hp.sub(&one, &hp.mul(&hp.int(2), &y)), &hp.sub(&one, &y))
}

/// `Psi_d(x) = (1 - v^(d-1)) / (2 - v^(d-1))` with `v = psi_hat(x)`.
pub fn psi_hp(hp: &mut Hp, k: u32, d: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
    let one = hp.int(1);
    let v = psi_hat_hp(hp, k, x);
    let w = hp.pow(&v, &hp.sub(d, &one))?;
    Ok(hp.div(&hp.sub(&one, &w), &hp.sub(&hp.int(2), &w)))
}

fn positive(a: &BigFloat, what: &str) -> Result<()> {
    if a.is_positive() && !a.is_zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-positive logarithm argument")))
    }
}

/// `-ln(1-x) - d(1 - 1/k - 1/d) ln(1 - 2x^k) + (d-1) ln(1 - x^(k-1))`
pub fn phi_hp(hp: &mut Hp, k: u32, d: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
    let one = hp.int(1);
    let kk = hp.int(k as i64);
    let a = hp.sub(&one, x);
    let b = hp.sub(&one, &hp.mul(&hp.int(2), &hp.powi(x, k as usize)));
    let c = hp.sub(&one, &hp.powi(x, k as usize - 1));
    for t in [&a, &b, &c] {
        positive(t, "phi")?;
    }
    // d(1 - 1/k - 1/d) = d - d/k - 1
    let coef = hp.sub(&hp.sub(d, &hp.div(d, &kk)), &one);
    let la = hp.ln(&a);
    let lb = hp.ln(&b);
    let lc = hp.ln(&c);
    let t1 = hp.sub(&hp.int(0), &la);
    let t2 = hp.mul(&coef, &lb);
    let t3 = hp.mul(&hp.sub(d, &one), &lc);
    Ok(hp.add(&hp.sub(&t1, &t2), &t3))
}

/// `1/(1-x) + d(1-1/k-1/d) 2k x^(k-1)/(1-2x^k) - (d-1)(k-1) x^(k-2)/(1-x^(k-1))`
pub fn phi_x_derivative_hp(hp: &Hp, k: u32, d: &BigFloat, x: &BigFloat) -> BigFloat {
    let one = hp.int(1);
    let kk = hp.int(k as i64);
    let coef = hp.sub(&hp.sub(d, &hp.div(d, &kk)), &one);
    let xk2 = hp.powi(x, k as usize - 2);
    let xk1 = hp.mul(&xk2, x);
    let xk = hp.mul(&xk1, x);
    let t1 = hp.div(&one, &hp.sub(&one, x));
    let t2 = hp.div(
        &hp.mul(&coef, &hp.mul(&hp.int(2 * k as i64), &xk1)),
        &hp.sub(&one, &hp.mul(&hp.int(2), &xk)),
    );
    let t3 = hp.div(
        &hp.mul(&hp.mul(&hp.sub(d, &one), &hp.int(k as i64 - 1)), &xk2),
        &hp.sub(&one, &xk1),
    );
    hp.sub(&hp.add(&t1, &t2), &t3)
}

/// `(1-x^2)^d ((1-x^2)^(d-1) - 2)^2 / (1-2x^2)^(d-2) - 2(d-1)x`
pub fn l_function(hp: &mut Hp, d: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
    let one = hp.int(1);
    let two = hp.int(2);
    let x2 = hp.mul(x, x);
    let a = hp.sub(&one, &x2);
    let b = hp.sub(&one, &hp.mul(&two, &x2));
    let ad = hp.pow(&a, d)?;
    let ad1 = hp.pow(&a, &hp.sub(d, &one))?;
    let bd2 = hp.pow(&b, &hp.sub(d, &two))?;
    let sq = hp.sub(&ad1, &two);
    let first = hp.div(&hp.mul(&ad, &hp.mul(&sq, &sq)), &bd2);
    let second = hp.mul(&hp.mul(&two, &hp.sub(d, &one)), x);
    Ok(hp.sub(&first, &second))
}

fn v0_k4() -> BigRational {
    psi_hat_exact(4, &BigRational::new(BigInt::from(7), BigInt::from(16)))
}

fn v0_hp(hp: &mut Hp) -> BigFloat {
    rational(hp, &v0_k4())
}

fn alpha5(hp: &mut Hp) -> Result<BigFloat> {
    Ok(alpha_k(hp, 5))
}

fn beta5(hp: &mut Hp) -> Result<BigFloat> {
    let b = beta_k(hp, 5);
    let e = hp.exp(&b);
    Ok(hp.mul(&e, &hp.ratio(17, 16)))
}

fn v0_exact() -> Result<BigRational> {
    Ok(v0_k4())
}

fn v0_float(hp: &mut Hp) -> Result<BigFloat> {
    Ok(v0_hp(hp))
}

fn v0_pow(hp: &mut Hp) -> Result<BigFloat> {
    let v = v0_hp(hp);
    let y = hp.num("15.7");
    hp.pow(&v, &y)
}

fn d0(hp: &mut Hp) -> BigFloat {
    let ln2 = hp.ln2();
    hp.mul(&hp.int(24), &ln2)
}

fn d0_value(hp: &mut Hp) -> Result<BigFloat> {
    Ok(d0(hp))
}

fn decay_threshold(hp: &mut Hp) -> Result<BigFloat> {
    let l = hp.ln(&hp.ratio(3753, 3410));
    Ok(hp.add(&hp.div(&hp.int(1), &l), &hp.int(1)))
}

fn k4_derivative_bound(hp: &mut Hp) -> Result<BigFloat> {
    let one = hp.int(1);
    let two = hp.int(2);
    let d = d0(hp);
    let v = v0_hp(hp);
    let vd2 = hp.pow(&v, &hp.sub(&d, &two))?;
    let vd1 = hp.pow(&v, &hp.sub(&d, &one))?;
    let num = hp.mul(
        &hp.mul(&hp.int(3), &hp.sub(&d, &one)),
        &hp.mul(&vd2, &hp.mul(&hp.sub(&two, &v), &hp.sub(&one, &v))),
    );
    let den = hp.sub(&two, &vd1);
    let den = hp.mul(&den, &den);
    Ok(hp.div(&hp.div(&num, &den), &hp.ratio(7, 16)))
}

fn f4(hp: &mut Hp) -> Result<BigFloat> {
    let ln2 = hp.ln2();
    let l = hp.ln(&hp.ratio(7, 8));
    let d = hp.num("16.7");
    let t = hp.mul(&hp.div(&d, &hp.int(4)), &l);
    Ok(hp.add(&hp.sub(&ln2, &hp.ratio(1, 8)), &t))
}

fn f5(hp: &mut Hp) -> Result<BigFloat> {
    let ln2 = hp.ln2();
    let l = hp.ln(&hp.ratio(15, 16));
    let t = hp.mul(&hp.mul(&hp.int(14), &ln2), &l);
    Ok(hp.add(&hp.sub(&ln2, &hp.ratio(1, 16)), &t))
}

fn g5(hp: &mut Hp) -> Result<BigFloat> {
    let ln2 = hp.ln2();
    let t = hp.div(&hp.sub(&hp.mul(&hp.int(80), &ln2), &hp.int(1)), &hp.int(32));
    Ok(hp.add(&hp.add(&hp.ratio(2, 17), &hp.ratio(2, 15)), &t))
}

fn d_ubd(hp: &mut Hp, k: u32) -> BigFloat {
    let ln2 = hp.ln2();
    hp.mul(&hp.int((1i64 << (k - 1)) * k as i64), &ln2)
}

fn phi4_ubd(hp: &mut Hp) -> Result<BigFloat> {
    let d = d_ubd(hp, 4);
    let x = hp.ratio(7, 16);
    phi_hp(hp, 4, &d, &x)
}

fn phi_ubd_half(hp: &mut Hp) -> Result<BigFloat> {
    let mut vals = Vec::new();
    for k in 4..=15 {
        let d = d_ubd(hp, k);
        let x = hp.ratio(1, 2);
        vals.push(phi_hp(hp, k, &d, &x)?);
    }
    Ok(max_of(vals))
}

fn l_at(hp: &mut Hp, d: &str) -> Result<BigFloat> {
    let d = hp.num(d);
    let x = hp.ratio(3, 8);
    l_function(hp, &d, &x)
}

fn l_674(hp: &mut Hp) -> Result<BigFloat> {
    l_at(hp, "6.74")
}

fn l_6(hp: &mut Hp) -> Result<BigFloat> {
    l_at(hp, "6")
}

fn pow_55_46(hp: &mut Hp) -> Result<BigFloat> {
    let b = hp.ratio(55, 46);
    let y = hp.num("5.74");
    hp.pow(&b, &y)
}

fn psi_at(hp: &mut Hp, d: &str, x: &str) -> Result<BigFloat> {
    let d = hp.num(d);
    let x = hp.num(x);
    psi_hp(hp, 3, &d, &x)
}

fn psi_674_04464(hp: &mut Hp) -> Result<BigFloat> {
    psi_at(hp, "6.74", "0.4464")
}

fn psi_674_045(hp: &mut Hp) -> Result<BigFloat> {
    psi_at(hp, "6.74", "0.45")
}

fn phi_at(hp: &mut Hp, d: &str, x: &str) -> Result<BigFloat> {
    let d = hp.num(d);
    let x = hp.num(x);
    phi_hp(hp, 3, &d, &x)
}

fn phi_674_04464(hp: &mut Hp) -> Result<BigFloat> {
    phi_at(hp, "6.74", "0.4464")
}

fn phi_75_048(hp: &mut Hp) -> Result<BigFloat> {
    phi_at(hp, "7.5", "0.48")
}

/// Minimum of the `x`-derivative of `phi` (k = 3) over 100 equally spaced
/// points `x = (start + step i) / 9900`.
fn dphi_grid(hp: &mut Hp, d: &str, start: i64, step: i64) -> Result<BigFloat> {
    let d = hp.num(d);
    let vals = (0..100)
        .map(|i| {
            let x = hp.ratio(start + step * i, 9900);
            phi_x_derivative_hp(hp, 3, &d, &x)
        })
        .collect();
    Ok(min_of(vals))
}

fn dphi_674(hp: &mut Hp) -> Result<BigFloat> {
    // [0.44, 0.45]
    dphi_grid(hp, "6.74", 4356, 1)
}

fn dphi_75(hp: &mut Hp) -> Result<BigFloat> {
    // [0.46, 0.48]
    dphi_grid(hp, "7.5", 4554, 2)
}

fn max_increment(hp: &mut Hp, f: fn(&mut Hp, u32) -> BigFloat) -> Result<BigFloat> {
    let mut vals = Vec::new();
    for k in 5..15 {
        let a = f(hp, k);
        let b = f(hp, k + 1);
        vals.push(hp.sub(&b, &a));
    }
    Ok(max_of(vals))
}

fn eps_decreasing(hp: &mut Hp) -> Result<BigFloat> {
    max_increment(hp, epsilon_k)
}

fn beta_decreasing(hp: &mut Hp) -> Result<BigFloat> {
    max_increment(hp, beta_k)
}

/// Minimum second difference of `d -> L(d, 3/8)` with step 0.01 over `d = 6.00, 6.01, ..., 7.50`.
fn l_convexity(hp: &mut Hp) -> Result<BigFloat> {
    let x = hp.ratio(3, 8);
    let mut l = Vec::with_capacity(153);
    for i in 599..=751 {
        let d = hp.ratio(i, 100);
        l.push(l_function(hp, &d, &x)?);
    }
    let two = hp.int(2);
    let vals = (1..l.len() - 1)
        .map(|i| hp.add(&hp.sub(&l[i + 1], &hp.mul(&two, &l[i])), &l[i - 1]))
        .collect();
    Ok(min_of(vals))
}

const fn float(
    id: &'static str,
    group: &'static str,
    expression: &'static str,
    relation: Relation,
    bound: &'static str,
    eval: super::FloatEval,
    reference: &'static str,
) -> Certificate {
    Certificate { id, group, expression, relation, reference, note: None, kind: Kind::Float { bound, eval } }
}

pub(super) fn registry() -> Vec<Certificate> {
    use Relation::{Equal, Greater, Less};
    vec![
        float("alpha5", "contraction_k5", "alpha_5", Less, "0.99", alpha5,
            "derivative bound of Psi_d for k >= 5"),
        float("beta5", "root_bound_k5", "exp(beta_5) * (1 + 2^-4)", Less, "3.7", beta5,
            "existence of the fixed point for k >= 5"),
        Certificate {
            id: "v0_exact",
            group: "v0_k4",
            expression: "psi_hat_4(7/16)",
            relation: Equal,
            reference: "clause recursion at x = 1/2 - 1/2^4 for k = 4",
            note: None,
            kind: Kind::Exact { bound: (3410, 3753), eval: v0_exact },
        },
        float("v0_k4", "v0_k4", "psi_hat_4(7/16)", Less, "0.91", v0_float,
            "clause recursion at x = 1/2 - 1/2^4 for k = 4"),
        float("v0_pow", "v0_pow", "(3410/3753)^15.7", Less, "0.2221", v0_pow,
            "existence of the fixed point for k = 4"),
        float("v0_pow_2_9", "v0_pow", "(3410/3753)^15.7", Less, "2/9", v0_pow,
            "existence of the fixed point for k = 4"),
        float("d0_gt_16", "k4_monotonicity", "24 ln 2", Greater, "16", d0_value,
            "monotonicity in d of the k = 4 derivative bound"),
        float("decay_threshold", "k4_monotonicity", "1/ln(3753/3410) + 1", Less, "16", decay_threshold,
            "monotonicity in d of the k = 4 derivative bound"),
        float("k4_derivative_bound", "contraction_k4",
            "3(d0-1) v0^(d0-2) (2-v0)(1-v0) / (2-v0^(d0-1))^2 / x0, d0 = 24 ln 2, x0 = 7/16",
            Less, "0.9", k4_derivative_bound, "derivative bound of Psi_d for k = 4"),
        float("F4", "left_endpoint", "ln 2 - 1/8 + (16.7/4) ln(7/8)", Greater, "0.01", f4,
            "phi positive at the lower end of the window, k = 4"),
        float("F5", "left_endpoint", "ln 2 - 1/16 + 14 ln 2 ln(15/16)", Greater, "0.004", f5,
            "phi positive at the lower end of the window, k = 5"),
        float("G5", "right_slope", "2/17 + 2/15 + (80 ln 2 - 1)/32", Less, "1.97", g5,
            "phi increasing in x at the upper end of the window, k >= 5"),
        float("phi4_ubd", "right_endpoint_k4", "phi_4(32 ln 2, 7/16)", Less, "-0.08", phi4_ubd,
            "phi negative at the upper end of the window, k = 4"),
        float("phi_ubd_half", "right_endpoint_half",
            "max over k = 4..15 of phi(2^(k-1) k ln 2, 1/2)", Less, "0", phi_ubd_half,
            "phi negative at x = 1/2 at the upper end of the window"),
        float("L_6.74", "L_endpoints", "L(6.74, 3/8)", Greater, "0.001", l_674,
            "k = 3 derivative bound at the lower degree"),
        float("L_6", "L_endpoints", "L(6, 3/8)", Less, "-0.2", l_6,
            "k = 3 derivative bound fails below the window"),
        float("pow_55_46", "psi_at_three_eighths", "(55/46)^5.74", Greater, "2.7", pow_55_46,
            "Psi_d(3/8) > 3/8 for k = 3"),
        float("psi_6.74_0.4464", "bracket_6.74", "Psi_6.74(0.4464), k = 3", Greater, "0.44645", psi_674_04464,
            "lower end of the k = 3, d = 6.74 fixed-point bracket"),
        float("psi_6.74_0.45", "bracket_6.74", "Psi_6.74(0.45), k = 3", Less, "0.449", psi_674_045,
            "upper end of the k = 3, d = 6.74 fixed-point bracket"),
        float("phi_6.74_0.4464", "phi_lower_k3", "phi(6.74, 0.4464), k = 3", Greater, "0.00004", phi_674_04464,
            "phi_star(6.74) > 0 for k = 3"),
        float("phi_7.5_0.48", "phi_upper_k3", "phi(7.5, 0.48), k = 3", Less, "-0.04", phi_75_048,
            "phi_star(7.5) < 0 for k = 3"),
        float("dphi_6.74_grid", "dphi_grids",
            "min of d phi/dx (6.74, x) over 100 points of [0.44, 0.45], k = 3", Greater, "0.1", dphi_674,
            "phi increasing in x near the d = 6.74 fixed point"),
        Certificate {
            id: "dphi_7.5_grid",
            group: "dphi_grids",
            expression: "min of d phi/dx (7.5, x) over 100 points of [0.46, 0.48], k = 3",
            relation: Greater,
            reference: "phi increasing in x near the d = 7.5 fixed point",
            note: Some("evaluated at d = 7.5, the degree at which the bound is used"),
            kind: Kind::Float { bound: "0.04", eval: dphi_75 },
        },
        float("eps_decreasing", "monotone_in_k", "max over k = 5..14 of eps_(k+1) - eps_k", Less, "0",
            eps_decreasing, "eps_k decreasing for k >= 5"),
        float("beta_decreasing", "monotone_in_k", "max over k = 5..14 of beta_(k+1) - beta_k", Less, "0",
            beta_decreasing, "beta_k decreasing for k >= 5"),
        float("L_convexity", "L_convexity",
            "min over d = 6.00..7.50 (step 0.01) of L(d+h) - 2L(d) + L(d-h), h = 0.01, x = 3/8",
            Greater, "0", l_convexity, "d -> L(d, 3/8) convex"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{psi, psi_hat, ModelParams};
    use crate::thresholds::phi;

    fn f(hp: &mut Hp, v: &BigFloat) -> f64 {
        hp.to_f64(v)
    }

    #[test]
    fn agree_with_double_precision_versions() {
        let mut hp = Hp::with_digits(50);
        for (k, d, x) in [(3u32, 6.74, 0.4464), (3, 7.5, 0.48), (4, 20.0, 0.45), (5, 50.0, 0.49)] {
            let (dd, xx) = (hp.from_f64(d), hp.from_f64(x));
            let p = ModelParams::new(k, d).unwrap();
            let a = phi_hp(&mut hp, k, &dd, &xx).unwrap();
            assert!((f(&mut hp, &a) - phi(p, x).unwrap()).abs() < 1e-12);
            let b = psi_hp(&mut hp, k, &dd, &xx).unwrap();
            assert!((f(&mut hp, &b) - psi(p, x).unwrap()).abs() < 1e-12);
        }
        let v = psi_hat_exact(4, &BigRational::new(BigInt::from(7), BigInt::from(16)));
        let vf = rational(&mut hp, &v);
        assert!((f(&mut hp, &vf) - psi_hat(4, 7.0 / 16.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut hp = Hp::with_digits(60);
        let d = hp.num("7.5");
        let x = hp.num("0.47");
        let h = hp.num("1e-20");
        let (xu, xd) = (hp.add(&x, &h), hp.sub(&x, &h));
        let up = phi_hp(&mut hp, 3, &d, &xu).unwrap();
        let dn = phi_hp(&mut hp, 3, &d, &xd).unwrap();
        let fd = hp.div(&hp.sub(&up, &dn), &hp.mul(&hp.int(2), &h));
        let exact = phi_x_derivative_hp(&hp, 3, &d, &x);
        let diff = hp.sub(&fd, &exact).abs();
        assert!(f(&mut hp, &diff) < 1e-30);
    }

    #[test]
    fn closed_forms_in_double_precision() {
        let mut hp = Hp::with_digits(50);
        let ln2 = std::f64::consts::LN_2;
        let e5 = 2.0 * 4.0 * 5.0 * ln2 / 32.0 + (20.0 * ln2 + 4.0) / 32.0 * (1.0 - 8.0 / 32.0);
        let v = epsilon_k(&mut hp, 5);
        assert!((f(&mut hp, &v) - e5).abs() < 1e-14);
        let g = g5(&mut hp).unwrap();
        assert!((f(&mut hp, &g) - (2.0 / 17.0 + 2.0 / 15.0 + (80.0 * ln2 - 1.0) / 32.0)).abs() < 1e-14);
        let l = l_674(&mut hp).unwrap();
        let (a, b) = (1.0 - 0.140625f64, 1.0 - 0.28125f64);
        let direct = a.powf(6.74) * (a.powf(5.74) - 2.0).powi(2) / b.powf(4.74) - 2.0 * 5.74 * 0.375;
        assert!((f(&mut hp, &l) - direct).abs() < 1e-12);
        // Psi_d(3/8) = (1 - (46/55)^(d-1)) / (2 - (46/55)^(d-1))
        let p = psi_at(&mut hp, "6.74", "0.375").unwrap();
        let w = (46f64 / 55.0).powf(5.74);
        assert!((f(&mut hp, &p) - (1.0 - w) / (2.0 - w)).abs() < 1e-14);
    }
}
