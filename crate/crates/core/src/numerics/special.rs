use rug::{Float, Integer, Rational};

use super::context::RealContext;
use crate::error::{ArcError, Result};

/// `B_0..=B_m` from `sum_{k=0}^{j} C(j+1,k) B_k = 0`.
pub fn bernoulli_table(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::from(1));
    for j in 1..=m {
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(j+1, 0)
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from(bk * &binom);
            binom *= (j + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        // binom is now C(j+1, j)
        b.push(-acc / binom);
    }
    b
}

/// Exact Bernoulli number `B_m` for even `m >= 2`.
pub fn bernoulli(m: usize) -> Result<Rational> {
    if m < 2 || m % 2 != 0 {
        return Err(ArcError::InvalidParameter(format!(
            "bernoulli index {m} must be even and >= 2"
        )));
    }
    Ok(bernoulli_table(m).pop().expect("table has m+1 entries"))
}

/// `sin(x)/x`, with a short series when `|x| < 2^(-prec/4)`.
pub fn sinc(x: &Float) -> Float {
    let p = x.prec();
    if x.is_zero() {
        return Float::with_val(p, 1u32);
    }
    let threshold = Float::with_val(p, Float::i_exp(1, -((p / 4) as i32)));
    if Float::with_val(p, x.abs_ref()) < threshold {
        let x2 = Float::with_val(p, x.square_ref());
        let x4 = Float::with_val(p, x2.square_ref());
        return Float::with_val(p, 1u32) - Float::with_val(p, &x2 / 6u32) + x4 / 120u32;
    }
    Float::with_val(p, x.sin_ref()) / x
}

/// `ln n!` rounded from the exact factorial.
pub fn ln_factorial(n: u32, bits: u32) -> Float {
    let f = Integer::from(Integer::factorial(n));
    Float::with_val(bits, &f).ln()
}

/// `eta'(2) = sum_{k>=1} (-1)^k ln k / k^2` by the Cohen-Rodriguez Villegas-Zagier
/// alternating-series acceleration.
fn eta_prime_two(ctx: &RealContext) -> Float {
    let wp = ctx.bits() + 64;
    let n = ((wp as f64) * std::f64::consts::LN_2 / 5.828_f64.ln()).ceil() as u32 + 8;
    let sqrt8 = Float::with_val(wp, 8u32).sqrt();
    let base = Float::with_val(wp, 3u32) + sqrt8;
    let mut d = Float::with_val(wp, rug::ops::Pow::pow(&base, n));
    d = (Float::with_val(wp, d.recip_ref()) + d) / 2u32;
    let mut b = Float::with_val(wp, -1);
    let mut c = Float::with_val(wp, -&d);
    let mut s = Float::new(wp);
    for k in 0..n {
        c = Float::with_val(wp, &b - &c);
        let kk = Float::with_val(wp, k + 1);
        let ak = Float::with_val(wp, kk.ln_ref()) / Float::with_val(wp, kk.square_ref());
        s += Float::with_val(wp, &c * &ak);
        let num = (i64::from(k) + i64::from(n)) * (i64::from(k) - i64::from(n));
        b *= num;
        b /= Float::with_val(wp, k) + 0.5f64;
        b /= k + 1;
    }
    // sum_{j>=0} (-1)^j a_j with a_j = ln(j+1)/(j+1)^2, and eta'(2) is its negative
    let v = -(s / d);
    Float::with_val(ctx.bits(), v)
}

/// `ln A` (Glaisher-Kinkelin) from `zeta'(2)`:
/// `ln A = (gamma + ln 2 pi)/12 - zeta'(2)/(2 pi^2)`.
pub fn glaisher_log(ctx: &RealContext) -> Float {
    let w = ctx.widened(32);
    let pi = w.pi();
    let pi2 = Float::with_val(w.bits(), pi.square_ref());
    let eta = eta_prime_two(&w);
    let zeta2p = Float::with_val(w.bits(), &eta * 2u32) - w.ln2() * &pi2 / 6u32;
    let ln2pi = Float::with_val(w.bits(), &pi * 2u32).ln();
    let v = (w.euler_gamma() + ln2pi) / 12u32 - zeta2p / (pi2 * 2u32);
    Float::with_val(ctx.bits(), v)
}

/// `ln A` by Euler-Maclaurin on `sum_{k<=N} k ln k`; independent of [`glaisher_log`].
pub fn glaisher_log_euler_maclaurin(ctx: &RealContext) -> Float {
    let wp = ctx.bits() + 64;
    let big_n = ((wp as f64) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI)).ceil() as u32 + 10;
    let mut sum = Float::new(wp);
    for k in 2..=big_n {
        let kf = Float::with_val(wp, k);
        sum += Float::with_val(wp, kf.ln_ref()) * k;
    }
    let nf = Float::with_val(wp, big_n);
    let ln_n = Float::with_val(wp, nf.ln_ref());
    let n2 = Float::with_val(wp, nf.square_ref());
    let poly = Float::with_val(wp, &n2 / 2u32) + Float::with_val(wp, &nf / 2u32) + Float::with_val(wp, 1u32) / 12u32;
    let mut ln_a = sum - poly * &ln_n + Float::with_val(wp, &n2 / 4u32);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let j_max = (std::f64::consts::PI * big_n as f64) as usize;
    let b = bernoulli_table(2 * j_max);
    let inv_n2 = Float::with_val(wp, n2.recip_ref());
    let mut npow = Float::with_val(wp, &inv_n2); // N^{2-2j} at j = 2
    for j in 2..=j_max {
        let denom = (2 * j) * (2 * j - 1) * (2 * j - 2);
        let coef = Rational::from(&b[2 * j] / Integer::from(denom));
        let term = Float::with_val(wp, &coef) * &npow;
        ln_a += &term;
        if term.abs() < eps {
            break;
        }
        npow *= &inv_n2;
    }
    Float::with_val(ctx.bits(), ln_a)
}

/// `zeta'(-1) = 1/12 - ln A`.
pub fn zeta_prime_minus_one(ctx: &RealContext) -> Float {
    let w = ctx.widened(16);
    let v = Float::with_val(w.bits(), 1u32) / 12u32 - glaisher_log(&w);
    Float::with_val(ctx.bits(), v)
}

/// The constant `3 zeta'(-1) + ln(2)/12`.
pub fn widom_constant(ctx: &RealContext) -> Float {
    let w = ctx.widened(16);
    let v = zeta_prime_minus_one(&w) * 3u32 + w.ln2() / 12u32;
    Float::with_val(ctx.bits(), v)
}

/// The alternative reading with the completed xi function:
/// `xi'(-1) = -xi'(2) = -(pi/6)(3/2 - ln(pi)/2 - gamma/2 + 6 zeta'(2)/pi^2)`.
pub fn xi_prime_minus_one(ctx: &RealContext) -> Float {
    let w = ctx.widened(32);
    let pi = w.pi();
    let pi2 = Float::with_val(w.bits(), pi.square_ref());
    let zeta2p = Float::with_val(w.bits(), &eta_prime_two(&w) * 2u32) - w.ln2() * &pi2 / 6u32;
    let inner =
        Float::with_val(w.bits(), 3u32) / 2u32 - Float::with_val(w.bits(), pi.ln_ref()) / 2u32 - w.euler_gamma() / 2u32
            + zeta2p * 6u32 / pi2;
    let v = -(pi / 6u32) * inner;
    Float::with_val(ctx.bits(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Akiyama-Tanigawa, an independent route to B_m (with B_1 = +1/2).
    fn akiyama_tanigawa(m: usize) -> Rational {
        let mut a: Vec<Rational> = (0..=m).map(|k| Rational::from((1, (k + 1) as u32))).collect();
        for j in 1..=m {
            for k in 0..=(m - j) {
                let diff = Rational::from(&a[k] - &a[k + 1]);
                a[k] = diff * (k as u32 + 1);
            }
        }
        a[0].clone()
    }

    #[test]
    fn first_even_bernoulli_numbers() {
        assert_eq!(bernoulli(2).unwrap(), Rational::from((1, 6)));
        assert_eq!(bernoulli(4).unwrap(), Rational::from((-1, 30)));
        assert_eq!(bernoulli(6).unwrap(), Rational::from((1, 42)));
        assert!(bernoulli(3).is_err());
    }

    #[test]
    fn bernoulli_matches_independent_route() {
        let table = bernoulli_table(64);
        for m in (2..=64).step_by(2) {
            assert_eq!(table[m], akiyama_tanigawa(m), "B_{m}");
        }
    }

    #[test]
    fn bernoulli_satisfies_recurrence() {
        let b = bernoulli_table(64);
        for j in 1..=64usize {
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for k in 0..=j {
                acc += Rational::from(&b[k] * &binom);
                binom *= (j + 1 - k) as u32;
                binom /= (k + 1) as u32;
            }
            assert_eq!(acc, 0, "recurrence at j = {j}");
        }
    }

    #[test]
    fn zeta_prime_minus_one_value() {
        let ctx = RealContext::new(256).unwrap();
        let z = zeta_prime_minus_one(&ctx);
        assert!((z.to_f64() + 0.165_421_143_7).abs() < 1e-10);
        let c0 = widom_constant(&ctx);
        assert!((c0.to_f64() + 0.438_501_166_1).abs() < 1e-10);
    }

    #[test]
    fn glaisher_routes_agree() {
        let ctx = RealContext::new(256).unwrap();
        let a = glaisher_log(&ctx);
        let b = glaisher_log_euler_maclaurin(&ctx);
        assert!(Float::with_val(256, &a - &b).abs() < 1e-30, "{a} vs {b}");
        assert!((a.to_f64() - 0.248_754_477_033_784_3).abs() < 1e-15);
    }

    #[test]
    fn xi_reading_differs() {
        let ctx = RealContext::new(128).unwrap();
        let xi = xi_prime_minus_one(&ctx).to_f64();
        assert!((xi + 0.036_16).abs() < 1e-4);
    }

    #[test]
    fn sinc_small_argument_series() {
        let ctx = RealContext::new(256).unwrap();
        let x = ctx.pow2(-100);
        let v = sinc(&x);
        let direct = Float::with_val(1024, Float::with_val(1024, &x).sin_ref()) / Float::with_val(1024, &x);
        assert!(Float::with_val(256, &v - &direct).abs() < ctx.pow2(-250));
        assert_eq!(sinc(&ctx.zero()), 1);
    }
}
