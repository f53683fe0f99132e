//! `ln det T_n` for Hermitian Toeplitz matrices `T_{ij} = t_{i-j}`.
//!
//! Levinson-Durbin is the working path: one sweep yields every leading
//! principal minor. A root-free LDL* factorization serves as the dense oracle.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::numerics::{BigComplex, RealContext};
use crate::symbol::{fourier_coefficients, ArcConfig, SymbolCoefficients};

pub const ORACLE_CUTOFF: usize = 16;
pub const MAX_ESCALATIONS: u32 = 4;
pub const BASE_BITS: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetMethod {
    Levinson,
    Dense,
}

#[derive(Clone, Debug)]
pub struct DetResult {
    pub log_det: Float,
    pub n: usize,
    pub method: DetMethod,
    pub precision_bits_used: u32,
    pub agreement_gap: Option<Float>,
}

fn check_size(coeffs: &SymbolCoefficients, n: usize) -> Result<()> {
    if n > 0 && coeffs.k_max() + 1 < n {
        return Err(ArcError::InvalidParameter(format!(
            "need coefficients up to k = {} for n = {n}, have {}",
            n - 1,
            coeffs.k_max()
        )));
    }
    Ok(())
}

/// Root-free LDL* factorization; `ln det = sum ln d_i`.
pub fn log_det_dense(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<DetResult> {
    check_size(coeffs, n)?;
    let p = ctx.bits();
    let entry = |i: usize, j: usize| {
        let c = coeffs.get(i as i64 - j as i64);
        BigComplex::new(Float::with_val(p, &c.re), Float::with_val(p, &c.im))
    };
    let mut l: Vec<Vec<BigComplex>> = vec![Vec::new(); n];
    let mut d: Vec<Float> = Vec::with_capacity(n);
    let mut log_det = Float::new(p);
    for j in 0..n {
        // row j of L: L_jk for k < j
        let mut row: Vec<BigComplex> = Vec::with_capacity(j);
        for k in 0..j {
            let mut v = entry(j, k);
            for m in 0..k {
                let prod = row[m].mul(&l[k][m].conj()).scale(&d[m]);
                v = v.sub(&prod);
            }
            row.push(BigComplex::new(v.re / &d[k], v.im / &d[k]));
        }
        let mut dj = entry(j, j).re;
        for (m, lm) in row.iter().enumerate() {
            dj -= lm.norm_sqr() * &d[m];
        }
        if dj.is_sign_negative() || dj.is_zero() {
            return Err(ArcError::NotPositiveDefinite { index: j });
        }
        log_det += Float::with_val(p, dj.ln_ref());
        d.push(dj);
        l[j] = row;
    }
    Ok(DetResult {
        log_det,
        n,
        method: DetMethod::Dense,
        precision_bits_used: p,
        agreement_gap: None,
    })
}

/// Prediction-error variances `E_0..E_{n-1}`; `ln Z_k = sum_{j<k} ln E_j`.
pub fn levinson_errors(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<Vec<Float>> {
    check_size(coeffs, n)?;
    if coeffs.real {
        levinson_real(coeffs, n, ctx)
    } else {
        levinson_complex(coeffs, n, ctx)
    }
}

fn levinson_real(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<Vec<Float>> {
    let p = ctx.bits();
    let period = coeffs.period.max(1);
    let t: Vec<Float> = coeffs
        .coeffs
        .iter()
        .take(n.max(1))
        .map(|c| Float::with_val(p, &c.re))
        .collect();
    let mut errs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(errs);
    }
    let mut e = t[0].clone();
    if e.is_sign_negative() || e.is_zero() {
        return Err(ArcError::NonPositivePredictionError { index: 0 });
    }
    errs.push(e.clone());
    let mut a: Vec<Float> = vec![Float::with_val(p, 1u32)];
    for k in 1..n {
        a.push(Float::new(p));
        if k % period != 0 {
            errs.push(e.clone());
            continue;
        }
        // delta = sum_j a_j t_{k-j} over bands where t_{k-j} can be nonzero
        let mut delta = Float::new(p);
        for j in (0..k).step_by(period) {
            delta += Float::with_val(p, &a[j] * &t[k - j]);
        }
        let kappa = -Float::with_val(p, &delta / &e);
        if !kappa.is_zero() {
            let old = a.clone();
            for j in (period..=k).step_by(period) {
                a[j] += Float::with_val(p, &kappa * &old[k - j]);
            }
            e *= Float::with_val(p, 1u32) - Float::with_val(p, kappa.square_ref());
        }
        if e.is_sign_negative() || e.is_zero() {
            return Err(ArcError::NonPositivePredictionError { index: k });
        }
        errs.push(e.clone());
    }
    Ok(errs)
}

fn levinson_complex(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<Vec<Float>> {
    let p = ctx.bits();
    let period = coeffs.period.max(1);
    let t: Vec<BigComplex> = coeffs
        .coeffs
        .iter()
        .take(n.max(1))
        .map(|c| BigComplex::new(Float::with_val(p, &c.re), Float::with_val(p, &c.im)))
        .collect();
    let mut errs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(errs);
    }
    let mut e = t[0].re.clone();
    if e.is_sign_negative() || e.is_zero() {
        return Err(ArcError::NonPositivePredictionError { index: 0 });
    }
    errs.push(e.clone());
    let mut a: Vec<BigComplex> = vec![BigComplex::real(Float::with_val(p, 1u32))];
    for k in 1..n {
        a.push(BigComplex::zero(p));
        if k % period != 0 {
            errs.push(e.clone());
            continue;
        }
        let mut delta = BigComplex::zero(p);
        for j in (0..k).step_by(period) {
            delta = delta.add(&a[j].mul(&t[k - j]));
        }
        let kappa = BigComplex::new(-delta.re / &e, -delta.im / &e);
        let old = a.clone();
        for j in (period..=k).step_by(period) {
            a[j] = a[j].add(&kappa.mul(&old[k - j].conj()));
        }
        e *= Float::with_val(p, 1u32) - kappa.norm_sqr();
        if e.is_sign_negative() || e.is_zero() {
            return Err(ArcError::NonPositivePredictionError { index: k });
        }
        errs.push(e.clone());
    }
    Ok(errs)
}

/// `ln det T_k` for every `k = 0..=n` from one Levinson sweep.
pub fn log_det_prefix(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<Vec<Float>> {
    let errs = levinson_errors(coeffs, n, ctx)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Float::new(ctx.bits());
    out.push(acc.clone());
    for e in errs {
        acc += e.ln();
        out.push(acc.clone());
    }
    Ok(out)
}

pub fn log_det_levinson(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<DetResult> {
    let prefix = log_det_prefix(coeffs, n, ctx)?;
    Ok(DetResult {
        log_det: prefix[n].clone(),
        n,
        method: DetMethod::Levinson,
        precision_bits_used: ctx.bits(),
        agreement_gap: None,
    })
}

/// Levinson, cross-checked against the dense oracle when `n <= ORACLE_CUTOFF`.
pub fn log_det(coeffs: &SymbolCoefficients, n: usize, ctx: &RealContext) -> Result<DetResult> {
    let mut res = log_det_levinson(coeffs, n, ctx)?;
    if n <= ORACLE_CUTOFF {
        let dense = log_det_dense(coeffs, n, ctx)?;
        let gap = Float::with_val(ctx.bits(), &res.log_det - &dense.log_det).abs();
        let allowed = Float::with_val(ctx.bits(), res.log_det.abs_ref()) * ctx.tolerance();
        if gap > allowed {
            return Err(ArcError::OracleDisagreement { gap: gap.to_f64() });
        }
        res.agreement_gap = Some(gap);
    }
    Ok(res)
}

/// Predicted leading term `n^2 ln sin(pi eps/2) / N`.
pub fn predicted_leading(eps_total: f64, n_intervals: usize, n: usize) -> f64 {
    let s = (std::f64::consts::PI * eps_total / 2.0).sin();
    (n * n) as f64 * s.ln() / n_intervals.max(1) as f64
}

/// `256 + ceil(2 |L| / ln 2)`.
pub fn auto_precision(predicted: f64) -> u32 {
    BASE_BITS + (2.0 * predicted.abs() / std::f64::consts::LN_2).ceil() as u32
}

/// Runs `f` at `bits`, doubling on precision-type failures up to `MAX_ESCALATIONS` times.
pub fn with_escalation<T, F>(bits: u32, mut f: F) -> Result<(T, u32)>
where
    F: FnMut(&RealContext) -> Result<T>,
{
    let mut bits = bits.max(crate::numerics::context::MIN_PRECISION);
    for attempt in 0..=MAX_ESCALATIONS {
        let ctx = RealContext::new(bits)?;
        match f(&ctx) {
            Ok(v) => return Ok((v, bits)),
            Err(
                ArcError::NotPositiveDefinite { .. }
                | ArcError::NonPositivePredictionError { .. }
                | ArcError::OracleDisagreement { .. },
            ) if attempt < MAX_ESCALATIONS => bits *= 2,
            Err(e) => return Err(e),
        }
    }
    Err(ArcError::PrecisionExhausted { bits })
}

/// Determinant for a configuration at automatically chosen precision.
pub fn log_det_config(config: &ArcConfig, n: usize, min_bits: u32) -> Result<DetResult> {
    let eps = config.epsilon_total().to_f64();
    let bits = auto_precision(predicted_leading(eps, config.len(), n)).max(min_bits);
    let (mut res, used) = with_escalation(bits, |ctx| {
        let c = fourier_coefficients(config, n.saturating_sub(1), ctx);
        log_det(&c, n, ctx)
    })?;
    res.precision_bits_used = used;
    Ok(res)
}

/// All prefix determinants `ln Z_0..=ln Z_n` for a configuration.
pub fn log_det_prefix_config(config: &ArcConfig, n: usize, min_bits: u32) -> Result<(Vec<Float>, u32)> {
    let eps = config.epsilon_total().to_f64();
    let bits = auto_precision(predicted_leading(eps, config.len(), n)).max(min_bits);
    with_escalation(bits, |ctx| {
        let c = fourier_coefficients(config, n.saturating_sub(1), ctx);
        log_det_prefix(&c, n, ctx)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sinc;
    use crate::symbol::ArcConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn coeffs(cfg: &ArcConfig, n: usize, bits: u32) -> (SymbolCoefficients, RealContext) {
        let ctx = RealContext::new(bits).unwrap();
        (fourier_coefficients(cfg, n, &ctx), ctx)
    }

    #[test]
    fn one_by_one_is_log_epsilon() {
        let cfg = ArcConfig::odd_symmetric(1, q(3, 10)).unwrap();
        let (c, ctx) = coeffs(&cfg, 1, 128);
        let r = log_det(&c, 1, &ctx).unwrap();
        assert!((r.log_det - ctx.float(&q(3, 10)).ln()).abs() < 1e-30);
    }

    #[test]
    fn empty_determinant_is_one() {
        let (c, ctx) = coeffs(&ArcConfig::one_cut(q(1, 2)).unwrap(), 0, 128);
        assert!(log_det(&c, 0, &ctx).unwrap().log_det.is_zero());
    }

    #[test]
    fn two_by_two_one_cut() {
        let eps = q(2, 5);
        let (c, ctx) = coeffs(&ArcConfig::one_cut(eps.clone()).unwrap(), 2, 128);
        let e = ctx.float(&eps);
        let sc = sinc(&(ctx.pi() * &e));
        let expect = (Float::with_val(128, e.square_ref()) * (1u32 - Float::with_val(128, sc.square_ref()))).ln();
        let lev = levinson_errors(&c, 2, &ctx).unwrap();
        assert!((lev[0].clone() - &e).abs() < 1e-35);
        let r = log_det(&c, 2, &ctx).unwrap();
        assert!((r.log_det - expect).abs() < 1e-35);
    }

    #[test]
    fn full_circle_is_zero() {
        let ctx = RealContext::new(128).unwrap();
        let mut t = vec![ctx.float(1)];
        t.extend((1..8).map(|_| ctx.zero()));
        let c = SymbolCoefficients::from_real(t, 1);
        assert!(log_det(&c, 8, &ctx).unwrap().log_det.is_zero());
    }

    #[test]
    fn oracle_agreement_at_512_bits() {
        let (c, ctx) = coeffs(&ArcConfig::one_cut(q(1, 2)).unwrap(), 12, 512);
        let r = log_det(&c, 12, &ctx).unwrap();
        assert!(r.agreement_gap.unwrap() < 1e-60);
    }

    #[test]
    fn odd_family_small_n_is_scaled_identity() {
        let eps = q(1, 4);
        let (c, ctx) = coeffs(&ArcConfig::odd_symmetric(2, eps.clone()).unwrap(), 5, 128);
        let r = log_det(&c, 5, &ctx).unwrap();
        let expect = ctx.float(&eps).ln() * 5u32;
        assert!((r.log_det - expect).abs() < 1e-30);
    }

    #[test]
    fn n35_near_leading_term() {
        let cfg = ArcConfig::one_cut(q(1, 2)).unwrap();
        let r = log_det_config(&cfg, 35, 0).unwrap();
        let v = r.log_det.to_f64();
        assert!(v < -420.0 && v > -430.0, "{v}");
    }

    #[test]
    fn levinson_matches_dense_on_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cfgs = vec![
            ArcConfig::one_cut(q(1, 7)).unwrap(),
            ArcConfig::one_cut(q(9, 10)).unwrap(),
            ArcConfig::odd_symmetric(1, q(1, 2)).unwrap(),
            ArcConfig::odd_symmetric(3, q(1, 10)).unwrap(),
            ArcConfig::even_symmetric(1, q(3, 10)).unwrap(),
            ArcConfig::even_symmetric(3, q(1, 5)).unwrap(),
        ];
        for _ in 0..4 {
            let a = rng.gen_range(-200..-10);
            let b = rng.gen_range(-5..50);
            let c = rng.gen_range(60..200);
            cfgs.push(ArcConfig::general(vec![(q(a, 240), q(b, 240)), (q(c, 240), q(c + 20, 240))]).unwrap());
        }
        for cfg in &cfgs {
            for n in [1usize, 5, 11, 16] {
                let r = log_det_config(cfg, n, 0).unwrap();
                assert!(r.agreement_gap.is_some(), "{:?}", cfg.family());
            }
        }
    }

    #[test]
    fn monotone_in_support_and_in_n() {
        let ctx = RealContext::new(256).unwrap();
        let n = 10;
        let small = fourier_coefficients(&ArcConfig::one_cut(q(3, 10)).unwrap(), n, &ctx);
        let big = fourier_coefficients(&ArcConfig::one_cut(q(31, 100)).unwrap(), n, &ctx);
        let ps = log_det_prefix(&small, n, &ctx).unwrap();
        let pb = log_det_prefix(&big, n, &ctx).unwrap();
        for k in 1..=n {
            assert!(pb[k] > ps[k]);
            assert!(ps[k] < ps[k - 1]);
            assert!(ps[k].is_sign_negative());
        }
    }

    #[test]
    fn banded_result_ignores_off_band_entries() {
        let ctx = RealContext::new(256).unwrap();
        let cfg = ArcConfig::odd_symmetric(1, q(2, 5)).unwrap();
        let c = fourier_coefficients(&cfg, 14, &ctx);
        let base = log_det_levinson(&c, 15, &ctx).unwrap().log_det;
        let mut noisy = c.clone();
        for k in 0..=14 {
            if k % 3 != 0 {
                noisy.coeffs[k] = BigComplex::real(ctx.float(0.01f64 * k as f64));
            }
        }
        // the banded path never reads off-band entries
        let v = log_det_levinson(&noisy, 15, &ctx).unwrap().log_det;
        assert_eq!(v, base);
    }

    /// Banded matrices split into one-cut blocks, one per residue class.
    #[test]
    fn banded_equals_product_of_one_cut_blocks() {
        let eps = q(7, 20);
        for cfg in [
            ArcConfig::odd_symmetric(1, eps.clone()).unwrap(),
            ArcConfig::odd_symmetric(2, eps.clone()).unwrap(),
            ArcConfig::even_symmetric(2, eps.clone()).unwrap(),
        ] {
            let ctx = RealContext::new(512).unwrap();
            let big_n = cfg.band_period();
            let n = 23;
            let c = fourier_coefficients(&cfg, n, &ctx);
            let pre = log_det_prefix(&c, n, &ctx).unwrap();
            let one = fourier_coefficients(&ArcConfig::one_cut(eps.clone()).unwrap(), n, &ctx);
            let one_pre = log_det_prefix(&one, n, &ctx).unwrap();
            for m in 1..=n {
                let mut expect = ctx.zero();
                for class in 0..big_n {
                    let size = (m + big_n - 1 - class) / big_n;
                    expect += &one_pre[size];
                }
                assert!((pre[m].clone() - expect).abs() < 1e-100, "n={m}");
            }
        }
    }

    #[test]
    fn complex_path_matches_dense() {
        let cfg = ArcConfig::general(vec![(q(-1, 5), q(1, 3))]).unwrap();
        let (c, ctx) = coeffs(&cfg, 10, 256);
        assert!(!c.real);
        let r = log_det(&c, 10, &ctx).unwrap();
        assert!(r.agreement_gap.unwrap() < 1e-60);
    }
}
