//! Arc configurations on the unit circle and the Fourier coefficients of
//! their indicator symbols.
//!
//! Endpoints are exact rational multiples of pi, so the symmetric families
//! keep their band sparsity exactly.

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::numerics::{sinc, BigComplex, RealContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    OneCut { eps: Rational },
    OddSymmetric { r: u32, eps: Rational },
    EvenSymmetric { s: u32, eps: Rational },
    General,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::OneCut { .. } => "one_cut",
            Family::OddSymmetric { .. } => "odd_symmetric",
            Family::EvenSymmetric { .. } => "even_symmetric",
            Family::General => "general",
        }
    }

    pub fn epsilon(&self) -> Option<&Rational> {
        match self {
            Family::OneCut { eps } | Family::OddSymmetric { eps, .. } | Family::EvenSymmetric { eps, .. } => Some(eps),
            Family::General => None,
        }
    }

    /// Number of arcs N for the symmetric families.
    pub fn intervals(&self) -> Option<u32> {
        match self {
            Family::OneCut { .. } => Some(1),
            Family::OddSymmetric { r, .. } => Some(2 * r + 1),
            Family::EvenSymmetric { s, .. } => Some(2 * s),
            Family::General => None,
        }
    }
}

/// Disjoint arcs `[alpha_j, beta_j]`, endpoints stored in units of pi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcConfig {
    intervals: Vec<(Rational, Rational)>,
    family: Family,
}

fn check_eps(eps: &Rational) -> Result<()> {
    if *eps <= 0 || *eps >= 1 {
        return Err(ArcError::InvalidParameter(format!("epsilon = {eps} not in (0, 1)")));
    }
    Ok(())
}

impl ArcConfig {
    pub fn one_cut(eps: Rational) -> Result<ArcConfig> {
        check_eps(&eps)?;
        let iv = vec![(Rational::from(-&eps), eps.clone())];
        Ok(ArcConfig {
            intervals: iv,
            family: Family::OneCut { eps },
        })
    }

    /// Arcs of half-width `pi eps/(2r+1)` centred at `2 pi k/(2r+1)`, `k = -r..=r`.
    pub fn odd_symmetric(r: u32, eps: Rational) -> Result<ArcConfig> {
        check_eps(&eps)?;
        let n = Rational::from(2 * r + 1);
        let hw = Rational::from(&eps / &n);
        let intervals = (-(r as i64)..=r as i64)
            .map(|k| {
                let c = Rational::from(2 * k) / &n;
                (Rational::from(&c - &hw), c + &hw)
            })
            .collect();
        Ok(ArcConfig {
            intervals,
            family: Family::OddSymmetric { r, eps },
        })
    }

    /// Arcs of half-width `pi eps/(2s)` centred at `pi (k - 1/2)/s`, `k = -(s-1)..=s`.
    pub fn even_symmetric(s: u32, eps: Rational) -> Result<ArcConfig> {
        if s == 0 {
            return Err(ArcError::InvalidParameter("s must be >= 1".into()));
        }
        check_eps(&eps)?;
        let hw = Rational::from(&eps / Integer::from(2 * s));
        let intervals = (-(s as i64 - 1)..=s as i64)
            .map(|k| {
                let c = Rational::from((2 * k - 1, 2 * s as i64));
                (Rational::from(&c - &hw), c + &hw)
            })
            .collect();
        Ok(ArcConfig {
            intervals,
            family: Family::EvenSymmetric { s, eps },
        })
    }

    /// Arbitrary arcs given in units of pi.
    pub fn general(mut intervals: Vec<(Rational, Rational)>) -> Result<ArcConfig> {
        intervals.sort_by(|a, b| a.0.cmp(&b.0));
        let mut total = Rational::new();
        for (k, (a, b)) in intervals.iter().enumerate() {
            if *a <= -1 || *b >= 1 || a > b {
                return Err(ArcError::InvalidParameter(format!(
                    "arc [{a}, {b}]*pi outside (-pi, pi)"
                )));
            }
            if k > 0 && intervals[k - 1].1 >= *a {
                return Err(ArcError::InvalidParameter("arcs overlap".into()));
            }
            total += Rational::from(b - a);
        }
        if total <= 0 || total >= 2 {
            return Err(ArcError::InvalidParameter("total measure must lie in (0, 2 pi)".into()));
        }
        Ok(ArcConfig {
            intervals,
            family: Family::General,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Endpoints in units of pi.
    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `|I|/(2 pi)`.
    pub fn epsilon_total(&self) -> Rational {
        let total: Rational = self.intervals.iter().map(|(a, b)| Rational::from(b - a)).sum();
        total / 2u32
    }

    /// Nonzero Fourier bands are multiples of this period.
    pub fn band_period(&self) -> usize {
        match self.family {
            Family::OddSymmetric { r, .. } => 2 * r as usize + 1,
            Family::EvenSymmetric { s, .. } => 2 * s as usize,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> ConfigJson {
        let (r, s) = match self.family {
            Family::OddSymmetric { r, .. } => (Some(r), None),
            Family::EvenSymmetric { s, .. } => (None, Some(s)),
            _ => (None, None),
        };
        ConfigJson {
            family: self.family.name().to_string(),
            epsilon: self.epsilon_total().to_string(),
            r,
            s,
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| [format!("{a}*pi"), format!("{b}*pi")])
                .collect(),
        }
    }

    pub fn from_json(j: &ConfigJson) -> Result<ArcConfig> {
        let eps = parse_rational(&j.epsilon)?;
        match j.family.as_str() {
            "one_cut" => ArcConfig::one_cut(eps),
            "odd_symmetric" => ArcConfig::odd_symmetric(j.r.ok_or_else(|| missing("r"))?, eps),
            "even_symmetric" => ArcConfig::even_symmetric(j.s.ok_or_else(|| missing("s"))?, eps),
            "general" => {
                let iv = j
                    .intervals
                    .iter()
                    .map(|[a, b]| Ok((parse_pi_multiple(a)?, parse_pi_multiple(b)?)))
                    .collect::<Result<Vec<_>>>()?;
                ArcConfig::general(iv)
            }
            other => Err(ArcError::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

fn missing(field: &str) -> ArcError {
    ArcError::InvalidParameter(format!("missing field {field}"))
}

/// Serialized form; endpoints are strings `"p/q*pi"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfigJson {
    pub family: String,
    pub epsilon: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<u32>,
    pub intervals: Vec<[String; 2]>,
}

/// Parses `p/q`, integers and finite decimals exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || ArcError::InvalidParameter(format!("cannot parse {s:?} as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q == 0 {
            return Err(ArcError::DivisionByZero);
        }
        return Ok(p / q);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int_part}{frac_part}");
    let mut v = Rational::from(digits.parse::<Integer>().map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    let scale = Integer::from(Integer::u_pow_u(10, shift.unsigned_abs()));
    if shift >= 0 {
        v *= scale;
    } else {
        v /= scale;
    }
    Ok(v)
}

fn parse_pi_multiple(s: &str) -> Result<Rational> {
    let t = s.trim();
    let body = t
        .strip_suffix("*pi")
        .ok_or_else(|| ArcError::InvalidParameter(format!("endpoint {t:?} must end in *pi")))?;
    parse_rational(body)
}

/// `t_k` for `0 <= k <= k_max`; negative indices are conjugates.
#[derive(Clone, Debug)]
pub struct SymbolCoefficients {
    pub epsilon_total: Float,
    pub coeffs: Vec<BigComplex>,
    /// All coefficients real.
    pub real: bool,
    /// Coefficients vanish exactly off multiples of this period.
    pub period: usize,
}

impl SymbolCoefficients {
    pub fn k_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn prec(&self) -> u32 {
        self.epsilon_total.prec()
    }

    pub fn get(&self, k: i64) -> BigComplex {
        let c = &self.coeffs[k.unsigned_abs() as usize];
        if k < 0 {
            c.conj()
        } else {
            c.clone()
        }
    }

    /// Known-zero band (exact sparsity of the family).
    pub fn is_structural_zero(&self, k: i64) -> bool {
        k.unsigned_abs() as usize % self.period != 0
    }

    /// Builds coefficients directly from `t_k` values for `k >= 0`.
    pub fn from_real(values: Vec<Float>, period: usize) -> SymbolCoefficients {
        let eps = values[0].clone();
        SymbolCoefficients {
            epsilon_total: eps,
            coeffs: values.into_iter().map(BigComplex::real).collect(),
            real: true,
            period,
        }
    }
}

/// `pi * q` at the context precision.
fn pi_times(q: &Rational, ctx: &RealContext) -> Float {
    ctx.pi() * Float::with_val(ctx.bits(), q)
}

/// `eps * sinc(pi k eps / N)` for band `k` of a period-`N` family.
fn banded_value(eps: &Rational, k: usize, n: usize, ctx: &RealContext) -> Float {
    let arg = Rational::from(eps * Integer::from(k)) / Integer::from(n);
    ctx.float(eps) * sinc(&pi_times(&arg, ctx))
}

/// `t_k = (1/2pi) sum_j e^{ik(a_j+b_j)/2} (b_j - a_j) sinc(k (b_j - a_j)/2)`.
pub fn fourier_coefficients(config: &ArcConfig, k_max: usize, ctx: &RealContext) -> SymbolCoefficients {
    let eps_total = ctx.float(&config.epsilon_total());
    let prec = ctx.bits();
    let coeffs: Vec<BigComplex> = match config.family() {
        Family::OneCut { eps } | Family::OddSymmetric { eps, .. } => {
            let n = config.band_period();
            (0..=k_max)
                .map(|k| {
                    if k % n != 0 {
                        BigComplex::zero(prec)
                    } else {
                        BigComplex::real(banded_value(eps, k, n, ctx))
                    }
                })
                .collect()
        }
        Family::EvenSymmetric { eps, .. } => {
            // the arcs sit at the 2s-th roots of unity rotated by pi/(2s),
            // which multiplies band j by (-1)^j
            let n = config.band_period();
            (0..=k_max)
                .map(|k| {
                    if k % n != 0 {
                        BigComplex::zero(prec)
                    } else {
                        let v = banded_value(eps, k, n, ctx);
                        BigComplex::real(if (k / n) % 2 == 1 { -v } else { v })
                    }
                })
                .collect()
        }
        Family::General => (0..=k_max).map(|k| general_coefficient(config, k, ctx)).collect(),
    };
    let real = !matches!(config.family(), Family::General) || coeffs.iter().all(BigComplex::is_real);
    SymbolCoefficients {
        epsilon_total: eps_total,
        coeffs,
        real,
        period: config.band_period(),
    }
}

fn general_coefficient(config: &ArcConfig, k: usize, ctx: &RealContext) -> BigComplex {
    let mut acc = BigComplex::zero(ctx.bits());
    for (a, b) in config.intervals() {
        let width = Rational::from(b - a);
        let centre = Rational::from(a + b) / 2u32;
        // angle k*centre*pi reduced mod 2pi exactly
        let mut turns = centre * Integer::from(k);
        let whole = Integer::from(turns.floor_ref()) / 2u32 * 2u32;
        turns -= whole;
        let phase = BigComplex::cis(&pi_times(&turns, ctx));
        let half_arg = Rational::from(&width * Integer::from(k)) / 2u32;
        let mag = ctx.float(&width) * sinc(&pi_times(&half_arg, ctx)) / 2u32;
        acc = acc.add(&phase.scale(&mag));
    }
    acc
}

/// `J = union [tan(alpha_j/2), tan(beta_j/2)]`.
pub fn tan_support(config: &ArcConfig, ctx: &RealContext) -> Vec<(Float, Float)> {
    config
        .intervals()
        .iter()
        .map(|(a, b)| {
            let ta = pi_times(&Rational::from(a / 2u32), ctx).tan();
            let tb = pi_times(&Rational::from(b / 2u32), ctx).tan();
            (ta, tb)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad_singular;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn make_config_examples() {
        let c = ArcConfig::one_cut(q(1, 2)).unwrap();
        assert_eq!(c.intervals(), &[(q(-1, 2), q(1, 2))]);
        let odd = ArcConfig::odd_symmetric(1, q(1, 5)).unwrap();
        assert_eq!(odd.len(), 3);
        assert_eq!(odd.intervals()[1], (q(-1, 15), q(1, 15)));
        assert_eq!(odd.intervals()[2], (q(2, 3) - q(1, 15), q(2, 3) + q(1, 15)));
        let even = ArcConfig::even_symmetric(3, q(1, 5)).unwrap();
        assert_eq!(even.len(), 6);
        assert_eq!(even.intervals()[0].1.clone() - even.intervals()[0].0.clone(), q(1, 15));
        assert!(ArcConfig::one_cut(q(1, 1)).is_err());
        assert!(ArcConfig::general(vec![(q(-1, 2), q(1, 3)), (q(1, 4), q(1, 2))]).is_err());
    }

    #[test]
    fn one_cut_first_coefficient() {
        let ctx = RealContext::new(128).unwrap();
        let c = fourier_coefficients(&ArcConfig::one_cut(q(1, 2)).unwrap(), 2, &ctx);
        let inv_pi = ctx.pi().recip();
        assert!((c.coeffs[1].re.clone() - inv_pi).abs() < ctx.pow2(-120));
        let full = fourier_coefficients(&ArcConfig::one_cut(q(999_999, 1_000_000)).unwrap(), 3, &ctx);
        assert!((full.coeffs[0].re.clone() - 1u32).abs() < 1e-5);
        assert!(full.coeffs[2].re.clone().abs() < 1e-5);
    }

    #[test]
    fn odd_family_sparsity() {
        let ctx = RealContext::new(128).unwrap();
        let eps = q(3, 10);
        let c = fourier_coefficients(&ArcConfig::odd_symmetric(1, eps.clone()).unwrap(), 9, &ctx);
        assert!(c.coeffs[1].re.is_zero() && c.coeffs[2].re.is_zero());
        let expect = ctx.float(&eps) * sinc(&pi_times(&eps, &ctx));
        assert!((c.coeffs[3].re.clone() - expect).abs() < ctx.pow2(-120));
        for k in 0..=9 {
            assert_eq!(c.coeffs[k].re.is_zero(), k % 3 != 0);
        }
    }

    #[test]
    fn symmetric_families_match_general_formula() {
        let ctx = RealContext::new(160).unwrap();
        for cfg in [
            ArcConfig::one_cut(q(2, 7)).unwrap(),
            ArcConfig::odd_symmetric(2, q(1, 3)).unwrap(),
            ArcConfig::even_symmetric(2, q(2, 5)).unwrap(),
            ArcConfig::even_symmetric(1, q(1, 10)).unwrap(),
        ] {
            let closed = fourier_coefficients(&cfg, 16, &ctx);
            let general = ArcConfig::general(cfg.intervals().to_vec()).unwrap();
            let direct = fourier_coefficients(&general, 16, &ctx);
            for k in 0..=16 {
                let d = closed.coeffs[k].sub(&direct.coeffs[k]).abs();
                assert!(d < ctx.pow2(-150), "{:?} k={k}", cfg.family());
            }
        }
    }

    #[test]
    fn even_family_bands_alternate_in_sign() {
        let ctx = RealContext::new(128).unwrap();
        let eps = q(1, 5);
        let c = fourier_coefficients(&ArcConfig::even_symmetric(2, eps.clone()).unwrap(), 8, &ctx);
        let band = |j: i64| ctx.float(&eps) * sinc(&pi_times(&Rational::from(&eps * Integer::from(j)), &ctx));
        assert!((c.coeffs[4].re.clone() + band(1)).abs() < ctx.pow2(-120));
        assert!((c.coeffs[8].re.clone() - band(2)).abs() < ctx.pow2(-120));
    }

    fn random_general(rng: &mut ChaCha8Rng) -> ArcConfig {
        let m = rng.gen_range(1..=4);
        let mut cuts: Vec<i64> = Vec::new();
        while cuts.len() < 2 * m {
            let v = rng.gen_range(-239..240);
            if !cuts.contains(&v) {
                cuts.push(v);
            }
        }
        cuts.sort();
        let iv = cuts.chunks(2).map(|c| (q(c[0], 240), q(c[1], 240))).collect();
        ArcConfig::general(iv).unwrap()
    }

    #[test]
    fn general_coefficients_match_quadrature() {
        let ctx = RealContext::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let cfg = random_general(&mut rng);
            let c = fourier_coefficients(&cfg, 20, &ctx);
            for k in [0usize, 1, 7, 20] {
                let mut re = ctx.zero();
                let mut im = ctx.zero();
                for (a, b) in cfg.intervals() {
                    let lo = pi_times(a, &ctx);
                    let hi = pi_times(b, &ctx);
                    re += quad_singular(|t| Float::with_val(t.prec(), t * k as u32).cos(), &lo, &hi, &ctx).unwrap();
                    im += quad_singular(|t| Float::with_val(t.prec(), t * k as u32).sin(), &lo, &hi, &ctx).unwrap();
                }
                let two_pi = ctx.pi() * 2u32;
                let d = c.coeffs[k].sub(&BigComplex::new(re / &two_pi, im / &two_pi)).abs();
                assert!(d < 1e-25, "k={k} gap {d}");
            }
        }
    }

    #[test]
    fn hermitian_and_bounded() {
        let ctx = RealContext::new(96).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let cfg = random_general(&mut rng);
            let c = fourier_coefficients(&cfg, 12, &ctx);
            assert!(c.coeffs[0].is_real() || c.coeffs[0].im.clone().abs() < 1e-25);
            for k in -12i64..=12 {
                assert_eq!(c.get(-k), c.get(k).conj());
                assert!(c.get(k).abs() <= c.coeffs[0].re.clone() + 1e-25);
            }
        }
    }

    #[test]
    fn tan_support_examples() {
        let ctx = RealContext::new(128).unwrap();
        let j = tan_support(&ArcConfig::one_cut(q(1, 2)).unwrap(), &ctx);
        assert!((j[0].0.clone() + 1u32).abs() < ctx.pow2(-120));
        assert!((j[0].1.clone() - 1u32).abs() < ctx.pow2(-120));
    }

    #[test]
    fn json_round_trip() {
        let cfg = ArcConfig::general(vec![(q(-1, 3), q(-1, 5)), (q(1, 7), q(2, 3))]).unwrap();
        let j = cfg.to_json();
        assert_eq!(j.intervals[0][0], "-1/3*pi");
        let text = serde_json::to_string(&j).unwrap();
        let back: ConfigJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ArcConfig::from_json(&back).unwrap(), cfg);
        let odd = ArcConfig::odd_symmetric(2, q(1, 10)).unwrap();
        assert_eq!(ArcConfig::from_json(&odd.to_json()).unwrap(), odd);
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.3").unwrap(), q(3, 10));
        assert_eq!(parse_rational("1e-4").unwrap(), q(1, 10_000));
        assert_eq!(parse_rational("1/7").unwrap(), q(1, 7));
        assert_eq!(parse_rational("-2.5E1").unwrap(), q(-25, 1));
    }
}
