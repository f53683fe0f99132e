//! Large-n expansion of `ln Z_n`: Selberg and Barnes normalizations, the
//! one-cut coefficient assembly from free energies, and partial sums.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::numerics::{bernoulli, to_decimal, widom_constant, AlgebraicElement, RealContext};
use crate::symbol::Family;
use crate::toprec::FreeEnergyTable;

/// Depth through which the one-cut coefficients are checked against closed forms.
pub const VERIFIED_DEPTH: usize = 2;
pub const DEFAULT_DEPTH: usize = 2;
pub const STIRLING_TERMS: u32 = 5;

/// `ln S_n(1,1,1) = n^2 ln 2 + sum_j m_j ln j!`, kept as exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelbergLog {
    pub n: u32,
    pub ln2_coeff: u64,
    /// `j -> m_j`, zero multiplicities dropped.
    pub factorials: BTreeMap<u32, i64>,
}

impl SelbergLog {
    /// `S_n` itself as an exact rational.
    pub fn exact(&self) -> Rational {
        let mut num = Integer::from(1) << (self.ln2_coeff as u32);
        let mut den = Integer::from(1);
        for (&j, &m) in &self.factorials {
            let f = Integer::from(Integer::factorial(j));
            let p = Integer::from((&f).pow(m.unsigned_abs() as u32));
            if m > 0 {
                num *= p;
            } else {
                den *= p;
            }
        }
        Rational::from((num, den))
    }

    pub fn eval(&self, ctx: &RealContext) -> Float {
        let w = ctx.widened(32);
        Float::with_val(ctx.bits(), self.exact_log(&w))
    }

    fn exact_log(&self, w: &RealContext) -> Float {
        let q = self.exact();
        let num = Float::with_val(w.bits(), q.numer()).ln();
        let den = Float::with_val(w.bits(), q.denom()).ln();
        num - den
    }
}

/// `S_n(1,1,1) = ∫_{[-1,1]^n} Δ(u)^2 du = 2^{n^2} n! (∏_{j<n} j!)^4 / ∏_{j=1}^{2n-1} j!`.
pub fn selberg_log(n: u32) -> Result<SelbergLog> {
    if n == 0 {
        return Err(ArcError::InvalidParameter("selberg_log needs n >= 1".into()));
    }
    let mut factorials = BTreeMap::new();
    *factorials.entry(n).or_insert(0) += 1;
    for j in 2..n {
        *factorials.entry(j).or_insert(0) += 4;
    }
    for j in 2..2 * n {
        *factorials.entry(j).or_insert(0) -= 1;
    }
    factorials.retain(|_, m| *m != 0);
    Ok(SelbergLog {
        n,
        ln2_coeff: u64::from(n) * u64::from(n),
        factorials,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarnesMode {
    Exact,
    /// Terms `g = 2..=g_max` of the tail.
    Asymptotic {
        g_max: u32,
    },
}

/// `B_{2g} / (2g (2g-2)) N^{2-2g}`, the `g`-th tail term of `ln G(N+1)`.
pub fn barnes_term(g: u32, n: u32, ctx: &RealContext) -> Result<Float> {
    if g < 2 {
        return Err(ArcError::InvalidParameter(format!(
            "barnes tail starts at g = 2, got {g}"
        )));
    }
    let b = bernoulli(2 * g as usize)?;
    let c = b / Integer::from((2 * g) * (2 * g - 2));
    let npow = Float::with_val(ctx.bits(), n).pow(2 - 2 * g as i32);
    Ok(Float::with_val(ctx.bits(), &c) * npow)
}

/// `ln G(N+1)`: the superfactorial sum `sum_{i<N} ln i!`, or its large-N expansion.
pub fn barnes_log(n: u32, mode: BarnesMode, ctx: &RealContext) -> Result<Float> {
    if n == 0 {
        return Err(ArcError::InvalidParameter("barnes_log needs N >= 1".into()));
    }
    let w = ctx.widened(32);
    let v = match mode {
        BarnesMode::Exact => {
            let mut prod = Integer::from(1);
            let mut fact = Integer::from(1);
            for i in 2..n {
                fact *= i;
                prod *= &fact;
            }
            Float::with_val(w.bits(), &prod).ln()
        }
        BarnesMode::Asymptotic { g_max } => {
            let nf = w.float(n);
            let ln_n = Float::with_val(w.bits(), nf.ln_ref());
            let n2 = Float::with_val(w.bits(), nf.square_ref());
            let ln2pi = Float::with_val(w.bits(), w.pi() * 2u32).ln();
            let mut acc = Float::with_val(w.bits(), &n2 * &ln_n) / 2u32;
            acc += Float::with_val(w.bits(), &nf * &ln2pi) / 2u32;
            acc -= Float::with_val(w.bits(), &ln_n / 12u32);
            acc += crate::numerics::zeta_prime_minus_one(&w);
            acc -= n2 * 3u32 / 4u32;
            for g in 2..=g_max {
                acc += barnes_term(g, n, &w)?;
            }
            acc
        }
    };
    Ok(Float::with_val(ctx.bits(), v))
}

/// Stirling's series for `ln n!` through `k = STIRLING_TERMS`, with the first
/// dropped term's magnitude as a remainder bound.
pub fn stirling_log_factorial(n: u32, ctx: &RealContext) -> Result<(Float, Float)> {
    if n == 0 {
        return Err(ArcError::InvalidParameter("stirling series needs n >= 1".into()));
    }
    let w = ctx.widened(32);
    let nf = w.float(n);
    let ln_n = Float::with_val(w.bits(), nf.ln_ref());
    let two_pi_n = Float::with_val(w.bits(), w.pi() * &nf) * 2u32;
    let mut acc = Float::with_val(w.bits(), &nf * &ln_n) - &nf + two_pi_n.ln() / 2u32;
    let term = |k: u32| -> Result<Float> {
        let b = bernoulli(2 * k as usize)?;
        let c = b / Integer::from((2 * k) * (2 * k - 1));
        Ok(Float::with_val(w.bits(), &c) / Float::with_val(w.bits(), &nf).pow(2 * k - 1))
    };
    for k in 1..=STIRLING_TERMS {
        acc += term(k)?;
    }
    let bound = term(STIRLING_TERMS + 1)?.abs();
    Ok((Float::with_val(ctx.bits(), acc), Float::with_val(ctx.bits(), bound)))
}

/// `4 (1 - 2^{-2g-2}) B_{2g+2} / (2g (2g+2))`.
pub fn bernoulli_part(g: u32) -> Result<Rational> {
    if g == 0 {
        return Err(ArcError::InvalidParameter("bernoulli part defined for g >= 1".into()));
    }
    let b = bernoulli(2 * g as usize + 2)?;
    let factor = Rational::from(1) - Rational::from((1, Integer::from(1) << (2 * g + 2)));
    Ok(b * factor * 4u32 / Integer::from((2 * g) * (2 * g + 2)))
}

/// `f^{2g} = F_{g+1}(a = 0) + bernoulli_part(g)` for `g >= 1`.
pub fn normalization_constant_exact(g: u32, table: &FreeEnergyTable) -> Result<Rational> {
    Ok(table.at_zero(g + 1)? + bernoulli_part(g)?)
}

/// `f^k` of the `a -> 0` normalization: `ln 2` at `k = -2`, the constant term
/// at `k = 0`, exact rationals at positive even `k`, zero at odd `k`.
pub fn normalization_constant(k: i32, table: &FreeEnergyTable, ctx: &RealContext) -> Result<Float> {
    match k {
        -2 => Ok(ctx.ln2()),
        0 => Ok(widom_constant(ctx)),
        k if k < -2 => Err(ArcError::InvalidParameter(format!(
            "no normalization constant at order {k}"
        ))),
        k if k % 2 != 0 => Ok(ctx.zero()),
        k => Ok(ctx.float(&normalization_constant_exact(k as u32 / 2, table)?)),
    }
}

/// `F_{g+1}(0) - F_{g+1}(a) + bernoulli_part(g)` in `Q(a)`.
pub fn expansion_coefficient_symbolic(g: u32, table: &FreeEnergyTable) -> Result<AlgebraicElement> {
    let fg = table.get(g + 1)?;
    let at0 = AlgebraicElement::from_rational(table.at_zero(g + 1)?);
    let bern = AlgebraicElement::from_rational(bernoulli_part(g)?);
    Ok(at0.sub(fg).add(&bern))
}

#[derive(Clone, Debug)]
pub struct ExpansionSeries {
    pub family: Family,
    pub n_intervals: u32,
    pub c_n2: Float,
    pub c_logn: Rational,
    pub c_0: Option<Float>,
    /// `c_2g[g - 1]` multiplies `n^{-2g}`.
    pub c_2g: Vec<Float>,
}

impl ExpansionSeries {
    pub fn depth(&self) -> usize {
        self.c_2g.len()
    }

    /// Copy keeping terms through `n^{-2k}`; `None` drops the constant too.
    pub fn truncated(&self, k: Option<usize>) -> ExpansionSeries {
        let mut s = self.clone();
        match k {
            None => {
                s.c_0 = None;
                s.c_2g.clear();
            }
            Some(k) => s.c_2g.truncate(k),
        }
        s
    }

    pub fn to_json(&self, digits: usize) -> SeriesJson {
        SeriesJson {
            family: self.family.name().to_string(),
            epsilon: self.family.epsilon().map(|e| e.to_string()),
            n_intervals: self.n_intervals,
            coefficients: CoefficientsJson {
                n2: to_decimal(&self.c_n2, digits),
                logn: self.c_logn.to_string(),
                constant: self.c_0.as_ref().map(|c| to_decimal(c, digits)),
                minus2g: self.c_2g.iter().map(|c| to_decimal(c, digits)).collect(),
            },
            verified_depth: VERIFIED_DEPTH.min(self.depth()),
            constants_provenance: provenance(self.n_intervals),
        }
    }
}

fn provenance(n_intervals: u32) -> String {
    if n_intervals == 1 {
        "const = -(1/4) ln cos(pi eps/2) + 3 zeta'(-1) + ln(2)/12 with zeta'(-1) = 1/12 - ln A and ln A from zeta'(2); \
         n^-2g = F_{g+1}(0) - F_{g+1}(tan(pi eps/2)) + 4(1 - 2^(-2g-2)) B_{2g+2} / (2g(2g+2)) from symbolic recursion; \
         terms beyond n^-4 are unverified predictions"
            .to_string()
    } else {
        "leading terms only; the constant depends on n mod N and is fitted empirically".to_string()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CoefficientsJson {
    pub n2: String,
    pub logn: String,
    #[serde(rename = "const")]
    pub constant: Option<String>,
    pub minus2g: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub family: String,
    pub epsilon: Option<String>,
    pub n_intervals: u32,
    pub coefficients: CoefficientsJson,
    pub verified_depth: usize,
    pub constants_provenance: String,
}

fn half_angle(eps: &Rational, ctx: &RealContext) -> Float {
    ctx.pi() * ctx.float(eps) / 2u32
}

/// One-arc expansion through `n^{-2k}`.
pub fn one_cut_series(eps: &Rational, k: usize, table: &FreeEnergyTable, ctx: &RealContext) -> Result<ExpansionSeries> {
    if *eps <= 0 || *eps >= 1 {
        return Err(ArcError::InvalidParameter(format!("epsilon = {eps} not in (0, 1)")));
    }
    let available = table.g_max().saturating_sub(1);
    if k as u32 > available {
        return Err(ArcError::DepthExceeded {
            requested: k as u32,
            available,
        });
    }
    let w = ctx.widened(32);
    let ang = half_angle(eps, &w);
    let (sin, cos) = ang.clone().sin_cos(w.zero());
    let a = Float::with_val(w.bits(), &sin / &cos);
    let c_0 = -(cos.ln() / 4u32) + widom_constant(&w);
    let mut c_2g = Vec::with_capacity(k);
    for g in 1..=k as u32 {
        let c = expansion_coefficient_symbolic(g, table)?;
        c_2g.push(Float::with_val(
            ctx.bits(),
            crate::numerics::algebraic_eval(&c, &a, &w)?,
        ));
    }
    Ok(ExpansionSeries {
        family: Family::OneCut { eps: eps.clone() },
        n_intervals: 1,
        c_n2: Float::with_val(ctx.bits(), sin.ln()),
        c_logn: Rational::from((-1, 4)),
        c_0: Some(Float::with_val(ctx.bits(), c_0)),
        c_2g,
    })
}

/// Leading terms `n^2 ln sin(pi eps/2)/N - (N/4) ln n` as a series without a constant.
pub fn multicut_series(family: &Family, ctx: &RealContext) -> Result<ExpansionSeries> {
    let (eps, n_int) = match (family.epsilon(), family.intervals()) {
        (Some(e), Some(n)) => (e.clone(), n),
        _ => return Err(ArcError::InvalidParameter("symmetric family required".into())),
    };
    let ang = half_angle(&eps, ctx);
    Ok(ExpansionSeries {
        family: family.clone(),
        n_intervals: n_int,
        c_n2: ang.sin().ln() / n_int,
        c_logn: Rational::from((-(n_int as i64), 4)),
        c_0: None,
        c_2g: Vec::new(),
    })
}

pub fn series_eval(series: &ExpansionSeries, n: u32, ctx: &RealContext) -> Result<Float> {
    if n == 0 {
        return Err(ArcError::InvalidParameter("series_eval needs n >= 1".into()));
    }
    let w = ctx.widened(16);
    let nf = w.float(n);
    let mut acc = Float::with_val(w.bits(), &series.c_n2) * Float::with_val(w.bits(), nf.square_ref());
    acc += Float::with_val(w.bits(), &series.c_logn) * Float::with_val(w.bits(), nf.ln_ref());
    if let Some(c0) = &series.c_0 {
        acc += c0;
    }
    let inv2 = Float::with_val(w.bits(), nf.square_ref()).recip();
    let mut p = inv2.clone();
    for c in &series.c_2g {
        acc += Float::with_val(w.bits(), c * &p);
        p *= &inv2;
    }
    Ok(Float::with_val(ctx.bits(), acc))
}

/// `n^2 ln sin(pi eps/2) / N - (N/4) ln n`.
pub fn multicut_leading(n_intervals: u32, eps: &Rational, n: u32, ctx: &RealContext) -> Result<Float> {
    if n_intervals == 0 || n == 0 {
        return Err(ArcError::InvalidParameter("need N >= 1 and n >= 1".into()));
    }
    let ang = half_angle(eps, ctx);
    let nf = ctx.float(n);
    let lead = ang.sin().ln() * Float::with_val(ctx.bits(), nf.square_ref()) / n_intervals;
    Ok(lead - nf.ln() * n_intervals / 4u32)
}

/// Conjectured vanishing order of `Z_n` as `eps -> 0`.
pub fn gamma_exponent(family: &Family, n: u32) -> Result<i64> {
    if n == 0 {
        return Err(ArcError::InvalidParameter("gamma_exponent needs n >= 1".into()));
    }
    let n = i64::from(n);
    match family {
        Family::OneCut { .. } => Ok(n * n),
        Family::OddSymmetric { r, .. } => {
            let m = 2 * i64::from(*r) + 1;
            let q = (n - 1) / m;
            Ok(n - m * q * q + (2 * n - m) * q)
        }
        Family::EvenSymmetric { s, .. } => {
            let s = i64::from(*s);
            let q = (n - 1) / (2 * s);
            Ok(n - 2 * s * q * q + 2 * (n - s) * q)
        }
        Family::General => Err(ArcError::InvalidParameter(
            "no exponent conjecture for general arcs".into(),
        )),
    }
}
