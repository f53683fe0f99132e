//! Per-remainder-class fits of the constant term for symmetric multi-arc symbols.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use super::FamilySpec;
use crate::error::{ArcError, Result};
use crate::numerics::{least_squares, rational_serde, RealContext};
use crate::toeplitz::log_det_prefix_config;

pub const SNAP_DENOMINATOR: u32 = 256;
pub const CF_MAX_DENOMINATOR: u32 = 64;
pub const SNAP_LIMIT: f64 = 1.0 / 512.0;
pub const STABILITY_LIMIT: f64 = 1.0 / 1024.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snap {
    #[serde(with = "rational_serde")]
    pub value: Rational,
    pub distance: f64,
}

/// Nearest `i/den`.
pub fn snap_denominator(x: f64, den: u32) -> Snap {
    let i = (x * f64::from(den)).round() as i64;
    let value = Rational::from((i, i64::from(den)));
    Snap {
        distance: (x - value.to_f64()).abs(),
        value,
    }
}

/// Last continued-fraction convergent with denominator `<= max_den`.
pub fn snap_continued_fraction(x: f64, max_den: u32) -> Snap {
    let (mut h0, mut h1) = (Integer::from(1), Integer::from(x.floor() as i64));
    let (mut k0, mut k1) = (Integer::from(0), Integer::from(1));
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-12 {
            break;
        }
        let y = 1.0 / frac;
        let a = y.floor();
        frac = y - a;
        let a = Integer::from(a as i64);
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > max_den {
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
    }
    let value = Rational::from((h1, k1));
    Snap {
        distance: (x - value.to_f64()).abs(),
        value,
    }
}

/// `y_inf` from `y_i = y_inf + c/p_i` at two class indices.
pub fn richardson_c_over_p(p1: u32, y1: &Float, p2: u32, y2: &Float) -> Float {
    let prec = y1.prec().max(y2.prec());
    let a = Float::with_val(prec, y2 * p2);
    let b = Float::with_val(prec, y1 * p1);
    (a - b) / (p2 - p1)
}

#[derive(Clone, Debug, Serialize)]
pub struct O1FitResult {
    pub n_intervals: u32,
    pub m: u32,
    /// The two class members used for extrapolation.
    pub members: (usize, usize),
    /// `(alpha, beta, gamma)` on `ln cos`, `ln tan`, `1`.
    pub raw: [f64; 3],
    pub rss: f64,
    pub snapped_256: Vec<Snap>,
    pub snapped_cf: Vec<Snap>,
    /// Raw coefficients refitted on every other grid point.
    pub thinned_raw: [f64; 3],
    pub max_thinning_shift: f64,
}

impl O1FitResult {
    pub fn stable(&self) -> bool {
        self.max_thinning_shift < STABILITY_LIMIT
    }

    /// All three `/256` snaps lie within `SNAP_LIMIT`.
    pub fn snaps_cleanly(&self) -> bool {
        self.snapped_256.iter().all(|s| s.distance < SNAP_LIMIT)
    }
}

/// `(n1, n2, y)`: the two class members and the extrapolated value.
pub type ClassConstant = (usize, usize, Float);

/// `y_m(eps) = ln Z_n - n^2 ln sin(pi eps/2)/N + (N/4) ln n`, extrapolated in the class index.
pub fn class_constants(family: FamilySpec, eps: &Rational, n_max: usize, min_bits: u32) -> Result<Vec<ClassConstant>> {
    let big_n = family.intervals() as usize;
    let cfg = family.config(eps)?;
    let (prefix, bits) = log_det_prefix_config(&cfg, n_max, min_bits)?;
    let ctx = RealContext::new(bits)?;
    let ln_sin = (ctx.pi() * ctx.float(eps) / 2u32).sin().ln();
    let y = |n: usize| -> Float {
        let nf = ctx.float(n as u32);
        let lead = Float::with_val(bits, &ln_sin * Float::with_val(bits, nf.square_ref())) / big_n as u32;
        Float::with_val(bits, &prefix[n] - &lead) + nf.ln() * big_n as u32 / 4u32
    };
    let mut out = Vec::with_capacity(big_n);
    for m in 0..big_n {
        let members: Vec<usize> = (1..=n_max).filter(|n| n % big_n == m && n / big_n >= 1).collect();
        if members.len() < 2 {
            return Err(ArcError::InsufficientClassMembers { m, n_max });
        }
        let n2 = members[members.len() - 1];
        let n1 = members[members.len() - 2];
        let v = richardson_c_over_p((n1 / big_n) as u32, &y(n1), (n2 / big_n) as u32, &y(n2));
        out.push((n1, n2, v));
    }
    Ok(out)
}

fn lsq3(eps: &[Rational], values: &[Float], ctx: &RealContext) -> Result<([f64; 3], f64)> {
    let design: Vec<Vec<Float>> = eps
        .iter()
        .map(|e| {
            let ang = ctx.pi() * ctx.float(e) / 2u32;
            let (s, c) = ang.sin_cos(ctx.zero());
            let t = Float::with_val(ctx.bits(), &s / &c);
            vec![c.ln(), t.ln(), ctx.one()]
        })
        .collect();
    let y: Vec<Float> = values.iter().map(|v| Float::with_val(ctx.bits(), v)).collect();
    let fit = least_squares(&design, &y)?;
    Ok((
        [fit.coef[0].to_f64(), fit.coef[1].to_f64(), fit.coef[2].to_f64()],
        fit.rss.to_f64(),
    ))
}

/// Fits `alpha ln cos + beta ln tan + gamma` per remainder class over `eps_grid`.
pub fn fit_o1(family: FamilySpec, eps_grid: &[Rational], n_max: usize, min_bits: u32) -> Result<Vec<O1FitResult>> {
    let big_n = family.intervals() as usize;
    if big_n > 9 {
        return Err(ArcError::InvalidParameter(format!(
            "fits limited to N <= 9, got {big_n}"
        )));
    }
    if n_max < 6 * big_n {
        return Err(ArcError::InvalidParameter(format!(
            "n_max = {n_max} below 6N = {}",
            6 * big_n
        )));
    }
    if eps_grid.len() < 4 {
        return Err(ArcError::SingularFit);
    }
    let mut per_eps: Vec<(usize, Vec<ClassConstant>)> = eps_grid
        .par_iter()
        .enumerate()
        .map(|(i, e)| class_constants(family, e, n_max, min_bits).map(|v| (i, v)))
        .collect::<Result<_>>()?;
    per_eps.sort_by_key(|(i, _)| *i);
    let ctx = RealContext::new(min_bits.max(128))?;
    let thinned_eps: Vec<Rational> = eps_grid.iter().step_by(2).cloned().collect();
    let mut out = Vec::with_capacity(big_n);
    for m in 0..big_n {
        let values: Vec<Float> = per_eps.iter().map(|(_, v)| v[m].2.clone()).collect();
        let (raw, rss) = lsq3(eps_grid, &values, &ctx)?;
        let thinned_vals: Vec<Float> = values.iter().step_by(2).cloned().collect();
        let (thinned_raw, _) = lsq3(&thinned_eps, &thinned_vals, &ctx)?;
        let shift = raw
            .iter()
            .zip(&thinned_raw)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let (n1, n2, _) = per_eps[0].1[m];
        out.push(O1FitResult {
            n_intervals: big_n as u32,
            m: m as u32,
            members: (n1, n2),
            raw,
            rss,
            snapped_256: raw.iter().map(|&x| snap_denominator(x, SNAP_DENOMINATOR)).collect(),
            snapped_cf: raw
                .iter()
                .map(|&x| snap_continued_fraction(x, CF_MAX_DENOMINATOR))
                .collect(),
            thinned_raw,
            max_thinning_shift: shift,
        });
    }
    Ok(out)
}
