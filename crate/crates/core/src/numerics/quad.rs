//! Tanh-sinh quadrature for integrands with inverse-square-root edge singularities.
//!
//! Abscissae are generated as distances from the nearer endpoint so that the
//! integrand sees `lo + d` and `hi - d` without cancellation in `d`.

use rug::float::Constant;
use rug::Float;

use super::context::RealContext;
use crate::error::{ArcError, Result};

pub const MAX_LEVELS: u32 = 14;

/// `∫_lo^hi f` to `ctx.tolerance()` (relative, floored at absolute 1).
///
/// `f` receives abscissae carrying `ctx.bits() + ctx.bits()/2 + 32` bits.
pub fn quad_singular<F>(f: F, lo: &Float, hi: &Float, ctx: &RealContext) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let wp = ctx.bits() + ctx.bits() / 2 + 32;
    let lo = Float::with_val(wp, lo);
    let hi = Float::with_val(wp, hi);
    if lo == hi {
        return Ok(ctx.zero());
    }
    if lo > hi {
        let v = quad_singular(f, &hi, &lo, ctx)?;
        return Ok(-v);
    }
    let half = Float::with_val(wp, &hi - &lo) / 2u32;
    let half_pi = Float::with_val(wp, Constant::Pi) / 2u32;
    let cutoff = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));

    // Sum over t = j*h for the odd multiples added at this level.
    let eval_level = |h: &Float, step: usize, start: usize| -> Result<Float> {
        let mut acc = Float::new(wp);
        let mut j = start;
        loop {
            let t = Float::with_val(wp, h * (j as u32));
            let u = Float::with_val(wp, t.sinh_ref()) * &half_pi;
            let e2u = Float::with_val(wp, Float::with_val(wp, &u * 2u32).exp_ref());
            // distance to the nearer endpoint relative to half-width: 1 - tanh u
            let rel = Float::with_val(wp, 2u32) / (Float::with_val(wp, &e2u + 1u32));
            let cosh_u = Float::with_val(wp, u.cosh_ref());
            let w = Float::with_val(wp, t.cosh_ref()) * &half_pi / Float::with_val(wp, cosh_u.square_ref());
            if w < cutoff || rel < cutoff {
                break;
            }
            let d = Float::with_val(wp, &half * &rel);
            if j == 0 {
                let c = Float::with_val(wp, &lo + &half);
                let v = f(&c);
                check_finite(&v, &c)?;
                acc += v * &w;
            } else {
                let xl = Float::with_val(wp, &lo + &d);
                let xr = Float::with_val(wp, &hi - &d);
                if xl == lo || xr == hi {
                    break;
                }
                let vl = f(&xl);
                check_finite(&vl, &xl)?;
                let vr = f(&xr);
                check_finite(&vr, &xr)?;
                acc += (vl + vr) * &w;
            }
            j += step;
        }
        Ok(acc)
    };

    let mut h = Float::with_val(wp, 1u32);
    let mut sum = eval_level(&h, 1, 0)?;
    let mut prev = Float::with_val(wp, &sum * &h) * &half;
    let mut last_change = f64::INFINITY;
    for level in 1..=MAX_LEVELS {
        h /= 2u32;
        sum += eval_level(&h, 2, 1)?;
        let cur = Float::with_val(wp, &sum * &h) * &half;
        let change = Float::with_val(wp, &cur - &prev).abs();
        let scale = Float::with_val(wp, cur.abs_ref()).max(&Float::with_val(wp, 1u32));
        last_change = change.to_f64();
        if level >= 3 && change <= Float::with_val(wp, ctx.tolerance() * &scale) {
            return Ok(Float::with_val(ctx.bits(), cur));
        }
        prev = cur;
    }
    Err(ArcError::QuadratureNonConvergence {
        levels: MAX_LEVELS,
        last_change,
    })
}

fn check_finite(v: &Float, x: &Float) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ArcError::NonFiniteIntegrand { x: x.to_f64() })
    }
}
