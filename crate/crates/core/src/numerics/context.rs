use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};

pub const MIN_PRECISION: u32 = 64;

/// Working precision and relative tolerance shared by a computation.
#[derive(Clone, Debug, PartialEq)]
pub struct RealContext {
    precision_bits: u32,
    target_tolerance: Float,
}

impl RealContext {
    /// Context with the default tolerance `2^(-bits/2)`.
    pub fn new(precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION {
            return Err(ArcError::InvalidParameter(format!(
                "precision_bits = {precision_bits} < {MIN_PRECISION}"
            )));
        }
        let exp = -((precision_bits / 2) as i32);
        let tol = Float::with_val(precision_bits, Float::i_exp(1, exp));
        Ok(RealContext {
            precision_bits,
            target_tolerance: tol,
        })
    }

    pub fn with_tolerance(precision_bits: u32, tol: &Float) -> Result<Self> {
        let mut ctx = Self::new(precision_bits)?;
        if tol.is_sign_negative() || tol.is_zero() || !tol.is_finite() {
            return Err(ArcError::InvalidParameter("tolerance must be positive".into()));
        }
        ctx.target_tolerance = Float::with_val(precision_bits, tol);
        Ok(ctx)
    }

    pub fn bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn tolerance(&self) -> &Float {
        &self.target_tolerance
    }

    /// Same tolerance, more bits.
    pub fn widened(&self, extra_bits: u32) -> RealContext {
        RealContext {
            precision_bits: self.precision_bits + extra_bits,
            target_tolerance: Float::with_val(self.precision_bits + extra_bits, &self.target_tolerance),
        }
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.precision_bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.precision_bits)
    }

    pub fn one(&self) -> Float {
        self.float(1)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.precision_bits, Constant::Pi)
    }

    pub fn ln2(&self) -> Float {
        Float::with_val(self.precision_bits, Constant::Log2)
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.precision_bits, Constant::Euler)
    }

    /// Parses decimals and `p/q` fractions exactly before rounding.
    pub fn parse(&self, s: &str) -> Result<Float> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = self.parse(p)?;
            let q = self.parse(q)?;
            if q.is_zero() {
                return Err(ArcError::DivisionByZero);
            }
            return Ok(p / q);
        }
        Float::parse(s)
            .map(|v| self.float(v))
            .map_err(|e| ArcError::InvalidParameter(format!("cannot parse {s:?}: {e}")))
    }

    pub fn pow2(&self, e: i32) -> Float {
        self.float(2).pow(e)
    }
}

/// Complex number over two MPFR floats.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex::new(re, Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn add(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }

    pub fn mul(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        BigComplex::new(rr - ii, ri + ir)
    }

    pub fn scale(&self, k: &Float) -> BigComplex {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re * k), Float::with_val(p, &self.im * k))
    }

    pub fn div(&self, o: &BigComplex) -> Result<BigComplex> {
        let d = o.norm_sqr();
        if d.is_zero() {
            return Err(ArcError::DivisionByZero);
        }
        let num = self.mul(&o.conj());
        Ok(BigComplex::new(num.re / &d, num.im / d))
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &Float) -> BigComplex {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        BigComplex::new(c, s)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

/// Scientific notation with `digits` significant digits after the point.
pub fn to_decimal(x: &Float, digits: usize) -> String {
    format!("{:.*e}", digits, x)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PrecisionRecord {
    pub requested_bits: u32,
    pub used_bits: u32,
    pub escalations: u32,
}
