use rug::{Float, Rational};

use crate::error::{ArcError, Result};
use crate::numerics::{AlgebraicElement, RealContext};

/// Coefficient arithmetic for the recursion: exact in `Q(a)[s]` or big-float at fixed `a`.
pub trait CoeffField {
    type E: Clone + std::fmt::Debug;

    fn zero(&self) -> Self::E;
    fn from_rational(&self, q: &Rational) -> Self::E;
    fn add(&self, x: &Self::E, y: &Self::E) -> Self::E;
    fn mul(&self, x: &Self::E, y: &Self::E) -> Self::E;
    fn neg(&self, x: &Self::E) -> Self::E;
    fn inv(&self, x: &Self::E) -> Result<Self::E>;
    /// Exact zero (never a tolerance test).
    fn is_zero(&self, x: &Self::E) -> bool;
    /// `a^2`.
    fn a2(&self) -> Self::E;
    /// `s = sqrt(1 + a^2)`.
    fn s(&self) -> Self::E;

    fn one(&self) -> Self::E {
        self.from_rational(&Rational::from(1))
    }

    fn sub(&self, x: &Self::E, y: &Self::E) -> Self::E {
        self.add(x, &self.neg(y))
    }

    fn scale(&self, x: &Self::E, q: &Rational) -> Self::E {
        self.mul(x, &self.from_rational(q))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SymbolicField;

impl CoeffField for SymbolicField {
    type E = AlgebraicElement;

    fn zero(&self) -> AlgebraicElement {
        AlgebraicElement::zero()
    }
    fn from_rational(&self, q: &Rational) -> AlgebraicElement {
        AlgebraicElement::from_rational(q.clone())
    }
    fn add(&self, x: &AlgebraicElement, y: &AlgebraicElement) -> AlgebraicElement {
        x.add(y)
    }
    fn mul(&self, x: &AlgebraicElement, y: &AlgebraicElement) -> AlgebraicElement {
        x.mul(y)
    }
    fn neg(&self, x: &AlgebraicElement) -> AlgebraicElement {
        x.neg()
    }
    fn inv(&self, x: &AlgebraicElement) -> Result<AlgebraicElement> {
        x.inv()
    }
    fn is_zero(&self, x: &AlgebraicElement) -> bool {
        x.is_zero()
    }
    fn a2(&self) -> AlgebraicElement {
        AlgebraicElement::a().pow(2)
    }
    fn s(&self) -> AlgebraicElement {
        AlgebraicElement::s()
    }
    fn scale(&self, x: &AlgebraicElement, q: &Rational) -> AlgebraicElement {
        x.scale(q)
    }
}

/// Big-float coefficients at a fixed `a = tan(pi eps / 2)`.
#[derive(Clone, Debug)]
pub struct NumericField {
    a: Float,
    s: Float,
    prec: u32,
}

impl NumericField {
    pub fn new(a: &Float, ctx: &RealContext) -> NumericField {
        let prec = ctx.bits();
        let a = Float::with_val(prec, a);
        let s = (Float::with_val(prec, a.square_ref()) + 1u32).sqrt();
        NumericField { a, s, prec }
    }

    /// Field at `a = tan(pi eps / 2)`.
    pub fn at_epsilon(eps: &Rational, ctx: &RealContext) -> NumericField {
        let ang = ctx.pi() * ctx.float(eps) / 2u32;
        NumericField::new(&ang.tan(), ctx)
    }

    pub fn a(&self) -> &Float {
        &self.a
    }
}

impl CoeffField for NumericField {
    type E = Float;

    fn zero(&self) -> Float {
        Float::new(self.prec)
    }
    fn from_rational(&self, q: &Rational) -> Float {
        Float::with_val(self.prec, q)
    }
    fn add(&self, x: &Float, y: &Float) -> Float {
        Float::with_val(self.prec, x + y)
    }
    fn mul(&self, x: &Float, y: &Float) -> Float {
        Float::with_val(self.prec, x * y)
    }
    fn neg(&self, x: &Float) -> Float {
        Float::with_val(self.prec, -x)
    }
    fn inv(&self, x: &Float) -> Result<Float> {
        if x.is_zero() {
            return Err(ArcError::DivisionByZero);
        }
        Ok(Float::with_val(self.prec, x.recip_ref()))
    }
    fn is_zero(&self, x: &Float) -> bool {
        x.is_zero()
    }
    fn a2(&self) -> Float {
        Float::with_val(self.prec, self.a.square_ref())
    }
    fn s(&self) -> Float {
        self.s.clone()
    }
}
