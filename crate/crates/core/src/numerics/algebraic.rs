use std::fmt;

use rug::{Float, Rational};

use super::context::RealContext;
use super::poly::Poly;
use crate::error::{ArcError, Result};

/// Reduced rational function `num/den` in `a` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RatFunc {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_rational(r: Rational) -> RatFunc {
        RatFunc::from_poly(Poly::constant(r))
    }

    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(ArcError::DivisionByZero);
        }
        Ok(RatFunc::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.divrem(&g).0, den.divrem(&g).0)
            }
        };
        let lead = Rational::from(den.lead().expect("nonzero denominator").recip_ref());
        if lead == 1 {
            RatFunc { num, den }
        } else {
            RatFunc {
                num: num.scale(&lead),
                den: den.scale(&lead),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::reduce(self.num.add(&o.num), self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let (sd, od) = (self.den.divrem(&g).0, o.den.divrem(&g).0);
        let num = self.num.mul(&od).add(&o.num.mul(&sd));
        RatFunc::reduce(num, sd.mul(&o.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.is_polynomial() && o.is_polynomial() {
            return RatFunc::from_poly(self.num.mul(&o.num));
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let (n1, d2) = (self.num.divrem(&g1).0, o.den.divrem(&g1).0);
        let (n2, d1) = (o.num.divrem(&g2).0, self.den.divrem(&g2).0);
        RatFunc::reduce(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn scale(&self, k: &Rational) -> RatFunc {
        if *k == 0 {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(ArcError::DivisionByZero);
        }
        Ok(RatFunc::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn eval_float(&self, a: &Float) -> Result<Float> {
        let d = self.den.eval_float(a);
        if d.is_zero() {
            return Err(ArcError::PoleAtEvaluation);
        }
        Ok(self.num.eval_float(a) / d)
    }

    pub fn eval_rational(&self, a: &Rational) -> Result<Rational> {
        let d = self.den.eval_rational(a);
        if d == 0 {
            return Err(ArcError::PoleAtEvaluation);
        }
        Ok(self.num.eval_rational(a) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Element `p(a) + q(a)·s` of the field with `s^2 = 1 + a^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicElement {
    p: RatFunc,
    q: RatFunc,
}

fn one_plus_a2() -> RatFunc {
    RatFunc::from_poly(Poly::from_i64(&[1, 0, 1]))
}

impl AlgebraicElement {
    pub fn new(p: RatFunc, q: RatFunc) -> AlgebraicElement {
        AlgebraicElement { p, q }
    }

    pub fn zero() -> AlgebraicElement {
        AlgebraicElement::new(RatFunc::zero(), RatFunc::zero())
    }

    pub fn one() -> AlgebraicElement {
        AlgebraicElement::from_rational(Rational::from(1))
    }

    pub fn from_rational(r: Rational) -> AlgebraicElement {
        AlgebraicElement::new(RatFunc::from_rational(r), RatFunc::zero())
    }

    pub fn from_ratfunc(p: RatFunc) -> AlgebraicElement {
        AlgebraicElement::new(p, RatFunc::zero())
    }

    pub fn a() -> AlgebraicElement {
        AlgebraicElement::from_ratfunc(RatFunc::from_poly(Poly::var()))
    }

    pub fn s() -> AlgebraicElement {
        AlgebraicElement::new(RatFunc::zero(), RatFunc::one())
    }

    pub fn rational_part(&self) -> &RatFunc {
        &self.p
    }

    pub fn s_part(&self) -> &RatFunc {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn add(&self, o: &AlgebraicElement) -> AlgebraicElement {
        AlgebraicElement::new(self.p.add(&o.p), self.q.add(&o.q))
    }

    pub fn sub(&self, o: &AlgebraicElement) -> AlgebraicElement {
        AlgebraicElement::new(self.p.sub(&o.p), self.q.sub(&o.q))
    }

    pub fn neg(&self) -> AlgebraicElement {
        AlgebraicElement::new(self.p.neg(), self.q.neg())
    }

    pub fn mul(&self, o: &AlgebraicElement) -> AlgebraicElement {
        if self.q.is_zero() && o.q.is_zero() {
            return AlgebraicElement::from_ratfunc(self.p.mul(&o.p));
        }
        let pp = self.p.mul(&o.p);
        let qq = self.q.mul(&o.q).mul(&one_plus_a2());
        let pq = self.p.mul(&o.q).add(&self.q.mul(&o.p));
        AlgebraicElement::new(pp.add(&qq), pq)
    }

    pub fn scale(&self, k: &Rational) -> AlgebraicElement {
        AlgebraicElement::new(self.p.scale(k), self.q.scale(k))
    }

    pub fn inv(&self) -> Result<AlgebraicElement> {
        if self.is_zero() {
            return Err(ArcError::DivisionByZero);
        }
        let norm = self.p.mul(&self.p).sub(&self.q.mul(&self.q).mul(&one_plus_a2()));
        let ninv = norm.inv()?;
        Ok(AlgebraicElement::new(self.p.mul(&ninv), self.q.neg().mul(&ninv)))
    }

    pub fn div(&self, o: &AlgebraicElement) -> Result<AlgebraicElement> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> AlgebraicElement {
        let mut acc = AlgebraicElement::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Rational polynomial in `a` when the element is one; `None` otherwise.
    pub fn as_polynomial(&self) -> Option<&Poly> {
        (self.q.is_zero() && self.p.is_polynomial()).then(|| self.p.num())
    }
}

/// Canonical form. Elements are kept canonical by every operation, so this
/// is a structural copy; it exists as the explicit normalization entry point.
pub fn algebraic_normalize(x: &AlgebraicElement) -> AlgebraicElement {
    AlgebraicElement::new(
        RatFunc::reduce(x.p.num.clone(), x.p.den.clone()),
        RatFunc::reduce(x.q.num.clone(), x.q.den.clone()),
    )
}

/// Substitutes `a := a_value` and `s := +sqrt(1 + a_value^2)`.
pub fn algebraic_eval(x: &AlgebraicElement, a_value: &Float, ctx: &RealContext) -> Result<Float> {
    let wp = ctx.bits() + 64;
    let a = Float::with_val(wp, a_value);
    let mut v = x.p.eval_float(&a)?;
    if !x.q.is_zero() {
        let s = (Float::with_val(wp, a.square_ref()) + 1u32).sqrt();
        v += x.q.eval_float(&a)? * s;
    }
    Ok(Float::with_val(ctx.bits(), v))
}

impl fmt::Display for AlgebraicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.p),
            (true, false) => write!(f, "({})*s", self.q),
            (false, false) => write!(f, "{} + ({})*s", self.p, self.q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng) -> AlgebraicElement {
        let rf = |rng: &mut ChaCha8Rng| {
            let n: Vec<i64> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(-5..6)).collect();
            let mut d: Vec<i64> = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(-3..4)).collect();
            d.push(1);
            RatFunc::new(Poly::from_i64(&n), Poly::from_i64(&d)).unwrap()
        };
        AlgebraicElement::new(rf(rng), rf(rng))
    }

    #[test]
    fn defining_relation() {
        let s = AlgebraicElement::s();
        let expect = AlgebraicElement::from_ratfunc(one_plus_a2());
        assert_eq!(s.mul(&s), expect);
        assert_eq!(s.inv().unwrap().mul(&s), AlgebraicElement::one());
    }

    #[test]
    fn eval_examples() {
        let ctx = RealContext::new(128).unwrap();
        let one = ctx.float(1);
        let a2 = AlgebraicElement::a().pow(2);
        assert_eq!(algebraic_eval(&a2, &one, &ctx).unwrap(), 1);
        let s = algebraic_eval(&AlgebraicElement::s(), &one, &ctx).unwrap();
        assert!((s - ctx.float(2).sqrt()).abs() < ctx.pow2(-120));
        let s0 = algebraic_eval(&AlgebraicElement::s(), &ctx.zero(), &ctx).unwrap();
        assert_eq!(s0, 1);
        let f2 = AlgebraicElement::from_rational(Rational::from((1, 64))).sub(&a2.scale(&Rational::from((1, 32))));
        let v = algebraic_eval(&f2, &one, &ctx).unwrap();
        assert!((v + ctx.float(1) / 64u32).abs() < ctx.pow2(-120));
    }

    #[test]
    fn pole_is_reported() {
        let ctx = RealContext::new(64).unwrap();
        let x = AlgebraicElement::a().inv().unwrap();
        assert_eq!(algebraic_eval(&x, &ctx.zero(), &ctx), Err(ArcError::PoleAtEvaluation));
        assert_eq!(AlgebraicElement::zero().inv(), Err(ArcError::DivisionByZero));
    }

    #[test]
    fn field_laws_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let (x, y, z) = (
                random_element(&mut rng),
                random_element(&mut rng),
                random_element(&mut rng),
            );
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            assert_eq!(x.add(&y), y.add(&x));
            if !x.is_zero() {
                assert_eq!(x.mul(&x.inv().unwrap()), AlgebraicElement::one());
            }
            assert_eq!(algebraic_normalize(&x), x);
        }
    }

    #[test]
    fn eval_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ctx = RealContext::new(200).unwrap();
        let a = ctx.parse("0.377").unwrap();
        for _ in 0..30 {
            let (x, y) = (random_element(&mut rng), random_element(&mut rng));
            let (Ok(ex), Ok(ey), Ok(exy)) = (
                algebraic_eval(&x, &a, &ctx),
                algebraic_eval(&y, &a, &ctx),
                algebraic_eval(&x.mul(&y), &a, &ctx),
            ) else {
                continue;
            };
            let prod = Float::with_val(200, &ex * &ey);
            let two_ulp = Float::with_val(200, prod.abs_ref()) * ctx.pow2(2 - 200);
            assert!(Float::with_val(200, &exy - &prod).abs() <= two_ulp);
        }
    }
}
