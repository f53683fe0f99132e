use std::fmt;

use rug::{Float, Rational};

/// Dense univariate polynomial in `a` with rational coefficients, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    /// The indeterminate `a`.
    pub fn var() -> Poly {
        Poly::from_coeffs(vec![Rational::new(), Rational::from(1)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Poly {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| Rational::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(x), Some(y)) => out.push(Rational::from(x + y)),
                (Some(x), None) => out.push(x.clone()),
                (None, Some(y)) => out.push(y.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(x * y);
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if *k == 0 {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = Rational::from(d.coeffs[dd].recip_ref());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k] == 0 {
                continue;
            }
            let q = Rational::from(&rem[k] * &lead_inv);
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k - dd + j] -= Rational::from(&q * c);
            }
            quot[k - dd] = q;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) => self.scale(&Rational::from(l.recip_ref())),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_float(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += Float::with_val(prec, c);
        }
        acc
    }

    /// True when only even powers of `a` appear.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "a")?;
                    } else {
                        write!(f, "a^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let p = Poly::from_i64(&[3, -2, 0, 5, 1]);
        let d = Poly::from_i64(&[1, 0, 2]);
        let (q, r) = p.divrem(&d);
        assert_eq!(q.mul(&d).add(&r), p);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_finds_common_factor() {
        let f = Poly::from_i64(&[1, 0, 1]);
        let p = f.mul(&Poly::from_i64(&[2, 1]));
        let q = f.mul(&Poly::from_i64(&[-3, 1])).mul(&Poly::from_i64(&[1, 1]));
        assert_eq!(p.gcd(&q), f);
    }

    #[test]
    fn display_reads_naturally() {
        let p = Poly::from_coeffs(vec![Rational::from((1, 64)), Rational::new(), Rational::from((-1, 32))]);
        assert_eq!(p.to_string(), "1/64 - 1/32*a^2");
    }
}
