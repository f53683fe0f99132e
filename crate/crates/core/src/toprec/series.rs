//! Truncated Laurent series in a local coordinate `u`, with tracked precision:
//! coefficients of `u^e` are exact for `val <= e < prec`.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::field::CoeffField;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Series<E> {
    pub val: i32,
    pub prec: i32,
    pub c: Vec<E>,
}

impl<E: Clone> Series<E> {
    pub fn coeff<F: CoeffField<E = E>>(&self, f: &F, e: i32) -> E {
        assert!(e < self.prec, "coefficient u^{e} beyond precision {}", self.prec);
        if e < self.val {
            return f.zero();
        }
        self.c[(e - self.val) as usize].clone()
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn order<F: CoeffField<E = E>>(&self, f: &F) -> Option<i32> {
        self.c.iter().position(|x| !f.is_zero(x)).map(|i| self.val + i as i32)
    }
}

pub fn monomial<F: CoeffField>(f: &F, e: i32, coef: F::E, prec: i32) -> Series<F::E> {
    if e >= prec {
        return Series {
            val: prec,
            prec,
            c: Vec::new(),
        };
    }
    let mut c = vec![f.zero(); (prec - e) as usize];
    c[0] = coef;
    Series { val: e, prec, c }
}

pub fn from_rationals<F: CoeffField>(f: &F, val: i32, prec: i32, q: &[Rational]) -> Series<F::E> {
    let len = (prec - val).max(0) as usize;
    let c = (0..len)
        .map(|i| q.get(i).map(|x| f.from_rational(x)).unwrap_or_else(|| f.zero()))
        .collect();
    Series { val, prec, c }
}

pub fn add<F: CoeffField>(f: &F, x: &Series<F::E>, y: &Series<F::E>) -> Series<F::E> {
    let val = x.val.min(y.val);
    let prec = x.prec.min(y.prec);
    let c = (val..prec.max(val))
        .map(|e| f.add(&x.coeff(f, e), &y.coeff(f, e)))
        .collect();
    Series { val, prec, c }
}

pub fn scale<F: CoeffField>(f: &F, x: &Series<F::E>, k: &F::E) -> Series<F::E> {
    Series {
        val: x.val,
        prec: x.prec,
        c: x.c.iter().map(|v| f.mul(v, k)).collect(),
    }
}

pub fn mul<F: CoeffField>(f: &F, x: &Series<F::E>, y: &Series<F::E>) -> Series<F::E> {
    let val = x.val + y.val;
    let prec = (x.prec + y.val).min(y.prec + x.val);
    let len = (prec - val).max(0) as usize;
    let mut c = vec![f.zero(); len];
    for (i, xi) in x.c.iter().enumerate() {
        if f.is_zero(xi) {
            continue;
        }
        for (j, yj) in y.c.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if f.is_zero(yj) {
                continue;
            }
            c[i + j] = f.add(&c[i + j], &f.mul(xi, yj));
        }
    }
    Series { val, prec, c }
}

pub fn pow<F: CoeffField>(f: &F, x: &Series<F::E>, e: u32, prec: i32) -> Series<F::E> {
    let mut out = monomial(f, 0, f.one(), prec);
    for _ in 0..e {
        out = mul(f, &out, x);
    }
    out
}

/// `1/x` for a series with nonzero constant term.
pub fn inv<F: CoeffField>(f: &F, x: &Series<F::E>) -> Result<Series<F::E>> {
    assert_eq!(x.val, 0, "inverse needs a unit series");
    let c0 = f.inv(&x.c[0])?;
    let len = x.c.len();
    let mut c: Vec<F::E> = Vec::with_capacity(len);
    c.push(c0.clone());
    for n in 1..len {
        let mut acc = f.zero();
        for k in 1..=n {
            acc = f.add(&acc, &f.mul(&x.c[k], &c[n - k]));
        }
        c.push(f.neg(&f.mul(&acc, &c0)));
    }
    Ok(Series {
        val: 0,
        prec: x.prec,
        c,
    })
}

fn binom_neg(k: u32, j: u32) -> Integer {
    // C(-k, j) = (-1)^j C(k + j - 1, j)
    let b = Integer::from(Integer::binomial_u(k + j - 1, j));
    if j % 2 == 1 {
        -b
    } else {
        b
    }
}

/// `(z - sigma)^{-k}` at `z = beta + u`, rational coefficients from exponent `val`.
pub fn pole_expansion(sigma: i32, k: u32, beta: i32, prec: i32) -> (i32, Vec<Rational>) {
    if sigma == beta {
        return (-(k as i32), vec![Rational::from(1)]);
    }
    // (2 beta + u)^{-k}
    let two_beta = Rational::from(2 * beta);
    let n = prec.max(0) as u32;
    let coeffs = (0..n)
        .map(|j| {
            let base = two_beta.clone().pow(-((k + j) as i32));
            base * binom_neg(k, j)
        })
        .collect();
    (0, coeffs)
}

/// `z^e` at `z = beta + u` for `e >= -1`.
pub fn z_power(e: i32, beta: i32, prec: i32) -> Vec<Rational> {
    let n = prec.max(0) as usize;
    if e >= 0 {
        let e = e as u32;
        (0..n)
            .map(|j| {
                if j as u32 > e {
                    Rational::new()
                } else {
                    let b = Integer::from(Integer::binomial_u(e, j as u32));
                    Rational::from(b) * Rational::from(beta).pow(e as i32 - j as i32)
                }
            })
            .collect()
    } else {
        assert_eq!(e, -1);
        // 1/(beta + u) = beta sum (-beta u)^j
        (0..n).map(|j| Rational::from(beta * (-beta).pow(j as u32))).collect()
    }
}
