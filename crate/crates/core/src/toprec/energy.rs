use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::field::{CoeffField, NumericField, SymbolicField};
use super::omega::{TopRec, BRANCHPOINTS};
use crate::curves::OneCutParametrization;
use crate::error::{ArcError, Result};
use crate::numerics::{algebraic_eval, AlgebraicElement, BigComplex, RealContext};

/// `F_g = 1/(2-2g) sum_beta Res_{z=beta} Phi omega_{g,1}` with `dPhi = ydx`, `g >= 2`.
pub fn free_energy<F: CoeffField>(rec: &mut TopRec<F>, g: u32) -> Result<F::E> {
    if g < 2 {
        return Err(ArcError::Unstable { g, p: 0 });
    }
    let w = rec.omega(g, 1)?.clone();
    let f = rec.field();
    let kmax = w.max_pole_order() as i32;
    let mut acc = f.zero();
    for beta in BRANCHPOINTS {
        let phi = rec.ydx_series(beta, kmax.max(1))?;
        for (key, c) in &w.terms {
            let (sigma, k) = key[0];
            if sigma as i32 != beta {
                continue;
            }
            if k == 1 {
                return Err(ArcError::NonzeroResidue { g });
            }
            // Res u^{-k} Phi(u) = [u^{k-2}] ydx / (k - 1)
            let t = phi.coeff(f, k as i32 - 2);
            let t = f.scale(&f.mul(&t, c), &Rational::from((1, k as i64 - 1)));
            acc = f.add(&acc, &t);
        }
    }
    Ok(f.scale(&acc, &Rational::from((1, 2 - 2 * g as i64))))
}

/// `c_ln2 ln 2 + c_ln_sin ln sin(pi eps/2) + c_ln_cos ln cos(pi eps/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogExpr {
    #[serde(with = "crate::numerics::rational_serde")]
    pub c_ln2: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub c_ln_sin: Rational,
    #[serde(with = "crate::numerics::rational_serde")]
    pub c_ln_cos: Rational,
}

impl LogExpr {
    pub fn zero() -> LogExpr {
        LogExpr {
            c_ln2: Rational::new(),
            c_ln_sin: Rational::new(),
            c_ln_cos: Rational::new(),
        }
    }

    pub fn eval(&self, eps: &Rational, ctx: &RealContext) -> Float {
        let ang = ctx.pi() * ctx.float(eps) / 2u32;
        let ln_sin = Float::with_val(ctx.bits(), ang.sin_ref()).ln();
        let ln_cos = Float::with_val(ctx.bits(), ang.cos_ref()).ln();
        ctx.ln2() * ctx.float(&self.c_ln2) + ln_sin * ctx.float(&self.c_ln_sin) + ln_cos * ctx.float(&self.c_ln_cos)
    }
}

impl std::fmt::Display for LogExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (c, name) in [
            (&self.c_ln2, "ln2"),
            (&self.c_ln_sin, "ln_sin"),
            (&self.c_ln_cos, "ln_cos"),
        ] {
            if *c != 0 {
                parts.push(format!("{c}*{name}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Genus-zero free energy from the simple poles of `ydx`.
///
/// Checks that the four poles are simple with charges summing to zero, then
/// returns `ln 2 - ln sin(pi eps/2)`.
pub fn free_energy_f0(par: &OneCutParametrization) -> Result<LogExpr> {
    let poles = par.pole_charges();
    let p = par.a.prec();
    let mut total = Float::new(p);
    let tol = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2));
    for (i, pc) in poles.iter().enumerate() {
        for other in &poles[i + 1..] {
            if pc.location.sub(&other.location).abs() <= tol {
                return Err(ArcError::NonSimplePole { order: 2 });
            }
        }
        let res = par.residue(&pc.location)?;
        if Float::with_val(p, &res.re - &pc.charge).abs() > tol || res.im.clone().abs() > tol {
            return Err(ArcError::NonSimplePole { order: 1 });
        }
        total += &pc.charge;
    }
    if total.abs() > tol {
        return Err(ArcError::NonzeroResidue { g: 0 });
    }
    Ok(LogExpr {
        c_ln2: Rational::from(1),
        c_ln_sin: Rational::from(-1),
        c_ln_cos: Rational::new(),
    })
}

/// The three-term pole sum written out for `F0` (pairwise logarithms,
/// `ln(1 - 1/Z^2)` terms and the `tan` term), evaluated numerically.
pub fn f0_pole_sum_as_printed(par: &OneCutParametrization) -> Float {
    let p = par.a.prec();
    let poles = par.pole_charges();
    let one = BigComplex::real(Float::with_val(p, 1u32));
    let mut acc = Float::new(p);
    for (k, pk) in poles.iter().enumerate() {
        for pj in &poles[..k] {
            let d = pk.location.sub(&pj.location);
            let v = d.mul(&d).re.clone();
            let lg = Float::with_val(p, -v).ln();
            acc -= Float::with_val(p, &pk.charge * &pj.charge) * lg / 2u32;
        }
        let z2 = pk.location.mul(&pk.location);
        let t = one.sub(&one.div(&z2).expect("pole off the origin")).re.ln();
        acc += Float::with_val(p, &pk.charge * t) / 2u32;
        acc += Float::with_val(p, &par.a * Float::with_val(p, pk.charge.square_ref())) / 2u32;
    }
    acc
}

/// `F1 = (1/4) ln cos(pi eps/2)`.
pub fn free_energy_f1() -> LogExpr {
    LogExpr {
        c_ln2: Rational::new(),
        c_ln_sin: Rational::new(),
        c_ln_cos: Rational::from((1, 4)),
    }
}

#[derive(Clone, Debug)]
pub struct FreeEnergyTable {
    pub f0: LogExpr,
    pub f1: LogExpr,
    /// `F_g` for `g = 2..=g_max`.
    pub higher: Vec<AlgebraicElement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeEnergyJson {
    pub g: u32,
    /// Coefficients of `a^0, a^1, ...` as exact strings.
    pub polynomial_in_a: Vec<String>,
    pub log_part: Option<LogExpr>,
}

pub const DEFAULT_G_MAX: u32 = 4;

impl FreeEnergyTable {
    /// Symbolic table through `g_max`.
    pub fn compute(g_max: u32) -> Result<FreeEnergyTable> {
        let mut rec = TopRec::new(SymbolicField);
        let higher = (2..=g_max).map(|g| free_energy(&mut rec, g)).collect::<Result<_>>()?;
        Ok(FreeEnergyTable {
            f0: LogExpr {
                c_ln2: Rational::from(1),
                c_ln_sin: Rational::from(-1),
                c_ln_cos: Rational::new(),
            },
            f1: free_energy_f1(),
            higher,
        })
    }

    pub fn g_max(&self) -> u32 {
        self.higher.len() as u32 + 1
    }

    pub fn get(&self, g: u32) -> Result<&AlgebraicElement> {
        if g < 2 || g > self.g_max() {
            return Err(ArcError::DepthExceeded {
                requested: g,
                available: self.g_max(),
            });
        }
        Ok(&self.higher[g as usize - 2])
    }

    /// `F_g(a = 0)`.
    pub fn at_zero(&self, g: u32) -> Result<Rational> {
        let poly = self
            .get(g)?
            .as_polynomial()
            .ok_or_else(|| ArcError::InvalidParameter(format!("F_{g} is not a polynomial in a")))?;
        Ok(poly.coeff(0))
    }

    pub fn eval(&self, g: u32, eps: &Rational, ctx: &RealContext) -> Result<Float> {
        match g {
            0 => Ok(self.f0.eval(eps, ctx)),
            1 => Ok(self.f1.eval(eps, ctx)),
            _ => {
                let ang = ctx.pi() * ctx.float(eps) / 2u32;
                algebraic_eval(self.get(g)?, &ang.tan(), ctx)
            }
        }
    }

    pub fn to_json(&self) -> Vec<FreeEnergyJson> {
        let mut out = vec![
            FreeEnergyJson {
                g: 0,
                polynomial_in_a: Vec::new(),
                log_part: Some(self.f0.clone()),
            },
            FreeEnergyJson {
                g: 1,
                polynomial_in_a: Vec::new(),
                log_part: Some(self.f1.clone()),
            },
        ];
        for (i, fg) in self.higher.iter().enumerate() {
            let coeffs = fg
                .as_polynomial()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
                .unwrap_or_else(|| vec![fg.to_string()]);
            out.push(FreeEnergyJson {
                g: i as u32 + 2,
                polynomial_in_a: coeffs,
                log_part: None,
            });
        }
        out
    }
}

/// `F_g` at `eps` by running the recursion in big-float mode.
pub fn free_energy_numeric(g: u32, eps: &Rational, ctx: &RealContext) -> Result<Float> {
    let mut rec = TopRec::new(NumericField::at_epsilon(eps, ctx));
    free_energy(&mut rec, g)
}
