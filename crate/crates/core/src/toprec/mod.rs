//! Topological recursion on the one-cut curve and its free energies.

pub mod energy;
pub mod field;
pub mod omega;
pub mod series;

pub use energy::{
    f0_pole_sum_as_printed, free_energy, free_energy_f0, free_energy_f1, free_energy_numeric, FreeEnergyJson,
    FreeEnergyTable, LogExpr, DEFAULT_G_MAX,
};
pub use field::{CoeffField, NumericField, SymbolicField};
pub use omega::{Key, PoleDifferential, TopRec, BRANCHPOINTS};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::one_cut_parametrization;
    use crate::numerics::{algebraic_eval, AlgebraicElement, BigComplex, RealContext};
    use rug::{Float, Rational};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn poly(c: &[(i64, i64)]) -> AlgebraicElement {
        let p = crate::numerics::Poly::from_coeffs(c.iter().map(|&(n, d)| q(n, d)).collect());
        AlgebraicElement::from_ratfunc(crate::numerics::RatFunc::from_poly(p))
    }

    #[test]
    fn genus_zero_stable_correlators_vanish() {
        let mut rec = TopRec::new(SymbolicField);
        assert!(rec.omega(0, 3).unwrap().is_zero());
        assert!(rec.omega(0, 4).unwrap().is_zero());
    }

    #[test]
    fn unstable_requests_are_rejected() {
        let mut rec = TopRec::new(SymbolicField);
        assert!(rec.omega(0, 2).is_err());
        assert!(rec.omega(0, 1).is_err());
    }

    /// The recursion gives `omega_{1,1} = s z dz / (2 (z^2 - 1)^2)`, which is
    /// `z W(z) dz` for `W(z) = 1 / (2 cos(pi eps/2) (z-1)^2 (z+1)^2)`.
    #[test]
    fn omega11_against_closed_form() {
        let mut rec = TopRec::new(SymbolicField);
        let w = rec.omega(1, 1).unwrap().clone();
        let s8 = AlgebraicElement::s().scale(&q(1, 8));
        assert_eq!(w.terms.len(), 2);
        assert!(w.get(&[(1, 2)]).unwrap().sub(&s8).is_zero());
        assert!(w.get(&[(-1, 2)]).unwrap().add(&s8).is_zero());

        let ctx = RealContext::new(128).unwrap();
        let a = ctx.float(0.7f64);
        let s = (Float::with_val(128, a.square_ref()) + 1u32).sqrt();
        let z = BigComplex::new(ctx.float(0.4f64), ctx.float(1.1f64));
        let one = BigComplex::real(ctx.one());
        let mut omega = BigComplex::zero(128);
        for (key, c) in &w.terms {
            let cv = algebraic_eval(c, &a, &ctx).unwrap();
            let d = z.sub(&BigComplex::real(ctx.float(key[0].0 as i32)));
            omega = omega.add(&one.div(&d.mul(&d)).unwrap().scale(&cv));
        }
        let zm = z.mul(&z).sub(&one);
        let w_closed = BigComplex::real(s / 2u32).div(&zm.mul(&zm)).unwrap();
        assert!(omega.sub(&z.mul(&w_closed)).abs() < 1e-30);
        assert!(omega.sub(&w_closed).abs() > 1e-3);
    }

    #[test]
    fn one_point_residues_vanish() {
        let mut rec = TopRec::new(SymbolicField);
        for g in 1..=3 {
            let w = rec.omega(g, 1).unwrap();
            for beta in BRANCHPOINTS {
                assert!(w.get(&[(beta as i8, 1)]).is_none(), "g={g}");
            }
        }
    }

    #[test]
    fn pole_orders_bounded() {
        let mut rec = TopRec::new(SymbolicField);
        for (g, n) in [(1u32, 1usize), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1)] {
            let w = rec.omega(g, n).unwrap();
            assert!(w.max_pole_order() <= 6 * g + 2 * n as u32 - 4, "({g},{n})");
        }
    }

    #[test]
    fn correlators_are_symmetric() {
        let mut rec = TopRec::new(SymbolicField);
        for (g, n) in [(0u32, 3usize), (1, 1), (1, 2), (2, 1), (1, 3)] {
            let w = rec.omega(g, n).unwrap().clone();
            for (key, c) in &w.terms {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let mut k2 = key.clone();
                        k2.swap(i, j);
                        let other = w.get(&k2).expect("symmetric partner");
                        assert!(other.sub(c).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn golden_free_energies() {
        let t = FreeEnergyTable::compute(3).unwrap();
        let f2 = t.get(2).unwrap();
        let f3 = t.get(3).unwrap();
        assert_eq!(f2, &poly(&[(1, 64), (0, 1), (-1, 32)]));
        assert_eq!(f3, &poly(&[(-1, 256), (0, 1), (-1, 128), (0, 1), (-5, 128)]));
        assert_eq!(t.at_zero(2).unwrap(), q(1, 64));
        for f in [f2, f3] {
            assert!(f.s_part().is_zero());
            assert!(f.as_polynomial().unwrap().is_even());
        }
        let ctx = RealContext::new(128).unwrap();
        let v = algebraic_eval(f2, &ctx.one(), &ctx).unwrap();
        assert_eq!(v, ctx.float(&q(-1, 64)));
    }

    #[test]
    fn truncation_four_orders_higher_agrees() {
        let mut lo = TopRec::new(SymbolicField);
        let mut hi = TopRec::with_extra_order(SymbolicField, 4);
        for g in 2..=3 {
            assert_eq!(free_energy(&mut lo, g).unwrap(), free_energy(&mut hi, g).unwrap());
        }
        for (g, n) in [(1u32, 2usize), (2, 1), (1, 3)] {
            let a = lo.omega(g, n).unwrap().terms.clone();
            let b = hi.omega(g, n).unwrap().terms.clone();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn numeric_mode_matches_symbolic() {
        let ctx = RealContext::new(256).unwrap();
        let t = FreeEnergyTable::compute(3).unwrap();
        for eps in [q(1, 3), q(1, 2), q(2, 3)] {
            for g in 2..=3 {
                let num = free_energy_numeric(g, &eps, &ctx).unwrap();
                let sym = t.eval(g, &eps, &ctx).unwrap();
                assert!((num - sym).abs() < 1e-25);
            }
        }
    }

    #[test]
    fn f0_closed_form_and_checks() {
        let ctx = RealContext::new(128).unwrap();
        let par = one_cut_parametrization(&q(1, 2), &ctx).unwrap();
        let f0 = free_energy_f0(&par).unwrap();
        let v = f0.eval(&q(1, 2), &ctx);
        assert!((v - ctx.ln2() * 3u32 / 2u32).abs() < 1e-35);
    }

    /// The pole sum as written down term by term does not reduce to
    /// `ln 2 - ln sin(pi eps/2)`; the closed form is the one used.
    #[test]
    fn f0_written_pole_sum_differs_from_closed_form() {
        let ctx = RealContext::new(128).unwrap();
        for eps in [q(1, 3), q(1, 2)] {
            let par = one_cut_parametrization(&eps, &ctx).unwrap();
            let printed = f0_pole_sum_as_printed(&par);
            let closed = free_energy_f0(&par).unwrap().eval(&eps, &ctx);
            assert!((printed - closed).abs() > 1e-2);
        }
    }

    #[test]
    fn f1_values() {
        let ctx = RealContext::new(128).unwrap();
        let f1 = free_energy_f1();
        assert!((f1.eval(&q(1, 2), &ctx) + ctx.ln2() / 8u32).abs() < 1e-35);
        assert!(f1.eval(&q(1, 1000000), &ctx).abs() < 1e-10);
        let eps = q(1, 3);
        let a = (ctx.pi() * ctx.float(&eps) / 2u32).tan();
        let alt = -(Float::with_val(128, a.square_ref()) + 1u32).ln() / 8u32;
        assert!((f1.eval(&eps, &ctx) - alt).abs() < 1e-35);
    }

    #[test]
    fn table_json_round_trip() {
        let t = FreeEnergyTable::compute(3).unwrap();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back: Vec<FreeEnergyJson> = serde_json::from_str(&j).unwrap();
        assert_eq!(back[2].polynomial_in_a, vec!["1/64", "0", "-1/32"]);
        assert_eq!(back[0].log_part.as_ref().unwrap().c_ln_sin, q(-1, 1));
    }
}
