//! The recursion on `x(z) = a (z + 1/z) / 2`, `ydx = s dz / (z (1 + x^2))`,
//! with branchpoints `z = +-1`, involution `z -> 1/z` and
//! `B(z1, z2) = dz1 dz2 / (z1 - z2)^2`.
//!
//! Stable correlators are stored over the basis `prod_i (z_i - sigma_i)^{-k_i} dz_i`.

use std::collections::{BTreeMap, HashMap};

use rug::Rational;

use super::field::CoeffField;
use super::series::{self, Series};
use crate::error::{ArcError, Result};

pub const BRANCHPOINTS: [i32; 2] = [1, -1];

/// Per-variable basis label `(sigma, k)` for `(z - sigma)^{-k}`.
pub type Key = Vec<(i8, u32)>;

#[derive(Clone, Debug)]
pub struct PoleDifferential<E> {
    pub g: u32,
    pub n: usize,
    pub terms: BTreeMap<Key, E>,
}

impl<E: Clone> PoleDifferential<E> {
    pub fn max_pole_order(&self) -> u32 {
        self.terms.keys().flat_map(|k| k.iter().map(|p| p.1)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, key: &[(i8, u32)]) -> Option<&E> {
        self.terms.get(key)
    }
}

/// Labels over the spectator variables: `(variable, sigma, k)`, sorted by variable.
type Label = Vec<(u8, i8, u32)>;
type Labeled<E> = BTreeMap<Label, Series<E>>;

fn labeled_add<F: CoeffField>(f: &F, acc: &mut Labeled<F::E>, label: Label, s: Series<F::E>) {
    match acc.remove(&label) {
        Some(old) => {
            acc.insert(label, series::add(f, &old, &s));
        }
        None => {
            acc.insert(label, s);
        }
    }
}

fn labeled_mul<F: CoeffField>(f: &F, x: &Labeled<F::E>, y: &Labeled<F::E>) -> Labeled<F::E> {
    let mut out = BTreeMap::new();
    for (lx, sx) in x {
        for (ly, sy) in y {
            let mut l: Label = lx.iter().chain(ly.iter()).cloned().collect();
            l.sort();
            labeled_add(f, &mut out, l, series::mul(f, sx, sy));
        }
    }
    out
}

/// Recursion state for one coefficient field; memoizes every computed `(g, n)`.
pub struct TopRec<F: CoeffField> {
    field: F,
    extra_order: i32,
    memo: HashMap<(u32, usize), PoleDifferential<F::E>>,
}

impl<F: CoeffField> TopRec<F> {
    pub fn new(field: F) -> TopRec<F> {
        TopRec::with_extra_order(field, 0)
    }

    /// Series truncation `6g + 2n + extra` instead of `6g + 2n`.
    pub fn with_extra_order(field: F, extra_order: i32) -> TopRec<F> {
        TopRec {
            field,
            extra_order,
            memo: HashMap::new(),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    fn truncation(&self, g: u32, n: usize) -> i32 {
        6 * g as i32 + 2 * n as i32 + self.extra_order
    }

    fn rat_series(&self, val: i32, prec: i32, q: &[Rational]) -> Series<F::E> {
        series::from_rationals(&self.field, val, prec, q)
    }

    /// `(z - sigma)^{-k}` at `z = beta + u`.
    fn z_factor(&self, sigma: i32, k: u32, beta: i32, prec: i32) -> Series<F::E> {
        let (val, q) = series::pole_expansion(sigma, k, beta, prec - (-(k as i32)).min(0));
        self.rat_series(val, prec, &q)
    }

    /// `(1/z - sigma)^{-k} d(1/z)/dz = -(-sigma)^k z^{k-2} (z - sigma)^{-k}` at `z = beta + u`.
    fn inv_factor(&self, sigma: i32, k: u32, beta: i32, prec: i32) -> Series<F::E> {
        let zp = self.rat_series(0, prec, &series::z_power(k as i32 - 2, beta, prec));
        let pole = self.z_factor(sigma, k, beta, prec);
        // (-sigma)^k is -1 exactly when k is odd and sigma = 1
        let pw = if sigma == 1 && k % 2 == 1 { -1 } else { 1 };
        let c = self.field.from_rational(&Rational::from(-pw));
        series::scale(&self.field, &series::mul(&self.field, &zp, &pole), &c)
    }

    /// `w = 1/z - beta` at `z = beta + u`.
    fn w_series(&self, beta: i32, prec: i32) -> Series<F::E> {
        let mut q = series::z_power(-1, beta, prec);
        q[0] -= beta;
        self.rat_series(0, prec, &q)
    }

    /// `h = z (1 + x^2) / (4 s)`.
    ///
    /// The kernel `K = (1/2) int_z^{1/z} B(., z0) / ((y(z) - y(1/z)) dx(z))` is
    /// `(1/(z0 - 1/z) - 1/(z0 - z)) h dz0/dz`, i.e. `sum_m (w^m - u^m) h (z0 - beta)^{-(m+1)}`.
    fn h_series(&self, beta: i32, prec: i32) -> Result<Series<F::E>> {
        let f = &self.field;
        let a2 = f.a2();
        let quarter_a2 = f.scale(&a2, &Rational::from((1, 4)));
        let lin = f.add(&f.one(), &f.scale(&a2, &Rational::from((1, 2))));
        let z1 = self.rat_series(0, prec, &series::z_power(1, beta, prec));
        let z3 = self.rat_series(0, prec, &series::z_power(3, beta, prec));
        let zi = self.rat_series(0, prec, &series::z_power(-1, beta, prec));
        let body = series::add(
            f,
            &series::scale(f, &z1, &lin),
            &series::scale(f, &series::add(f, &z3, &zi), &quarter_a2),
        );
        let inv4s = f.inv(&f.scale(&f.s(), &Rational::from(4)))?;
        Ok(series::scale(f, &body, &inv4s))
    }

    /// Coefficient of `dz` in `ydx` at `z = beta + u`.
    pub fn ydx_series(&self, beta: i32, prec: i32) -> Result<Series<F::E>> {
        let h = self.h_series(beta, prec)?;
        let inv = series::inv(&self.field, &h)?;
        Ok(series::scale(
            &self.field,
            &inv,
            &self.field.from_rational(&Rational::from((1, 4))),
        ))
    }

    /// `B(z, z_j)` at `z = beta + u`, labeled by the pole order in `z_j`.
    fn bergman_direct(&self, var: u8, beta: i32, prec: i32) -> Labeled<F::E> {
        (0..prec.max(0))
            .map(|m| {
                let c = self.field.from_rational(&Rational::from(m + 1));
                (
                    vec![(var, beta as i8, (m + 2) as u32)],
                    series::monomial(&self.field, m, c, prec),
                )
            })
            .collect()
    }

    /// `B(1/z, z_j) d(1/z)/dz` at `z = beta + u`.
    fn bergman_inverse(&self, var: u8, beta: i32, prec: i32) -> Labeled<F::E> {
        let f = &self.field;
        let zi = self.rat_series(0, prec, &series::z_power(-1, beta, prec));
        let zi2 = series::mul(f, &zi, &zi);
        let w = self.w_series(beta, prec);
        let mut wm = series::monomial(f, 0, f.one(), prec);
        let mut out = BTreeMap::new();
        for m in 0..prec.max(0) {
            let c = f.from_rational(&Rational::from(-(m + 1)));
            out.insert(
                vec![(var, beta as i8, (m + 2) as u32)],
                series::scale(f, &series::mul(f, &zi2, &wm), &c),
            );
            wm = series::mul(f, &wm, &w);
        }
        out
    }

    /// `omega_{h, |vars|+1}` with its first slot at `z` (or `1/z` with the pullback)
    /// and remaining slots on `vars`.
    fn slot_factor(&mut self, h: u32, vars: &[u8], inverse: bool, beta: i32, prec: i32) -> Result<Labeled<F::E>> {
        if h == 0 && vars.len() == 1 {
            return Ok(if inverse {
                self.bergman_inverse(vars[0], beta, prec)
            } else {
                self.bergman_direct(vars[0], beta, prec)
            });
        }
        let w = self.omega(h, vars.len() + 1)?.clone();
        let mut out = BTreeMap::new();
        for (key, c) in &w.terms {
            let (sigma, k) = key[0];
            let s = if inverse {
                self.inv_factor(sigma as i32, k, beta, prec)
            } else {
                self.z_factor(sigma as i32, k, beta, prec)
            };
            let mut label: Label = vars.iter().zip(&key[1..]).map(|(&v, &(sg, kk))| (v, sg, kk)).collect();
            label.sort();
            labeled_add(&self.field, &mut out, label, series::scale(&self.field, &s, c));
        }
        Ok(out)
    }

    /// The Eynard-Orantin correlator `omega_{g,n}` for `2g - 2 + n >= 1`.
    pub fn omega(&mut self, g: u32, n: usize) -> Result<&PoleDifferential<F::E>> {
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(ArcError::Unstable { g, p: n });
        }
        if !self.memo.contains_key(&(g, n)) {
            let w = self.compute(g, n)?;
            self.memo.insert((g, n), w);
        }
        Ok(&self.memo[&(g, n)])
    }

    fn compute(&mut self, g: u32, n: usize) -> Result<PoleDifferential<F::E>> {
        let nj = n - 1;
        let prec = self.truncation(g, n);
        let spectators: Vec<u8> = (1..=nj as u8).collect();
        let mut terms: BTreeMap<Key, F::E> = BTreeMap::new();
        for beta in BRANCHPOINTS {
            let mut r: Labeled<F::E> = BTreeMap::new();
            // omega_{g-1, n+1}(z, 1/z, J)
            if g >= 1 {
                if g == 1 && nj == 0 {
                    // B(z, 1/z) d(1/z)/dz = -1 / (z^2 - 1)^2 = -u^{-2} (2 beta + u)^{-2}
                    let (_, q) = series::pole_expansion(-beta, 2, beta, prec + 2);
                    let q: Vec<Rational> = q.into_iter().map(|x| -x).collect();
                    labeled_add(&self.field, &mut r, Vec::new(), self.rat_series(-2, prec, &q));
                } else {
                    let w = self.omega(g - 1, nj + 2)?.clone();
                    for (key, c) in &w.terms {
                        let s0 = self.z_factor(key[0].0 as i32, key[0].1, beta, prec);
                        let s1 = self.inv_factor(key[1].0 as i32, key[1].1, beta, prec);
                        let s = series::scale(&self.field, &series::mul(&self.field, &s0, &s1), c);
                        let mut label: Label = spectators
                            .iter()
                            .zip(&key[2..])
                            .map(|(&v, &(sg, kk))| (v, sg, kk))
                            .collect();
                        label.sort();
                        labeled_add(&self.field, &mut r, label, s);
                    }
                }
            }
            // sum over h and I of omega_h(z, I) omega_{g-h}(1/z, J \ I)
            for h in 0..=g {
                for mask in 0u32..(1 << nj) {
                    let inside: Vec<u8> = spectators
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect();
                    let outside: Vec<u8> = spectators
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 0)
                        .map(|(_, &v)| v)
                        .collect();
                    if (h == 0 && inside.is_empty()) || (g - h == 0 && outside.is_empty()) {
                        continue;
                    }
                    let left = self.slot_factor(h, &inside, false, beta, prec)?;
                    if left.is_empty() {
                        continue;
                    }
                    let right = self.slot_factor(g - h, &outside, true, beta, prec)?;
                    for (l, s) in labeled_mul(&self.field, &left, &right) {
                        labeled_add(&self.field, &mut r, l, s);
                    }
                }
            }
            self.residues_into(&mut terms, beta, &r, prec)?;
        }
        let f = &self.field;
        terms.retain(|_, v| !f.is_zero(v));
        Ok(PoleDifferential { g, n, terms })
    }

    /// `Res_{u=0} K(z0, beta + u) r(u)` for every label, as coefficients of `(z0 - beta)^{-(m+1)}`.
    fn residues_into(&self, terms: &mut BTreeMap<Key, F::E>, beta: i32, r: &Labeled<F::E>, prec: i32) -> Result<()> {
        let f = &self.field;
        let h = self.h_series(beta, prec)?;
        let w = self.w_series(beta, prec);
        let u = series::monomial(f, 1, f.one(), prec);
        let mut kernels: Vec<Series<F::E>> = Vec::new();
        for (label, s) in r {
            let Some(ord) = s.order(f) else { continue };
            if ord >= 0 {
                continue;
            }
            for m in 1..(-ord) {
                while kernels.len() <= m as usize {
                    let j = kernels.len() as u32;
                    let diff = series::add(
                        f,
                        &series::pow(f, &w, j, prec),
                        &series::scale(f, &series::pow(f, &u, j, prec), &f.neg(&f.one())),
                    );
                    kernels.push(series::mul(f, &diff, &h));
                }
                let prod = series::mul(f, &kernels[m as usize], s);
                if prod.prec < 0 {
                    return Err(ArcError::TruncationTooLow { order: prec });
                }
                let res = prod.coeff(f, -1);
                if f.is_zero(&res) {
                    continue;
                }
                let mut key: Key = vec![(beta as i8, (m + 1) as u32)];
                key.extend(label.iter().map(|&(_, sg, k)| (sg, k)));
                let entry = terms.entry(key).or_insert_with(|| f.zero());
                *entry = f.add(entry, &res);
            }
        }
        Ok(())
    }
}
