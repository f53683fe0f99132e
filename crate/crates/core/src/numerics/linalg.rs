use rug::Float;

use crate::error::{ArcError, Result};

#[derive(Clone, Debug)]
pub struct LsqFit {
    pub coef: Vec<Float>,
    pub rss: Float,
}

/// Ordinary least squares via normal equations, solved at the precision of the inputs.
pub fn least_squares(design: &[Vec<Float>], y: &[Float]) -> Result<LsqFit> {
    let m = design.len();
    if m == 0 || m != y.len() {
        return Err(ArcError::SingularFit);
    }
    let k = design[0].len();
    let prec = y[0].prec();
    let mut a = vec![vec![Float::new(prec); k + 1]; k];
    for (row, yi) in design.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += Float::with_val(prec, &row[i] * &row[j]);
            }
            a[i][k] += Float::with_val(prec, &row[i] * yi);
        }
    }
    let coef = solve_augmented(a)?;
    let mut rss = Float::new(prec);
    for (row, yi) in design.iter().zip(y) {
        let mut pred = Float::new(prec);
        for (c, x) in coef.iter().zip(row) {
            pred += Float::with_val(prec, c * x);
        }
        let r = Float::with_val(prec, yi - &pred);
        rss += Float::with_val(prec, r.square_ref());
    }
    Ok(LsqFit { coef, rss })
}

/// Gaussian elimination with partial pivoting on `[A | b]`.
pub fn solve_augmented(mut a: Vec<Vec<Float>>) -> Result<Vec<Float>> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].clone().abs().partial_cmp(&a[j][col].clone().abs()).unwrap())
            .ok_or(ArcError::SingularFit)?;
        if a[piv][col].is_zero() {
            return Err(ArcError::SingularFit);
        }
        a.swap(col, piv);
        for r in (col + 1)..k {
            let f = Float::with_val(a[r][col].prec(), &a[r][col] / &a[col][col]);
            for c in col..=k {
                let t = Float::with_val(f.prec(), &f * &a[col][c]);
                a[r][c] -= t;
            }
        }
    }
    let mut x = vec![Float::new(a[0][0].prec()); k];
    for r in (0..k).rev() {
        let mut acc = a[r][k].clone();
        for c in (r + 1)..k {
            acc -= Float::with_val(acc.prec(), &a[r][c] * &x[c]);
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_quadratic() {
        let p = 200;
        let xs: Vec<Float> = (0..10).map(|i| Float::with_val(p, i)).collect();
        let design: Vec<Vec<Float>> = xs
            .iter()
            .map(|x| vec![Float::with_val(p, x.square_ref()), x.clone(), Float::with_val(p, 1)])
            .collect();
        let y: Vec<Float> = xs
            .iter()
            .map(|x| Float::with_val(p, x.square_ref()) * 3u32 - Float::with_val(p, x * 2u32) + 0.5f64)
            .collect();
        let fit = least_squares(&design, &y).unwrap();
        assert!((fit.coef[0].clone() - 3u32).abs() < 1e-50);
        assert!((fit.coef[1].clone() + 2u32).abs() < 1e-50);
        assert!((fit.coef[2].clone() - 0.5f64).abs() < 1e-50);
        assert!(fit.rss < 1e-90);
    }
}
