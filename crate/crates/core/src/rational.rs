//! Exact rational helpers: float recognition and PSD certification.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn from_f64_exact(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn from_i64(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions), accepted only if it is within `tol` of `x`.
pub fn recognize(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut y = x.abs();
    // Convergents h/k.
    let (mut h0, mut h1): (i64, i64) = (0, 1);
    let (mut k0, mut k1): (i64, i64) = (1, 0);
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let frac = y - a as f64;
        if (x.abs() - h1 as f64 / k1 as f64).abs() <= tol || frac < 1e-300 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let approx = h1 as f64 / k1 as f64;
    if (x.abs() - approx).abs() <= tol {
        Some(from_i64(sign * h1, k1))
    } else {
        None
    }
}

/// Exact positive-semidefiniteness of a symmetric rational matrix via
/// symmetric pivoting (LDL^T with diagonal pivots).
pub fn is_psd_exact(mut a: Vec<Vec<BigRational>>) -> bool {
    let n = a.len();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        // Largest diagonal pivot.
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|x, y| a[*x.1][*x.1].cmp(&a[*y.1][*y.1]))
            .expect("non-empty");
        if a[p][p].is_zero() {
            // All remaining diagonals are zero: PSD forces the block to vanish.
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        }
        active.swap_remove(pos);
        let pivot = a[p][p].clone();
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let factor = &a[i][p] / &pivot;
            for &j in &active {
                let delta = &factor * &a[p][j];
                a[i][j] -= delta;
            }
        }
    }
    true
}

pub fn one() -> BigRational {
    BigRational::one()
}

pub fn zero() -> BigRational {
    BigRational::zero()
}
