#![allow(dead_code)]

use std::f64::consts::PI;

use delsarte_core::{FiniteGroup, Subgroup};

pub fn reflection_pair(n: usize) -> (FiniteGroup, Subgroup) {
    let g = FiniteGroup::dihedral(n).unwrap();
    let k = g.subgroup_from_generators(&[n]).unwrap();
    (g, k)
}

pub fn point_stabilizer(n: usize) -> (FiniteGroup, Subgroup) {
    let g = FiniteGroup::symmetric(n).unwrap();
    let fac: usize = (1..n).product();
    // Lexicographic order: the first (n-1)! permutations fix 0.
    let k = g.subgroup(&(0..fac).collect::<Vec<_>>()).unwrap();
    (g, k)
}

pub fn cyclic_pair(n: usize) -> (FiniteGroup, Subgroup) {
    let g = FiniteGroup::cyclic(n).unwrap();
    let k = g.trivial_subgroup();
    (g, k)
}

pub fn whole_pair(g: FiniteGroup) -> (FiniteGroup, Subgroup) {
    let k = g.whole();
    (g, k)
}

pub fn all_pairs() -> Vec<(String, FiniteGroup, Subgroup)> {
    let mut out = Vec::new();
    for n in [3, 4] {
        let (g, k) = point_stabilizer(n);
        out.push((format!("(S{n},S{})", n - 1), g, k));
    }
    for n in 3..=8 {
        let (g, k) = reflection_pair(n);
        out.push((format!("(D{n},<s>)"), g, k));
    }
    for n in 3..=16 {
        let (g, k) = cyclic_pair(n);
        out.push((format!("(Z{n},e)"), g, k));
    }
    let (g, k) = whole_pair(FiniteGroup::symmetric(3).unwrap());
    out.push(("(S3,S3)".into(), g, k));
    out
}

/// Closed-form real spherical functions as functions on the group:
/// characters `cos(2 pi j k / n)` for cyclic groups and for the dihedral
/// reflection pair (where `r^j s` behaves like `r^j`).
pub fn cosine_table(n: usize, dihedral: bool) -> Vec<Vec<f64>> {
    let order = if dihedral { 2 * n } else { n };
    (0..=n / 2)
        .map(|k| {
            (0..order)
                .map(|x| (2.0 * PI * ((x % n) * k) as f64 / n as f64).cos())
                .collect()
        })
        .collect()
}

/// Gram matrix minimum eigenvalue computed without the library: Jacobi
/// rotations on the symmetric matrix `f(g_i^-1 g_j)`.
pub fn gram_min_eigenvalue(g: &FiniteGroup, f: &[f64]) -> f64 {
    let n = g.order();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f[g.mul(g.inv(i), j)]).collect()).collect();
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

/// Direct `(f * g)(x) = (1/n) sum_y f(y) g(y^-1 x)`.
pub fn naive_convolve(g: &FiniteGroup, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = g.order();
    (0..n)
        .map(|x| (0..n).map(|y| a[y] * b[g.mul(g.inv(y), x)]).sum::<f64>() / n as f64)
        .collect()
}
