//! Isotropic positive definite kernels on `S^d` and the spherical cap Turán
//! problem.
//!
//! An isotropic kernel is `psi(theta(x, y))` with
//! `psi(t) = sum_n b_n G_n(cos t)`, where `G_n` is the ultraspherical
//! polynomial of index `(d - 1) / 2` normalized by `G_n(1) = 1`. It is
//! positive definite iff every `b_n >= 0` (Schoenberg). Kernel convolution
//! over the surface measure acts diagonally: `(a * b)_n = kappa_n a_n b_n`
//! with `kappa_n = omega_d / N(n, d)`, by the addition theorem.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, Status};
use crate::quadrature;

/// `G_0(x), ..., G_{n_max}(x)` on `S^d`.
pub fn gegenbauer_at(d: usize, n_max: usize, x: f64) -> Vec<f64> {
    let lambda = (d as f64 - 1.0) / 2.0;
    let mut g = Vec::with_capacity(n_max + 1);
    g.push(1.0);
    if n_max >= 1 {
        g.push(x);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 * (nf + lambda) * x * g[n] - nf * g[n - 1]) / (nf + 2.0 * lambda);
        g.push(next);
    }
    g
}

/// `matrix[n][j] = G_n(cos t_j)`.
pub fn gegenbauer_values(d: usize, n_max: usize, angles: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_dimension(d)?;
    if let Some(t) = angles.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(Error::InvalidInstance(format!("angle {t} outside [0, pi]")));
    }
    let cols: Vec<Vec<f64>> = angles.iter().map(|t| gegenbauer_at(d, n_max, t.cos())).collect();
    Ok((0..=n_max).map(|n| cols.iter().map(|c| c[n]).collect()).collect())
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Dimension("sphere dimension must be at least 1".into()));
    }
    Ok(())
}

/// Surface area `omega_d` of `S^d` (`omega_0 = 2` counts the two points of `S^0`).
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_area(d - 2),
    }
}

/// Dimension of the space of degree-`n` spherical harmonics on `S^d`.
pub fn harmonic_dimension(n: usize, d: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if d == 1 {
        return 2.0;
    }
    // (2n + d - 1)/(d - 1) * C(n + d - 2, n)
    let mut binom = 1.0;
    for k in 1..=n {
        binom *= (d - 2 + k) as f64 / k as f64;
    }
    (2 * n + d - 1) as f64 / (d - 1) as f64 * binom
}

/// `kappa_n = omega_d / N(n, d)`.
pub fn convolution_factor(n: usize, d: usize) -> f64 {
    sphere_area(d) / harmonic_dimension(n, d)
}

/// Surface measure of a cap of angular radius `r`.
pub fn cap_volume(d: usize, r: f64) -> f64 {
    let r = r.clamp(0.0, PI);
    let p = d as i32 - 1;
    sphere_area(d - 1) * quadrature::adaptive_simpson(|t| t.sin().powi(p), 0.0, r, 1e-14)
}

/// Truncated Schoenberg coefficients of an isotropic kernel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropicCoeffs {
    pub d: usize,
    pub b: Vec<f64>,
}

impl IsotropicCoeffs {
    pub fn new(d: usize, b: Vec<f64>) -> Result<Self> {
        check_dimension(d)?;
        if b.is_empty() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("coefficients must be finite and non-empty".into()));
        }
        Ok(IsotropicCoeffs { d, b })
    }

    pub fn degree(&self) -> usize {
        self.b.len() - 1
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let g = gegenbauer_at(self.d, self.degree(), t.cos());
        self.b.iter().zip(&g).map(|(b, g)| b * g).sum()
    }

    pub fn evaluate_grid(&self, angles: &[f64]) -> Vec<f64> {
        angles.iter().map(|&t| self.evaluate(t)).collect()
    }

    /// `∫_{S^d} psi(theta(x, y)) dy = omega_d b_0`.
    pub fn integral(&self) -> f64 {
        sphere_area(self.d) * self.b[0]
    }

    /// `(t, psi(t))` at `samples` equally spaced angles in `[0, pi]`.
    pub fn plot_table(&self, samples: usize) -> Vec<(f64, f64)> {
        let s = samples.max(2);
        (0..s)
            .map(|i| {
                let t = PI * i as f64 / (s - 1) as f64;
                (t, self.evaluate(t))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub witness: IsotropicCoeffs,
}

/// Cap autocorrelation: the normalized self-convolution of the indicator of
/// a cap of radius `c / 2` vanishes beyond `c` and integrates to the cap
/// volume.
pub fn turan_lower_bound(d: usize, c: f64, n_max: usize) -> Result<LowerBound> {
    check_dimension(d)?;
    if !(c > 0.0 && c <= PI) {
        return Err(Error::InvalidInstance(format!("cap parameter {c} outside (0, pi]")));
    }
    let r = c / 2.0;
    let vol = cap_volume(d, r);
    let nodes = 4 * n_max.max(1);
    let p = d as i32 - 1;
    let outer = sphere_area(d - 1);
    let (x, w) = quadrature::gauss_legendre(nodes);
    let mut beta = vec![0.0; n_max + 1];
    for (xi, wi) in x.iter().zip(&w) {
        let t = r / 2.0 * (xi + 1.0);
        let g = gegenbauer_at(d, n_max, t.cos());
        let weight = wi * r / 2.0 * t.sin().powi(p) * outer;
        for n in 0..=n_max {
            beta[n] += weight * g[n];
        }
    }
    let b = (0..=n_max)
        .map(|n| {
            let beta_n = beta[n] / convolution_factor(n, d);
            convolution_factor(n, d) * beta_n * beta_n / vol
        })
        .collect();
    Ok(LowerBound {
        value: vol,
        witness: IsotropicCoeffs::new(d, b)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuranSphereInstance {
    pub d: usize,
    pub c: f64,
    /// Truncation degree.
    pub n: usize,
    /// Number of grid intervals on `[c, pi]`.
    pub m: usize,
    pub tol: f64,
}

impl TuranSphereInstance {
    pub fn new(d: usize, c: f64, n: usize, m: usize) -> Result<Self> {
        let inst = TuranSphereInstance { d, c, n, m, tol: 1e-9 };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.d)?;
        if !(self.c > 0.0 && self.c <= PI) {
            return Err(Error::InvalidInstance(format!("cap parameter {} outside (0, pi]", self.c)));
        }
        if self.n < 8 || self.m < 16 {
            return Err(Error::InvalidInstance("need N >= 8 and M >= 16".into()));
        }
        Ok(())
    }

    /// Chebyshev–Lobatto points on `[c, pi]`, `M + 1` of them, so the grid for
    /// `2M` contains the grid for `M`.
    pub fn grid(&self) -> Vec<f64> {
        let (mid, half) = ((self.c + PI) / 2.0, (PI - self.c) / 2.0);
        let mut pts: Vec<f64> = (0..=self.m)
            .map(|j| (mid + half * (j as f64 * PI / self.m as f64).cos()).clamp(self.c, PI))
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup();
        pts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereBounds {
    pub d: usize,
    pub c: f64,
    pub n: usize,
    pub m: usize,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    /// `upper / omega_d`, the measure-independent form of the bound.
    pub upper_b0: f64,
    pub omega_d: f64,
    pub lower_witness: IsotropicCoeffs,
    pub upper_coeffs: Vec<f64>,
    pub tail_mass: f64,
    pub certificate_ok: bool,
    /// `d = 1` lies outside the dimensions the theory is stated for.
    pub extrapolated: bool,
}

/// Rigorous LP upper bound with an explicit tail-mass variable, paired with
/// the cap autocorrelation lower bound.
pub fn solve_turan_sphere(inst: &TuranSphereInstance) -> Result<SphereBounds> {
    inst.validate()?;
    let n = inst.n;
    let grid = inst.grid();
    let g = gegenbauer_values(inst.d, n, &grid)?;
    // Variables b_0..b_N, r.
    let mut objective = vec![0.0; n + 2];
    objective[0] = 1.0;
    let mut p = LpProblem::new(objective);
    p.add_eq(vec![1.0; n + 2], 1.0);
    for j in 0..grid.len() {
        let mut row: Vec<f64> = (0..=n).map(|k| g[k][j]).collect();
        row.push(-1.0);
        p.add_le(row.clone(), 0.0);
        for v in row.iter_mut().take(n + 1) {
            *v = -*v;
        }
        p.add_le(row, 0.0);
    }
    let sol = lp::solve(&p)?;
    if sol.status != Status::Optimal {
        return Err(Error::Internal(format!("sphere LP ended with status {:?}", sol.status)));
    }
    let certificate_ok = lp::verify_certificate(&p, &sol);
    let omega_d = sphere_area(inst.d);
    let upper = omega_d * sol.objective_value;
    let lower = turan_lower_bound(inst.d, inst.c, n)?;
    Ok(SphereBounds {
        d: inst.d,
        c: inst.c,
        n,
        m: inst.m,
        lower: lower.value,
        upper,
        gap: upper - lower.value,
        upper_b0: sol.objective_value,
        omega_d,
        lower_witness: lower.witness,
        upper_coeffs: sol.x[..=n].to_vec(),
        tail_mass: sol.x[n + 1],
        certificate_ok,
        extrapolated: inst.d == 1,
    })
}

fn same_shape(a: &IsotropicCoeffs, b: &IsotropicCoeffs) -> Result<()> {
    if a.d != b.d || a.b.len() != b.b.len() {
        return Err(Error::Dimension(format!(
            "(d={}, N={}) vs (d={}, N={})",
            a.d,
            a.degree(),
            b.d,
            b.degree()
        )));
    }
    Ok(())
}

/// `∫ psi_a(theta(x, z)) psi_b(theta(z, y)) dz` in coefficient space.
pub fn isotropic_convolve(a: &IsotropicCoeffs, b: &IsotropicCoeffs) -> Result<IsotropicCoeffs> {
    same_shape(a, b)?;
    let out = (0..a.b.len())
        .map(|n| convolution_factor(n, a.d) * a.b[n] * b.b[n])
        .collect();
    IsotropicCoeffs::new(a.d, out)
}

/// Direct evaluation of the convolution on `S^2`, for `y` at each angle from
/// `x`: Gauss–Legendre in `u = cos(theta(x, z))` and the trapezoid rule in
/// the azimuth, both exact for the polynomial degrees involved.
pub fn quadrature_convolve(a: &IsotropicCoeffs, b: &IsotropicCoeffs, angles: &[f64]) -> Result<Vec<f64>> {
    same_shape(a, b)?;
    if a.d != 2 {
        return Err(Error::Dimension("quadrature oracle is implemented for d = 2".into()));
    }
    let deg = a.degree();
    let (u, w) = quadrature::gauss_legendre(2 * deg + 2);
    let azimuths = 2 * deg + 2;
    let psi_a: Vec<f64> = u.iter().map(|&ui| a.evaluate(ui.clamp(-1.0, 1.0).acos())).collect();
    Ok(angles
        .iter()
        .map(|&t| {
            let (ct, st) = (t.cos(), t.sin());
            let mut total = 0.0;
            for (k, &ui) in u.iter().enumerate() {
                let si = (1.0 - ui * ui).max(0.0).sqrt();
                let mut inner = 0.0;
                for j in 0..azimuths {
                    let beta = 2.0 * PI * j as f64 / azimuths as f64;
                    let x = (ui * ct + si * st * beta.cos()).clamp(-1.0, 1.0);
                    let g = gegenbauer_at(2, deg, x);
                    inner += b.b.iter().zip(&g).map(|(c, g)| c * g).sum::<f64>();
                }
                total += w[k] * psi_a[k] * inner * 2.0 * PI / azimuths as f64;
            }
            total
        })
        .collect())
}

/// `root_n = sqrt(a_n / kappa_n)`, so that `root * root = a`.
pub fn sphere_convolution_root(a: &IsotropicCoeffs, tol: f64) -> Result<IsotropicCoeffs> {
    if let Some((index, &value)) = a.b.iter().enumerate().find(|(_, &v)| v < -tol) {
        return Err(Error::NegativeCoefficient { index, value });
    }
    let root = a
        .b
        .iter()
        .enumerate()
        .map(|(n, &v)| (v.max(0.0) / convolution_factor(n, a.d)).sqrt())
        .collect();
    IsotropicCoeffs::new(a.d, root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gegenbauer_normalization_and_legendre() {
        for d in 1..6 {
            let v = gegenbauer_values(d, 12, &[0.0, 0.3, 1.1, PI]).unwrap();
            assert!(v[0].iter().all(|&x| x == 1.0));
            assert!((v[1][1] - 0.3f64.cos()).abs() < 1e-15);
            for row in &v {
                assert!((row[0] - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|x| x.abs() <= 1.0 + 1e-12));
            }
        }
        let v = gegenbauer_values(2, 2, &[0.0, PI / 2.0, PI]).unwrap();
        let p2 = |t: f64| (3.0 * t.cos().powi(2) - 1.0) / 2.0;
        for (j, t) in [0.0, PI / 2.0, PI].iter().enumerate() {
            assert!((v[2][j] - p2(*t)).abs() < 1e-15);
        }
        // d = 1 gives Chebyshev polynomials cos(n t).
        let v = gegenbauer_values(1, 7, &[0.7]).unwrap();
        for (n, row) in v.iter().enumerate() {
            assert!((row[0] - (n as f64 * 0.7).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn areas_and_dimensions() {
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert_eq!(harmonic_dimension(3, 2), 7.0);
        assert_eq!(harmonic_dimension(5, 1), 2.0);
        // S^3: (n + 1)^2.
        assert!((harmonic_dimension(4, 3) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn cap_volume_examples() {
        assert!((cap_volume(2, PI) - 4.0 * PI).abs() < 1e-12);
        assert!((cap_volume(2, PI / 2.0) - 2.0 * PI).abs() < 1e-12);
        assert!((cap_volume(2, PI / 3.0) - PI).abs() < 1e-12);
        assert!((cap_volume(3, PI) - sphere_area(3)).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_examples() {
        let lb = turan_lower_bound(2, PI, 16).unwrap();
        assert!((lb.value - 2.0 * PI).abs() < 1e-12);
        assert!((lb.witness.integral() - lb.value).abs() < 1e-10);
        let lb = turan_lower_bound(2, PI / 2.0, 16).unwrap();
        assert!((lb.value - 2.0 * PI * (1.0 - (PI / 4.0).cos())).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..20 {
            let v = turan_lower_bound(3, PI * k as f64 / 20.0, 8).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn grid_is_nested() {
        let coarse = TuranSphereInstance::new(2, 1.0, 8, 16).unwrap().grid();
        let fine = TuranSphereInstance::new(2, 1.0, 8, 32).unwrap().grid();
        assert_eq!(coarse.len(), 17);
        for t in &coarse {
            assert!(fine.iter().any(|f| (f - t).abs() < 1e-15));
        }
        assert_eq!(TuranSphereInstance::new(2, PI, 8, 16).unwrap().grid(), vec![PI]);
    }

    #[test]
    fn anchor_at_pi() {
        let b = solve_turan_sphere(&TuranSphereInstance::new(2, PI, 40, 64).unwrap()).unwrap();
        assert!((b.upper - 2.0 * PI).abs() < 1e-8);
        assert!((b.lower - 2.0 * PI).abs() < 1e-8);
        assert!(b.certificate_ok);
    }

    #[test]
    fn convolution_examples() {
        let one = IsotropicCoeffs::new(2, vec![1.0, 0.0, 0.0]).unwrap();
        let c = isotropic_convolve(&one, &one).unwrap();
        assert!((c.evaluate(0.4) - 4.0 * PI).abs() < 1e-12);
        let p1 = IsotropicCoeffs::new(2, vec![0.0, 1.0, 0.0]).unwrap();
        let p2 = IsotropicCoeffs::new(2, vec![0.0, 0.0, 1.0]).unwrap();
        assert!(isotropic_convolve(&p1, &p2).unwrap().b.iter().all(|&v| v == 0.0));
        let angles: Vec<f64> = (0..9).map(|i| PI * i as f64 / 8.0).collect();
        let q = quadrature_convolve(&p2, &p2, &angles).unwrap();
        let c = isotropic_convolve(&p2, &p2).unwrap().evaluate_grid(&angles);
        for (x, y) in q.iter().zip(&c) {
            assert!((x - y).abs() < 1e-12);
        }
        let mismatch = IsotropicCoeffs::new(3, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(isotropic_convolve(&one, &mismatch).is_err());
        assert!(quadrature_convolve(&mismatch, &mismatch, &angles).is_err());
    }

    #[test]
    fn root_examples() {
        let one = IsotropicCoeffs::new(2, vec![1.0, 0.0]).unwrap();
        let r = sphere_convolution_root(&one, 1e-12).unwrap();
        assert!((r.b[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let back = isotropic_convolve(&r, &r).unwrap();
        assert!((back.b[0] - 1.0).abs() < 1e-15);
        let bad = IsotropicCoeffs::new(2, vec![1.0, -0.5]).unwrap();
        assert!(matches!(
            sphere_convolution_root(&bad, 1e-12),
            Err(Error::NegativeCoefficient { index: 1, .. })
        ));
    }
}
