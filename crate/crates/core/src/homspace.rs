//! The homogeneous space `G/K`, kernels on it, and the correspondence
//! `Phi(xK, yK) = phi(x^-1 y)` between G-invariant kernels and K-bi-invariant
//! functions.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gelfand::{self, BiInvariantFunction};
use crate::group::{FiniteGroup, GroupFunction, Subgroup};

const REPRESENTATIVE_DRAWS: usize = 8;

/// Left cosets `gK` with the uniform invariant measure of total mass 1.
#[derive(Debug, PartialEq)]
pub struct CosetSpace {
    group: Arc<FiniteGroup>,
    subgroup: Subgroup,
    /// Sorted cosets, ordered by minimal element; coset 0 is `K`.
    pub cosets: Vec<Vec<usize>>,
    pub representative: Vec<usize>,
    pub coset_of: Vec<usize>,
}

pub fn coset_space(group: &FiniteGroup, k: &Subgroup) -> Result<Arc<CosetSpace>> {
    if k.parent_order() != group.order() {
        return Err(Error::NotSubgroup("subgroup of a different group".into()));
    }
    let n = group.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut cosets = Vec::new();
    for g in 0..n {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = k.elements().iter().map(|&h| group.mul(g, h)).collect();
        members.sort_unstable();
        for &x in &members {
            coset_of[x] = cosets.len();
        }
        cosets.push(members);
    }
    let representative = cosets.iter().map(|c| c[0]).collect();
    let space = CosetSpace {
        group: Arc::new(group.clone()),
        subgroup: k.clone(),
        cosets,
        representative,
        coset_of,
    };
    let worst = (0..n)
        .map(|g| space.weyl_residual(&GroupFunction::point(n, g, 1.0)))
        .fold(0.0, f64::max);
    if worst > 1e-14 {
        return Err(Error::Internal(format!("Weyl integration residual {worst:e}")));
    }
    Ok(Arc::new(space))
}

impl CosetSpace {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    /// Number of cosets `m = n / |K|`.
    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    /// `|∫_G f - ∫_{G/K} ∫_K f(gk) dk dμ(gK)|`.
    pub fn weyl_residual(&self, f: &GroupFunction<f64>) -> f64 {
        let group_side = self.group.integrate(f);
        let m = self.len() as f64;
        let k = self.subgroup.order() as f64;
        let coset_side: f64 = self
            .representative
            .iter()
            .map(|&g| {
                self.subgroup
                    .elements()
                    .iter()
                    .map(|&h| f.values[self.group.mul(g, h)])
                    .sum::<f64>()
                    / k
                    / m
            })
            .sum();
        (group_side - coset_side).abs()
    }

    fn same(&self, other: &CosetSpace) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

/// A real kernel on `G/K x G/K`, `values[(i, j)] = Phi(x_i K, x_j K)`.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub space: Arc<CosetSpace>,
    pub values: DMatrix<f64>,
}

impl Kernel {
    pub fn new(space: Arc<CosetSpace>, values: DMatrix<f64>) -> Result<Self> {
        let m = space.len();
        if values.nrows() != m || values.ncols() != m {
            return Err(Error::SizeMismatch {
                expected: m,
                got: values.nrows().max(values.ncols()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("kernel has non-finite entries".into()));
        }
        Ok(Kernel { space, values })
    }

    pub fn ones(space: Arc<CosetSpace>) -> Self {
        let m = space.len();
        Kernel {
            space,
            values: DMatrix::from_element(m, m, 1.0),
        }
    }

    pub fn identity(space: Arc<CosetSpace>) -> Self {
        let m = space.len();
        Kernel {
            space,
            values: DMatrix::identity(m, m),
        }
    }

    /// `Phi(g x K, g y K) = Phi(x K, y K)` for all `g`, up to `tol`.
    pub fn is_g_invariant(&self, tol: f64) -> bool {
        let sp = &self.space;
        let group = sp.group();
        let m = sp.len();
        (0..group.order()).all(|g| {
            let moved: Vec<usize> = sp.representative.iter().map(|&x| sp.coset_of[group.mul(g, x)]).collect();
            (0..m).all(|i| (0..m).all(|j| (self.values[(moved[i], moved[j])] - self.values[(i, j)]).abs() <= tol))
        })
    }

    pub fn sup_distance(&self, other: &Kernel) -> f64 {
        (&self.values - &other.values).amax()
    }
}

/// `Phi(xK, yK) = phi(x^-1 y)`. Fails if `phi` is not K-bi-invariant.
pub fn lift_j(space: &Arc<CosetSpace>, phi: &GroupFunction<f64>) -> Result<Kernel> {
    let group = space.group();
    let n = group.order();
    if phi.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: phi.len() });
    }
    let ks = space.subgroup().elements();
    for g in 0..n {
        for &a in ks {
            let ag = group.mul(a, g);
            for &b in ks {
                if phi.values[group.mul(ag, b)] != phi.values[g] {
                    return Err(Error::NotBiInvariant { element: g });
                }
            }
        }
    }
    let reps = &space.representative;
    let m = space.len();
    let values = DMatrix::from_fn(m, m, |i, j| phi.values[group.mul(group.inv(reps[i]), reps[j])]);
    // Independence of coset representatives, on random re-draws.
    let mut rng = ChaCha8Rng::seed_from_u64(m as u64 ^ 0x9e37_79b9);
    for _ in 0..REPRESENTATIVE_DRAWS {
        let draw: Vec<usize> = space.cosets.iter().map(|c| c[rng.gen_range(0..c.len())]).collect();
        for i in 0..m {
            for j in 0..m {
                if phi.values[group.mul(group.inv(draw[i]), draw[j])] != values[(i, j)] {
                    return Err(Error::Internal("lifted kernel depends on representatives".into()));
                }
            }
        }
    }
    Kernel::new(Arc::clone(space), values)
}

pub fn lift_j_bi(space: &Arc<CosetSpace>, phi: &BiInvariantFunction<f64>) -> Result<Kernel> {
    lift_j(space, &phi.expand())
}

/// `phi(g) = Phi(K, gK)`. Fails if `Phi` is not G-invariant.
pub fn flatten_j(kernel: &Kernel) -> Result<GroupFunction<f64>> {
    if !kernel.is_g_invariant(0.0) {
        return Err(Error::NotInvariant);
    }
    let sp = &kernel.space;
    let base = sp.coset_of[0];
    Ok(GroupFunction::new(
        sp.coset_of.iter().map(|&c| kernel.values[(base, c)]).collect(),
    ))
}

/// `(Phi1 * Phi2)(xK, yK) = ∫ Phi1(xK, zK) Phi2(zK, yK) dμ(zK)`.
pub fn kernel_convolve(a: &Kernel, b: &Kernel) -> Result<Kernel> {
    if !a.space.same(&b.space) {
        return Err(Error::SizeMismatch {
            expected: a.space.len(),
            got: b.space.len(),
        });
    }
    let m = a.space.len() as f64;
    Ok(Kernel {
        space: Arc::clone(&a.space),
        values: (&a.values * &b.values) / m,
    })
}

/// `sup |J(phi1 * phi2) - J(phi1) * J(phi2)|`. Requires a Gelfand pair.
pub fn check_j_intertwines(space: &Arc<CosetSpace>, phi1: &GroupFunction<f64>, phi2: &GroupFunction<f64>) -> Result<f64> {
    let group = space.group();
    if !gelfand::is_gelfand_pair(group, space.subgroup())? {
        return Err(Error::NotGelfand);
    }
    let lhs = lift_j(space, &group.convolve(phi1, phi2)?);
    // Convolution of bi-invariant functions is bi-invariant up to rounding;
    // re-project to make the lift exact.
    let lhs = match lhs {
        Ok(k) => k,
        Err(Error::NotBiInvariant { .. }) => {
            let conv = group.project_k(space.subgroup(), &group.convolve(phi1, phi2)?)?;
            lift_j(space, &symmetrize_classes(space, &conv))?
        }
        Err(e) => return Err(e),
    };
    let rhs = kernel_convolve(&lift_j(space, phi1)?, &lift_j(space, phi2)?)?;
    Ok(lhs.sup_distance(&rhs))
}

/// Replaces every value by the value at the class minimum so that floating
/// noise does not break exact bi-invariance.
fn symmetrize_classes(space: &CosetSpace, f: &GroupFunction<f64>) -> GroupFunction<f64> {
    let group = space.group();
    let ks = space.subgroup().elements();
    let mut out = f.clone();
    for g in 0..group.order() {
        let mut min = g;
        for &a in ks {
            for &b in ks {
                min = min.min(group.mul(group.mul(a, g), b));
            }
        }
        out.values[g] = f.values[min];
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelDiagnostics {
    pub is_g_invariant: bool,
    pub is_symmetric: bool,
    pub is_pd: bool,
    pub min_eigenvalue: f64,
    /// Elements `x` with `Phi(K, xK) != 0`.
    pub support_set: Vec<usize>,
    /// `∫_{G/K} Phi(K, gK) dμ(gK)`.
    pub base_integral: f64,
    /// Row integrals `∫ Phi(x_i K, gK) dμ` for every base point.
    pub row_integrals: Vec<f64>,
}

pub fn kernel_diagnostics(kernel: &Kernel) -> KernelDiagnostics {
    let sp = &kernel.space;
    let m = sp.len();
    let base = sp.coset_of[0];
    let tol_pd = 1e-9 * m as f64 * kernel.values.amax();
    let is_symmetric = (0..m).all(|i| (0..m).all(|j| kernel.values[(i, j)] == kernel.values[(j, i)]));
    let min_eigenvalue = if is_symmetric {
        kernel.values.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    let support_set = (0..sp.group().order())
        .filter(|&x| kernel.values[(base, sp.coset_of[x])] != 0.0)
        .collect();
    let row_integrals: Vec<f64> = (0..m).map(|i| kernel.values.row(i).sum() / m as f64).collect();
    KernelDiagnostics {
        is_g_invariant: kernel.is_g_invariant(0.0),
        is_symmetric,
        is_pd: is_symmetric && min_eigenvalue >= -tol_pd,
        min_eigenvalue,
        support_set,
        base_integral: row_integrals[base],
        row_integrals,
    }
}

/// Writes a kernel as CSV: one header line naming group, subgroup order and
/// `m`, then the `m x m` matrix.
pub fn kernel_to_csv(kernel: &Kernel) -> String {
    let sp = &kernel.space;
    let mut out = format!(
        "# group={} subgroup_order={} m={} measure=uniform_mass_1\n",
        sp.group().name(),
        sp.subgroup().order(),
        sp.len()
    );
    for i in 0..sp.len() {
        let row: Vec<String> = (0..sp.len()).map(|j| format!("{}", kernel.values[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gelfand::spherical_functions;

    fn s3() -> (FiniteGroup, Subgroup) {
        let g = FiniteGroup::dihedral(3).unwrap();
        let k = g.subgroup_from_generators(&[3]).unwrap();
        (g, k)
    }

    #[test]
    fn coset_space_examples() {
        let (g, k) = s3();
        assert_eq!(coset_space(&g, &k).unwrap().len(), 3);
        assert_eq!(coset_space(&g, &g.trivial_subgroup()).unwrap().len(), 6);
        assert_eq!(coset_space(&g, &g.whole()).unwrap().len(), 1);
    }

    #[test]
    fn lift_examples() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        let ones = lift_j(&sp, &GroupFunction::constant(6, 1.0)).unwrap();
        assert_eq!(ones.values, DMatrix::from_element(3, 3, 1.0));
        let ind = lift_j(&sp, &GroupFunction::indicator(6, k.elements())).unwrap();
        assert_eq!(ind.values, DMatrix::identity(3, 3));
        let t = spherical_functions(&g, &k, 5).unwrap();
        let w1 = t.omega_function(1).to_real(1e-12).unwrap();
        let kern = lift_j(&sp, &w1.expand()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { -0.5 };
                assert!((kern.values[(i, j)] - expected).abs() < 1e-12);
            }
        }
        assert!(matches!(
            lift_j(&sp, &GroupFunction::point(6, 1, 1.0)),
            Err(Error::NotBiInvariant { .. })
        ));
    }

    #[test]
    fn flatten_examples() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        assert_eq!(flatten_j(&Kernel::ones(Arc::clone(&sp))).unwrap(), GroupFunction::constant(6, 1.0));
        assert_eq!(
            flatten_j(&Kernel::identity(Arc::clone(&sp))).unwrap(),
            GroupFunction::indicator(6, k.elements())
        );
        let mut bad = DMatrix::identity(3, 3);
        bad[(0, 1)] = 0.3;
        let bad = Kernel::new(Arc::clone(&sp), bad).unwrap();
        assert!(matches!(flatten_j(&bad), Err(Error::NotInvariant)));
    }

    #[test]
    fn kernel_convolution_examples() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        let ones = Kernel::ones(Arc::clone(&sp));
        assert!(kernel_convolve(&ones, &ones).unwrap().sup_distance(&ones) < 1e-15);
        let phi = Kernel::new(
            Arc::clone(&sp),
            DMatrix::from_row_slice(3, 3, &[1.0, 0.2, -0.3, 0.2, 1.0, 0.7, -0.3, 0.7, 1.0]),
        )
        .unwrap();
        let unit = Kernel::new(Arc::clone(&sp), DMatrix::identity(3, 3) * 3.0).unwrap();
        assert!(kernel_convolve(&phi, &unit).unwrap().sup_distance(&phi) < 1e-15);
    }

    #[test]
    fn intertwining_trivial_and_refusal() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        let one = GroupFunction::constant(6, 1.0);
        assert!(check_j_intertwines(&sp, &one, &one).unwrap() < 1e-15);
        let sp1 = coset_space(&g, &g.trivial_subgroup()).unwrap();
        assert!(matches!(
            check_j_intertwines(&sp1, &one, &one),
            Err(Error::NotGelfand)
        ));
    }

    #[test]
    fn diagnostics_examples() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        let d = kernel_diagnostics(&Kernel::ones(Arc::clone(&sp)));
        assert!(d.is_g_invariant && d.is_pd);
        assert!((d.base_integral - 1.0).abs() < 1e-15);
        let d = kernel_diagnostics(&Kernel::identity(Arc::clone(&sp)));
        assert!((d.base_integral - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.support_set, k.elements());
    }

    #[test]
    fn csv_has_header() {
        let (g, k) = s3();
        let sp = coset_space(&g, &k).unwrap();
        let csv = kernel_to_csv(&Kernel::identity(sp));
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# group=D3 subgroup_order=2 m=3"));
        assert_eq!(lines.next().unwrap(), "1,0,0");
    }
}
