//! Double cosets, the bi-invariant convolution algebra, spherical functions
//! of finite Gelfand pairs, the spherical transform and convolution roots.
//!
//! Spherical functions are obtained without representation theory: the
//! double-coset algebra of a Gelfand pair is commutative and semisimple, so a
//! generic Hermitian element has simple spectrum and its eigenvectors (as
//! bi-invariant functions) are exactly the spherical functions.

use std::cmp::Ordering;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Complex64, FiniteGroup, GroupFunction, Scalar, Subgroup};

const MAX_SEPARATION_ATTEMPTS: usize = 32;
const COLLISION_TOL: f64 = 1e-8;
const TABLE_CHECK_TOL: f64 = 1e-9;

/// Orbits of `K x K` acting on `G` by `(k, k') . g = k g k'`.
#[derive(Debug, PartialEq)]
pub struct DoubleCosetPartition {
    group: Arc<FiniteGroup>,
    subgroup: Subgroup,
    /// Classes sorted by minimal element; class 0 is `K` itself.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub sizes: Vec<usize>,
    pub inverse_class: Vec<usize>,
    /// `counts[(a*s + b)*s + c] = #{y in D_a : y^-1 x_c in D_b}` for a fixed
    /// representative `x_c` of `D_c`.
    counts: Vec<u32>,
}

/// Builds the double coset partition of `G` by `K`.
pub fn double_cosets(group: &FiniteGroup, k: &Subgroup) -> Result<Arc<DoubleCosetPartition>> {
    if k.parent_order() != group.order() {
        return Err(Error::NotSubgroup("subgroup of a different group".into()));
    }
    let n = group.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        if class_of[g] != usize::MAX {
            continue;
        }
        let idx = classes.len();
        let mut members = Vec::new();
        for &a in k.elements() {
            let ag = group.mul(a, g);
            for &b in k.elements() {
                let x = group.mul(ag, b);
                if class_of[x] == usize::MAX {
                    class_of[x] = idx;
                    members.push(x);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    let s = classes.len();
    let sizes = classes.iter().map(Vec::len).collect();
    let inverse_class = classes.iter().map(|c| class_of[group.inv(c[0])]).collect();
    let mut counts = vec![0u32; s * s * s];
    for (c, class) in classes.iter().enumerate() {
        let xc = class[0];
        for (a, da) in classes.iter().enumerate() {
            for &y in da {
                let b = class_of[group.mul(group.inv(y), xc)];
                counts[(a * s + b) * s + c] += 1;
            }
        }
    }
    Ok(Arc::new(DoubleCosetPartition {
        group: Arc::new(group.clone()),
        subgroup: k.clone(),
        classes,
        class_of,
        sizes,
        inverse_class,
        counts,
    }))
}

impl DoubleCosetPartition {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<FiniteGroup> {
        Arc::clone(&self.group)
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn identity_class(&self) -> usize {
        0
    }

    /// Number of `y in D_a` with `y^-1 x_c in D_b`.
    pub fn structure_count(&self, a: usize, b: usize, c: usize) -> u32 {
        let s = self.num_classes();
        self.counts[(a * s + b) * s + c]
    }

    /// Value of `e_a * e_b` on `D_c` for class indicators `e_a`, `e_b`.
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        self.structure_count(a, b, c) as f64 / self.group.order() as f64
    }

    /// `mu(D_j) = |D_j| / n`.
    pub fn class_measure(&self, j: usize) -> f64 {
        self.sizes[j] as f64 / self.group.order() as f64
    }

    /// Commutativity of the bi-invariant convolution algebra, checked on the
    /// basis of class indicators (exact integer comparison).
    pub fn is_commutative(&self) -> bool {
        let s = self.num_classes();
        (0..s).all(|a| (0..a).all(|b| (0..s).all(|c| self.structure_count(a, b, c) == self.structure_count(b, a, c))))
    }

    /// Classwise convolution of bi-invariant coefficient vectors.
    pub fn convolve_coeffs<T: Scalar>(&self, f: &[T], g: &[T]) -> Vec<T> {
        let s = self.num_classes();
        let inv_n = T::from_real(1.0 / self.group.order() as f64);
        (0..s)
            .map(|c| {
                let mut acc = T::zero();
                for a in 0..s {
                    if f[a] == T::zero() {
                        continue;
                    }
                    for b in 0..s {
                        let cnt = self.structure_count(a, b, c);
                        if cnt != 0 {
                            acc += f[a] * g[b] * T::from_real(cnt as f64);
                        }
                    }
                }
                acc * inv_n
            })
            .collect()
    }
}

/// `(G, K)` is a Gelfand pair iff the bi-invariant algebra is commutative.
pub fn is_gelfand_pair(group: &FiniteGroup, k: &Subgroup) -> Result<bool> {
    Ok(double_cosets(group, k)?.is_commutative())
}

/// A K-bi-invariant function stored as one value per double coset.
#[derive(Clone, Debug)]
pub struct BiInvariantFunction<T = f64> {
    pub partition: Arc<DoubleCosetPartition>,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> BiInvariantFunction<T> {
    pub fn new(partition: Arc<DoubleCosetPartition>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != partition.num_classes() {
            return Err(Error::SizeMismatch {
                expected: partition.num_classes(),
                got: coeffs.len(),
            });
        }
        Ok(BiInvariantFunction { partition, coeffs })
    }

    /// Reads off class values, failing if `f` is not constant on each class
    /// (within `tol`).
    pub fn from_function(partition: Arc<DoubleCosetPartition>, f: &GroupFunction<T>, tol: f64) -> Result<Self> {
        if f.len() != partition.group().order() {
            return Err(Error::SizeMismatch {
                expected: partition.group().order(),
                got: f.len(),
            });
        }
        let mut coeffs = Vec::with_capacity(partition.num_classes());
        for class in &partition.classes {
            let v = f.values[class[0]];
            if let Some(&bad) = class.iter().find(|&&x| (f.values[x] - v).modulus() > tol) {
                return Err(Error::NotBiInvariant { element: bad });
            }
            coeffs.push(v);
        }
        Ok(BiInvariantFunction { partition, coeffs })
    }

    pub fn constant(partition: Arc<DoubleCosetPartition>, c: T) -> Self {
        let s = partition.num_classes();
        BiInvariantFunction { partition, coeffs: vec![c; s] }
    }

    /// Indicator of `K` (the identity class).
    pub fn indicator_of_k(partition: Arc<DoubleCosetPartition>) -> Self {
        let mut coeffs = vec![T::zero(); partition.num_classes()];
        coeffs[0] = T::one();
        BiInvariantFunction { partition, coeffs }
    }

    pub fn expand(&self) -> GroupFunction<T> {
        GroupFunction::new(self.partition.class_of.iter().map(|&c| self.coeffs[c]).collect())
    }

    pub fn at_identity(&self) -> T {
        self.coeffs[0]
    }

    pub fn integral(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &v)| acc + v * T::from_real(self.partition.class_measure(j)))
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_partition(&other.partition)?;
        Ok(BiInvariantFunction {
            partition: Arc::clone(&self.partition),
            coeffs: self.partition.convolve_coeffs(&self.coeffs, &other.coeffs),
        })
    }

    pub fn check_partition(&self, other: &Arc<DoubleCosetPartition>) -> Result<()> {
        if Arc::ptr_eq(&self.partition, other) || *self.partition == **other {
            Ok(())
        } else {
            Err(Error::PartitionMismatch)
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn to_real(&self, tol: f64) -> Result<BiInvariantFunction<f64>> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (j, v) in self.coeffs.iter().enumerate() {
            if v.imaginary().abs() > tol {
                return Err(Error::ComplexInput {
                    element: self.partition.classes[j][0],
                    imag: v.imaginary(),
                });
            }
            out.push(v.real());
        }
        Ok(BiInvariantFunction {
            partition: Arc::clone(&self.partition),
            coeffs: out,
        })
    }

    pub fn to_complex(&self) -> BiInvariantFunction<Complex64> {
        BiInvariantFunction {
            partition: Arc::clone(&self.partition),
            coeffs: self.coeffs.iter().map(|v| Complex64::new(v.real(), v.imaginary())).collect(),
        }
    }
}

/// Values of every spherical function on every double coset, with
/// Plancherel weights.
#[derive(Clone, Debug)]
pub struct SphericalTable {
    pub partition: Arc<DoubleCosetPartition>,
    /// `omega[i][j]` is the value of the i-th spherical function on class j.
    pub omega: Vec<Vec<Complex64>>,
    /// `w_i = 1 / <omega_i, omega_i>`.
    pub weights: Vec<f64>,
    pub trivial_index: usize,
    /// `conjugate[i]` is the index of `conj(omega_i)`.
    pub conjugate: Vec<usize>,
    pub seed: u64,
}

/// JSON export of a spherical table.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SphericalTableExport {
    pub classes: Vec<Vec<usize>>,
    pub omega: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega_imag: Option<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
}

/// The real cone generators used by the LP: one function `Re(omega_i)` per
/// conjugation orbit. A real bi-invariant function is positive definite iff it
/// is a nonnegative combination of these.
#[derive(Clone, Debug)]
pub struct RealSphericalBasis {
    /// `functions[o][j]` is the value of generator `o` on class `j`.
    pub functions: Vec<Vec<f64>>,
    /// Spherical function indices in each orbit.
    pub orbits: Vec<Vec<usize>>,
    pub trivial: usize,
}

/// Computes all spherical functions of the Gelfand pair `(G, K)`.
pub fn spherical_functions(group: &FiniteGroup, k: &Subgroup, seed: u64) -> Result<SphericalTable> {
    SphericalTable::compute(double_cosets(group, k)?, seed)
}

fn lex_desc(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x.re - y.re).abs() > 1e-9 {
            return y.re.total_cmp(&x.re);
        }
        if (x.im - y.im).abs() > 1e-9 {
            return y.im.total_cmp(&x.im);
        }
    }
    Ordering::Equal
}

impl SphericalTable {
    pub fn compute(partition: Arc<DoubleCosetPartition>, seed: u64) -> Result<Self> {
        if !partition.is_commutative() {
            return Err(Error::NotGelfand);
        }
        let s = partition.num_classes();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sqrt_w: Vec<f64> = (0..s).map(|j| partition.class_measure(j).sqrt()).collect();
        for _ in 0..MAX_SEPARATION_ATTEMPTS {
            // Random Hermitian element h of the algebra: h(g^-1) = conj h(g).
            let mut h = vec![Complex64::new(0.0, 0.0); s];
            for a in 0..s {
                let a_star = partition.inverse_class[a];
                if a_star == a {
                    h[a] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
                } else if a < a_star {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h[a] = z;
                    h[a_star] = z.conj();
                }
            }
            // Left multiplication by h in the class basis, conjugated by W^{1/2}
            // to make it Hermitian.
            let mut op = DMatrix::<Complex64>::zeros(s, s);
            for c in 0..s {
                for b in 0..s {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a, &ha) in h.iter().enumerate() {
                        acc += ha * partition.structure_constant(a, b, c);
                    }
                    op[(c, b)] = acc * (sqrt_w[c] / sqrt_w[b]);
                }
            }
            let op = (&op + op.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(op);
            let mut lambdas: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
            lambdas.sort_by(f64::total_cmp);
            let radius = lambdas.iter().map(|l| l.abs()).fold(0.0, f64::max);
            let collided = lambdas.windows(2).any(|w| w[1] - w[0] < COLLISION_TOL * radius);
            if collided || (s > 1 && radius == 0.0) {
                continue;
            }
            let mut omega: Vec<Vec<Complex64>> = (0..s)
                .map(|i| {
                    let col = eig.eigenvectors.column(i);
                    let v: Vec<Complex64> = (0..s).map(|j| col[j] / sqrt_w[j]).collect();
                    let e = v[0];
                    v.into_iter()
                        .map(|x| {
                            let mut y = x / e;
                            if y.im.abs() < 1e-13 {
                                y.im = 0.0;
                            }
                            y
                        })
                        .collect()
                })
                .collect();
            for w in omega.iter_mut() {
                hermitian_symmetrize(w, &partition.inverse_class);
            }
            omega.sort_by(|a, b| lex_desc(a, b));
            if omega[0].iter().all(|x| (x - 1.0).norm() < 1e-12) {
                omega[0].iter_mut().for_each(|x| *x = Complex64::new(1.0, 0.0));
            }
            let weights = omega
                .iter()
                .map(|w| {
                    let norm: f64 = w
                        .iter()
                        .enumerate()
                        .map(|(j, x)| partition.class_measure(j) * x.norm_sqr())
                        .sum();
                    1.0 / norm
                })
                .collect();
            let conjugate = (0..s)
                .map(|i| {
                    (0..s)
                        .min_by(|&p, &q| {
                            let dp = conj_distance(&omega[i], &omega[p]);
                            let dq = conj_distance(&omega[i], &omega[q]);
                            dp.total_cmp(&dq)
                        })
                        .expect("s >= 1")
                })
                .collect();
            let conjugate: Vec<usize> = conjugate;
            for i in 0..s {
                let j = conjugate[i];
                if i < j && conjugate[j] == i {
                    omega[j] = omega[i].iter().map(|x| x.conj()).collect();
                }
            }
            let table = SphericalTable {
                partition: Arc::clone(&partition),
                omega,
                weights,
                trivial_index: 0,
                conjugate,
                seed,
            };
            table.validate()?;
            return Ok(table);
        }
        Err(Error::SeparationFailed(MAX_SEPARATION_ATTEMPTS))
    }

    fn validate(&self) -> Result<()> {
        let fe = self.functional_equation_residual();
        if fe > TABLE_CHECK_TOL {
            return Err(Error::Internal(format!("functional equation residual {fe:e}")));
        }
        let orth = self.orthogonality_residual();
        if orth > TABLE_CHECK_TOL {
            return Err(Error::Internal(format!("orthogonality residual {orth:e}")));
        }
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Internal("non-positive Plancherel weight".into()));
        }
        if self.omega[self.trivial_index].iter().any(|x| (x - 1.0).norm() > TABLE_CHECK_TOL) {
            return Err(Error::Internal("trivial spherical function is not constant".into()));
        }
        for (i, &j) in self.conjugate.iter().enumerate() {
            if conj_distance(&self.omega[i], &self.omega[j]) > TABLE_CHECK_TOL {
                return Err(Error::Internal("spherical dual not closed under conjugation".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.omega.iter().flatten().all(|x| x.im == 0.0)
    }

    /// Value of `omega_i` at the group element `g`.
    pub fn value_at(&self, i: usize, g: usize) -> Complex64 {
        self.omega[i][self.partition.class_of[g]]
    }

    /// `max |(1/|K|) sum_k omega(x k y) - omega(x) omega(y)|` over all `x, y`.
    pub fn functional_equation_residual(&self) -> f64 {
        let group = self.partition.group();
        let ks = self.partition.subgroup().elements();
        let n = group.order();
        let inv_k = 1.0 / ks.len() as f64;
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for x in 0..n {
                for y in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &k in ks {
                        acc += self.value_at(i, group.mul(group.mul(x, k), y));
                    }
                    let lhs = acc * inv_k;
                    let rhs = self.value_at(i, x) * self.value_at(i, y);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }

    /// `max_{i != j} |<omega_i, omega_j>|` with `<a, b> = (1/n) sum a conj(b)`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j {
                    let ip: Complex64 = (0..self.len())
                        .map(|c| self.omega[i][c] * self.omega[j][c].conj() * self.partition.class_measure(c))
                        .sum();
                    worst = worst.max(ip.norm());
                }
            }
        }
        worst
    }

    pub fn omega_function(&self, i: usize) -> BiInvariantFunction<Complex64> {
        BiInvariantFunction {
            partition: Arc::clone(&self.partition),
            coeffs: self.omega[i].clone(),
        }
    }

    pub fn real_basis(&self) -> RealSphericalBasis {
        let mut seen = vec![false; self.len()];
        let mut functions = Vec::new();
        let mut orbits = Vec::new();
        let mut trivial = 0;
        for i in 0..self.len() {
            if seen[i] {
                continue;
            }
            let j = self.conjugate[i];
            seen[i] = true;
            seen[j] = true;
            if i == self.trivial_index {
                trivial = orbits.len();
            }
            orbits.push(if i == j { vec![i] } else { vec![i, j] });
            functions.push(self.omega[i].iter().map(|x| x.re).collect());
        }
        RealSphericalBasis { functions, orbits, trivial }
    }

    pub fn export(&self) -> SphericalTableExport {
        SphericalTableExport {
            classes: self.partition.classes.clone(),
            omega: self.omega.iter().map(|r| r.iter().map(|x| x.re).collect()).collect(),
            omega_imag: if self.is_real() {
                None
            } else {
                Some(self.omega.iter().map(|r| r.iter().map(|x| x.im).collect()).collect())
            },
            weights: self.weights.clone(),
        }
    }
}

/// Enforces `omega(g^-1) = conj(omega(g))` exactly and `omega(e) = 1`.
fn hermitian_symmetrize(w: &mut [Complex64], inverse_class: &[usize]) {
    w[0] = Complex64::new(1.0, 0.0);
    for j in 0..w.len() {
        let js = inverse_class[j];
        if js == j {
            w[j].im = 0.0;
        } else if j < js {
            let avg = (w[j] + w[js].conj()) * 0.5;
            w[j] = avg;
            w[js] = avg.conj();
        }
    }
}

fn conj_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() - y).norm()).fold(0.0, f64::max)
}

/// Spherical Fourier coefficients `f^(omega_i)`.
#[derive(Clone, Debug)]
pub struct SphericalCoeffs {
    pub partition: Arc<DoubleCosetPartition>,
    pub values: Vec<Complex64>,
}

impl SphericalCoeffs {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `f^(omega_i) = (1/n) sum_g f(g) omega_i(g^-1)`, computed classwise.
pub fn spherical_transform<T: Scalar>(f: &BiInvariantFunction<T>, table: &SphericalTable) -> Result<SphericalCoeffs> {
    f.check_partition(&table.partition)?;
    let p = &table.partition;
    let values = table
        .omega
        .iter()
        .map(|w| {
            (0..p.num_classes())
                .map(|j| {
                    let fj = Complex64::new(f.coeffs[j].real(), f.coeffs[j].imaginary());
                    fj * w[p.inverse_class[j]] * p.class_measure(j)
                })
                .sum()
        })
        .collect();
    Ok(SphericalCoeffs {
        partition: Arc::clone(p),
        values,
    })
}

/// `f = sum_i w_i c_i omega_i`.
pub fn inverse_spherical_transform(c: &SphericalCoeffs, table: &SphericalTable) -> Result<BiInvariantFunction<Complex64>> {
    if !(Arc::ptr_eq(&c.partition, &table.partition) || *c.partition == *table.partition) {
        return Err(Error::PartitionMismatch);
    }
    if c.values.len() != table.len() {
        return Err(Error::SizeMismatch {
            expected: table.len(),
            got: c.values.len(),
        });
    }
    let s = table.partition.num_classes();
    let coeffs = (0..s)
        .map(|j| {
            (0..table.len())
                .map(|i| c.values[i] * table.weights[i] * table.omega[i][j])
                .sum()
        })
        .collect();
    Ok(BiInvariantFunction {
        partition: Arc::clone(&table.partition),
        coeffs,
    })
}

/// Bochner-type test: every spherical coefficient is real and `>= -tol`.
pub fn bochner_check(f: &BiInvariantFunction<f64>, table: &SphericalTable, tol: f64) -> Result<bool> {
    let c = spherical_transform(f, table)?;
    Ok(c.values.iter().all(|v| v.im.abs() <= tol && v.re >= -tol))
}

/// Result of [`convolution_root`].
#[derive(Clone, Debug)]
pub struct ConvolutionRoot {
    pub root: BiInvariantFunction<f64>,
    /// Coefficient indices that were slightly negative and clamped to zero.
    pub clamped: Vec<usize>,
    /// `sup |g*g - f|`, computed by group convolution of the expanded functions.
    pub residual: f64,
}

/// Bi-invariant `g` with `g * g = f`, obtained as the inverse transform of the
/// square root of `f^`.
pub fn convolution_root(f: &BiInvariantFunction<f64>, table: &SphericalTable) -> Result<ConvolutionRoot> {
    let c = spherical_transform(f, table)?;
    let tol = 1e-9 * c.max_abs();
    let mut clamped = Vec::new();
    let mut root_coeffs = Vec::with_capacity(c.values.len());
    for (index, v) in c.values.iter().enumerate() {
        if v.re < -tol || v.im.abs() > tol.max(1e-12) {
            let value = if v.re < -tol { v.re } else { -v.im.abs() };
            return Err(Error::NegativeCoefficient { index, value });
        }
        let re = if v.re < 0.0 {
            clamped.push(index);
            0.0
        } else {
            v.re
        };
        root_coeffs.push(Complex64::new(re.sqrt(), 0.0));
    }
    let root_hat = SphericalCoeffs {
        partition: Arc::clone(&table.partition),
        values: root_coeffs,
    };
    let root = inverse_spherical_transform(&root_hat, table)?.to_real(1e-9 * (1.0 + f.sup_norm()))?;
    let group = table.partition.group();
    let gg = group.convolve(&root.expand(), &root.expand())?;
    let residual = gg.distance(&f.expand());
    Ok(ConvolutionRoot { root, clamped, residual })
}
