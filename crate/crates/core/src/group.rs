//! Finite groups given by Cayley tables, functions on them, and the basic
//! harmonic-analysis primitives: convolution under normalized Haar measure,
//! involution, autocorrelation, K-averaging and positive-definiteness tests.

use std::fmt;

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num::{BigRational, Complex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values a group function may take: `f64` or `Complex<f64>`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

pub type Complex64 = Complex<f64>;

/// Tables up to this order are checked for associativity on every triple.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 512;

/// Descriptor of a group to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupDescriptor {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Product(Vec<GroupDescriptor>),
    Table { name: String, table: Vec<Vec<usize>> },
}

/// A finite group stored as its multiplication table. Element 0 is the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates an explicit Cayley table. `table[a][b]` is the index of `a*b`.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidDescriptor("empty table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotLatinSquare(format!(
                    "row {a} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::OutOfRange { index: bad, order: n });
            }
        }
        for a in 0..n {
            let mut seen = vec![false; n];
            for b in 0..n {
                let x = table[a][b];
                if seen[x] {
                    return Err(Error::NotLatinSquare(format!(
                        "value {x} repeats in row {a} (at column {b})"
                    )));
                }
                seen[x] = true;
            }
        }
        for b in 0..n {
            let mut seen = vec![false; n];
            for a in 0..n {
                let x = table[a][b];
                if seen[x] {
                    return Err(Error::NotLatinSquare(format!(
                        "value {x} repeats in column {b} (at row {a})"
                    )));
                }
                seen[x] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or(Error::NoIdentity)?;
        if identity != 0 {
            return Err(Error::IdentityNotFirst(identity));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| flat[a * n + b] == 0).expect("Latin row contains 0");
        }
        let group = FiniteGroup {
            name: name.into(),
            order: n,
            table: flat,
            inverse,
        };
        group.check_associativity()?;
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order;
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                Err(Error::NonAssociative { a, b, c })
            } else {
                Ok(())
            }
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..10 * n * n {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn build(desc: &GroupDescriptor) -> Result<Self> {
        match desc {
            GroupDescriptor::Cyclic(n) => Self::cyclic(*n),
            GroupDescriptor::Dihedral(n) => Self::dihedral(*n),
            GroupDescriptor::Symmetric(n) => Self::symmetric(*n),
            GroupDescriptor::Product(parts) => {
                let mut iter = parts.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| Error::InvalidDescriptor("empty product".into()))?;
                let mut acc = Self::build(first)?;
                for part in iter {
                    acc = acc.direct_product(&Self::build(part)?)?;
                }
                Ok(acc)
            }
            GroupDescriptor::Table { name, table } => Self::from_table(name.clone(), table.clone()),
        }
    }

    /// `Z_n` with `a*b = (a+b) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDescriptor("cyclic(0)".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(format!("Z{n}"), table)
    }

    /// Dihedral group of order `2n`. Index `k < n` is the rotation `r^k`,
    /// index `n + k` is `r^k s` with `s` a reflection; `s` itself is index `n`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDescriptor("dihedral(0)".into()));
        }
        let decode = |x: usize| (x % n, x / n);
        let encode = |k: usize, f: usize| f * n + k;
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (k1, f1) = decode(a);
                        let (k2, f2) = decode(b);
                        let k = if f1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                        encode(k, f1 ^ f2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(format!("D{n}"), table)
    }

    /// Symmetric group on `n <= 6` letters; permutations in lexicographic
    /// order, product is composition `(p*q)(i) = p(q(i))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::InvalidDescriptor(format!("symmetric({n}) needs 1 <= n <= 6")));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).expect("perm");
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        let pq: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
                        index(&pq)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(format!("S{n}"), table)
    }

    /// Direct product; the pair `(i, j)` has index `i * |other| + j`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<Self> {
        let (n1, n2) = (self.order, other.order);
        let table = (0..n1 * n2)
            .map(|a| {
                (0..n1 * n2)
                    .map(|b| self.mul(a / n2, b / n2) * n2 + other.mul(a % n2, b % n2))
                    .collect()
            })
            .collect();
        Self::from_table(format!("{}x{}", self.name, other.name), table)
    }

    /// The subgroup `H` as a group in its own right; local index `i` is
    /// `h.elements()[i]` (identity stays at 0).
    pub fn restrict_to(&self, h: &Subgroup) -> Result<FiniteGroup> {
        let elems = h.elements();
        let mut local = vec![usize::MAX; self.order];
        for (i, &g) in elems.iter().enumerate() {
            local[g] = i;
        }
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| local[self.mul(a, b)]).collect())
            .collect();
        Self::from_table(format!("{}|H{}", self.name, elems.len()), table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|a| self.mul(z, a) == self.mul(a, z)))
            .collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.order {
            Err(Error::OutOfRange { index: a, order: self.order })
        } else {
            Ok(())
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order {
            Err(Error::SizeMismatch { expected: self.order, got: len })
        } else {
            Ok(())
        }
    }

    /// The trivial subgroup `{e}`.
    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::new_unchecked(self.order, vec![0])
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(&self) -> Subgroup {
        Subgroup::new_unchecked(self.order, (0..self.order).collect())
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_from_generators(&self, gens: &[usize]) -> Result<Subgroup> {
        for &g in gens {
            self.check_index(g)?;
        }
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut elems = vec![0];
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                    frontier.push(y);
                }
            }
        }
        elems.sort_unstable();
        Ok(Subgroup::new_unchecked(self.order, elems))
    }

    /// Checks that `elements` is a subgroup.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup> {
        for &g in elements {
            self.check_index(g)?;
        }
        let mut elems = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let sub = Subgroup::new_unchecked(self.order, elems);
        if !sub.contains(0) {
            return Err(Error::NotSubgroup("does not contain the identity".into()));
        }
        for &a in sub.elements() {
            if !sub.contains(self.inv(a)) {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in sub.elements() {
                if !sub.contains(self.mul(a, b)) {
                    return Err(Error::NotSubgroup(format!("{a}*{b} missing")));
                }
            }
        }
        Ok(sub)
    }

    /// `(f*g)(x) = (1/n) sum_y f(y) g(y^-1 x)`.
    pub fn convolve<T: Scalar>(&self, f: &GroupFunction<T>, g: &GroupFunction<T>) -> Result<GroupFunction<T>> {
        self.check_len(f.len())?;
        self.check_len(g.len())?;
        let n = self.order;
        let scale = T::from_real(1.0 / n as f64);
        let mut out = vec![T::zero(); n];
        for y in 0..n {
            let fy = f.values[y];
            if fy == T::zero() {
                continue;
            }
            let yi = self.inv(y);
            for (x, o) in out.iter_mut().enumerate() {
                *o += fy * g.values[self.mul(yi, x)];
            }
        }
        Ok(GroupFunction::new(out.into_iter().map(|v| v * scale).collect()))
    }

    /// `f*(x) = conj f(x^-1)` (finite groups are unimodular).
    pub fn involution<T: Scalar>(&self, f: &GroupFunction<T>) -> Result<GroupFunction<T>> {
        self.check_len(f.len())?;
        Ok(GroupFunction::new(
            (0..self.order).map(|x| f.values[self.inv(x)].conjugate()).collect(),
        ))
    }

    /// `f * f*`, always positive definite.
    pub fn autocorrelate<T: Scalar>(&self, f: &GroupFunction<T>) -> Result<GroupFunction<T>> {
        let star = self.involution(f)?;
        self.convolve(f, &star)
    }

    /// `f^K(g) = (1/|K|^2) sum_{k,k'} f(k g k')`.
    pub fn project_k<T: Scalar>(&self, k: &Subgroup, f: &GroupFunction<T>) -> Result<GroupFunction<T>> {
        self.check_len(f.len())?;
        self.check_subgroup(k)?;
        let ks = k.elements();
        let scale = T::from_real(1.0 / (ks.len() * ks.len()) as f64);
        let values = (0..self.order)
            .map(|g| {
                let mut acc = T::zero();
                for &a in ks {
                    let ag = self.mul(a, g);
                    for &b in ks {
                        acc += f.values[self.mul(ag, b)];
                    }
                }
                acc * scale
            })
            .collect();
        Ok(GroupFunction::new(values))
    }

    fn check_subgroup(&self, k: &Subgroup) -> Result<()> {
        if k.parent_order() != self.order {
            return Err(Error::NotSubgroup(format!(
                "subgroup belongs to a group of order {}, not {}",
                k.parent_order(),
                self.order
            )));
        }
        Ok(())
    }

    /// Integral under normalized Haar measure.
    pub fn integrate<T: Scalar>(&self, f: &GroupFunction<T>) -> T {
        let sum = f.values.iter().fold(T::zero(), |acc, &v| acc + v);
        sum * T::from_real(1.0 / self.order as f64)
    }

    /// Gram matrix `M[i][j] = f(g_i^-1 g_j)` over all elements.
    pub fn gram_matrix<T: Scalar>(&self, f: &GroupFunction<T>) -> Result<DMatrix<T>> {
        self.check_len(f.len())?;
        Ok(DMatrix::from_fn(self.order, self.order, |i, j| {
            f.values[self.mul(self.inv(i), j)]
        }))
    }

    /// Default PSD tolerance `1e-9 * n * max|f|`.
    pub fn default_pd_tolerance<T: Scalar>(&self, f: &GroupFunction<T>) -> f64 {
        1e-9 * self.order as f64 * f.sup_norm()
    }

    /// Positive-definiteness by the symmetric eigenvalue decomposition of the
    /// full Gram matrix. A non-Hermitian `f` is reported as an error, distinct
    /// from a negative verdict.
    pub fn is_positive_definite<T: Scalar>(&self, f: &GroupFunction<T>, tol: Option<f64>) -> Result<PdVerdict> {
        let tol = tol.unwrap_or_else(|| self.default_pd_tolerance(f));
        self.check_hermitian(f, tol.max(1e-12 * f.sup_norm()))?;
        let gram = self.gram_matrix(f)?;
        let hermitian = (&gram + gram.adjoint()) * T::from_real(0.5);
        let eig = hermitian.symmetric_eigenvalues();
        let min_eigenvalue = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(PdVerdict {
            verdict: min_eigenvalue >= -tol,
            min_eigenvalue,
        })
    }

    /// Eigenvector of the most negative Gram eigenvalue, usable as a
    /// `quadratic_form` witness. `None` when the Gram matrix is PSD within `tol`.
    pub fn negative_witness<T: Scalar>(&self, f: &GroupFunction<T>, tol: f64) -> Result<Option<GroupFunction<T>>> {
        let gram = self.gram_matrix(f)?;
        let hermitian = (&gram + gram.adjoint()) * T::from_real(0.5);
        let eig = SymmetricEigen::new(hermitian);
        let (idx, &min) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if min >= -tol {
            return Ok(None);
        }
        Ok(Some(GroupFunction::new(eig.eigenvectors.column(idx).iter().cloned().collect())))
    }

    fn check_hermitian<T: Scalar>(&self, f: &GroupFunction<T>, tol: f64) -> Result<()> {
        for g in 0..self.order {
            let dev = (f.values[g] - f.values[self.inv(g)].conjugate()).modulus();
            if dev > tol {
                return Err(Error::NotHermitian { element: g, deviation: dev });
            }
        }
        Ok(())
    }

    /// Exact PSD test of the Gram matrix of a rational-valued real function via
    /// pivoted LDL^T.
    pub fn is_positive_definite_exact(&self, f: &[BigRational]) -> Result<bool> {
        self.check_len(f.len())?;
        for g in 0..self.order {
            if f[g] != f[self.inv(g)] {
                let dev = crate::rational::to_f64(&(&f[g] - &f[self.inv(g)])).abs();
                return Err(Error::NotHermitian { element: g, deviation: dev });
            }
        }
        let n = self.order;
        let gram: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| f[self.mul(self.inv(i), j)].clone()).collect())
            .collect();
        Ok(crate::rational::is_psd_exact(gram))
    }

    /// `∫ (φ* * φ) f dλ_G`.
    pub fn quadratic_form<T: Scalar>(&self, f: &GroupFunction<T>, phi: &GroupFunction<T>) -> Result<T> {
        let star = self.involution(phi)?;
        let auto = self.convolve(&star, phi)?;
        self.check_len(f.len())?;
        let prod = GroupFunction::new(auto.values.iter().zip(&f.values).map(|(a, b)| *a * *b).collect());
        Ok(self.integrate(&prod))
    }

    /// Computes the symmetric and K-bi-invariant flags of `members`.
    pub fn validate_subset(&self, k: &Subgroup, members: &[usize]) -> Result<GroupSubset> {
        self.check_subgroup(k)?;
        let mut mask = vec![false; self.order];
        for &x in members {
            self.check_index(x)?;
            mask[x] = true;
        }
        let symmetric = (0..self.order).all(|x| !mask[x] || mask[self.inv(x)]);
        let bi_invariant = (0..self.order).all(|x| {
            !mask[x]
                || k.elements().iter().all(|&a| {
                    let ax = self.mul(a, x);
                    k.elements().iter().all(|&b| mask[self.mul(ax, b)])
                })
        });
        Ok(GroupSubset {
            members: (0..self.order).filter(|&x| mask[x]).collect(),
            symmetric,
            bi_invariant,
        })
    }

    /// Smallest symmetric K-bi-invariant superset, `K (S ∪ S^-1) K`.
    pub fn biinvariant_symmetric_closure(&self, k: &Subgroup, members: &[usize]) -> Result<GroupSubset> {
        self.check_subgroup(k)?;
        let mut mask = vec![false; self.order];
        for &x in members {
            self.check_index(x)?;
            for y in [x, self.inv(x)] {
                for &a in k.elements() {
                    let ay = self.mul(a, y);
                    for &b in k.elements() {
                        mask[self.mul(ay, b)] = true;
                    }
                }
            }
        }
        let members: Vec<usize> = (0..self.order).filter(|&x| mask[x]).collect();
        self.validate_subset(k, &members)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// A subgroup as a sorted list of element indices of the parent group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent_order: usize,
    elements: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    fn new_unchecked(parent_order: usize, elements: Vec<usize>) -> Self {
        let mut mask = vec![false; parent_order];
        for &x in &elements {
            mask[x] = true;
        }
        Subgroup { parent_order, elements, mask }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }
}

/// A function on the group, one value per element.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction<T = f64> {
    pub values: Vec<T>,
}

impl<T: Scalar> GroupFunction<T> {
    pub fn new(values: Vec<T>) -> Self {
        GroupFunction { values }
    }

    pub fn constant(n: usize, c: T) -> Self {
        GroupFunction::new(vec![c; n])
    }

    /// `c` at `a`, zero elsewhere.
    pub fn point(n: usize, a: usize, c: T) -> Self {
        let mut values = vec![T::zero(); n];
        values[a] = c;
        GroupFunction::new(values)
    }

    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut values = vec![T::zero(); n];
        for &x in set {
            values[x] = T::one();
        }
        GroupFunction::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.real().is_finite() && v.imaginary().is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.imaginary() == 0.0)
    }

    pub fn scale(&self, c: T) -> Self {
        GroupFunction::new(self.values.iter().map(|&v| v * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        GroupFunction::new(self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        GroupFunction::new(self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect())
    }

    /// `sup |f - g|`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).sup_norm()
    }

    /// Drops imaginary parts, failing if any exceeds `tol`.
    pub fn to_real(&self, tol: f64) -> Result<GroupFunction<f64>> {
        let mut out = Vec::with_capacity(self.len());
        for (element, v) in self.values.iter().enumerate() {
            let imag = v.imaginary();
            if imag.abs() > tol {
                return Err(Error::ComplexInput { element, imag });
            }
            out.push(v.real());
        }
        Ok(GroupFunction::new(out))
    }
}

impl GroupFunction<f64> {
    pub fn to_complex(&self) -> GroupFunction<Complex64> {
        GroupFunction::new(self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Splits `f = f_+ - f_-`; supports are the exact nonzero sets.
    pub fn sign_decompose(&self) -> SignDecomposition {
        let positive_part = GroupFunction::new(self.values.iter().map(|&v| v.max(0.0)).collect());
        let negative_part = GroupFunction::new(self.values.iter().map(|&v| (-v).max(0.0)).collect());
        let support = |f: &GroupFunction<f64>| {
            f.values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, _)| i)
                .collect()
        };
        SignDecomposition {
            support_plus: support(&positive_part),
            support_minus: support(&negative_part),
            positive_part,
            negative_part,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignDecomposition {
    pub positive_part: GroupFunction<f64>,
    pub negative_part: GroupFunction<f64>,
    pub support_plus: Vec<usize>,
    pub support_minus: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdVerdict {
    pub verdict: bool,
    pub min_eigenvalue: f64,
}

/// A subset of the group together with its verified structural flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSubset {
    pub members: Vec<usize>,
    pub symmetric: bool,
    pub bi_invariant: bool,
}

impl GroupSubset {
    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn cyclic_table() {
        let g = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(g.order(), 4);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.mul(a, b), (a + b) % 4);
            }
        }
        assert!(g.is_abelian());
    }

    #[test]
    fn dihedral_three_is_s3() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        assert_eq!(d3.order(), 6);
        assert!(!d3.is_abelian());
        let s3 = FiniteGroup::symmetric(3).unwrap();
        // Same order statistics: one identity, three involutions, two of order 3.
        let mut od: Vec<usize> = (0..6).map(|x| d3.element_order(x)).collect();
        let mut os: Vec<usize> = (0..6).map(|x| s3.element_order(x)).collect();
        od.sort();
        os.sort();
        assert_eq!(od, os);
        assert_eq!(d3.center(), vec![0]);
    }

    #[test]
    fn non_latin_table_rejected() {
        let table = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(
            FiniteGroup::from_table("bad", table),
            Err(Error::NotLatinSquare(_))
        ));
    }

    #[test]
    fn non_associative_table_names_triple() {
        // A Latin square with identity 0 that is not associative (order-5 loop).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match FiniteGroup::from_table("loop", table) {
            Err(Error::NonAssociative { a, b, c }) => assert!(a < 5 && b < 5 && c < 5),
            other => panic!("expected NonAssociative, got {other:?}"),
        }
    }

    #[test]
    fn generators() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(z4.subgroup_from_generators(&[2]).unwrap().elements(), &[0, 2]);
        assert_eq!(z4.subgroup_from_generators(&[]).unwrap().elements(), &[0]);
        assert!(matches!(
            z4.subgroup_from_generators(&[7]),
            Err(Error::OutOfRange { index: 7, order: 4 })
        ));
        let d3 = FiniteGroup::dihedral(3).unwrap();
        assert_eq!(d3.subgroup_from_generators(&[3]).unwrap().order(), 2);
    }

    #[test]
    fn convolution_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let one = GroupFunction::constant(4, 1.0);
        assert_eq!(z4.convolve(&one, &one).unwrap(), one);

        let g = GroupFunction::new(vec![0.3, -1.0, 2.0, 0.5]);
        let delta = GroupFunction::point(4, 0, 4.0);
        let r = z4.convolve(&delta, &g).unwrap();
        assert!(r.distance(&g) < 1e-15);

        // Direct summation oracle for indicator{0,1} * indicator{0,1}.
        let f = GroupFunction::<f64>::indicator(4, &[0, 1]);
        let conv = z4.convolve(&f, &f).unwrap();
        for x in 0..4 {
            let expected: f64 = (0..4)
                .map(|y| f.values[y] * f.values[(x + 4 - y) % 4])
                .sum::<f64>()
                / 4.0;
            assert!(close(conv.values[x], expected));
        }
        assert_eq!(conv.values, vec![0.25, 0.5, 0.25, 0.0]);
        assert!(matches!(
            z4.convolve(&f, &GroupFunction::constant(3, 1.0)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn involution_examples() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let f = GroupFunction::point(6, 1, 1.0);
        assert_eq!(d3.involution(&f).unwrap(), GroupFunction::point(6, 2, 1.0));
        let c = GroupFunction::new((0..6).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect());
        assert_eq!(d3.involution(&d3.involution(&c).unwrap()).unwrap(), c);
        let sym = GroupFunction::new(vec![1.0, 0.5, 0.5, 0.2, 0.2, 0.2]);
        assert_eq!(d3.involution(&sym).unwrap(), sym);
    }

    #[test]
    fn autocorrelation_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let f = GroupFunction::<f64>::indicator(4, &[0, 1]);
        let a = z4.autocorrelate(&f).unwrap();
        // (1/4) * #{y in {0,1}: y - x in {0,1}}
        assert_eq!(a.values, vec![0.5, 0.25, 0.0, 0.25]);
        assert!(z4.is_positive_definite(&a, None).unwrap().verdict);
        let one = GroupFunction::constant(4, 1.0);
        assert_eq!(z4.autocorrelate(&one).unwrap(), one);
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let p = GroupFunction::point(6, 4, 6.0);
        assert!(d3.autocorrelate(&p).unwrap().distance(&GroupFunction::point(6, 0, 6.0)) < 1e-14);
    }

    #[test]
    fn k_projection_examples() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let k = d3.subgroup_from_generators(&[3]).unwrap();
        let f = GroupFunction::point(6, 1, 1.0);
        let fk = d3.project_k(&k, &f).unwrap();
        // Direct double-sum oracle.
        for g in 0..6 {
            let mut count = 0.0;
            for &a in k.elements() {
                for &b in k.elements() {
                    if d3.mul(d3.mul(a, g), b) == 1 {
                        count += 1.0;
                    }
                }
            }
            assert!(close(fk.values[g], count / 4.0));
        }
        // K r K = {r, r^2, s r, s r^2} (all non-K elements), each hit once.
        assert_eq!(fk.values, vec![0.0, 0.25, 0.25, 0.0, 0.25, 0.25]);
        assert!(d3.project_k(&k, &fk).unwrap().distance(&fk) < 1e-15);
        let triv = d3.trivial_subgroup();
        assert_eq!(d3.project_k(&triv, &f).unwrap(), f);
        assert!(close(d3.integrate(&fk), d3.integrate(&f)));
    }

    #[test]
    fn positive_definiteness_examples() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let one = GroupFunction::constant(3, 1.0);
        let v = z3.is_positive_definite(&one, None).unwrap();
        assert!(v.verdict);
        assert!(v.min_eigenvalue.abs() < 1e-12);
        let delta = GroupFunction::point(3, 0, 3.0);
        let v = z3.is_positive_definite(&delta, None).unwrap();
        assert!(v.verdict && close(v.min_eigenvalue, 3.0));
        // Gram is J - 2I... eigenvalues: circulant with first row (1,-1,-1)
        // gives 1 - 2 = -1 (trivial character) and 1 + 1 = 2 (twice).
        let bad = GroupFunction::new(vec![1.0, -1.0, -1.0]);
        let v = z3.is_positive_definite(&bad, None).unwrap();
        assert!(!v.verdict);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!(z3.is_positive_definite_exact(&[
            BigRational::from_integer(1.into()),
            BigRational::from_integer((-1).into()),
            BigRational::from_integer((-1).into()),
        ])
        .map(|b| !b)
        .unwrap());
    }

    #[test]
    fn non_hermitian_reported_distinctly() {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let f = GroupFunction::new(vec![1.0, 0.5, 0.0]);
        assert!(matches!(
            z3.is_positive_definite(&f, None),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn quadratic_form_examples() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let one = GroupFunction::constant(6, 1.0);
        let phi = GroupFunction::new(vec![0.1, -0.4, 2.0, 0.0, 1.5, -0.3]);
        let mean: f64 = phi.values.iter().sum::<f64>() / 6.0;
        assert!((d3.quadratic_form(&one, &phi).unwrap() - mean * mean).abs() < 1e-14);

        let z3 = FiniteGroup::cyclic(3).unwrap();
        let bad = GroupFunction::new(vec![1.0, -1.0, -1.0]);
        let w = z3.negative_witness(&bad, 1e-9).unwrap().expect("witness");
        assert!(z3.quadratic_form(&bad, &w).unwrap() < 0.0);
    }

    #[test]
    fn sign_decomposition() {
        let f = GroupFunction::new(vec![1.0, -1.0]);
        let d = f.sign_decompose();
        assert_eq!(d.positive_part.values, vec![1.0, 0.0]);
        assert_eq!(d.negative_part.values, vec![0.0, 1.0]);
        assert_eq!(d.support_plus, vec![0]);
        assert_eq!(d.support_minus, vec![1]);
        let neg = f.scale(-1.0).sign_decompose();
        assert_eq!(neg.positive_part, d.negative_part);
        assert_eq!(neg.negative_part, d.positive_part);
        let nonneg = GroupFunction::new(vec![0.0, 2.0, 1.0]).sign_decompose();
        assert!(nonneg.support_minus.is_empty());
        let c = GroupFunction::new(vec![Complex64::new(1.0, 0.5)]);
        assert!(matches!(c.to_real(1e-12), Err(Error::ComplexInput { .. })));
    }

    #[test]
    fn subsets_and_closure() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        let k = d3.subgroup_from_generators(&[3]).unwrap();
        let s = d3.validate_subset(&k, k.elements()).unwrap();
        assert!(s.symmetric && s.bi_invariant);

        let z4 = FiniteGroup::cyclic(4).unwrap();
        let triv = z4.trivial_subgroup();
        let s = z4.validate_subset(&triv, &[1]).unwrap();
        assert!(!s.symmetric && s.bi_invariant);
        assert_eq!(z4.biinvariant_symmetric_closure(&triv, &[1]).unwrap().members, vec![1, 3]);

        // Enumerate K r K ∪ K r^-1 K by brute force.
        let mut expected = vec![];
        for y in [1, d3.inv(1)] {
            for &a in k.elements() {
                for &b in k.elements() {
                    expected.push(d3.mul(d3.mul(a, y), b));
                }
            }
        }
        expected.sort();
        expected.dedup();
        let c = d3.biinvariant_symmetric_closure(&k, &[1]).unwrap();
        assert_eq!(c.members, expected);
        assert!(c.symmetric && c.bi_invariant);
    }

    #[test]
    fn subgroup_validation() {
        let z6 = FiniteGroup::cyclic(6).unwrap();
        assert!(z6.subgroup(&[0, 2, 4]).is_ok());
        assert!(matches!(z6.subgroup(&[0, 1]), Err(Error::NotSubgroup(_))));
        let h = z6.subgroup(&[0, 3]).unwrap();
        let r = z6.restrict_to(&h).unwrap();
        assert_eq!(r.order(), 2);
        assert_eq!(r.mul(1, 1), 0);
    }

    #[test]
    fn products_and_symmetric() {
        let s4 = FiniteGroup::symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
        let p = FiniteGroup::build(&GroupDescriptor::Product(vec![
            GroupDescriptor::Cyclic(2),
            GroupDescriptor::Dihedral(3),
        ]))
        .unwrap();
        assert_eq!(p.order(), 12);
        assert_eq!(p.center().len(), 2);
        assert!(FiniteGroup::symmetric(7).is_err());
    }
}
