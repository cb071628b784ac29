//! The Delsarte extremal problem on a finite pair `(G, K)`:
//! maximize `∫ f` over real positive definite K-bi-invariant `f` with
//! `f(e) = 1`, `f <= 0` off `U` and `f >= 0` off `V`.
//!
//! For a Gelfand pair the positive definite cone is generated by the real
//! parts of the spherical functions, which turns the problem into a small LP.

use std::sync::Arc;

use num::{BigRational, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gelfand::{
    self, BiInvariantFunction, DoubleCosetPartition, RealSphericalBasis, SphericalCoeffs, SphericalTable,
};
use crate::group::{FiniteGroup, GroupFunction, GroupSubset, Subgroup};
use crate::homspace;
use crate::lp::{self, CertificateReport, LpProblem, LpScalar, LpSolution, Status};
use crate::rational;

/// Largest number of real spherical generators handled by vertex enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 6;

const RECOGNIZE_MAX_DEN: i64 = 10_000;
const RECOGNIZE_TOL: f64 = 1e-10;
const CHECK_TOL: f64 = 1e-9;
const KERNEL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    All,
    Empty,
    Explicit(Vec<usize>),
}

/// How raw `U`, `V` are turned into symmetric K-bi-invariant sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// Reject sets that are not already symmetric and bi-invariant.
    Strict,
    /// Replace a set by `K (S ∪ S^-1) K`.
    Close,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// Exact when every spherical value is certified rational, float otherwise.
    Auto,
    Float,
    Rational,
}

#[derive(Clone, Debug)]
pub struct DelsarteInstance {
    pub group: Arc<FiniteGroup>,
    pub k: Subgroup,
    pub partition: Arc<DoubleCosetPartition>,
    pub u: GroupSubset,
    pub v: GroupSubset,
    pub gelfand: bool,
}

impl DelsarteInstance {
    pub fn class_in_u(&self, j: usize) -> bool {
        self.u.contains(self.partition.classes[j][0])
    }

    pub fn class_in_v(&self, j: usize) -> bool {
        self.v.contains(self.partition.classes[j][0])
    }
}

fn resolve(group: &FiniteGroup, k: &Subgroup, spec: &SetSpec, closure: Closure, name: &str) -> Result<GroupSubset> {
    let raw: Vec<usize> = match spec {
        SetSpec::All => (0..group.order()).collect(),
        SetSpec::Empty => Vec::new(),
        SetSpec::Explicit(v) => v.clone(),
    };
    let set = match closure {
        Closure::Strict => group.validate_subset(k, &raw)?,
        Closure::Close => group.biinvariant_symmetric_closure(k, &raw)?,
    };
    if !set.symmetric {
        return Err(Error::InvalidInstance(format!("{name} is not symmetric")));
    }
    if !set.bi_invariant {
        return Err(Error::InvalidInstance(format!("{name} is not K-bi-invariant")));
    }
    Ok(set)
}

pub fn make_instance(group: &FiniteGroup, k: &Subgroup, u: &SetSpec, v: &SetSpec, closure: Closure) -> Result<DelsarteInstance> {
    let u = resolve(group, k, u, closure, "U")?;
    if !u.contains(group.identity()) {
        return Err(Error::InvalidInstance("U must contain the identity".into()));
    }
    let v = resolve(group, k, v, closure, "V")?;
    let partition = gelfand::double_cosets(group, k)?;
    let gelfand = partition.is_commutative();
    Ok(DelsarteInstance {
        group: partition.group_arc(),
        k: k.clone(),
        partition,
        u,
        v,
        gelfand,
    })
}

/// Turán instance: `V = U`.
pub fn turan_instance(group: &FiniteGroup, k: &Subgroup, u: &SetSpec, closure: Closure) -> Result<DelsarteInstance> {
    make_instance(group, k, u, u, closure)
}

#[derive(Clone, Debug)]
pub struct FeasibleFunction {
    pub w: Vec<usize>,
    pub f: BiInvariantFunction<f64>,
    pub value: f64,
}

fn products_within(group: &FiniteGroup, w: &[usize], u: &GroupSubset) -> bool {
    w.iter().all(|&a| w.iter().all(|&b| u.contains(group.mul(a, group.inv(b)))))
}

/// `f = (1_W * 1_W*)^K / f(e)`, which lies in the admissible class whenever
/// `W W^-1 ⊂ U`. Without `W`, one is grown greedily from `{e}` by adding the
/// smallest element (with its inverse) that keeps `W W^-1 ⊂ U`.
pub fn feasible_autocorrelation(inst: &DelsarteInstance, w: Option<&[usize]>) -> Result<FeasibleFunction> {
    let group = &inst.group;
    let n = group.order();
    let w: Vec<usize> = match w {
        Some(w) => {
            if w.is_empty() {
                return Err(Error::InvalidInstance("W must be non-empty".into()));
            }
            let mut w = w.to_vec();
            w.sort_unstable();
            w.dedup();
            if let Some(&x) = w.iter().find(|&&x| x >= n) {
                return Err(Error::OutOfRange { index: x, order: n });
            }
            if !products_within(group, &w, &inst.u) {
                return Err(Error::InvalidInstance("W W^-1 is not contained in U".into()));
            }
            w
        }
        None => {
            let mut w = vec![group.identity()];
            for x in 0..n {
                if w.contains(&x) {
                    continue;
                }
                let mut cand = w.clone();
                cand.push(x);
                if group.inv(x) != x {
                    cand.push(group.inv(x));
                }
                if products_within(group, &cand, &inst.u) {
                    w = cand;
                }
            }
            w.sort_unstable();
            w
        }
    };
    let ind = GroupFunction::indicator(n, &w);
    let auto = group.autocorrelate(&ind)?;
    let proj = group.project_k(&inst.k, &auto)?;
    let at_e = proj.values[group.identity()];
    let f = BiInvariantFunction::from_function(Arc::clone(&inst.partition), &proj.scale(1.0 / at_e), 1e-12)?;
    let value = f.integral();
    Ok(FeasibleFunction { w, f, value })
}

/// Real spherical generators recognized as exact rationals, if that succeeds
/// and the recognized values satisfy the defining eigen-relations exactly.
pub fn exact_basis(partition: &DoubleCosetPartition, basis: &RealSphericalBasis) -> Option<Vec<Vec<BigRational>>> {
    let s = partition.num_classes();
    let mut exact = Vec::with_capacity(basis.functions.len());
    for phi in &basis.functions {
        let row: Option<Vec<BigRational>> = phi
            .iter()
            .map(|&x| rational::recognize(x, RECOGNIZE_MAX_DEN, RECOGNIZE_TOL))
            .collect();
        let row = row?;
        if row[0] != rational::one() {
            return None;
        }
        for j in 0..s {
            if row[j] != row[partition.inverse_class[j]] {
                return None;
            }
        }
        exact.push(row);
    }
    for i in 0..exact.len() {
        for j in 0..i {
            if exact[i] == exact[j] {
                return None;
            }
        }
    }
    let n = BigRational::from_integer(partition.group().order().into());
    for phi in &exact {
        for a in 0..s {
            let astar = partition.inverse_class[a];
            let hs: Vec<usize> = if astar == a { vec![a] } else { vec![a, astar] };
            // (phi * h)_c = (1/n) sum_{x, b} phi_x h_b count(x, b, c)
            let conv: Vec<BigRational> = (0..s)
                .map(|c| {
                    let mut acc = BigRational::zero();
                    for (x, px) in phi.iter().enumerate() {
                        if px.is_zero() {
                            continue;
                        }
                        for &b in &hs {
                            let cnt = partition.structure_count(x, b, c);
                            if cnt != 0 {
                                acc += px * BigRational::from_integer(cnt.into());
                            }
                        }
                    }
                    acc / &n
                })
                .collect();
            let lambda = conv[0].clone();
            if (0..s).any(|c| conv[c] != &lambda * &phi[c]) {
                return None;
            }
        }
    }
    Some(exact)
}

/// The LP over generator weights `a_o`.
fn build_lp<T: LpScalar>(inst: &DelsarteInstance, phi: &[Vec<T>], trivial: usize) -> LpProblem<T> {
    let s = phi.len();
    let mut objective = vec![T::zero(); s];
    objective[trivial] = T::one();
    let mut p = LpProblem::new(objective);
    p.add_eq(vec![T::one(); s], T::one());
    for j in 0..inst.partition.num_classes() {
        let row: Vec<T> = phi.iter().map(|f| f[j].clone()).collect();
        if !inst.class_in_u(j) {
            p.add_le(row.clone(), T::zero());
        }
        if !inst.class_in_v(j) {
            p.add_ge(row, T::zero());
        }
    }
    p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelsarteChecks {
    pub normalized: bool,
    pub sign_constraints: bool,
    pub bochner: bool,
    pub gram_pd: bool,
    pub integral_matches: bool,
    pub certificate: bool,
    /// Kernel-side constant on `G/K` equals the group-side optimum.
    pub kernel_matches: bool,
}

impl DelsarteChecks {
    pub fn all(&self) -> bool {
        self.normalized
            && self.sign_constraints
            && self.bochner
            && self.gram_pd
            && self.integral_matches
            && self.certificate
            && self.kernel_matches
    }
}

#[derive(Clone, Debug)]
pub struct DelsarteSolution {
    pub value: f64,
    /// Exact optimum when solved in rational arithmetic.
    pub exact_value: Option<BigRational>,
    pub extremal: BiInvariantFunction<f64>,
    pub extremal_exact: Option<Vec<BigRational>>,
    /// Weights of the real spherical generators.
    pub weights: Vec<f64>,
    pub coeffs: SphericalCoeffs,
    pub lp: LpProblem<f64>,
    pub dual_certificate: LpSolution<f64>,
    pub certificate: CertificateReport,
    pub kernel_value: f64,
    pub mode: SolveMode,
    pub checks: DelsarteChecks,
    pub table: SphericalTable,
}

fn solve_exact(inst: &DelsarteInstance, exact: &[Vec<BigRational>], trivial: usize) -> Result<(LpProblem<f64>, LpSolution<BigRational>, CertificateReport)> {
    let p = build_lp(inst, exact, trivial);
    let sol = lp::solve(&p)?;
    if sol.status != Status::Optimal {
        return Err(Error::Internal(format!("Delsarte LP status {:?}", sol.status)));
    }
    let cert = lp::certificate_report(&p, &sol);
    Ok((p.map(rational::to_f64), sol, cert))
}

/// Solves the instance on a Gelfand pair and verifies the optimum
/// independently on the group and on `G/K`.
pub fn solve_delsarte(inst: &DelsarteInstance, mode: SolveMode, seed: u64) -> Result<DelsarteSolution> {
    if !inst.gelfand {
        return Err(Error::InvalidInstance(
            "(G, K) is not a Gelfand pair; optimization is unavailable, use check_feasibility".into(),
        ));
    }
    let table = SphericalTable::compute(Arc::clone(&inst.partition), seed)?;
    let basis = table.real_basis();
    let exact = match mode {
        SolveMode::Float => None,
        SolveMode::Auto => exact_basis(&inst.partition, &basis),
        SolveMode::Rational => Some(exact_basis(&inst.partition, &basis).ok_or_else(|| {
            Error::InvalidInstance("spherical functions are not rational; rational mode unavailable".into())
        })?),
    };
    let s = inst.partition.num_classes();
    let (lp_f64, sol, certificate, exact_value, extremal_exact, used) = match &exact {
        Some(ex) => {
            let (p, sol, cert) = solve_exact(inst, ex, basis.trivial)?;
            let f_exact: Vec<BigRational> = (0..s)
                .map(|j| {
                    sol.x
                        .iter()
                        .zip(ex)
                        .fold(BigRational::zero(), |acc, (a, phi)| acc + a * &phi[j])
                })
                .collect();
            let value = sol.objective_value.clone();
            (p, sol.to_f64(), cert, Some(value), Some(f_exact), SolveMode::Rational)
        }
        None => {
            let p = build_lp(inst, &basis.functions, basis.trivial);
            let sol = lp::solve(&p)?;
            if sol.status != Status::Optimal {
                return Err(Error::Internal(format!("Delsarte LP status {:?}", sol.status)));
            }
            let cert = lp::certificate_report(&p, &sol);
            (p, sol, cert, None, None, SolveMode::Float)
        }
    };
    let value = match &exact_value {
        Some(v) => rational::to_f64(v),
        None => sol.objective_value,
    };
    let coeffs_f: Vec<f64> = match &extremal_exact {
        Some(fx) => fx.iter().map(rational::to_f64).collect(),
        None => (0..s)
            .map(|j| sol.x.iter().zip(&basis.functions).map(|(a, phi)| a * phi[j]).sum())
            .collect(),
    };
    let extremal = BiInvariantFunction::new(Arc::clone(&inst.partition), coeffs_f)?;
    let coeffs = gelfand::spherical_transform(&extremal, &table)?;

    let report = check_feasibility(inst, &extremal)?;
    let bochner = gelfand::bochner_check(&extremal, &table, CHECK_TOL)?;
    let space = homspace::coset_space(&inst.group, &inst.k)?;
    let kernel = homspace::lift_j(&space, &extremal.expand())?;
    let kernel_value = homspace::kernel_diagnostics(&kernel).base_integral;
    let checks = DelsarteChecks {
        normalized: report.normalized,
        sign_constraints: report.sign_constraints,
        bochner,
        gram_pd: report.gram_pd,
        integral_matches: (report.integral - value).abs() < KERNEL_TOL,
        certificate: certificate.ok,
        kernel_matches: (kernel_value - value).abs() < KERNEL_TOL,
    };
    Ok(DelsarteSolution {
        value,
        exact_value,
        extremal,
        extremal_exact,
        weights: sol.x.clone(),
        coeffs,
        lp: lp_f64,
        dual_certificate: sol,
        certificate,
        kernel_value,
        mode: used,
        checks,
        table,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub normalized: bool,
    pub sign_constraints: bool,
    pub gram_pd: bool,
    pub min_gram_eigenvalue: f64,
    pub integral: f64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.normalized && self.sign_constraints && self.gram_pd
    }
}

/// Verify-only mode, available for every pair.
pub fn check_feasibility(inst: &DelsarteInstance, f: &BiInvariantFunction<f64>) -> Result<FeasibilityReport> {
    f.check_partition(&inst.partition)?;
    let scale = f.sup_norm().max(1.0);
    let normalized = (f.at_identity() - 1.0).abs() <= 1e-12 * scale;
    let sign_constraints = (0..inst.partition.num_classes()).all(|j| {
        let v = f.coeffs[j];
        (inst.class_in_u(j) || v <= CHECK_TOL * scale) && (inst.class_in_v(j) || v >= -CHECK_TOL * scale)
    });
    let verdict = inst.group.is_positive_definite(&f.expand(), None)?;
    Ok(FeasibilityReport {
        normalized,
        sign_constraints,
        gram_pd: verdict.verdict,
        min_gram_eigenvalue: verdict.min_eigenvalue,
        integral: f.integral(),
    })
}

/// Independent optimum by enumerating every vertex of the LP polytope.
pub fn brute_force_delsarte(inst: &DelsarteInstance, seed: u64) -> Result<f64> {
    if !inst.gelfand {
        return Err(Error::NotGelfand);
    }
    let table = SphericalTable::compute(Arc::clone(&inst.partition), seed)?;
    let basis = table.real_basis();
    let s = basis.functions.len();
    if s > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!("{s} generators; vertex enumeration handles at most {BRUTE_FORCE_LIMIT}")));
    }
    // Inequalities g.a >= 0.
    let mut ineq: Vec<Vec<f64>> = (0..s)
        .map(|o| {
            let mut r = vec![0.0; s];
            r[o] = 1.0;
            r
        })
        .collect();
    for j in 0..inst.partition.num_classes() {
        let row: Vec<f64> = basis.functions.iter().map(|f| f[j]).collect();
        if !inst.class_in_u(j) {
            ineq.push(row.iter().map(|v| -v).collect());
        }
        if !inst.class_in_v(j) {
            ineq.push(row);
        }
    }
    let mut best: Option<f64> = None;
    let mut chosen = Vec::with_capacity(s);
    enumerate_subsets(ineq.len(), s - 1, 0, &mut chosen, &mut |active| {
        let mut system: Vec<Vec<f64>> = vec![vec![1.0; s]];
        let mut rhs = vec![1.0];
        for &i in active {
            system.push(ineq[i].clone());
            rhs.push(0.0);
        }
        if let Some(a) = gauss_solve(system, rhs) {
            let feasible = (a.iter().sum::<f64>() - 1.0).abs() < 1e-9
                && ineq.iter().all(|r| r.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() >= -1e-9);
            if feasible {
                let v = a[basis.trivial];
                if best.map_or(true, |b| v > b) {
                    best = Some(v);
                }
            }
        }
    });
    best.ok_or_else(|| Error::Internal("no feasible vertex found".into()))
}

fn enumerate_subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        visit(chosen);
        return;
    }
    for i in start..n {
        if n - i < k - chosen.len() {
            break;
        }
        chosen.push(i);
        enumerate_subsets(n, k, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` for (near) singular systems.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictExtendReport {
    pub h_order: usize,
    pub g_order: usize,
    /// Optimum of the instance restricted to `H`, in `H`'s own Haar measure.
    pub value_h: f64,
    pub value_g: f64,
    /// `∫_G` of the zero extension, `(|H|/|G|) value_h`.
    pub extension_value: f64,
    pub extension_feasible: bool,
    /// `value_g >= extension_value` within tolerance.
    pub inequality_holds: bool,
    /// `V ⊇ G \ H`.
    pub v_covers_complement: bool,
    /// `value_g = (|H|/|G|) value_h` within tolerance.
    pub equality_holds: bool,
}

/// Solves the instance inside `H ⊇ K ∪ U` and inside `G`, extends the
/// `H`-extremal by zero and checks it in `G`.
pub fn restrict_extend_roundtrip(inst: &DelsarteInstance, h: &Subgroup, mode: SolveMode, seed: u64) -> Result<RestrictExtendReport> {
    let group = &inst.group;
    if h.parent_order() != group.order() {
        return Err(Error::NotSubgroup("H belongs to a different group".into()));
    }
    if !inst.k.is_subset_of(h) {
        return Err(Error::InvalidInstance("K is not contained in H".into()));
    }
    if !inst.u.members.iter().all(|&x| h.contains(x)) {
        return Err(Error::InvalidInstance("U is not contained in H".into()));
    }
    let hg = group.restrict_to(h)?;
    let to_h = |x: usize| h.elements().binary_search(&x).expect("member of H");
    let k_h = hg.subgroup(&inst.k.elements().iter().map(|&x| to_h(x)).collect::<Vec<_>>())?;
    let u_h: Vec<usize> = inst.u.members.iter().map(|&x| to_h(x)).collect();
    let v_h: Vec<usize> = inst.v.members.iter().filter(|&&x| h.contains(x)).map(|&x| to_h(x)).collect();
    let inst_h = make_instance(&hg, &k_h, &SetSpec::Explicit(u_h), &SetSpec::Explicit(v_h), Closure::Strict)?;
    let sol_h = solve_delsarte(&inst_h, mode, seed)?;
    let sol_g = solve_delsarte(inst, mode, seed)?;

    let ext_values: Vec<f64> = (0..group.order())
        .map(|x| if h.contains(x) { sol_h.extremal.expand().values[to_h(x)] } else { 0.0 })
        .collect();
    let ext = BiInvariantFunction::from_function(Arc::clone(&inst.partition), &GroupFunction::new(ext_values), 0.0)?;
    let feas = check_feasibility(inst, &ext)?;
    let ratio = h.order() as f64 / group.order() as f64;
    let extension_value = ext.integral();
    let v_covers_complement = (0..group.order()).all(|x| h.contains(x) || inst.v.contains(x));
    Ok(RestrictExtendReport {
        h_order: h.order(),
        g_order: group.order(),
        value_h: sol_h.value,
        value_g: sol_g.value,
        extension_value,
        extension_feasible: feas.feasible(),
        inequality_holds: sol_g.value >= extension_value - CHECK_TOL,
        v_covers_complement,
        equality_holds: (sol_g.value - ratio * sol_h.value).abs() <= CHECK_TOL,
    })
}
