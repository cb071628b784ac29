//! Dense two-phase simplex with Bland's rule, generic over `f64` and exact
//! rationals, returning primal solutions together with dual certificates.
//!
//! Problem form: maximize `c.x` subject to `A_eq x = b_eq`, `A_le x <= b_le`
//! and `x >= lb`.

use std::fmt::Debug;

use num::{BigRational, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational;

/// Arithmetic needed by the simplex.
pub trait LpScalar: Clone + Debug + PartialOrd + num::Num + Signed {
    /// Magnitudes at or below this are treated as zero.
    fn eps() -> Self;
    /// Largest phase-one objective still accepted as feasible.
    fn feasibility_tol() -> Self;
    fn to_f64_lossy(&self) -> f64;
    /// Replaces round-off noise by an exact zero.
    fn snap(self) -> Self;
    /// Smallest admissible pivot magnitude and Harris ratio slack; zero means
    /// the textbook ratio test with Bland tie-breaking.
    fn pivot_tol() -> Self;
    fn harris_slack() -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::eps()
    }
    fn is_neg(&self) -> bool {
        *self < -Self::eps()
    }
    fn is_negligible(&self) -> bool {
        self.abs() <= Self::eps()
    }
}

impl LpScalar for f64 {
    fn eps() -> Self {
        1e-10
    }
    fn feasibility_tol() -> Self {
        1e-8
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn snap(self) -> Self {
        if self.abs() < 1e-12 {
            0.0
        } else {
            self
        }
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn harris_slack() -> Self {
        1e-10
    }
}

impl LpScalar for BigRational {
    fn eps() -> Self {
        BigRational::zero()
    }
    fn feasibility_tol() -> Self {
        BigRational::zero()
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn snap(self) -> Self {
        self
    }
    fn pivot_tol() -> Self {
        BigRational::zero()
    }
    fn harris_slack() -> Self {
        BigRational::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    pub a_eq: Vec<Vec<T>>,
    pub b_eq: Vec<T>,
    pub a_le: Vec<Vec<T>>,
    pub b_le: Vec<T>,
    pub lower: Vec<T>,
}

impl<T: LpScalar> LpProblem<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let lower = vec![T::zero(); objective.len()];
        LpProblem {
            objective,
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            a_le: Vec::new(),
            b_le: Vec::new(),
            lower,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        self
    }

    pub fn add_le(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.a_le.push(row);
        self.b_le.push(rhs);
        self
    }

    /// `row.x >= rhs`, stored as `-row.x <= -rhs`.
    pub fn add_ge(&mut self, row: Vec<T>, rhs: T) -> &mut Self {
        self.add_le(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    pub fn set_lower(&mut self, j: usize, value: T) -> &mut Self {
        self.lower[j] = value;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let bad = |what: &str| Err(Error::Dimension(what.to_string()));
        if self.lower.len() != n {
            return bad("lower bound length");
        }
        if self.a_eq.len() != self.b_eq.len() || self.a_le.len() != self.b_le.len() {
            return bad("row count differs from right-hand side length");
        }
        if self.a_eq.iter().chain(&self.a_le).any(|r| r.len() != n) {
            return bad("constraint row length differs from variable count");
        }
        let all = self
            .objective
            .iter()
            .chain(&self.b_eq)
            .chain(&self.b_le)
            .chain(&self.lower)
            .chain(self.a_eq.iter().flatten())
            .chain(self.a_le.iter().flatten());
        for v in all {
            if !v.to_f64_lossy().is_finite() {
                return Err(Error::InvalidInstance("non-finite LP coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn map<U: LpScalar>(&self, f: impl Fn(&T) -> U) -> LpProblem<U> {
        let mv = |v: &Vec<T>| v.iter().map(&f).collect::<Vec<U>>();
        LpProblem {
            objective: mv(&self.objective),
            a_eq: self.a_eq.iter().map(mv).collect(),
            b_eq: mv(&self.b_eq),
            a_le: self.a_le.iter().map(mv).collect(),
            b_le: mv(&self.b_le),
            lower: mv(&self.lower),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: Status,
    pub x: Vec<T>,
    /// Multipliers of the equality rows (free sign).
    pub dual_eq: Vec<T>,
    /// Multipliers of the `<=` rows (nonnegative).
    pub dual_le: Vec<T>,
    /// `c - A^T y`; nonpositive at an optimum, zero where `x_j > lb_j`.
    pub reduced_costs: Vec<T>,
    pub objective_value: T,
    pub dual_objective: T,
}

impl<T: LpScalar> LpSolution<T> {
    fn status_only(status: Status) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            dual_eq: Vec::new(),
            dual_le: Vec::new(),
            reduced_costs: Vec::new(),
            objective_value: T::zero(),
            dual_objective: T::zero(),
        }
    }

    pub fn to_f64(&self) -> LpSolution<f64> {
        let mv = |v: &Vec<T>| v.iter().map(|x| x.to_f64_lossy()).collect();
        LpSolution {
            status: self.status,
            x: mv(&self.x),
            dual_eq: mv(&self.dual_eq),
            dual_le: mv(&self.dual_le),
            reduced_costs: mv(&self.reduced_costs),
            objective_value: self.objective_value.to_f64_lossy(),
            dual_objective: self.dual_objective.to_f64_lossy(),
        }
    }
}

fn dot<T: LpScalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

struct Tableau<T> {
    /// `rows x (cols + 1)`, the last column is the right-hand side.
    t: Vec<Vec<T>>,
    basis: Vec<usize>,
    cols: usize,
}

enum Pivot {
    Optimal,
    Unbounded,
    IterationLimit,
}

const MAX_PIVOTS: usize = 200_000;

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = (v.clone() / p.clone()).snap();
        }
        self.t[r][c] = T::one();
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = (v.clone() - f.clone() * pv.clone()).snap();
                }
            }
            row[c] = T::zero();
            let b = &mut row[self.cols];
            if *b < T::zero() && *b >= -T::feasibility_tol() {
                *b = T::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Two-pass Harris ratio test: bound the step with slightly relaxed
    /// ratios, then take the largest pivot within the bound. In exact
    /// arithmetic this is the minimum ratio with Bland tie-breaking.
    fn ratio_test(&self, c: usize) -> Option<usize> {
        let rhs = |i: usize| {
            let v = &self.t[i][self.cols];
            if *v < T::zero() {
                T::zero()
            } else {
                v.clone()
            }
        };
        let exact = T::harris_slack().is_zero();
        let mut bound: Option<T> = None;
        for i in 0..self.t.len() {
            let a = &self.t[i][c];
            if *a <= T::pivot_tol() || a.is_zero() {
                continue;
            }
            let r = (rhs(i) + T::harris_slack()) / a.clone();
            if bound.as_ref().map_or(true, |b| r < *b) {
                bound = Some(r);
            }
        }
        let bound = bound?;
        let mut best: Option<usize> = None;
        for i in 0..self.t.len() {
            let a = &self.t[i][c];
            if *a <= T::pivot_tol() || a.is_zero() || rhs(i) / a.clone() > bound {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) if exact => self.basis[i] < self.basis[b],
                Some(b) => *a > self.t[b][c] || (*a == self.t[b][c] && self.basis[i] < self.basis[b]),
            };
            if better {
                best = Some(i);
            }
        }
        best
    }

    /// Maximizes `cost.x` over the current basis; `allowed` masks columns
    /// that may enter.
    fn optimize(&mut self, cost: &[T], allowed: &[bool]) -> Pivot {
        for _ in 0..MAX_PIVOTS {
            // Reduced costs d_j = c_j - c_B B^-1 A_j.
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() {
                        d = d - cost[b].clone() * self.t[i][j].clone();
                    }
                }
                if d.is_pos() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Pivot::Optimal;
            };
            let leave = self.ratio_test(c);
            match leave {
                None => return Pivot::Unbounded,
                Some(r) => self.pivot(r, c),
            }
        }
        Pivot::IterationLimit
    }
}

/// Solves the square system with the given rows by partial pivoting; `None`
/// if singular.
fn solve_square<T: LpScalar>(rows: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let k = rows.len();
    let mut m: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let mut row = rows[i].clone();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..k {
        let mut best = None;
        for (r, row) in m.iter().enumerate().skip(col) {
            let mag = row[col].abs();
            if !row[col].is_zero() && best.as_ref().map_or(true, |(_, b): &(usize, T)| mag > *b) {
                best = Some((r, mag));
            }
        }
        let (r, _) = best?;
        m.swap(col, r);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("rhs column")).collect())
}

/// Solves the LP. Infeasibility and unboundedness are statuses, not errors.
pub fn solve<T: LpScalar>(p: &LpProblem<T>) -> Result<LpSolution<T>> {
    p.validate()?;
    let n = p.num_vars();
    let m_eq = p.a_eq.len();
    let m_le = p.a_le.len();
    let m = m_eq + m_le;
    // Shift x = lb + x'. Rows: equality rows, then <= rows with slack.
    let rows: Vec<&Vec<T>> = p.a_eq.iter().chain(&p.a_le).collect();
    let rhs: Vec<T> = p
        .b_eq
        .iter()
        .chain(&p.b_le)
        .zip(&rows)
        .map(|(b, r)| b.clone() - dot(r, &p.lower))
        .collect();
    // Columns: n structural, m_le slacks, then artificials.
    let slack0 = n;
    let art0 = n + m_le;
    let mut sign = vec![T::one(); m];
    let mut needs_art = vec![true; m];
    for i in 0..m {
        if rhs[i] < T::zero() {
            sign[i] = -T::one();
        }
        if i >= m_eq && sign[i] > T::zero() {
            needs_art[i] = false;
        }
    }
    let art_index: Vec<Option<usize>> = {
        let mut next = art0;
        needs_art
            .iter()
            .map(|&a| {
                if a {
                    next += 1;
                    Some(next - 1)
                } else {
                    None
                }
            })
            .collect()
    };
    let cols = art0 + needs_art.iter().filter(|&&a| a).count();
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![T::zero(); cols + 1];
        for j in 0..n {
            row[j] = sign[i].clone() * rows[i][j].clone();
        }
        if i >= m_eq {
            row[slack0 + i - m_eq] = sign[i].clone();
        }
        row[cols] = sign[i].clone() * rhs[i].clone();
        match art_index[i] {
            Some(a) => {
                row[a] = T::one();
                basis.push(a);
            }
            None => basis.push(slack0 + i - m_eq),
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, cols };

    // Phase 1: maximize -sum(artificials).
    let mut cost1 = vec![T::zero(); cols];
    for a in art0..cols {
        cost1[a] = -T::one();
    }
    let all = vec![true; cols];
    if let Pivot::IterationLimit = tab.optimize(&cost1, &all) {
        return Err(Error::Internal("simplex iteration limit in phase one".into()));
    }
    let infeasibility = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .fold(T::zero(), |acc, (i, _)| acc + tab.t[i][cols].clone());
    if infeasibility > T::feasibility_tol() {
        return Ok(LpSolution::status_only(Status::Infeasible));
    }
    // Drive artificials out of the basis; drop redundant rows.
    let mut redundant = vec![false; m];
    for i in 0..m {
        if tab.basis[i] < art0 {
            continue;
        }
        // Largest available entry keeps the swap well conditioned.
        let mut entering: Option<usize> = None;
        for j in 0..art0 {
            if tab.t[i][j].is_negligible() || tab.basis.contains(&j) {
                continue;
            }
            if entering.map_or(true, |e| tab.t[i][j].abs() > tab.t[i][e].abs()) {
                entering = Some(j);
            }
        }
        match entering {
            Some(j) => tab.pivot(i, j),
            None => redundant[i] = true,
        }
    }
    let keep: Vec<usize> = (0..m).filter(|&i| !redundant[i]).collect();
    tab.t = keep.iter().map(|&i| tab.t[i].clone()).collect();
    tab.basis = keep.iter().map(|&i| tab.basis[i]).collect();

    // Phase 2.
    let mut cost2 = vec![T::zero(); cols];
    cost2[..n].clone_from_slice(&p.objective);
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(art0) {
        *a = false;
    }
    match tab.optimize(&cost2, &allowed) {
        Pivot::Optimal => {}
        Pivot::Unbounded => return Ok(LpSolution::status_only(Status::Unbounded)),
        Pivot::IterationLimit => return Err(Error::Internal("simplex iteration limit in phase two".into())),
    }

    let mut xs = vec![T::zero(); cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.t[i][cols].clone();
    }

    // Duals from B^T y = c_B on the signed standard-form rows that were kept.
    let column = |i: usize, j: usize| -> T {
        if j < n {
            sign[i].clone() * rows[i][j].clone()
        } else if j < art0 {
            if i >= m_eq && j - slack0 == i - m_eq {
                sign[i].clone()
            } else {
                T::zero()
            }
        } else if art_index[i] == Some(j) {
            T::one()
        } else {
            T::zero()
        }
    };
    let bcols: Vec<Vec<T>> = tab
        .basis
        .iter()
        .map(|&b| keep.iter().map(|&i| column(i, b)).collect())
        .collect();
    let cb: Vec<T> = tab.basis.iter().map(|&b| cost2[b].clone()).collect();
    // Recompute the basic values from the original data to shed drift.
    let brows: Vec<Vec<T>> = (0..keep.len()).map(|k| bcols.iter().map(|c| c[k].clone()).collect()).collect();
    let signed_rhs: Vec<T> = keep.iter().map(|&i| sign[i].clone() * rhs[i].clone()).collect();
    if let Some(xb) = solve_square(&brows, &signed_rhs) {
        let mut refined = vec![T::zero(); cols];
        for (k, &b) in tab.basis.iter().enumerate() {
            let v = xb[k].clone();
            refined[b] = if v < T::zero() && v >= -T::feasibility_tol() { T::zero() } else { v };
        }
        xs = refined;
    }
    // B^T y = c_B: the rows of B^T are the basic columns.
    let y_kept = solve_square(&bcols, &cb).ok_or_else(|| Error::Internal("singular final basis".into()))?;
    let mut y = vec![T::zero(); m];
    for (k, &i) in keep.iter().enumerate() {
        y[i] = sign[i].clone() * y_kept[k].clone();
    }
    let x: Vec<T> = (0..n).map(|j| p.lower[j].clone() + xs[j].clone()).collect();
    let reduced_costs: Vec<T> = (0..n)
        .map(|j| {
            let mut r = p.objective[j].clone();
            for i in 0..m {
                if !y[i].is_zero() {
                    r = r - y[i].clone() * rows[i][j].clone();
                }
            }
            r
        })
        .collect();
    let b_all: Vec<T> = p.b_eq.iter().chain(&p.b_le).cloned().collect();
    let dual_objective = dot(&b_all, &y) + dot(&p.lower, &reduced_costs);
    let objective_value = dot(&p.objective, &x);
    let dual_le = y.split_off(m_eq);
    Ok(LpSolution {
        status: Status::Optimal,
        x,
        dual_eq: y,
        dual_le,
        reduced_costs,
        objective_value,
        dual_objective,
    })
}

/// Solves a float problem in the requested arithmetic. Rational mode converts
/// every float coefficient exactly and reports the rational optimum rounded.
pub fn solve_lp(p: &LpProblem<f64>, mode: Mode) -> Result<LpSolution<f64>> {
    match mode {
        Mode::Float => solve(p),
        Mode::Rational => {
            p.validate()?;
            let exact = p.map(|v| rational::from_f64_exact(*v).expect("finite"));
            Ok(solve(&exact)?.to_f64())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
    pub objective_gap: f64,
    pub ok: bool,
}

/// Independently recomputes primal feasibility, dual feasibility,
/// complementary slackness and the duality gap. In exact arithmetic every
/// quantity must vanish.
pub fn certificate_report<T: LpScalar>(p: &LpProblem<T>, s: &LpSolution<T>) -> CertificateReport {
    let exact = T::eps().is_zero();
    let mut primal = T::zero();
    let mut dual = T::zero();
    let mut comp = T::zero();
    let bump = |acc: &mut T, v: T| {
        if v > *acc {
            *acc = v;
        }
    };
    let n = p.num_vars();
    if s.status != Status::Optimal || s.x.len() != n {
        return CertificateReport {
            primal_residual: f64::INFINITY,
            dual_residual: f64::INFINITY,
            complementarity: f64::INFINITY,
            objective_gap: f64::INFINITY,
            ok: false,
        };
    }
    for (row, b) in p.a_eq.iter().zip(&p.b_eq) {
        bump(&mut primal, (dot(row, &s.x) - b.clone()).abs());
    }
    for ((row, b), y) in p.a_le.iter().zip(&p.b_le).zip(&s.dual_le) {
        let slack = b.clone() - dot(row, &s.x);
        bump(&mut primal, -slack.clone());
        bump(&mut dual, -y.clone());
        bump(&mut comp, (slack * y.clone()).abs());
    }
    let mut rc = p.objective.clone();
    for (row, y) in p.a_eq.iter().zip(&s.dual_eq).chain(p.a_le.iter().zip(&s.dual_le)) {
        for j in 0..n {
            rc[j] = rc[j].clone() - y.clone() * row[j].clone();
        }
    }
    for j in 0..n {
        let gap = s.x[j].clone() - p.lower[j].clone();
        bump(&mut primal, -gap.clone());
        bump(&mut dual, rc[j].clone());
        bump(&mut comp, (rc[j].clone() * gap).abs());
    }
    let b_all: Vec<T> = p.b_eq.iter().chain(&p.b_le).cloned().collect();
    let y_all: Vec<T> = s.dual_eq.iter().chain(&s.dual_le).cloned().collect();
    let dual_obj = dot(&b_all, &y_all) + dot(&p.lower, &rc);
    let gap = (dot(&p.objective, &s.x) - dual_obj).abs();
    let f = |v: &T| v.to_f64_lossy();
    let ok = if exact {
        primal.is_zero() && dual.is_zero() && comp.is_zero() && gap.is_zero()
    } else {
        f(&primal) < 1e-9 && f(&dual) < 1e-9 && f(&comp) < 1e-9 && f(&gap) < 1e-8
    };
    CertificateReport {
        primal_residual: f(&primal),
        dual_residual: f(&dual),
        complementarity: f(&comp),
        objective_gap: f(&gap),
        ok,
    }
}

pub fn verify_certificate<T: LpScalar>(p: &LpProblem<T>, s: &LpSolution<T>) -> bool {
    certificate_report(p, s).ok
}
