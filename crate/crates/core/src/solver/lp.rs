//! Dense two-phase revised simplex with certificates.
//!
//! Programs are stated in a general form (rows `<=`, `=`, `>=`; variables
//! nonnegative or free; maximize or minimize) and rewritten internally as
//! `min c'x, Ax = b, x >= 0, b >= 0`: free variables are split, every
//! inequality gets a slack, rows with negative right-hand side are negated,
//! and rows without a usable slack get an artificial variable.
//!
//! The basis inverse is kept explicitly and updated by elementary row
//! operations; it is recomputed from scratch every [`REFACTOR_EVERY`] pivots.
//! Pricing is partial (a rotating window of columns, most negative reduced
//! cost in the window); after a run of degenerate pivots the solver switches
//! to Bland's smallest-index rule until the objective moves again.
//!
//! Every outcome carries a certificate that is checkable on the original
//! program: an optimal primal/dual pair, a Farkas multiplier vector, or a
//! feasible point plus an improving ray.

use crate::error::{Error, Result};
use crate::tolerance::tolerances;

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables and no rows.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.bounds[j] = VarBound::Free;
        self
    }

    pub fn set_all_free(&mut self) -> &mut Self {
        self.bounds.iter_mut().for_each(|b| *b = VarBound::Free);
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedProgram("non-finite objective".into()));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "row {i} has {} coefficients for {n} variables",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedProgram(format!("row {i} is not finite")));
            }
        }
        Ok(())
    }

    /// `sum_j coeffs_j x_j` for row `i`.
    pub fn row_activity(&self, i: usize, x: &[f64]) -> f64 {
        self.constraints[i]
            .coeffs
            .iter()
            .zip(x)
            .map(|(a, v)| a * v)
            .sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Optimal primal/dual pair.
///
/// Dual sign convention (maximize): `y_i >= 0` on `<=` rows, `y_i <= 0` on
/// `>=` rows, `A'y >= c` on nonnegative variables and `= c` on free ones,
/// `b'y = objective`. For minimize every inequality above flips.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
}

/// Multipliers `y` with `y_i >= 0` on `<=` rows, `y_i <= 0` on `>=` rows,
/// `A'y >= 0` on nonnegative variables, `A'y = 0` on free ones and `b'y < 0`.
/// Summing the rows with these weights yields `0 <= b'y < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<f64>,
}

/// A feasible point and a direction along which the objective improves
/// without bound while every row stays satisfied.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovingRay {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal(Optimum),
    Infeasible(FarkasCertificate),
    Unbounded(ImprovingRay),
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal(_) => LpStatus::Optimal,
            LpSolution::Infeasible(_) => LpStatus::Infeasible,
            LpSolution::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn into_optimum(self) -> Option<Optimum> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Rotating window of columns, Bland's rule after degenerate stalls.
    Partial,
    /// Bland's smallest-index rule throughout.
    Bland,
    /// Most negative reduced cost over all columns, no anti-cycling fallback.
    Dantzig,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub pricing: Pricing,
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pricing: Pricing::Partial,
            max_iterations: None,
        }
    }
}

/// Solve with default options.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    Simplex::new(SimplexOptions::default()).solve(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    /// Original variable `j`, with sign +1 or -1 (negative half of a split).
    Structural(usize, i8),
    /// Slack or surplus of row `i`.
    Slack(usize),
    Artificial(usize),
}

/// Working state for one solve. Not shared between threads.
pub struct Simplex {
    options: SimplexOptions,
    // standard form
    m: usize,
    cols: Vec<Vec<f64>>,
    kinds: Vec<ColumnKind>,
    b: Vec<f64>,
    cost2: Vec<f64>,
    row_sign: Vec<f64>,
    first_artificial: usize,
    // basis
    basis: Vec<usize>,
    in_basis: Vec<Option<usize>>,
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    price_start: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize, Vec<f64>),
}

impl Simplex {
    pub fn new(options: SimplexOptions) -> Self {
        Simplex {
            options,
            m: 0,
            cols: Vec::new(),
            kinds: Vec::new(),
            b: Vec::new(),
            cost2: Vec::new(),
            row_sign: Vec::new(),
            first_artificial: 0,
            basis: Vec::new(),
            in_basis: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            since_refactor: 0,
            iterations: 0,
            price_start: 0,
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn solve(&mut self, lp: &LinearProgram) -> Result<LpSolution> {
        lp.check()?;
        self.build(lp);
        let tol = tolerances();

        // Phase one: drive the artificials to zero.
        let cost1: Vec<f64> = self
            .kinds
            .iter()
            .map(|k| matches!(k, ColumnKind::Artificial(_)) as u8 as f64)
            .collect();
        if self.first_artificial < self.cols.len() {
            match self.run_phase(&cost1, true)? {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded(..) => {
                    return Err(Error::NumericalBreakdown(
                        "phase one reported an unbounded ray".into(),
                    ))
                }
            }
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&j, _)| j >= self.first_artificial)
                .map(|(_, &v)| v.max(0.0))
                .sum();
            let scale = 1.0 + self.b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if infeasibility > tol.feasibility * scale {
                let y = self.duals(&cost1);
                let multipliers = (0..self.m).map(|i| -y[i] * self.row_sign[i]).collect();
                return Ok(LpSolution::Infeasible(FarkasCertificate { multipliers }));
            }
            self.drive_out_artificials()?;
        }

        let cost2 = self.cost2.clone();
        match self.run_phase(&cost2, false)? {
            PhaseEnd::Optimal => {
                let x = self.original_primal(lp.num_vars());
                let y_std = self.duals(&cost2);
                let flip = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
                let dual: Vec<f64> = (0..self.m)
                    .map(|i| flip * y_std[i] * self.row_sign[i])
                    .collect();
                let objective = lp.objective_value(&x);
                Ok(LpSolution::Optimal(Optimum {
                    primal: x,
                    dual,
                    objective,
                }))
            }
            PhaseEnd::Unbounded(q, alpha) => {
                let point = self.original_primal(lp.num_vars());
                let mut direction = vec![0.0; lp.num_vars()];
                let mut add = |col: usize, amount: f64| {
                    if let ColumnKind::Structural(j, s) = self.kinds[col] {
                        direction[j] += s as f64 * amount;
                    }
                };
                add(q, 1.0);
                for (r, &a) in alpha.iter().enumerate() {
                    add(self.basis[r], -a);
                }
                Ok(LpSolution::Unbounded(ImprovingRay { point, direction }))
            }
        }
    }

    fn build(&mut self, lp: &LinearProgram) {
        let m = lp.constraints.len();
        self.m = m;
        self.cols.clear();
        self.kinds.clear();
        self.row_sign = lp
            .constraints
            .iter()
            .map(|r| if r.rhs < 0.0 { -1.0 } else { 1.0 })
            .collect();
        self.b = lp
            .constraints
            .iter()
            .zip(&self.row_sign)
            .map(|(r, s)| s * r.rhs)
            .collect();
        let obj_sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut cost = Vec::new();
        for j in 0..lp.num_vars() {
            let col: Vec<f64> = (0..m)
                .map(|i| self.row_sign[i] * lp.constraints[i].coeffs[j])
                .collect();
            if lp.bounds[j] == VarBound::Free {
                self.cols.push(col.iter().map(|a| -a).collect());
                self.kinds.push(ColumnKind::Structural(j, -1));
                cost.push(-obj_sign * lp.objective[j]);
            }
            self.cols.push(col);
            self.kinds.push(ColumnKind::Structural(j, 1));
            cost.push(obj_sign * lp.objective[j]);
        }
        let mut initial: Vec<Option<usize>> = vec![None; m];
        for (i, row) in lp.constraints.iter().enumerate() {
            let e = match row.relation {
                Relation::Le => 1.0,
                Relation::Ge => -1.0,
                Relation::Eq => continue,
            };
            let mut col = vec![0.0; m];
            col[i] = self.row_sign[i] * e;
            if col[i] > 0.0 {
                initial[i] = Some(self.cols.len());
            }
            self.cols.push(col);
            self.kinds.push(ColumnKind::Slack(i));
            cost.push(0.0);
        }
        self.first_artificial = self.cols.len();
        for (i, slot) in initial.iter_mut().enumerate() {
            if slot.is_none() {
                let mut col = vec![0.0; m];
                col[i] = 1.0;
                *slot = Some(self.cols.len());
                self.cols.push(col);
                self.kinds.push(ColumnKind::Artificial(i));
                cost.push(0.0);
            }
        }
        self.cost2 = cost;
        self.basis = initial.into_iter().map(|s| s.unwrap()).collect();
        self.in_basis = vec![None; self.cols.len()];
        for (r, &j) in self.basis.iter().enumerate() {
            self.in_basis[j] = Some(r);
        }
        // The initial basis is the identity.
        self.binv = (0..m)
            .map(|i| (0..m).map(|k| (i == k) as u8 as f64).collect())
            .collect();
        self.xb = self.b.clone();
        self.since_refactor = 0;
        self.iterations = 0;
        self.price_start = 0;
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                for (yi, bi) in y.iter_mut().zip(&self.binv[r]) {
                    *yi += cb * bi;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        cost[j] - self.cols[j].iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let a = &self.cols[j];
        self.binv
            .iter()
            .map(|row| row.iter().zip(a).map(|(x, y)| x * y).sum())
            .collect()
    }

    fn run_phase(&mut self, cost: &[f64], phase_one: bool) -> Result<PhaseEnd> {
        let tol = tolerances();
        let ncols = self.cols.len();
        let eligible_end = if phase_one { ncols } else { self.first_artificial };
        let max_iter = self
            .options
            .max_iterations
            .unwrap_or(200 * (self.m + ncols) + 1000);
        let window = ((eligible_end as f64).sqrt().ceil() as usize).max(16);
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(Error::NumericalBreakdown(format!(
                    "iteration limit {max_iter} reached"
                )));
            }
            let use_bland = match self.options.pricing {
                Pricing::Bland => true,
                Pricing::Partial => degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND,
                Pricing::Dantzig => false,
            };
            let y = self.duals(cost);
            let dj_tol = tol.feasibility;
            let mut entering: Option<(usize, f64)> = None;
            if use_bland {
                for j in 0..eligible_end {
                    if self.in_basis[j].is_none() {
                        let d = self.reduced_cost(j, cost, &y);
                        if d < -dj_tol {
                            entering = Some((j, d));
                            break;
                        }
                    }
                }
            } else if self.options.pricing == Pricing::Dantzig || eligible_end <= window {
                for j in 0..eligible_end {
                    if self.in_basis[j].is_none() {
                        let d = self.reduced_cost(j, cost, &y);
                        if d < -dj_tol && entering.is_none_or(|(_, best)| d < best) {
                            entering = Some((j, d));
                        }
                    }
                }
            } else {
                // Scan windows starting where the last scan stopped; take the
                // best candidate of the first window that has one.
                let mut scanned = 0;
                let mut j = self.price_start % eligible_end;
                while scanned < eligible_end {
                    let stop = (scanned + window).min(eligible_end);
                    while scanned < stop {
                        if self.in_basis[j].is_none() {
                            let d = self.reduced_cost(j, cost, &y);
                            if d < -dj_tol && entering.is_none_or(|(_, best)| d < best) {
                                entering = Some((j, d));
                            }
                        }
                        j = (j + 1) % eligible_end;
                        scanned += 1;
                    }
                    if entering.is_some() {
                        break;
                    }
                }
                self.price_start = j;
            }
            let Some((q, _)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            let alpha = self.column(q);
            let mut leave: Option<(usize, f64)> = None;
            for (r, &a) in alpha.iter().enumerate() {
                if a > tol.feasibility {
                    let ratio = self.xb[r].max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            let better = if tie {
                                match (use_bland, self.options.pricing) {
                                    (true, _) => self.basis[r] < self.basis[br],
                                    // Textbook rule: first row wins ties.
                                    (false, Pricing::Dantzig) => false,
                                    (false, _) => a > alpha[br],
                                }
                            } else {
                                ratio < bratio
                            };
                            if better {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((r, theta)) = leave else {
                return Ok(PhaseEnd::Unbounded(q, alpha));
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(q, r, &alpha, theta)?;
        }
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[f64], theta: f64) -> Result<()> {
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        let ar = alpha[r];
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|v| v / ar).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = alpha[i];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.binv[r] = pivot_row;
        let old = self.basis[r];
        self.in_basis[old] = None;
        self.basis[r] = q;
        self.in_basis[q] = Some(r);
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Recompute the basis inverse and basic values by Gauss-Jordan
    /// elimination with partial pivoting.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let pivot_tol = tolerances().pivot;
        let mut a: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row: Vec<f64> = self.basis.iter().map(|&j| self.cols[j][i]).collect();
                row.extend((0..m).map(|k| (i == k) as u8 as f64));
                row
            })
            .collect();
        for c in 0..m {
            let p = (c..m)
                .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
                .unwrap();
            if a[p][c].abs() < pivot_tol {
                return Err(Error::NumericalBreakdown(format!(
                    "basis matrix is singular (pivot {:e})",
                    a[p][c]
                )));
            }
            a.swap(p, c);
            let inv = 1.0 / a[c][c];
            a[c].iter_mut().for_each(|v| *v *= inv);
            let pivot_row = a[c].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != c {
                    let f = row[c];
                    if f != 0.0 {
                        for (v, pv) in row.iter_mut().zip(&pivot_row) {
                            *v -= f * pv;
                        }
                    }
                }
            }
        }
        self.binv = a.into_iter().map(|row| row[m..].to_vec()).collect();
        self.xb = self
            .binv
            .iter()
            .map(|row| row.iter().zip(&self.b).map(|(x, y)| x * y).sum())
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    /// Pivot basic artificials (at zero level) out in favour of any
    /// non-artificial column with a nonzero entry in their row. Rows where no
    /// such column exists are redundant; their artificial stays basic at zero.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let tol = tolerances();
        for r in 0..self.m {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_artificial {
                if self.in_basis[j].is_some() {
                    continue;
                }
                let v: f64 = self.binv[r]
                    .iter()
                    .zip(&self.cols[j])
                    .map(|(x, y)| x * y)
                    .sum();
                if v.abs() > tol.feasibility && best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.column(j);
                let theta = self.xb[r] / alpha[r];
                self.pivot(j, r, &alpha, theta)?;
            }
        }
        Ok(())
    }

    fn original_primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (r, &j) in self.basis.iter().enumerate() {
            if let ColumnKind::Structural(v, s) = self.kinds[j] {
                x[v] += s as f64 * self.xb[r];
            }
        }
        x
    }
}

/// Residuals of a claimed optimum, for verification.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Primal infeasibility, dual infeasibility and duality gap of a solution,
/// measured on the original program.
pub fn residuals(lp: &LinearProgram, opt: &Optimum) -> Residuals {
    let max = lp.sense == Sense::Maximize;
    let mut primal = 0.0_f64;
    for (j, b) in lp.bounds.iter().enumerate() {
        if *b == VarBound::NonNegative {
            primal = primal.max(-opt.primal[j]);
        }
    }
    for (i, row) in lp.constraints.iter().enumerate() {
        let act = lp.row_activity(i, &opt.primal);
        let viol = match row.relation {
            Relation::Le => act - row.rhs,
            Relation::Ge => row.rhs - act,
            Relation::Eq => (act - row.rhs).abs(),
        };
        primal = primal.max(viol);
    }
    let mut dual = 0.0_f64;
    for (i, row) in lp.constraints.iter().enumerate() {
        let y = opt.dual[i];
        // maximize: y >= 0 on Le, y <= 0 on Ge; minimize flips.
        let wrong = match (row.relation, max) {
            (Relation::Le, true) | (Relation::Ge, false) => -y,
            (Relation::Ge, true) | (Relation::Le, false) => y,
            (Relation::Eq, _) => 0.0,
        };
        dual = dual.max(wrong);
    }
    for j in 0..lp.num_vars() {
        let aty: f64 = lp
            .constraints
            .iter()
            .zip(&opt.dual)
            .map(|(r, y)| r.coeffs[j] * y)
            .sum();
        let diff = aty - lp.objective[j];
        let viol = match (lp.bounds[j], max) {
            (VarBound::Free, _) => diff.abs(),
            (VarBound::NonNegative, true) => -diff,
            (VarBound::NonNegative, false) => diff,
        };
        dual = dual.max(viol);
    }
    let dual_obj: f64 = lp
        .constraints
        .iter()
        .zip(&opt.dual)
        .map(|(r, y)| r.rhs * y)
        .sum();
    Residuals {
        primal,
        dual,
        gap: (dual_obj - opt.objective).abs(),
    }
}

/// Check a Farkas certificate against the original program. Returns the
/// value `b'y` (negative for a valid certificate) when every sign condition
/// holds within `tol`.
pub fn farkas_value(lp: &LinearProgram, cert: &FarkasCertificate, tol: f64) -> Option<f64> {
    let y = &cert.multipliers;
    for (row, &yi) in lp.constraints.iter().zip(y) {
        let ok = match row.relation {
            Relation::Le => yi >= -tol,
            Relation::Ge => yi <= tol,
            Relation::Eq => true,
        };
        if !ok {
            return None;
        }
    }
    for j in 0..lp.num_vars() {
        let aty: f64 = lp
            .constraints
            .iter()
            .zip(y)
            .map(|(r, yi)| r.coeffs[j] * yi)
            .sum();
        let ok = match lp.bounds[j] {
            VarBound::NonNegative => aty >= -tol,
            VarBound::Free => aty.abs() <= tol,
        };
        if !ok {
            return None;
        }
    }
    Some(lp.constraints.iter().zip(y).map(|(r, yi)| r.rhs * yi).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 3.0);
        let opt = solve_lp(&lp).unwrap().into_optimum().unwrap();
        assert!((opt.primal[0] - 3.0).abs() < 1e-12);
        assert!((opt.objective - 3.0).abs() < 1e-12);
        assert!((opt.dual[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, -1.0);
        match solve_lp(&lp).unwrap() {
            LpSolution::Infeasible(cert) => {
                let v = farkas_value(&lp, &cert, 1e-12).expect("sign conditions");
                assert!(v < 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 1.0);
        match solve_lp(&lp).unwrap() {
            LpSolution::Unbounded(ray) => {
                let d = &ray.direction;
                assert!(d.iter().all(|&v| v >= -1e-12));
                assert!(d[0] - d[1] <= 1e-12);
                assert!(d[0] + d[1] > 0.0);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y  s.t. x - y = -2, x + y >= 1, x free, y >= 0.
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.set_free(0);
        lp.add(vec![1.0, -1.0], Relation::Eq, -2.0);
        lp.add(vec![1.0, 1.0], Relation::Ge, 1.0);
        let opt = solve_lp(&lp).unwrap().into_optimum().unwrap();
        assert!((opt.objective - 1.0).abs() < 1e-12);
        let r = residuals(&lp, &opt);
        assert!(r.primal < 1e-12 && r.dual < 1e-12 && r.gap < 1e-12, "{r:?}");
    }

    #[test]
    fn program_with_no_variables() {
        let mut lp = LinearProgram::minimize(vec![]);
        lp.add(vec![], Relation::Eq, 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status(), LpStatus::Optimal);
        let mut lp = LinearProgram::minimize(vec![]);
        lp.add(vec![], Relation::Eq, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status(), LpStatus::Infeasible);
    }

    #[test]
    fn malformed_programs_are_rejected() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add(vec![1.0, 2.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedProgram(_))));
        let lp = LinearProgram::minimize(vec![f64::NAN]);
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedProgram(_))));
    }

    /// Beale's cycling example. Dantzig's rule with largest-coefficient
    /// ties cycles here; the anti-cycling variants must terminate at the
    /// optimum 1/20, attained at x = (1/25, 0, 1, 0).
    fn beale() -> LinearProgram {
        let mut lp = LinearProgram::maximize(vec![0.75, -150.0, 0.02, -6.0]);
        lp.add(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        lp
    }

    #[test]
    fn beale_terminates_under_bland_and_partial() {
        for pricing in [Pricing::Bland, Pricing::Partial] {
            let mut s = Simplex::new(SimplexOptions {
                pricing,
                max_iterations: Some(10_000),
            });
            let opt = s.solve(&beale()).unwrap().into_optimum().unwrap();
            assert!((opt.objective - 0.05).abs() < 1e-12, "{pricing:?} {opt:?}");
        }
    }

    #[test]
    fn beale_cycles_under_plain_dantzig() {
        let mut s = Simplex::new(SimplexOptions {
            pricing: Pricing::Dantzig,
            max_iterations: Some(200),
        });
        assert!(matches!(
            s.solve(&beale()),
            Err(Error::NumericalBreakdown(_))
        ));
    }
}
