//! Maximal elements of finite menus, scalarization bounds on them, and
//! approximate affine cores of arbitrary preference oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{mix, ProbMeasure, Weights};
use crate::numeric::dot;
use crate::preorder::{compare, comparison_slack, expectation_gaps, weakly_prefers, ComparisonResult, UtilityFamily};
use crate::separation::{represent, PreferenceCone};
use crate::solver::{solve_lp, LinearProgram, LpSolution, Relation};
use crate::space::{lipschitz_number, MetricSpace};
use crate::tolerance::tolerances;

/// Indices of the menu items that no other item strictly beats.
pub fn max_set(menu: &[ProbMeasure], fam: &UtilityFamily) -> Result<Vec<usize>> {
    if menu.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    let mut out = Vec::new();
    'items: for i in 0..menu.len() {
        for j in 0..menu.len() {
            if i != j && compare(fam, &menu[j], &menu[i])? == ComparisonResult::StrictBetter {
                continue 'items;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// Menu items not beaten by any mixture of menu items: the maximal elements
/// of the convex hull that happen to be on the menu.
pub fn max_set_convex(menu: &[ProbMeasure], fam: &UtilityFamily) -> Result<Vec<usize>> {
    if menu.is_empty() {
        return Err(Error::EmptyChoiceSet);
    }
    let values = utility_table(menu, fam);
    let m = menu.len();
    let mut out = Vec::new();
    for k in 0..m {
        // max sum_u (E_u(pi) - E_u(P_k)) over mixtures pi with
        // E_u(pi) >= E_u(P_k) for every u.
        let obj: Vec<f64> = (0..m).map(|j| values.iter().map(|row| row[j]).sum()).collect();
        let mut lp = LinearProgram::maximize(obj);
        lp.add(vec![1.0; m], Relation::Eq, 1.0);
        for (row, u) in values.iter().zip(fam.members()) {
            lp.add(row.clone(), Relation::Ge, row[k] - comparison_slack(u));
        }
        let gain = match solve_lp(&lp)? {
            LpSolution::Optimal(opt) => opt.objective - values.iter().map(|row| row[k]).sum::<f64>(),
            _ => 0.0,
        };
        let slack: f64 = fam.members().iter().map(comparison_slack).sum();
        if gain <= slack {
            out.push(k);
        }
    }
    Ok(out)
}

/// `values[u][j]` is the expected utility of menu item `j` under member `u`.
fn utility_table(menu: &[ProbMeasure], fam: &UtilityFamily) -> Vec<Vec<f64>> {
    fam.members()
        .iter()
        .map(|u| menu.iter().map(|p| dot(u.values(), p.weights())).collect())
        .collect()
}

/// A menu with a representing family and a second family whose members are
/// strictly increasing along the strict comparisons of the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceProblem {
    menu: Vec<ProbMeasure>,
    compact: UtilityFamily,
    proper: UtilityFamily,
}

impl ChoiceProblem {
    pub fn new(menu: Vec<ProbMeasure>, compact: UtilityFamily, proper: UtilityFamily) -> Result<Self> {
        if menu.is_empty() {
            return Err(Error::EmptyChoiceSet);
        }
        compact.space().ensure_same(proper.space())?;
        for p in &menu {
            compact.space().ensure_same(p.space())?;
        }
        for i in 0..menu.len() {
            for j in 0..menu.len() {
                if i != j
                    && compare(&compact, &menu[i], &menu[j])? == ComparisonResult::StrictBetter
                    && expectation_gaps(&proper, &menu[i], &menu[j])?.iter().any(|&g| g <= 0.0)
                {
                    return Err(Error::NotStrictlyIncreasing(i, j));
                }
            }
        }
        Ok(ChoiceProblem {
            menu,
            compact,
            proper,
        })
    }

    pub fn menu(&self) -> &[ProbMeasure] {
        &self.menu
    }

    pub fn compact(&self) -> &UtilityFamily {
        &self.compact
    }

    pub fn proper(&self) -> &UtilityFamily {
        &self.proper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarizationBounds {
    /// Union of the argmax sets of the strictly increasing members.
    pub lower: Vec<usize>,
    /// Items that maximize some convex combination of the representing
    /// members.
    pub upper: Vec<usize>,
    /// Union of the argmax sets of the representing members themselves.
    pub upper_members: Vec<usize>,
}

/// Every menu item within `u`'s comparison slack of the best value.
pub fn argmax_set(menu: &[ProbMeasure], u: &crate::space::LipschitzFunction) -> Vec<usize> {
    let vals: Vec<f64> = menu.iter().map(|p| dot(u.values(), p.weights())).collect();
    let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let eps = comparison_slack(u);
    (0..menu.len()).filter(|&j| vals[j] >= best - eps).collect()
}

fn union_of_argmax(menu: &[ProbMeasure], fam: &UtilityFamily) -> Vec<usize> {
    if fam.is_empty() {
        return (0..menu.len()).collect();
    }
    let mut hit = vec![false; menu.len()];
    for u in fam.members() {
        for j in argmax_set(menu, u) {
            hit[j] = true;
        }
    }
    (0..menu.len()).filter(|&j| hit[j]).collect()
}

/// Whether item `k` maximizes `sum_u s_u E_u` over the menu for some
/// weights `s` in the simplex: a feasibility program in `s`.
fn maximizes_some_combination(values: &[Vec<f64>], fam: &UtilityFamily, k: usize) -> Result<bool> {
    let nu = values.len();
    if nu == 0 {
        return Ok(true);
    }
    let m = values[0].len();
    let mut lp = LinearProgram::minimize(vec![0.0; nu]);
    lp.add(vec![1.0; nu], Relation::Eq, 1.0);
    let slack: Vec<f64> = fam.members().iter().map(comparison_slack).collect();
    for j in 0..m {
        if j != k {
            let row = (0..nu).map(|u| values[u][j] - values[u][k] - slack[u]).collect();
            lp.add(row, Relation::Le, 0.0);
        }
    }
    Ok(solve_lp(&lp)?.status() == crate::solver::LpStatus::Optimal)
}

/// Bounds on the maximal set. `lower` is always maximal. Every item that is
/// maximal over the convex hull of the menu lies in `upper`; an item that
/// is maximal only among the listed items may not (see
/// `unsupported_maximal_item` below).
pub fn scalarization_bounds(problem: &ChoiceProblem) -> Result<ScalarizationBounds> {
    let menu = &problem.menu;
    let lower = if problem.proper.is_empty() {
        Vec::new()
    } else {
        union_of_argmax(menu, &problem.proper)
    };
    let upper_members = union_of_argmax(menu, &problem.compact);
    let values = utility_table(menu, &problem.compact);
    let mut upper = Vec::new();
    for k in 0..menu.len() {
        if maximizes_some_combination(&values, &problem.compact, k)? {
            upper.push(k);
        }
    }
    Ok(ScalarizationBounds {
        lower,
        upper,
        upper_members,
    })
}

/// Anything that ranks pairs of lotteries on one space.
pub trait PreferenceOracle: Sync {
    fn space(&self) -> &MetricSpace;
    fn weakly_prefers(&self, p: &ProbMeasure, q: &ProbMeasure) -> Result<bool>;
}

impl PreferenceOracle for UtilityFamily {
    fn space(&self) -> &MetricSpace {
        UtilityFamily::space(self)
    }

    fn weakly_prefers(&self, p: &ProbMeasure, q: &ProbMeasure) -> Result<bool> {
        weakly_prefers(self, p, q)
    }
}

/// A functional of a lottery built from expected utilities by taking
/// minima and maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `p ↦ ∫u dp` for the given values of `u`.
    Linear(Vec<f64>),
    MinOf(Vec<Functional>),
    MaxOf(Vec<Functional>),
}

impl Functional {
    pub fn eval(&self, w: &[f64]) -> f64 {
        match self {
            Functional::Linear(u) => dot(u, w),
            Functional::MinOf(fs) => fs.iter().map(|f| f.eval(w)).fold(f64::INFINITY, f64::min),
            Functional::MaxOf(fs) => fs.iter().map(|f| f.eval(w)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            Functional::Linear(u) => {
                if u.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: u.len(),
                    });
                }
                if u.iter().any(|x| !x.is_finite()) {
                    return Err(Error::PreconditionViolated("functional value is not finite".into()));
                }
                Ok(())
            }
            Functional::MinOf(fs) | Functional::MaxOf(fs) => {
                if fs.is_empty() {
                    return Err(Error::EmptyFamily);
                }
                fs.iter().try_for_each(|f| f.check(n))
            }
        }
    }

    /// Largest Lipschitz number among the linear leaves; a bound on the
    /// functional's Lipschitz constant with respect to `W₁`.
    pub fn lipschitz_bound(&self, space: &MetricSpace) -> Result<f64> {
        match self {
            Functional::Linear(u) => lipschitz_number(u, space),
            Functional::MinOf(fs) | Functional::MaxOf(fs) => fs
                .iter()
                .map(|f| f.lipschitz_bound(space))
                .try_fold(0.0_f64, |m, l| Ok(m.max(l?))),
        }
    }
}

/// `p ≿ q` iff every criterion gives `p` at least the value of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalOracle {
    space: MetricSpace,
    criteria: Vec<Functional>,
    bounds: Vec<f64>,
}

impl FunctionalOracle {
    /// `declared_bound`, when given, is checked against difference
    /// quotients on Dirac pairs; otherwise the leaf bound is used.
    pub fn new(space: &MetricSpace, criteria: Vec<Functional>, declared_bound: Option<f64>) -> Result<Self> {
        let mut bounds = Vec::with_capacity(criteria.len());
        for c in &criteria {
            c.check(space.len())?;
            bounds.push(match declared_bound {
                Some(b) => b,
                None => c.lipschitz_bound(space)?,
            });
        }
        let oracle = FunctionalOracle {
            space: space.clone(),
            criteria,
            bounds,
        };
        oracle.check_lipschitz()?;
        Ok(oracle)
    }

    pub fn criteria(&self) -> &[Functional] {
        &self.criteria
    }

    /// Sampled check of each criterion's bound on every pair of Diracs.
    pub fn check_lipschitz(&self) -> Result<()> {
        let n = self.space.len();
        for (c, &bound) in self.criteria.iter().zip(&self.bounds) {
            let at: Vec<f64> = (0..n)
                .map(|x| {
                    let mut w = vec![0.0; n];
                    w[x] = 1.0;
                    c.eval(&w)
                })
                .collect();
            for x in 0..n {
                for y in (x + 1)..n {
                    let quotient = (at[x] - at[y]).abs() / self.space.dist(x, y);
                    if quotient > bound * (1.0 + 1e-9) + 1e-12 {
                        return Err(Error::OracleNotLipschitz { quotient, bound });
                    }
                }
            }
        }
        Ok(())
    }
}

impl PreferenceOracle for FunctionalOracle {
    fn space(&self) -> &MetricSpace {
        &self.space
    }

    fn weakly_prefers(&self, p: &ProbMeasure, q: &ProbMeasure) -> Result<bool> {
        self.space.ensure_same(p.space())?;
        self.space.ensure_same(q.space())?;
        let tol = tolerances().comparison;
        let diam = self.space.diameter();
        Ok(self.criteria.iter().zip(&self.bounds).all(|(c, l)| {
            c.eval(p.weights()) >= c.eval(q.weights()) - tol * (1.0 + l * diam)
        }))
    }
}

/// Outcome of the mixture test for one pair. Passing is necessary for the
/// pair to be in the affine core, not sufficient: only finitely many probes
/// and mixing weights are tried.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreTest {
    pub holds: bool,
    /// Always `true`; the test over-approximates the affine core.
    pub approximate: bool,
    /// First probe index and mixing weight at which the oracle refused.
    pub failing_probe: Option<(usize, f64)>,
}

/// Every Dirac on the space followed by the given menu.
pub fn default_probes(space: &MetricSpace, menu: &[ProbMeasure]) -> Vec<ProbMeasure> {
    let mut probes: Vec<ProbMeasure> = (0..space.len()).map(|x| ProbMeasure::dirac(space, x)).collect();
    probes.extend(menu.iter().cloned());
    probes
}

/// Mixing weights `k/8` for `k = 0..8`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..8).map(|k| k as f64 / 8.0).collect()
}

/// Whether the oracle ranks `p ⊕λ r ≿ q ⊕λ r` for every probe `r` and
/// every grid weight `λ`.
pub fn affine_core_approx<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    p: &ProbMeasure,
    q: &ProbMeasure,
    probes: &[ProbMeasure],
    lambda_grid: &[f64],
) -> Result<CoreTest> {
    for &lambda in lambda_grid {
        if lambda == 0.0 {
            if !oracle.weakly_prefers(p, q)? {
                return Ok(CoreTest {
                    holds: false,
                    approximate: true,
                    failing_probe: Some((0, 0.0)),
                });
            }
            continue;
        }
        for (i, r) in probes.iter().enumerate() {
            if !oracle.weakly_prefers(&mix(p, r, lambda)?, &mix(q, r, lambda)?)? {
                return Ok(CoreTest {
                    holds: false,
                    approximate: true,
                    failing_probe: Some((i, lambda)),
                });
            }
        }
    }
    Ok(CoreTest {
        holds: true,
        approximate: true,
        failing_probe: None,
    })
}

/// Declare every panel comparison that passes the mixture test as a cone
/// generator, then represent that cone on the panel.
pub fn affine_core_represent<O: PreferenceOracle + ?Sized>(
    oracle: &O,
    panel: &[(ProbMeasure, ProbMeasure)],
    probes: &[ProbMeasure],
    lambda_grid: &[f64],
) -> Result<UtilityFamily> {
    let space = oracle.space();
    let mut declared = Vec::new();
    for (p, q) in panel {
        for (a, b) in [(p, q), (q, p)] {
            if affine_core_approx(oracle, a, b, probes, lambda_grid)?.holds {
                declared.push((a.clone(), b.clone()));
            }
        }
    }
    let cone = PreferenceCone::from_pairs(space, &declared)?;
    represent(&cone, panel)
}
