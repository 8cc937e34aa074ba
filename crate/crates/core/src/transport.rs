//! Wasserstein-1 distance by two independent routes, and the KR norm.
//!
//! The primal route ships the excess of `p` over `q` to the deficit at
//! minimum cost (min-cost flow); the dual route maximizes `∫f d(p - q)` over
//! 1-Lipschitz potentials with the simplex. They share no code beyond the
//! metric, so their agreement is a real check.

use std::cmp::Ordering;

use crate::error::Result;
use crate::measure::{mix, ProbMeasure, SignedMeasure, Weights};
use crate::numeric::compensated_sum;
use crate::solver::{bipartite_edges, min_cost_flow, solve_lp, LinearProgram, LpSolution, Relation};
use crate::space::{LipschitzFunction, MetricSpace};
use crate::Error;

/// An optimal coupling of two probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `coupling[i][j]` is the mass moved from point `i` of `p` to point `j` of `q`.
    pub coupling: Vec<Vec<f64>>,
    pub cost: f64,
}

impl TransportPlan {
    pub fn row_sums(&self) -> Vec<f64> {
        self.coupling
            .iter()
            .map(|r| compensated_sum(r.iter().copied()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let n = self.coupling.len();
        (0..n)
            .map(|j| compensated_sum(self.coupling.iter().map(|r| r[j])))
            .collect()
    }
}

/// A 1-Lipschitz potential vanishing at the base point that attains the
/// dual optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct KantorovichPotential {
    pub f: LipschitzFunction,
    /// `∫f d(p - q)` at the optimum.
    pub value: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Optimal coupling of `p` and `q` by min-cost flow.
///
/// The pair is put in a canonical order before solving and the plan is
/// transposed back, so `w1_primal(p, q).cost == w1_primal(q, p).cost` holds
/// bit for bit.
pub fn w1_primal(p: &ProbMeasure, q: &ProbMeasure) -> Result<TransportPlan> {
    p.space().ensure_same(q.space())?;
    let swap = lex_cmp(p.weights(), q.weights()) == Ordering::Greater;
    let (a, b) = if swap { (q, p) } else { (p, q) };
    let mut plan = coupling(a.space(), a.weights(), b.weights())?;
    if swap {
        let n = plan.coupling.len();
        let t = (0..n)
            .map(|i| (0..n).map(|j| plan.coupling[j][i]).collect())
            .collect();
        plan.coupling = t;
    }
    Ok(plan)
}

fn coupling(space: &MetricSpace, a: &[f64], b: &[f64]) -> Result<TransportPlan> {
    let n = space.len();
    let mut plan = vec![vec![0.0; n]; n];
    for i in 0..n {
        plan[i][i] = a[i].min(b[i]);
    }
    let supplies: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sources: Vec<usize> = (0..n).filter(|&i| supplies[i] > 0.0).collect();
    let sinks: Vec<usize> = (0..n).filter(|&i| supplies[i] < 0.0).collect();
    if !sources.is_empty() && !sinks.is_empty() {
        let edges = bipartite_edges(&sources, &sinks, |i, j| space.dist(i, j));
        let flow = min_cost_flow(n, &supplies, &edges)?;
        for (e, f) in edges.iter().zip(&flow.flow) {
            plan[e.from][e.to] += f;
        }
    }
    let cost = compensated_sum(
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| plan[i][j] * space.dist(i, j)),
    );
    Ok(TransportPlan {
        coupling: plan,
        cost,
    })
}

/// `W₁(p, q)` by the primal route.
pub fn w1(p: &ProbMeasure, q: &ProbMeasure) -> Result<f64> {
    Ok(w1_primal(p, q)?.cost)
}

/// Maximize `∫f dμ` over `f` with `f_i - f_j <= d(i, j)` and `f_base = 0`.
fn potential_lp(space: &MetricSpace, mu: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = space.len();
    let base = space.base();
    let mut lp = LinearProgram::maximize(mu.to_vec());
    lp.set_all_free();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                row[j] = -1.0;
                lp.add(row, Relation::Le, space.dist(i, j));
            }
        }
    }
    let mut row = vec![0.0; n];
    row[base] = 1.0;
    lp.add(row, Relation::Eq, 0.0);
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => {
            let mut f = opt.primal;
            // Exact zero at the base; the solver leaves rounding there.
            let shift = f[base];
            f.iter_mut().for_each(|v| *v -= shift);
            Ok((opt.objective, f))
        }
        other => Err(Error::NumericalBreakdown(format!(
            "potential program reported {:?}",
            other.status()
        ))),
    }
}

/// Kantorovich potential of `(p, q)` by linear programming.
pub fn w1_dual(p: &ProbMeasure, q: &ProbMeasure) -> Result<KantorovichPotential> {
    p.space().ensure_same(q.space())?;
    let mu: Vec<f64> = p.weights().iter().zip(q.weights()).map(|(a, b)| a - b).collect();
    let (value, f) = potential_lp(p.space(), &mu)?;
    Ok(KantorovichPotential {
        f: LipschitzFunction::new(p.space(), f)?,
        value,
    })
}

/// KR norm of a zero-mass signed measure: split `μ = α(p - q)` by sign and
/// return `α W₁(p, q)`.
pub fn kr_norm(mu: &SignedMeasure) -> Result<f64> {
    mu.ensure_kr()?;
    match mu.jordan_split() {
        None => Ok(0.0),
        Some((alpha, p, q)) => Ok(alpha * w1(&p, &q)?),
    }
}

/// KR norm as the supremum of `∫f dμ` over 1-Lipschitz `f`, solved directly.
pub fn kr_norm_dual(mu: &SignedMeasure) -> Result<f64> {
    mu.ensure_kr()?;
    if mu.is_zero() {
        return Ok(0.0);
    }
    Ok(potential_lp(mu.space(), mu.weights())?.0)
}

/// Both sides of the common-component mixture identity for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureContraction {
    /// `W₁(p ⊕λ r, q ⊕λ r)`.
    pub mixed: f64,
    /// `(1 - λ) W₁(p, q)`.
    pub scaled: f64,
}

impl MixtureContraction {
    pub fn deviation(&self) -> f64 {
        (self.mixed - self.scaled).abs()
    }
}

/// Evaluate both sides of `W₁(p ⊕λ r, q ⊕λ r) = (1 - λ) W₁(p, q)`. The
/// mixed pair differs by `(1 - λ)(p - q)`, so on a finite space the two agree
/// up to the solver's rounding; this is measured, not assumed.
pub fn mixture_contraction(
    p: &ProbMeasure,
    q: &ProbMeasure,
    r: &ProbMeasure,
    lambda: f64,
) -> Result<MixtureContraction> {
    let mixed = w1(&mix(p, r, lambda)?, &mix(q, r, lambda)?)?;
    let scaled = (1.0 - lambda) * w1(p, q)?;
    Ok(MixtureContraction { mixed, scaled })
}
