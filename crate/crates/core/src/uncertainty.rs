//! Acts over a finite state space, state-dependent multi-utilities and
//! recovery of a single prior from rank-one families.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{ProbMeasure, Weights};
use crate::numeric::{dot, norm2, norm_inf};
use crate::preorder::{ComparisonResult, UtilityFamily};
use crate::separation::{boundary, classify, combination, witness_program, Membership};
use crate::solver::{solve_lp, LinearProgram, LpSolution, Relation};
use crate::space::{LipschitzFunction, MetricSpace};
use crate::tolerance::tolerances;
use crate::transport::w1;

/// One lottery per state, all on the same prize space.
#[derive(Debug, Clone, PartialEq)]
pub struct Act {
    states: Vec<String>,
    measures: Vec<ProbMeasure>,
}

impl Act {
    pub fn new(states: Vec<String>, measures: Vec<ProbMeasure>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::DimensionMismatch("an act needs at least one state".into()));
        }
        if states.len() != measures.len() {
            return Err(Error::LengthMismatch {
                expected: states.len(),
                got: measures.len(),
            });
        }
        for m in &measures[1..] {
            measures[0].space().ensure_same(m.space())?;
        }
        Ok(Act { states, measures })
    }

    /// The act paying `p` in every state.
    pub fn constant(states: Vec<String>, p: &ProbMeasure) -> Result<Self> {
        let measures = vec![p.clone(); states.len()];
        Self::new(states, measures)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn measures(&self) -> &[ProbMeasure] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn space(&self) -> &MetricSpace {
        self.measures[0].space()
    }

    pub fn is_constant(&self) -> bool {
        self.measures.iter().all(|m| m.weights() == self.measures[0].weights())
    }

    fn ensure_compatible(&self, other: &Act) -> Result<()> {
        if self.states != other.states {
            return Err(Error::DimensionMismatch("acts are defined on different states".into()));
        }
        self.space().ensure_same(other.space())
    }

    /// State-wise mixture `(1 - λ) f + λ g`.
    pub fn mix(&self, other: &Act, lambda: f64) -> Result<Act> {
        self.ensure_compatible(other)?;
        let measures = self
            .measures
            .iter()
            .zip(&other.measures)
            .map(|(a, b)| crate::measure::mix(a, b, lambda))
            .collect::<Result<Vec<_>>>()?;
        Act::new(self.states.clone(), measures)
    }

    /// The per-state weights laid end to end.
    fn stacked(&self) -> Vec<f64> {
        self.measures.iter().flat_map(|m| m.weights().iter().copied()).collect()
    }
}

/// A probability vector on the states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prior {
    alpha: Vec<f64>,
}

impl Prior {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::DimensionMismatch("a prior needs at least one state".into()));
        }
        if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidProbability(format!("prior {alpha:?} has a negative entry")));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > tolerances().mass * alpha.len() as f64 {
            return Err(Error::InvalidProbability(format!("prior sums to {total}")));
        }
        Ok(Prior { alpha })
    }

    pub fn uniform(states: usize) -> Self {
        Prior {
            alpha: vec![1.0 / states as f64; states],
        }
    }

    pub fn dirac(states: usize, at: usize) -> Self {
        let mut alpha = vec![0.0; states];
        alpha[at] = 1.0;
        Prior { alpha }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

/// A family of per-state utility tuples `(u_ω)`. Each coordinate is stored
/// base-normalized; shifting a coordinate by a constant shifts every act's
/// value equally and changes no comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct StateUtilityFamily {
    space: MetricSpace,
    states: Vec<String>,
    members: Vec<Vec<LipschitzFunction>>,
}

impl StateUtilityFamily {
    /// `members[k][ω]` holds the values of the `ω` coordinate of member `k`.
    pub fn new(space: &MetricSpace, states: Vec<String>, members: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::DimensionMismatch("a state family needs at least one state".into()));
        }
        let members = members
            .into_iter()
            .map(|tuple| {
                if tuple.len() != states.len() {
                    return Err(Error::LengthMismatch {
                        expected: states.len(),
                        got: tuple.len(),
                    });
                }
                tuple
                    .into_iter()
                    .map(|v| Ok(LipschitzFunction::new(space, v)?.base_normalized()))
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateUtilityFamily {
            space: space.clone(),
            states,
            members,
        })
    }

    /// The rank-one family `{(μ(ω) u)_ω : u ∈ base}`.
    pub fn from_prior(states: Vec<String>, prior: &Prior, base: &UtilityFamily) -> Result<Self> {
        if states.len() != prior.alpha.len() {
            return Err(Error::LengthMismatch {
                expected: states.len(),
                got: prior.alpha.len(),
            });
        }
        let members = base
            .members()
            .iter()
            .map(|u| {
                prior
                    .alpha
                    .iter()
                    .map(|a| u.values().iter().map(|v| a * v).collect())
                    .collect()
            })
            .collect();
        Self::new(base.space(), states, members)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn members(&self) -> &[Vec<LipschitzFunction>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn ensure_act(&self, f: &Act) -> Result<()> {
        if f.states != self.states {
            return Err(Error::DimensionMismatch(format!(
                "act has {} states, family has {}",
                f.len(),
                self.states.len()
            )));
        }
        self.space.ensure_same(f.space())
    }

    /// Slack used when comparing act values under one member.
    fn slack(&self, member: &[LipschitzFunction]) -> f64 {
        let diam = self.space.diameter();
        tolerances().comparison * (1.0 + member.iter().map(|u| u.lip() * diam).sum::<f64>())
    }
}

/// `sum_ω ∫u_ω df(ω)` for every member.
pub fn act_values(fam: &StateUtilityFamily, f: &Act) -> Result<Vec<f64>> {
    fam.ensure_act(f)?;
    Ok(fam
        .members
        .iter()
        .map(|tuple| tuple.iter().zip(&f.measures).map(|(u, m)| dot(u.values(), m.weights())).sum())
        .collect())
}

pub fn compare_acts(fam: &StateUtilityFamily, f: &Act, g: &Act) -> Result<ComparisonResult> {
    f.ensure_compatible(g)?;
    let vf = act_values(fam, f)?;
    let vg = act_values(fam, g)?;
    let mut fg = true;
    let mut gf = true;
    for (k, tuple) in fam.members.iter().enumerate() {
        let eps = fam.slack(tuple);
        let gap = vf[k] - vg[k];
        fg &= gap >= -eps;
        gf &= gap <= eps;
    }
    Ok(ComparisonResult::from_pair(fg, gf))
}

/// `sum_ω W₁(f(ω), g(ω))`.
pub fn act_w1(f: &Act, g: &Act) -> Result<f64> {
    f.ensure_compatible(g)?;
    f.measures.iter().zip(&g.measures).map(|(a, b)| w1(a, b)).sum()
}

/// The constant act paying `sum_ω α(ω) f(ω)` in every state.
pub fn reduce_act(f: &Act, prior: &Prior) -> Result<Act> {
    if prior.alpha.len() != f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: prior.alpha.len(),
        });
    }
    let n = f.space().len();
    let mut w = vec![0.0; n];
    for (a, m) in prior.alpha.iter().zip(&f.measures) {
        for (wi, mi) in w.iter_mut().zip(m.weights()) {
            *wi += a * mi;
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    Act::constant(f.states.clone(), &ProbMeasure::new(f.space(), w)?)
}

/// A prior `α` with `f ∼ f^α`, trying `candidates` first and then solving
/// the indifference equations (one per member) over the simplex.
pub fn is_locally_prob_sophisticated(
    fam: &StateUtilityFamily,
    f: &Act,
    candidates: &[Prior],
) -> Result<Option<Prior>> {
    fam.ensure_act(f)?;
    let s = f.len();
    if f.is_constant() {
        return Ok(Some(Prior::uniform(s)));
    }
    for c in candidates {
        if c.alpha.len() == s && compare_acts(fam, f, &reduce_act(f, c)?)? == ComparisonResult::Indifferent {
            return Ok(Some(c.clone()));
        }
    }
    // V_u(f^α) = sum_ω α(ω) c_u(ω) with c_u(ω) = sum_ν ∫u_ν df(ω).
    let values = act_values(fam, f)?;
    let mut lp = LinearProgram::minimize(vec![0.0; s]);
    lp.add(vec![1.0; s], Relation::Eq, 1.0);
    for (k, tuple) in fam.members.iter().enumerate() {
        let row: Vec<f64> = f
            .measures
            .iter()
            .map(|m| tuple.iter().map(|u| dot(u.values(), m.weights())).sum())
            .collect();
        let eps = fam.slack(tuple) / 2.0;
        lp.add(row.clone(), Relation::Le, values[k] + eps);
        lp.add(row, Relation::Ge, values[k] - eps);
    }
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => {
            let mut alpha: Vec<f64> = opt.primal.iter().map(|a| a.max(0.0)).collect();
            let total: f64 = alpha.iter().sum();
            alpha.iter_mut().for_each(|a| *a /= total);
            let prior = Prior::new(alpha)?;
            if compare_acts(fam, f, &reduce_act(f, &prior)?)? == ComparisonResult::Indifferent {
                Ok(Some(prior))
            } else {
                Ok(None)
            }
        }
        _ => Ok(None),
    }
}

/// Factor a rank-one family as a prior times state-independent utilities.
///
/// For each member the coordinate of largest norm serves as the reference
/// utility `u_*`; every coordinate must be a nonnegative multiple of it. The
/// returned utilities are `sum_ω u_ω`, so that member `k` is recovered as
/// `(μ(ω) v_k)_ω`.
pub fn extract_prior(fam: &StateUtilityFamily) -> Result<(Prior, UtilityFamily)> {
    let s = fam.states.len();
    let mut prior: Option<(usize, Vec<f64>)> = None;
    let mut base = Vec::new();
    for (k, tuple) in fam.members.iter().enumerate() {
        let norms: Vec<f64> = tuple.iter().map(|u| norm2(u.values())).collect();
        let star = (0..s).fold(0, |b, w| if norms[w] > norms[b] { w } else { b });
        if norms[star] == 0.0 {
            continue;
        }
        let ustar = tuple[star].values();
        let nn = dot(ustar, ustar);
        let mut a = vec![0.0; s];
        for w in 0..s {
            let uw = tuple[w].values();
            let ratio = dot(uw, ustar) / nn;
            let resid: Vec<f64> = uw.iter().zip(ustar).map(|(x, y)| x - ratio * y).collect();
            if norm2(&resid) > 1e-9 * (norms[w] + norms[star]) || ratio < -1e-12 {
                return Err(Error::NotRankOne { member: k, state: w });
            }
            a[w] = ratio.max(0.0);
        }
        a[star] = 1.0;
        let theta: f64 = a.iter().sum();
        let mu: Vec<f64> = a.iter().map(|x| x / theta).collect();
        match &prior {
            None => prior = Some((k, mu)),
            Some((first, m0)) => {
                let d: Vec<f64> = m0.iter().zip(&mu).map(|(x, y)| x - y).collect();
                if norm_inf(&d) > 1e-9 {
                    return Err(Error::PriorMismatch(*first, k));
                }
            }
        }
        base.push(ustar.iter().map(|v| theta * v).collect::<Vec<f64>>());
    }
    let (_, mu) = prior.ok_or(Error::TrivialFamily)?;
    Ok((Prior::new(mu)?, UtilityFamily::new(&fam.space, base)?))
}

/// The cone generated by differences of declared act comparisons, living in
/// the direct sum of one copy of the KR space per state.
#[derive(Debug, Clone, PartialEq)]
pub struct ActCone {
    space: MetricSpace,
    states: Vec<String>,
    generators: Vec<Vec<f64>>,
}

impl ActCone {
    pub fn empty(space: &MetricSpace, states: Vec<String>) -> Self {
        ActCone {
            space: space.clone(),
            states,
            generators: Vec::new(),
        }
    }

    /// Generators `f_i - g_i` for declared comparisons `f_i ≿ g_i`.
    pub fn from_pairs(space: &MetricSpace, states: Vec<String>, pairs: &[(Act, Act)]) -> Result<Self> {
        let mut cone = Self::empty(space, states);
        for (f, g) in pairs {
            cone.ensure_act(f)?;
            f.ensure_compatible(g)?;
            cone.generators.push(stacked_difference(f, g));
        }
        Ok(cone)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    fn ensure_act(&self, f: &Act) -> Result<()> {
        if f.states != self.states {
            return Err(Error::DimensionMismatch("act states differ from the cone's".into()));
        }
        self.space.ensure_same(f.space())
    }

    fn gens(&self) -> Vec<&[f64]> {
        self.generators.iter().map(|g| g.as_slice()).collect()
    }
}

fn stacked_difference(f: &Act, g: &Act) -> Vec<f64> {
    f.stacked().iter().zip(g.stacked()).map(|(a, b)| a - b).collect()
}

/// Whether `f - g` is a nonnegative combination of the cone's generators.
pub fn act_cone_membership(cone: &ActCone, f: &Act, g: &Act) -> Result<Membership> {
    cone.ensure_act(f)?;
    f.ensure_compatible(g)?;
    combination(&cone.space, cone.states.len(), &cone.gens(), &stacked_difference(f, g))
}

/// Per-state 1-Lipschitz utilities, nonnegative on every generator and
/// strictly positive on `f - g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActWitness {
    pub u: Vec<LipschitzFunction>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActSeparation {
    Witness(ActWitness),
    NotSeparable { optimum: f64, boundary: bool },
}

impl ActSeparation {
    pub fn witness(&self) -> Option<&ActWitness> {
        match self {
            ActSeparation::Witness(w) => Some(w),
            ActSeparation::NotSeparable { .. } => None,
        }
    }
}

pub fn separating_act_witness(cone: &ActCone, f: &Act, g: &Act) -> Result<ActSeparation> {
    cone.ensure_act(f)?;
    f.ensure_compatible(g)?;
    let blocks = cone.states.len();
    let (optimum, values) = witness_program(&cone.space, blocks, &cone.gens(), &stacked_difference(f, g))?;
    if !classify(optimum) {
        return Ok(ActSeparation::NotSeparable {
            optimum,
            boundary: boundary(optimum),
        });
    }
    let n = cone.space.len();
    let u = (0..blocks)
        .map(|b| LipschitzFunction::new(&cone.space, values[b * n..(b + 1) * n].to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ActSeparation::Witness(ActWitness { u, margin: optimum }))
}

/// One per-state witness for each failed panel comparison, in either
/// orientation.
pub fn represent_acts(cone: &ActCone, panel: &[(Act, Act)]) -> Result<StateUtilityFamily> {
    let mut members = Vec::new();
    for (f, g) in panel {
        for (a, b) in [(f, g), (g, f)] {
            if let ActSeparation::Witness(w) = separating_act_witness(cone, a, b)? {
                members.push(w.u.iter().map(|u| u.values().to_vec()).collect());
            }
        }
    }
    StateUtilityFamily::new(&cone.space, cone.states.clone(), members)
}
