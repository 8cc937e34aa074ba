//! Cone membership and separating Lipschitz witnesses.
//!
//! A preference cone is generated by differences `p_i - q_i` of declared
//! comparisons. For a query `(p, q)` exactly one of two things happens:
//! `q - p` is a nonnegative combination of generators (so `q ≿ p` is forced),
//! or a 1-Lipschitz function vanishing at the base point is nonnegative on
//! every generator and strictly positive on `p - q`. Both sides are linear
//! programs and are solved independently.
//!
//! The witness program is written over a direct sum of `blocks` copies of
//! the space so the same code serves lotteries (one block) and acts (one
//! block per state).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{ProbMeasure, SignedMeasure, Weights};
use crate::numeric::{dot, norm_inf};
use crate::preorder::UtilityFamily;
use crate::solver::{solve_lp, LinearProgram, LpSolution, Relation};
use crate::space::{LipschitzFunction, MetricSpace};
use crate::tolerance::tolerances;

/// The convex cone generated by differences of declared comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceCone {
    space: MetricSpace,
    generators: Vec<SignedMeasure>,
}

impl PreferenceCone {
    pub fn new(space: &MetricSpace, generators: Vec<SignedMeasure>) -> Result<Self> {
        for g in &generators {
            space.ensure_same(g.space())?;
            g.ensure_kr()?;
        }
        Ok(PreferenceCone {
            space: space.clone(),
            generators,
        })
    }

    pub fn empty(space: &MetricSpace) -> Self {
        PreferenceCone {
            space: space.clone(),
            generators: Vec::new(),
        }
    }

    /// Generators `p_i - q_i` for declared comparisons `p_i ≿ q_i`.
    pub fn from_pairs(space: &MetricSpace, pairs: &[(ProbMeasure, ProbMeasure)]) -> Result<Self> {
        let gens = pairs
            .iter()
            .map(|(p, q)| crate::measure::difference(p, q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, gens)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn generators(&self) -> &[SignedMeasure] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn with_generator(&self, g: SignedMeasure) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(g);
        Self::new(&self.space, gens)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Nonnegative coefficients reproducing the query, when it is a member.
    pub coefficients: Option<Vec<f64>>,
    /// `max_x |sum_i c_i g_i(x) - mu(x)|` for a member.
    pub residual: f64,
}

/// Whether `mu` is a nonnegative combination of the generators.
pub fn cone_membership(cone: &PreferenceCone, mu: &SignedMeasure) -> Result<Membership> {
    cone.space.ensure_same(mu.space())?;
    mu.ensure_kr()?;
    let gens: Vec<&[f64]> = cone.generators.iter().map(|g| g.weights()).collect();
    combination(&cone.space, 1, &gens, mu.weights())
}

/// Nonnegative combination of block vectors. The base coordinate of each
/// block is dropped: every vector has zero mass per block, so that row is
/// implied by the others.
pub(crate) fn combination(
    space: &MetricSpace,
    blocks: usize,
    gens: &[&[f64]],
    target: &[f64],
) -> Result<Membership> {
    let n = space.len();
    let base = space.base();
    let k = gens.len();
    let mut lp = LinearProgram::minimize(vec![0.0; k]);
    for b in 0..blocks {
        for x in 0..n {
            if x == base {
                continue;
            }
            let idx = b * n + x;
            lp.add(gens.iter().map(|g| g[idx]).collect(), Relation::Eq, target[idx]);
        }
    }
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => {
            let c: Vec<f64> = opt.primal.iter().map(|v| v.max(0.0)).collect();
            let recon: Vec<f64> = (0..blocks * n)
                .map(|idx| gens.iter().zip(&c).map(|(g, ci)| ci * g[idx]).sum::<f64>() - target[idx])
                .collect();
            Ok(Membership {
                member: true,
                residual: norm_inf(&recon),
                coefficients: Some(c),
            })
        }
        LpSolution::Infeasible(_) => Ok(Membership {
            member: false,
            coefficients: None,
            residual: f64::NAN,
        }),
        LpSolution::Unbounded(_) => Err(Error::NumericalBreakdown(
            "feasibility program reported unbounded".into(),
        )),
    }
}

/// A 1-Lipschitz, base-normalized function strictly positive on `p - q` and
/// nonnegative on every generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub u: LipschitzFunction,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Witness(Witness),
    /// The optimum is at or below the witness tolerance. `boundary` marks an
    /// optimum above the boundary tolerance, where LP noise and a genuinely
    /// tiny margin cannot be told apart.
    NotSeparable { optimum: f64, boundary: bool },
}

impl Separation {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Separation::Witness(w) => Some(w),
            Separation::NotSeparable { .. } => None,
        }
    }

    pub fn optimum(&self) -> f64 {
        match self {
            Separation::Witness(w) => w.margin,
            Separation::NotSeparable { optimum, .. } => *optimum,
        }
    }
}

/// Maximize `sum f * target` over block functions `f` that are 1-Lipschitz
/// on each block, vanish at each block's base point, and are nonnegative on
/// every generator. Returns the optimum and the maximizer.
pub(crate) fn witness_program(
    space: &MetricSpace,
    blocks: usize,
    gens: &[&[f64]],
    target: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let n = space.len();
    let base = space.base();
    let mut lp = LinearProgram::maximize(target.to_vec());
    lp.set_all_free();
    let dim = blocks * n;
    for b in 0..blocks {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut row = vec![0.0; dim];
                    row[b * n + i] = 1.0;
                    row[b * n + j] = -1.0;
                    lp.add(row, Relation::Le, space.dist(i, j));
                }
            }
        }
        let mut row = vec![0.0; dim];
        row[b * n + base] = 1.0;
        lp.add(row, Relation::Eq, 0.0);
    }
    for g in gens {
        lp.add(g.to_vec(), Relation::Ge, 0.0);
    }
    match solve_lp(&lp)? {
        LpSolution::Optimal(opt) => {
            let mut f = opt.primal;
            for b in 0..blocks {
                let shift = f[b * n + base];
                f[b * n..(b + 1) * n].iter_mut().for_each(|v| *v -= shift);
            }
            let value = dot(&f, target);
            Ok((value, f))
        }
        other => Err(Error::NumericalBreakdown(format!(
            "witness program reported {:?}",
            other.status()
        ))),
    }
}

pub(crate) fn classify(optimum: f64) -> bool {
    optimum > tolerances().witness
}

pub(crate) fn boundary(optimum: f64) -> bool {
    optimum > tolerances().boundary && !classify(optimum)
}

/// Solve the witness program for the query `(p, q)`.
pub fn separating_witness(cone: &PreferenceCone, p: &ProbMeasure, q: &ProbMeasure) -> Result<Separation> {
    cone.space.ensure_same(p.space())?;
    cone.space.ensure_same(q.space())?;
    let target: Vec<f64> = p.weights().iter().zip(q.weights()).map(|(a, b)| a - b).collect();
    let gens: Vec<&[f64]> = cone.generators.iter().map(|g| g.weights()).collect();
    let (optimum, f) = witness_program(&cone.space, 1, &gens, &target)?;
    if classify(optimum) {
        Ok(Separation::Witness(Witness {
            u: LipschitzFunction::new(&cone.space, f)?,
            margin: optimum,
        }))
    } else {
        Ok(Separation::NotSeparable {
            optimum,
            boundary: boundary(optimum),
        })
    }
}

/// Whether the cone ranks `p ≿ q`, i.e. `p - q` lies in it.
pub fn cone_prefers(cone: &PreferenceCone, p: &ProbMeasure, q: &ProbMeasure) -> Result<bool> {
    Ok(cone_membership(cone, &crate::measure::difference(p, q)?)?.member)
}

/// One witness per failed panel comparison, in either orientation. The
/// family ranks every panel pair the way the cone does.
pub fn represent(cone: &PreferenceCone, panel: &[(ProbMeasure, ProbMeasure)]) -> Result<UtilityFamily> {
    let mut ws = Vec::new();
    for (p, q) in panel {
        for (a, b) in [(p, q), (q, p)] {
            if let Separation::Witness(w) = separating_witness(cone, a, b)? {
                ws.push(w.u);
            }
        }
    }
    UtilityFamily::from_functions(&cone.space, ws)
}
