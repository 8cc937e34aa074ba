//! Preorders on lotteries induced by finite families of Lipschitz utilities.
//!
//! `p ≿ q` under a family when every member gives `p` at least the expected
//! utility of `q`, up to a slack of `comparison * (1 + L(u) * diam)` that
//! scales with the member and the space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{mix, ProbMeasure, Weights};
use crate::numeric::{dot, norm2};
use crate::solver::{solve_lp, LinearProgram, LpSolution, Relation};
use crate::space::{LipschitzFunction, MetricSpace};
use crate::tolerance::tolerances;
use crate::transport::w1;
use crate::random::{random_prob, Rng64};

/// A finite family of base-normalized, nonconstant Lipschitz utilities.
///
/// An empty family is allowed and induces universal indifference.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFamily {
    space: MetricSpace,
    members: Vec<LipschitzFunction>,
}

impl UtilityFamily {
    /// Build from raw value vectors. Every vector is shifted to vanish at the
    /// base point and constant vectors are dropped; an empty input list is
    /// an error.
    pub fn new(space: &MetricSpace, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let fs = values
            .into_iter()
            .map(|v| LipschitzFunction::new(space, v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_functions(space, fs)
    }

    pub fn from_functions(space: &MetricSpace, fs: Vec<LipschitzFunction>) -> Result<Self> {
        let mut members = Vec::with_capacity(fs.len());
        for f in fs {
            space.ensure_same(f.space())?;
            if !f.is_constant() {
                members.push(f.base_normalized());
            }
        }
        Ok(UtilityFamily {
            space: space.clone(),
            members,
        })
    }

    /// The empty family: everything is indifferent.
    pub fn indifference(space: &MetricSpace) -> Self {
        UtilityFamily {
            space: space.clone(),
            members: Vec::new(),
        }
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn members(&self) -> &[LipschitzFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|u| u.values().to_vec()).collect()
    }

    /// Every member divided by its Lipschitz number.
    pub fn unit_normalized(&self) -> UtilityFamily {
        UtilityFamily {
            space: self.space.clone(),
            members: self.members.iter().map(|u| u.affine(1.0 / u.lip(), 0.0)).collect(),
        }
    }

    /// This family with more members appended (constants still dropped).
    pub fn extended(&self, extra: Vec<LipschitzFunction>) -> Result<UtilityFamily> {
        let mut all = self.members.clone();
        all.extend(extra);
        Self::from_functions(&self.space, all)
    }
}

/// Comparison slack for one member.
pub fn comparison_slack(u: &LipschitzFunction) -> f64 {
    tolerances().comparison * (1.0 + u.lip() * u.space().diameter())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComparisonResult {
    StrictBetter,
    Indifferent,
    Incomparable,
    StrictWorse,
}

impl ComparisonResult {
    pub(crate) fn from_pair(pq: bool, qp: bool) -> Self {
        match (pq, qp) {
            (true, true) => ComparisonResult::Indifferent,
            (true, false) => ComparisonResult::StrictBetter,
            (false, true) => ComparisonResult::StrictWorse,
            (false, false) => ComparisonResult::Incomparable,
        }
    }

    /// The result with the arguments exchanged.
    pub fn swapped(self) -> Self {
        match self {
            ComparisonResult::StrictBetter => ComparisonResult::StrictWorse,
            ComparisonResult::StrictWorse => ComparisonResult::StrictBetter,
            other => other,
        }
    }

    /// `p ≿ q` part of the outcome.
    pub fn weakly_better(self) -> bool {
        matches!(
            self,
            ComparisonResult::StrictBetter | ComparisonResult::Indifferent
        )
    }
}

fn diff(p: &ProbMeasure, q: &ProbMeasure) -> Result<Vec<f64>> {
    p.space().ensure_same(q.space())?;
    Ok(p.weights().iter().zip(q.weights()).map(|(a, b)| a - b).collect())
}

/// `∫u d(p - q)` for every member.
pub fn expectation_gaps(fam: &UtilityFamily, p: &ProbMeasure, q: &ProbMeasure) -> Result<Vec<f64>> {
    fam.space.ensure_same(p.space())?;
    let d = diff(p, q)?;
    Ok(fam.members.iter().map(|u| dot(u.values(), &d)).collect())
}

/// `p ≿ q`.
pub fn weakly_prefers(fam: &UtilityFamily, p: &ProbMeasure, q: &ProbMeasure) -> Result<bool> {
    let gaps = expectation_gaps(fam, p, q)?;
    Ok(gaps
        .iter()
        .zip(&fam.members)
        .all(|(g, u)| *g >= -comparison_slack(u)))
}

pub fn compare(fam: &UtilityFamily, p: &ProbMeasure, q: &ProbMeasure) -> Result<ComparisonResult> {
    let gaps = expectation_gaps(fam, p, q)?;
    let pq = gaps.iter().zip(&fam.members).all(|(g, u)| *g >= -comparison_slack(u));
    let qp = gaps.iter().zip(&fam.members).all(|(g, u)| *g <= comparison_slack(u));
    Ok(ComparisonResult::from_pair(pq, qp))
}

/// The margin `K = max_u ∫u d(p - q) / L(u)` of a failed comparison `q ≿ p`,
/// with the index of a member attaining it.
pub fn lipschitz_margin_with_member(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
) -> Result<(f64, usize)> {
    if weakly_prefers(fam, q, p)? {
        return Err(Error::PreconditionViolated(
            "the margin needs q ≿ p to fail".into(),
        ));
    }
    let gaps = expectation_gaps(fam, p, q)?;
    let (k, i) = gaps
        .iter()
        .zip(&fam.members)
        .enumerate()
        .map(|(i, (g, u))| (g / u.lip(), i))
        .fold((f64::NEG_INFINITY, 0), |best, c| if c.0 > best.0 { c } else { best });
    Ok((k, i))
}

pub fn lipschitz_margin(fam: &UtilityFamily, p: &ProbMeasure, q: &ProbMeasure) -> Result<f64> {
    Ok(lipschitz_margin_with_member(fam, p, q)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomOutcome {
    /// The mixed comparison fails, as required.
    Holds,
    /// The mixed comparison holds only within the comparison slack, at a
    /// mixing weight whose exact margin is itself below that slack.
    Boundary,
    /// The mixed comparison holds although the exact margin is clear of the
    /// slack.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomViolation {
    pub trial: usize,
    pub lambda: f64,
    pub bound: f64,
    pub w1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub margin: f64,
    pub checked: usize,
    /// Grid points at or above the bound `K / (K + W₁(p', q'))`.
    pub skipped: usize,
    pub boundary: usize,
    pub violations: Vec<AxiomViolation>,
}

/// Check one instance of the mixture-persistence axiom: with `K` the margin
/// of `(p, q)`, `q ⊕λ q' ≿ p ⊕λ p'` must fail for `λ < K / (K + W₁(p', q'))`.
/// Returns `None` when `λ` is not below the bound.
pub fn lipschitz_axiom_at(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
    p2: &ProbMeasure,
    q2: &ProbMeasure,
    lambda: f64,
) -> Result<Option<AxiomOutcome>> {
    let (k, star) = lipschitz_margin_with_member(fam, p, q)?;
    let w = w1(p2, q2)?;
    lipschitz_axiom_with(fam, p, q, p2, q2, lambda, k, star, w)
}

#[allow(clippy::too_many_arguments)]
fn lipschitz_axiom_with(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
    p2: &ProbMeasure,
    q2: &ProbMeasure,
    lambda: f64,
    k: f64,
    star: usize,
    w: f64,
) -> Result<Option<AxiomOutcome>> {
    let bound = k / (k + w);
    if !(0.0..bound).contains(&lambda) {
        return Ok(None);
    }
    let lhs = mix(q, q2, lambda)?;
    let rhs = mix(p, p2, lambda)?;
    if !weakly_prefers(fam, &lhs, &rhs)? {
        return Ok(Some(AxiomOutcome::Holds));
    }
    // The member attaining K separates the mixtures by at least
    // L * (K - λ (K + W₁)); below twice its slack the comparison is noise.
    let u = &fam.members[star];
    let exact = u.lip() * (k - lambda * (k + w));
    if exact <= 2.0 * comparison_slack(u) {
        Ok(Some(AxiomOutcome::Boundary))
    } else {
        Ok(Some(AxiomOutcome::Violation))
    }
}

/// Draw `trials` random pairs `(p', q')` and test every `λ` of the grid
/// below the bound.
pub fn certify_lipschitz_axiom(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
    trials: usize,
    lambda_grid: &[f64],
    rng: &mut Rng64,
) -> Result<AxiomReport> {
    let (k, star) = lipschitz_margin_with_member(fam, p, q)?;
    let mut report = AxiomReport {
        margin: k,
        checked: 0,
        skipped: 0,
        boundary: 0,
        violations: Vec::new(),
    };
    for trial in 0..trials {
        let p2 = random_prob(rng, &fam.space);
        let q2 = random_prob(rng, &fam.space);
        let w = w1(&p2, &q2)?;
        for &lambda in lambda_grid {
            match lipschitz_axiom_with(fam, p, q, &p2, &q2, lambda, k, star, w)? {
                None => report.skipped += 1,
                Some(o) => {
                    report.checked += 1;
                    match o {
                        AxiomOutcome::Holds => {}
                        AxiomOutcome::Boundary => report.boundary += 1,
                        AxiomOutcome::Violation => report.violations.push(AxiomViolation {
                            trial,
                            lambda,
                            bound: k / (k + w),
                            w1: w,
                        }),
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The pair `(p', q')` that pushes hardest against the margin: `q'` a Dirac
/// at the maximum of the margin-attaining member, `p'` at its minimum.
pub fn adversarial_pair(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
) -> Result<(ProbMeasure, ProbMeasure)> {
    let (_, star) = lipschitz_margin_with_member(fam, p, q)?;
    let v = fam.members[star].values();
    let argmax = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    let argmin = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    Ok((
        ProbMeasure::dirac(&fam.space, argmin),
        ProbMeasure::dirac(&fam.space, argmax),
    ))
}

/// Output of [`make_proper_family`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProperFamily {
    pub family: UtilityFamily,
    /// Truncation level: members `u + v/n` for `1 <= n <= truncation`.
    pub truncation: usize,
    /// The truncated family induces the same comparisons as the input on
    /// every panel pair.
    pub panel_agrees: bool,
    /// Every member is strictly positive on every strict panel pair.
    pub strict_on_panel: bool,
}

pub const DEFAULT_TRUNCATION: usize = 16;
const MAX_TRUNCATION: usize = 1 << 16;

/// `{u + v/n : u in the family, 1 <= n <= truncation}` with
/// `v = sum_k 2^-k u_k`, all members first scaled to unit Lipschitz number.
pub fn proper_family_truncated(fam: &UtilityFamily, truncation: usize) -> Result<UtilityFamily> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let unit = fam.unit_normalized();
    let n = fam.space.len();
    let mut v = vec![0.0; n];
    let mut w = 1.0;
    for u in &unit.members {
        w *= 0.5;
        for (vi, ui) in v.iter_mut().zip(u.values()) {
            *vi += w * ui;
        }
    }
    let mut out = Vec::with_capacity(unit.len() * truncation);
    for u in &unit.members {
        for k in 1..=truncation {
            let vals = u
                .values()
                .iter()
                .zip(&v)
                .map(|(a, b)| a + b / k as f64)
                .collect();
            out.push(LipschitzFunction::new(&fam.space, vals)?);
        }
    }
    UtilityFamily::from_functions(&fam.space, out)
}

/// Truncate the proper-family construction at the smallest power-of-two
/// level from [`DEFAULT_TRUNCATION`] that reproduces the family's comparisons
/// on the panel, and report strictness on the panel.
pub fn make_proper_family(
    fam: &UtilityFamily,
    panel: &[(ProbMeasure, ProbMeasure)],
) -> Result<ProperFamily> {
    let mut truncation = DEFAULT_TRUNCATION;
    loop {
        let family = proper_family_truncated(fam, truncation)?;
        let mut agrees = true;
        for (p, q) in panel {
            if compare(fam, p, q)? != compare(&family, p, q)? {
                agrees = false;
                break;
            }
        }
        if agrees || truncation >= MAX_TRUNCATION {
            let strict_on_panel = strictly_increasing_on(fam, &family, panel)?;
            return Ok(ProperFamily {
                family,
                truncation,
                panel_agrees: agrees,
                strict_on_panel,
            });
        }
        truncation *= 2;
    }
}

/// Every member of `proper` is strictly positive on each panel pair that is
/// strict under `fam`, in either orientation.
pub fn strictly_increasing_on(
    fam: &UtilityFamily,
    proper: &UtilityFamily,
    panel: &[(ProbMeasure, ProbMeasure)],
) -> Result<bool> {
    for (p, q) in panel {
        let (hi, lo) = match compare(fam, p, q)? {
            ComparisonResult::StrictBetter => (p, q),
            ComparisonResult::StrictWorse => (q, p),
            _ => continue,
        };
        if expectation_gaps(proper, hi, lo)?.iter().any(|&g| g <= 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A pair ranked by one family and not by another.
#[derive(Debug, Clone, PartialEq)]
pub struct Disagreement {
    pub p: ProbMeasure,
    pub q: ProbMeasure,
    /// Positive mass of the separating KR element `alpha (p - q)`.
    pub alpha: f64,
    /// `true` when the first family ranks `p ≿ q` and the second does not.
    pub first_prefers: bool,
}

fn probability_from_lp(space: &MetricSpace, w: &[f64]) -> Result<ProbMeasure> {
    let mut w: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    ProbMeasure::new(space, w)
}

/// A pair ranked `p ≿ q` by the truncated proper family but not by the
/// original family, found by linear programming. Finite truncations of the
/// construction shrink the generated cone, so such a pair exists whenever
/// the original family is not total.
pub fn proper_family_failure_pair(
    fam: &UtilityFamily,
    proper: &UtilityFamily,
) -> Result<Option<Disagreement>> {
    let n = fam.space.len();
    for u in &fam.members {
        // Variables (p, q) in the simplex squared.
        let mut obj = u.values().to_vec();
        obj.extend(u.values().iter().map(|x| -x));
        let mut lp = LinearProgram::minimize(obj);
        let mut row = vec![1.0; n];
        row.extend(vec![0.0; n]);
        lp.add(row, Relation::Eq, 1.0);
        let mut row = vec![0.0; n];
        row.extend(vec![1.0; n]);
        lp.add(row, Relation::Eq, 1.0);
        for v in proper.members() {
            let mut row = v.values().to_vec();
            row.extend(v.values().iter().map(|x| -x));
            lp.add(row, Relation::Ge, 0.0);
        }
        let Some(opt) = solve_lp(&lp)?.into_optimum() else {
            continue;
        };
        if opt.objective < -comparison_slack(u) {
            let p = probability_from_lp(&fam.space, &opt.primal[..n])?;
            let q = probability_from_lp(&fam.space, &opt.primal[n..])?;
            if weakly_prefers(proper, &p, &q)? && !weakly_prefers(fam, &p, &q)? {
                return Ok(Some(Disagreement {
                    p,
                    q,
                    alpha: 1.0,
                    first_prefers: false,
                }));
            }
        }
    }
    Ok(None)
}

/// Farkas multipliers `y` showing `target` is not in
/// `cone(gens) + R·1`: `∫v dy >= 0` for every generator, `sum y = 0` and
/// `∫target dy < 0`. `None` when `target` is in the cone.
fn cone_exclusion(target: &LipschitzFunction, gens: &UtilityFamily) -> Result<Option<Vec<f64>>> {
    let n = gens.space.len();
    let k = gens.len();
    // Variables: c_1..c_k >= 0, beta free.
    let mut lp = LinearProgram::minimize(vec![0.0; k + 1]);
    lp.set_free(k);
    for x in 0..n {
        let mut row: Vec<f64> = gens.members.iter().map(|v| v.values()[x]).collect();
        row.push(1.0);
        lp.add(row, Relation::Eq, target.values()[x]);
    }
    match solve_lp(&lp)? {
        LpSolution::Infeasible(cert) => {
            let mut y = cert.multipliers;
            let mean = y.iter().sum::<f64>() / n as f64;
            y.iter_mut().for_each(|v| *v -= mean);
            Ok(Some(y))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreorderComparison {
    pub same: bool,
    pub certificate: Option<Disagreement>,
}

/// Whether two families induce the same preorder: each member of either
/// must lie in the cone generated by the other plus constants. On failure
/// the Farkas multipliers become a pair on which the families disagree.
pub fn same_preorder(a: &UtilityFamily, b: &UtilityFamily) -> Result<PreorderComparison> {
    a.space.ensure_same(&b.space)?;
    for (x, y, first_prefers) in [(a, b, false), (b, a, true)] {
        for u in &x.members {
            let Some(mu) = cone_exclusion(u, y)? else {
                continue;
            };
            // y ranks p ≿ q, x does not.
            let pos: f64 = mu.iter().map(|v| v.max(0.0)).sum();
            if pos == 0.0 {
                continue;
            }
            let p = probability_from_lp(&a.space, &mu)?;
            let neg: Vec<f64> = mu.iter().map(|v| (-v).max(0.0)).collect();
            let q = probability_from_lp(&a.space, &neg)?;
            if weakly_prefers(y, &p, &q)? && !weakly_prefers(x, &p, &q)? {
                return Ok(PreorderComparison {
                    same: false,
                    certificate: Some(Disagreement {
                        p,
                        q,
                        alpha: pos,
                        first_prefers,
                    }),
                });
            }
        }
    }
    Ok(PreorderComparison {
        same: true,
        certificate: None,
    })
}

/// Whether all members are positive affine transforms of one another, which
/// is exactly when the induced preorder is total.
pub fn is_total(fam: &UtilityFamily) -> bool {
    let Some(first) = fam.members.first() else {
        return true;
    };
    let center = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| x - m).collect::<Vec<f64>>()
    };
    let u0 = center(first.values());
    let n0 = dot(&u0, &u0);
    fam.members[1..].iter().all(|u| {
        let c = center(u.values());
        let a = dot(&c, &u0) / n0;
        let resid: Vec<f64> = c.iter().zip(&u0).map(|(x, y)| x - a * y).collect();
        a > 0.0 && norm2(&resid) <= 1e-9 * norm2(&c)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffinityReport {
    pub checked: usize,
    /// Draws with a member gap inside the slack band, where mixing can move
    /// a comparison across the slack.
    pub boundary: usize,
    pub violations: usize,
    pub mixture_checked: usize,
    pub mixture_violations: usize,
}

/// The biconditional `p ≿ q iff p ⊕λ r ≿ q ⊕λ r` for one draw, or `None`
/// when some member's gap is inside the slack band scaled by `1 / (1 - λ)`.
pub fn affinity_at(
    fam: &UtilityFamily,
    p: &ProbMeasure,
    q: &ProbMeasure,
    r: &ProbMeasure,
    lambda: f64,
) -> Result<Option<bool>> {
    let gaps = expectation_gaps(fam, p, q)?;
    let near = gaps
        .iter()
        .zip(&fam.members)
        .any(|(g, u)| g.abs() <= 2.0 * comparison_slack(u) / (1.0 - lambda));
    if near {
        return Ok(None);
    }
    let before = weakly_prefers(fam, p, q)?;
    let after = weakly_prefers(fam, &mix(p, r, lambda)?, &mix(q, r, lambda)?)?;
    Ok(Some(before == after))
}

/// A random pair with `p ≿ q`: `q` is random and `p` moves part of the way
/// from `q` toward an extreme point of `{p : p ≿ q}`.
pub fn sample_preferred_pair(fam: &UtilityFamily, rng: &mut Rng64) -> Result<(ProbMeasure, ProbMeasure)> {
    let n = fam.space.len();
    let q = random_prob(rng, &fam.space);
    let obj: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut lp = LinearProgram::maximize(obj);
    lp.add(vec![1.0; n], Relation::Eq, 1.0);
    for u in &fam.members {
        lp.add(u.values().to_vec(), Relation::Ge, dot(u.values(), q.weights()));
    }
    let ext = match solve_lp(&lp)?.into_optimum() {
        Some(opt) => probability_from_lp(&fam.space, &opt.primal)?,
        None => q.clone(),
    };
    let s = rng.gen::<f64>();
    Ok((mix(&q, &ext, s)?, q))
}

/// Random draws of the affinity biconditional and of the mixture lemma
/// (`p ≿ q` and `p' ≿ q'` imply `p ⊕λ p' ≿ q ⊕λ q'`).
pub fn check_affinity(
    fam: &UtilityFamily,
    trials: usize,
    lambda_grid: &[f64],
    rng: &mut Rng64,
) -> Result<AffinityReport> {
    let mut report = AffinityReport {
        checked: 0,
        boundary: 0,
        violations: 0,
        mixture_checked: 0,
        mixture_violations: 0,
    };
    for _ in 0..trials {
        let p = random_prob(rng, &fam.space);
        let q = random_prob(rng, &fam.space);
        let r = random_prob(rng, &fam.space);
        for &lambda in lambda_grid {
            match affinity_at(fam, &p, &q, &r, lambda)? {
                None => report.boundary += 1,
                Some(ok) => {
                    report.checked += 1;
                    if !ok {
                        report.violations += 1;
                    }
                }
            }
        }
        let (p1, q1) = sample_preferred_pair(fam, rng)?;
        let (p2, q2) = sample_preferred_pair(fam, rng)?;
        let lambda = rng.gen::<f64>();
        report.mixture_checked += 1;
        if !weakly_prefers(fam, &mix(&p1, &p2, lambda)?, &mix(&q1, &q2, lambda)?)? {
            report.mixture_violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;

    fn line3() -> MetricSpace {
        MetricSpace::real_line(&[0.0, 1.0, 2.0], 0).unwrap()
    }

    fn two_coords(sp: &MetricSpace) -> UtilityFamily {
        UtilityFamily::new(sp, vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn basic_comparisons() {
        let two = MetricSpace::real_line(&[0.0, 1.0], 0).unwrap();
        let id = UtilityFamily::new(&two, vec![vec![0.0, 1.0]]).unwrap();
        let d0 = ProbMeasure::dirac(&two, 0);
        let d1 = ProbMeasure::dirac(&two, 1);
        assert_eq!(compare(&id, &d1, &d0).unwrap(), ComparisonResult::StrictBetter);
        assert_eq!(compare(&id, &d0, &d0).unwrap(), ComparisonResult::Indifferent);

        let sp = line3();
        let fam = two_coords(&sp);
        let b = ProbMeasure::dirac(&sp, 1);
        let c = ProbMeasure::dirac(&sp, 2);
        // u1: 1 vs 0, u2: 0 vs 1.
        assert_eq!(compare(&fam, &b, &c).unwrap(), ComparisonResult::Incomparable);
    }

    #[test]
    fn constants_are_dropped_and_empty_means_indifference() {
        let sp = line3();
        let fam = UtilityFamily::new(&sp, vec![vec![3.0; 3]]).unwrap();
        assert!(fam.is_empty());
        let a = ProbMeasure::dirac(&sp, 0);
        let c = ProbMeasure::dirac(&sp, 2);
        assert_eq!(compare(&fam, &a, &c).unwrap(), ComparisonResult::Indifferent);
        assert_eq!(UtilityFamily::new(&sp, vec![]).unwrap_err(), Error::EmptyFamily);
    }

    #[test]
    fn margins() {
        let sp = line3();
        let id = UtilityFamily::new(&sp, vec![vec![0.0, 1.0, 2.0]]).unwrap();
        let d0 = ProbMeasure::dirac(&sp, 0);
        let d2 = ProbMeasure::dirac(&sp, 2);
        assert_eq!(lipschitz_margin(&id, &d2, &d0).unwrap(), 2.0);
        let scaled = UtilityFamily::new(&sp, vec![vec![0.0, 10.0, 20.0]]).unwrap();
        assert_eq!(lipschitz_margin(&scaled, &d2, &d0).unwrap(), 2.0);
        assert!(matches!(
            lipschitz_margin(&id, &d0, &d2),
            Err(Error::PreconditionViolated(_))
        ));
        // Two members: ratios 2/1 and (0 - 3)/3 evaluated separately.
        let fam = UtilityFamily::new(&sp, vec![vec![0.0, 1.0, 2.0], vec![0.0, 6.0, 0.0]]).unwrap();
        let r1: f64 = 2.0 / 1.0;
        let r2 = (0.0 - 0.0) / 6.0;
        assert_eq!(lipschitz_margin(&fam, &d2, &d0).unwrap(), r1.max(r2));
    }

    #[test]
    fn axiom_at_zero_mixing_is_the_original_failure() {
        let sp = line3();
        let fam = two_coords(&sp);
        let p = ProbMeasure::dirac(&sp, 1);
        let q = ProbMeasure::dirac(&sp, 0);
        let (p2, q2) = adversarial_pair(&fam, &p, &q).unwrap();
        assert_eq!(
            lipschitz_axiom_at(&fam, &p, &q, &p2, &q2, 0.0).unwrap(),
            Some(AxiomOutcome::Holds)
        );
        let report =
            certify_lipschitz_axiom(&fam, &p, &q, 200, &[0.0, 0.1, 0.3, 0.5, 0.9], &mut rng(3)).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.checked > 0);
    }

    #[test]
    fn proper_family_of_a_singleton_is_equivalent() {
        let sp = line3();
        let fam = UtilityFamily::new(&sp, vec![vec![0.0, 1.0, 3.0]]).unwrap();
        let proper = make_proper_family(&fam, &[]).unwrap();
        assert!(same_preorder(&fam, &proper.family).unwrap().same);
        assert_eq!(
            make_proper_family(&UtilityFamily::indifference(&sp), &[]).unwrap_err(),
            Error::EmptyFamily
        );
    }

    #[test]
    fn proper_members_are_strict_on_strict_pairs() {
        let sp = line3();
        let fam = two_coords(&sp);
        let a = ProbMeasure::dirac(&sp, 0);
        let b = ProbMeasure::dirac(&sp, 1);
        let c = ProbMeasure::dirac(&sp, 2);
        let panel = vec![(b.clone(), a.clone()), (c.clone(), a.clone()), (b, c)];
        let proper = make_proper_family(&fam, &panel).unwrap();
        assert!(proper.panel_agrees);
        assert!(proper.strict_on_panel);
        for (p, q) in &panel[..2] {
            assert!(expectation_gaps(&proper.family, p, q).unwrap().iter().all(|&g| g > 0.0));
        }
        let fail = proper_family_failure_pair(&fam, &proper.family).unwrap().unwrap();
        assert!(weakly_prefers(&proper.family, &fail.p, &fail.q).unwrap());
        assert!(!weakly_prefers(&fam, &fail.p, &fail.q).unwrap());
    }

    #[test]
    fn same_preorder_cases() {
        let sp = line3();
        let fam = two_coords(&sp);
        let u1 = fam.members()[0].affine(2.5, 7.0);
        assert!(same_preorder(&fam, &fam.extended(vec![u1]).unwrap()).unwrap().same);
        let c = LipschitzFunction::new(&sp, vec![4.0; 3]).unwrap();
        assert!(same_preorder(&fam, &fam.extended(vec![c]).unwrap()).unwrap().same);

        let two = MetricSpace::real_line(&[0.0, 1.0], 0).unwrap();
        let up = UtilityFamily::new(&two, vec![vec![0.0, 1.0]]).unwrap();
        let down = UtilityFamily::new(&two, vec![vec![0.0, -1.0]]).unwrap();
        let res = same_preorder(&up, &down).unwrap();
        assert!(!res.same);
        let cert = res.certificate.unwrap();
        assert_ne!(
            weakly_prefers(&up, &cert.p, &cert.q).unwrap(),
            weakly_prefers(&down, &cert.p, &cert.q).unwrap()
        );
    }

    #[test]
    fn totality() {
        let sp = line3();
        let u = vec![0.0, 1.0, 5.0];
        let single = UtilityFamily::new(&sp, vec![u.clone()]).unwrap();
        assert!(is_total(&single));
        let aff = UtilityFamily::new(&sp, vec![u.clone(), u.iter().map(|x| 2.0 * x + 3.0).collect()]).unwrap();
        assert!(is_total(&aff));
        let fam = two_coords(&sp);
        assert!(!is_total(&fam));
        // The witness of non-totality: the Dirac pair (b, c).
        let b = ProbMeasure::dirac(&sp, 1);
        let c = ProbMeasure::dirac(&sp, 2);
        assert_eq!(compare(&fam, &b, &c).unwrap(), ComparisonResult::Incomparable);
    }

    #[test]
    fn affinity_report_is_clean() {
        let sp = line3();
        let fam = two_coords(&sp);
        let rep = check_affinity(&fam, 200, &[0.0, 0.25, 0.5, 0.75], &mut rng(9)).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.mixture_violations, 0);
        assert!(rep.checked > 0);
    }
}
