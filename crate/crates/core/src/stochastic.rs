//! First-order stochastic dominance on the line and on finite posets, and
//! the Lipschitz witness family `min(n d(·, S), 1)` over lower sets `S`.
//!
//! `p` dominates `q` when `p(S) <= q(S)` for every lower set `S`: `p` puts
//! no more mass than `q` on any downward-closed region.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{ProbMeasure, Weights};
use crate::numeric::compensated_sum;
use crate::preorder::UtilityFamily;
use crate::space::{mask_points, FinitePoset, LipschitzFunction, MetricSpace, MAX_POSET_POINTS};
use crate::tolerance::tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dominance {
    pub dominates: bool,
    /// A lower set on which `p` has more mass than `q`, when dominance fails.
    pub violating_set: Option<Vec<usize>>,
}

/// `p` dominates `q` on a space whose labels are real numbers: the CDF of `p`
/// lies below the CDF of `q` at every support point.
pub fn fosd_univariate(p: &ProbMeasure, q: &ProbMeasure) -> Result<Dominance> {
    p.space().ensure_same(q.space())?;
    let xs = p.space().numeric_labels()?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let tol = tolerances().dominance;
    let mut k = 0;
    while k < order.len() {
        // Advance over ties in the label so the CDF is evaluated at a value.
        let mut end = k + 1;
        while end < order.len() && xs[order[end]] == xs[order[k]] {
            end += 1;
        }
        let prefix = &order[..end];
        let fp = compensated_sum(prefix.iter().map(|&i| p.weights()[i]));
        let fq = compensated_sum(prefix.iter().map(|&i| q.weights()[i]));
        if fp > fq + tol {
            let mut set = prefix.to_vec();
            set.sort_unstable();
            return Ok(Dominance {
                dominates: false,
                violating_set: Some(set),
            });
        }
        k = end;
    }
    Ok(Dominance {
        dominates: true,
        violating_set: None,
    })
}

/// `p` dominates `q` on a finite poset, by enumerating every lower set.
pub fn stochastic_order_poset(p: &ProbMeasure, q: &ProbMeasure, poset: &FinitePoset) -> Result<Dominance> {
    p.space().ensure_same(q.space())?;
    poset.space().ensure_same(p.space())?;
    let n = poset.len();
    let tol = tolerances().dominance;
    for mask in poset.lower_sets()? {
        let set = mask_points(mask, n);
        if p.mass_of(&set) > q.mass_of(&set) + tol {
            return Ok(Dominance {
                dominates: false,
                violating_set: Some(set),
            });
        }
    }
    Ok(Dominance {
        dominates: true,
        violating_set: None,
    })
}

/// The lower set and scale of one witness `min(n d(·, S), 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSpec {
    pub set: Vec<usize>,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerSetWitnesses {
    /// Nonconstant witnesses, in the order of `specs`.
    pub family: UtilityFamily,
    pub specs: Vec<WitnessSpec>,
    /// Every `d(·, S)` is increasing along the order, which is what makes
    /// the family decide dominance.
    pub valid: bool,
}

/// `min(n d(x, S), 1)` for every point `x`.
pub fn clipped_distance(space: &MetricSpace, set: &[usize], n: u32) -> Vec<f64> {
    (0..space.len())
        .map(|x| (n as f64 * space.dist_to_set(x, set)).min(1.0))
        .collect()
}

/// Whether `x <= y` implies `d(x, S) <= d(y, S)` for every nonempty lower
/// set `S`.
pub fn distance_is_increasing(poset: &FinitePoset) -> Result<bool> {
    let n = poset.len();
    let sp = poset.space();
    for mask in poset.lower_sets()? {
        if mask == 0 {
            continue;
        }
        let set = mask_points(mask, n);
        let d: Vec<f64> = (0..n).map(|x| sp.dist_to_set(x, &set)).collect();
        for x in 0..n {
            for y in 0..n {
                if poset.leq(x, y) && d[x] > d[y] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A scale at which every witness is the indicator of the complement of
/// its set: `ceil(1 / smallest positive distance)`.
pub fn sufficient_scale(space: &MetricSpace) -> u32 {
    let n = space.len();
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            dmin = dmin.min(space.dist(i, j));
        }
    }
    if dmin.is_finite() {
        (1.0 / dmin).ceil().max(1.0) as u32
    } else {
        1
    }
}

/// The witnesses `min(n d(·, S), 1)` over all nonempty lower sets and the
/// given scales, with the validity flag.
pub fn witness_family_lower_sets(poset: &FinitePoset, n_values: &[u32]) -> Result<LowerSetWitnesses> {
    let n = poset.len();
    if n > MAX_POSET_POINTS {
        return Err(Error::TooManyPoints {
            n,
            limit: MAX_POSET_POINTS,
        });
    }
    let sp = poset.space();
    let mut members = Vec::new();
    let mut specs = Vec::new();
    for mask in poset.lower_sets()? {
        if mask == 0 {
            // d(·, ∅) = ∞ makes the witness identically one.
            continue;
        }
        let set = mask_points(mask, n);
        for &k in n_values {
            let u = LipschitzFunction::new(sp, clipped_distance(sp, &set, k))?;
            if !u.is_constant() {
                members.push(u);
                specs.push(WitnessSpec { set: set.clone(), n: k });
            }
        }
    }
    Ok(LowerSetWitnesses {
        family: UtilityFamily::from_functions(sp, members)?,
        specs,
        valid: distance_is_increasing(poset)?,
    })
}

/// Threshold witnesses on the line: for each support point `a` except the
/// largest, `min(n (x - a)^+, 1)`.
pub fn threshold_family(space: &MetricSpace, n: u32) -> Result<UtilityFamily> {
    let xs = space.numeric_labels()?;
    let top = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let members = xs
        .iter()
        .filter(|&&a| a < top)
        .map(|&a| {
            let vals = xs.iter().map(|&x| (n as f64 * (x - a).max(0.0)).min(1.0)).collect();
            LipschitzFunction::new(space, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    UtilityFamily::from_functions(space, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder::weakly_prefers;

    fn line123() -> MetricSpace {
        MetricSpace::real_line(&[1.0, 2.0, 3.0], 0).unwrap()
    }

    #[test]
    fn univariate_cases() {
        let sp = line123();
        let p = ProbMeasure::new(&sp, vec![0.2, 0.3, 0.5]).unwrap();
        let q = ProbMeasure::new(&sp, vec![0.5, 0.3, 0.2]).unwrap();
        // CDFs (0.2, 0.5, 1.0) and (0.5, 0.8, 1.0), accumulated by hand.
        let cdf = |w: &[f64]| {
            let mut acc = 0.0;
            w.iter().map(|x| { acc += x; acc }).collect::<Vec<f64>>()
        };
        let (fp, fq) = (cdf(p.weights()), cdf(q.weights()));
        assert!(fp.iter().zip(&fq).all(|(a, b)| a <= b));
        assert!(fosd_univariate(&p, &q).unwrap().dominates);
        let back = fosd_univariate(&q, &p).unwrap();
        assert!(!back.dominates);
        assert_eq!(back.violating_set, Some(vec![0]));
        assert!(fosd_univariate(&p, &p).unwrap().dominates);
        let d3 = ProbMeasure::dirac(&sp, 2);
        let d1 = ProbMeasure::dirac(&sp, 0);
        assert!(fosd_univariate(&d3, &d1).unwrap().dominates);
        let named = MetricSpace::discrete(2, 0).unwrap();
        let x = ProbMeasure::dirac(&named, 0);
        assert!(matches!(fosd_univariate(&x, &x), Err(Error::NonNumericLabels(_))));
    }

    #[test]
    fn antichain_dominance_forces_equality() {
        let sp = MetricSpace::discrete(3, 0).unwrap();
        let anti = FinitePoset::antichain(&sp);
        let p = ProbMeasure::new(&sp, vec![0.2, 0.3, 0.5]).unwrap();
        let q = ProbMeasure::new(&sp, vec![0.3, 0.2, 0.5]).unwrap();
        // Every subset is a lower set; singletons already separate p and q.
        let brute = (0u32..8).all(|m| {
            let s = mask_points(m, 3);
            p.mass_of(&s) <= q.mass_of(&s) + 1e-12
        });
        assert!(!brute);
        assert!(!stochastic_order_poset(&p, &q, &anti).unwrap().dominates);
        assert!(stochastic_order_poset(&p, &p, &anti).unwrap().dominates);
    }

    #[test]
    fn chain_reduces_to_cdf_test() {
        let sp = line123();
        let chain = FinitePoset::chain(&sp).unwrap();
        let p = ProbMeasure::new(&sp, vec![0.2, 0.3, 0.5]).unwrap();
        let q = ProbMeasure::new(&sp, vec![0.5, 0.3, 0.2]).unwrap();
        for (a, b) in [(&p, &q), (&q, &p), (&p, &p)] {
            assert_eq!(
                stochastic_order_poset(a, b, &chain).unwrap().dominates,
                fosd_univariate(a, b).unwrap().dominates
            );
        }
    }

    #[test]
    fn top_dominates_bottom() {
        let sp = MetricSpace::discrete(4, 0).unwrap();
        // Bottom 0, top 3, incomparable middle points 1 and 2.
        let mut leq = vec![vec![false; 4]; 4];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
            row[3] = true;
        }
        leq[0] = vec![true; 4];
        let poset = FinitePoset::new(&sp, leq).unwrap();
        let top = ProbMeasure::dirac(&sp, 3);
        let bottom = ProbMeasure::dirac(&sp, 0);
        assert!(stochastic_order_poset(&top, &bottom, &poset).unwrap().dominates);
        assert!(!stochastic_order_poset(&bottom, &top, &poset).unwrap().dominates);
    }

    #[test]
    fn witnesses() {
        let sp = MetricSpace::real_line(&[0.0, 1.0], 0).unwrap();
        assert_eq!(clipped_distance(&sp, &[0, 1], 5), vec![0.0, 0.0]);
        assert_eq!(clipped_distance(&sp, &[0], 5), vec![0.0, 1.0]);
        let chain = FinitePoset::chain(&sp).unwrap();
        let w = witness_family_lower_sets(&chain, &[5]).unwrap();
        assert!(w.valid);
        assert_eq!(w.family.len(), 1);
        assert_eq!(w.family.members()[0].values(), &[0.0, 1.0]);
        assert_eq!(w.specs, vec![WitnessSpec { set: vec![0], n: 5 }]);
    }

    #[test]
    fn witness_family_agrees_with_enumeration_on_a_chain() {
        let sp = line123();
        let chain = FinitePoset::chain(&sp).unwrap();
        let k = sufficient_scale(&sp);
        let w = witness_family_lower_sets(&chain, &[k]).unwrap();
        let p = ProbMeasure::new(&sp, vec![0.2, 0.3, 0.5]).unwrap();
        let q = ProbMeasure::new(&sp, vec![0.5, 0.3, 0.2]).unwrap();
        for (a, b) in [(&p, &q), (&q, &p)] {
            assert_eq!(
                weakly_prefers(&w.family, a, b).unwrap(),
                stochastic_order_poset(a, b, &chain).unwrap().dominates
            );
        }
        let t = threshold_family(&sp, k).unwrap();
        assert!(weakly_prefers(&t, &p, &q).unwrap());
        assert!(!weakly_prefers(&t, &q, &p).unwrap());
    }
}
