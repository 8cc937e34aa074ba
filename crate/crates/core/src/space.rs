//! Finite pointed metric spaces, finite partial orders on their points, and
//! Lipschitz functions.
//!
//! A [`MetricSpace`] is a cheap handle: cloning it shares the underlying
//! distance matrix, and every measure or function built on it keeps a handle.
//! Two handles are the same space when they share storage or when their
//! labels, distances and base point agree exactly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tolerance::tolerances;

struct SpaceData {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
    base: usize,
    diameter: f64,
}

/// A validated finite metric space with a distinguished base point.
#[derive(Clone)]
pub struct MetricSpace {
    inner: Arc<SpaceData>,
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("labels", &self.inner.labels)
            .field("base", &self.inner.base)
            .finish()
    }
}

impl PartialEq for MetricSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.base == other.inner.base
                && self.inner.labels == other.inner.labels
                && self.inner.dist == other.inner.dist)
    }
}

impl MetricSpace {
    /// Validate a labelled distance matrix. Nothing is repaired: the first
    /// violated axiom is reported.
    pub fn validate(labels: Vec<String>, dist: Vec<Vec<f64>>, base: usize) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::MalformedMetric("no points".into()));
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        if let Some(row) = dist.iter().find(|row| row.len() != n) {
            return Err(Error::MalformedMetric(format!(
                "distance matrix is not square: row of length {} in a {n}x{n} matrix",
                row.len()
            )));
        }
        if base >= n {
            return Err(Error::BadBaseIndex { base, n });
        }
        let mut max_entry = 0.0_f64;
        for (i, row) in dist.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::MalformedMetric(format!(
                        "entry ({i}, {j}) = {d} is not a finite nonnegative number"
                    )));
                }
                if i == j && d != 0.0 {
                    return Err(Error::MalformedMetric(format!(
                        "diagonal entry ({i}, {i}) = {d} is not zero"
                    )));
                }
                max_entry = max_entry.max(d);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dist[i][j] != dist[j][i] {
                    return Err(Error::AsymmetricDistance(i, j));
                }
                if dist[i][j] == 0.0 {
                    return Err(Error::ZeroDistanceDistinctPoints(i, j));
                }
            }
        }
        let slack = tolerances().metric * max_entry;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + slack {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &dist {
            flat.extend_from_slice(row);
        }
        Ok(MetricSpace {
            inner: Arc::new(SpaceData {
                labels,
                dist: flat,
                n,
                base,
                diameter: max_entry,
            }),
        })
    }

    /// Points on the real line labelled by their coordinates, with `|x - y|`.
    pub fn real_line(points: &[f64], base: usize) -> Result<Self> {
        let labels = points.iter().map(|x| format!("{x}")).collect();
        let dist = points
            .iter()
            .map(|x| points.iter().map(|y| (x - y).abs()).collect())
            .collect();
        Self::validate(labels, dist, base)
    }

    /// Points of a Euclidean space, labelled `x0, x1, ...`.
    pub fn euclidean(points: &[Vec<f64>], base: usize) -> Result<Self> {
        let labels = (0..points.len()).map(|i| format!("x{i}")).collect();
        let dist = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| {
                        a.iter()
                            .zip(b)
                            .map(|(x, y)| (x - y) * (x - y))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect()
            })
            .collect();
        Self::validate(labels, dist, base)
    }

    /// `n` points at mutual distance one.
    pub fn discrete(n: usize, base: usize) -> Result<Self> {
        let labels = (0..n).map(|i| format!("x{i}")).collect();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::validate(labels, dist, base)
    }

    pub fn len(&self) -> usize {
        self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        self.inner.n == 0
    }

    pub fn base(&self) -> usize {
        self.inner.base
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.inner.dist[i * self.inner.n + j]
    }

    /// Row `i` of the distance matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.inner.n;
        &self.inner.dist[i * n..(i + 1) * n]
    }

    pub fn diameter(&self) -> f64 {
        self.inner.diameter
    }

    /// Distance matrix as nested rows.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Distance from point `x` to the point set `set`; `+inf` for the empty set.
    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> f64 {
        set.iter()
            .map(|&s| self.dist(x, s))
            .fold(f64::INFINITY, f64::min)
    }

    /// Labels parsed as real numbers.
    pub fn numeric_labels(&self) -> Result<Vec<f64>> {
        self.inner
            .labels
            .iter()
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::NonNumericLabels(l.clone()))
            })
            .collect()
    }

    pub fn ensure_same(&self, other: &MetricSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn ensure_len(&self, got: usize) -> Result<()> {
        if got == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            })
        }
    }
}

/// Exact Lipschitz number of `values` on `space`: the largest difference
/// quotient over distinct pairs.
pub fn lipschitz_number(values: &[f64], space: &MetricSpace) -> Result<f64> {
    space.ensure_len(values.len())?;
    let n = space.len();
    let mut lip = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            lip = lip.max((values[i] - values[j]).abs() / space.dist(i, j));
        }
    }
    Ok(lip)
}

/// A real function on the points of a space together with its Lipschitz number.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFunction {
    space: MetricSpace,
    values: Vec<f64>,
    lip: f64,
}

impl LipschitzFunction {
    pub fn new(space: &MetricSpace, values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::MalformedMetric(format!(
                "function value {v} is not finite"
            )));
        }
        let lip = lipschitz_number(&values, space)?;
        Ok(LipschitzFunction {
            space: space.clone(),
            values,
            lip,
        })
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn is_base_normalized(&self) -> bool {
        self.values[self.space.base()] == 0.0
    }

    /// The same function shifted so that it vanishes at the base point.
    pub fn base_normalized(&self) -> LipschitzFunction {
        let shift = self.values[self.space.base()];
        LipschitzFunction {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v - shift).collect(),
            lip: self.lip,
        }
    }

    /// `a * self + b`.
    pub fn affine(&self, a: f64, b: f64) -> LipschitzFunction {
        LipschitzFunction {
            space: self.space.clone(),
            values: self.values.iter().map(|v| a * v + b).collect(),
            lip: a.abs() * self.lip,
        }
    }

    /// Constant up to rounding of the stored values.
    pub fn is_constant(&self) -> bool {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.lip * self.space.diameter() <= 4.0 * f64::EPSILON * scale
    }
}

/// A partial order on the points of a metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePoset {
    space: MetricSpace,
    leq: Vec<bool>,
}

/// Lower-set enumeration is exponential; larger posets are refused.
pub const MAX_POSET_POINTS: usize = 20;

impl FinitePoset {
    /// Validate `leq[i][j] == (i <= j)` as reflexive, antisymmetric and transitive.
    pub fn new(space: &MetricSpace, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = space.len();
        space.ensure_len(leq.len())?;
        if leq.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedOrder("relation matrix is not square".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::MalformedOrder(format!("not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::MalformedOrder(format!(
                        "not antisymmetric at ({i}, {j})"
                    )));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::MalformedOrder(format!(
                            "not transitive at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset {
            space: space.clone(),
            leq: leq.into_iter().flatten().collect(),
        })
    }

    /// Points ordered by their numeric labels.
    pub fn chain(space: &MetricSpace) -> Result<Self> {
        let xs = space.numeric_labels()?;
        let leq = xs
            .iter()
            .map(|a| xs.iter().map(|b| a <= b).collect())
            .collect();
        Self::new(space, leq)
    }

    /// No two distinct points comparable.
    pub fn antichain(space: &MetricSpace) -> Self {
        let n = space.len();
        FinitePoset {
            space: space.clone(),
            leq: (0..n * n).map(|k| k / n == k % n).collect(),
        }
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// `i <= j`.
    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn relation(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.leq(i, j)).collect()).collect()
    }

    /// Downward closed: `x` in `set` and `y <= x` imply `y` in `set`.
    pub fn is_lower_set(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.len()];
        for &s in set {
            member[s] = true;
        }
        set.iter()
            .all(|&x| (0..self.len()).all(|y| !self.leq(y, x) || member[y]))
    }

    pub fn is_upper_set(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.len()];
        for &s in set {
            member[s] = true;
        }
        set.iter()
            .all(|&x| (0..self.len()).all(|y| !self.leq(x, y) || member[y]))
    }

    /// Every lower set as a bitmask over point indices.
    ///
    /// Points are visited in a linear extension; a point may be included only
    /// when everything strictly below it already is, so each lower set is
    /// produced exactly once.
    pub fn lower_sets(&self) -> Result<Vec<u32>> {
        let n = self.len();
        if n > MAX_POSET_POINTS {
            return Err(Error::TooManyPoints {
                n,
                limit: MAX_POSET_POINTS,
            });
        }
        let order = self.linear_extension();
        let below: Vec<u32> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| y != x && self.leq(y, x))
                    .fold(0u32, |m, y| m | (1 << y))
            })
            .collect();
        let mut out = Vec::new();
        fn walk(pos: usize, mask: u32, order: &[usize], below: &[u32], out: &mut Vec<u32>) {
            if pos == order.len() {
                out.push(mask);
                return;
            }
            let x = order[pos];
            walk(pos + 1, mask, order, below, out);
            if below[x] & !mask == 0 {
                walk(pos + 1, mask | (1 << x), order, below, out);
            }
        }
        walk(0, 0, &order, &below, &mut out);
        Ok(out)
    }

    /// Points sorted so that `i <= j` implies `i` precedes `j`.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        let rank: Vec<usize> = (0..n)
            .map(|x| (0..n).filter(|&y| y != x && self.leq(y, x)).count())
            .collect();
        order.sort_by_key(|&x| (rank[x], x));
        order
    }
}

/// Indices of the points in a lower-set bitmask.
pub fn mask_points(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn one_and_two_point_spaces_validate() {
        assert!(MetricSpace::validate(labels(1), vec![vec![0.0]], 0).is_ok());
        assert!(MetricSpace::validate(labels(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0).is_ok());
    }

    #[test]
    fn triangle_violation_is_reported() {
        let d = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        // Brute force over all triples finds 3 > 1 + 1 via the middle point.
        let mut expected = None;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if expected.is_none() && d[i][k] > d[i][j] + d[j][k] {
                        expected = Some((i, j, k));
                    }
                }
            }
        }
        assert_eq!(expected, Some((0, 1, 2)));
        assert_eq!(
            MetricSpace::validate(labels(3), d, 0).unwrap_err(),
            Error::TriangleViolation { i: 0, j: 1, k: 2 }
        );
    }

    #[test]
    fn axiom_errors() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert_eq!(
            MetricSpace::validate(labels(2), asym, 0).unwrap_err(),
            Error::AsymmetricDistance(0, 1)
        );
        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(
            MetricSpace::validate(labels(2), zero, 0).unwrap_err(),
            Error::ZeroDistanceDistinctPoints(0, 1)
        );
        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(
            MetricSpace::validate(labels(2), ok, 2).unwrap_err(),
            Error::BadBaseIndex { base: 2, n: 2 }
        );
        assert!(matches!(
            MetricSpace::validate(vec![], vec![], 0),
            Err(Error::MalformedMetric(_))
        ));
    }

    #[test]
    fn lipschitz_numbers() {
        let line = MetricSpace::real_line(&[0.0, 1.0, 2.0], 0).unwrap();
        assert_eq!(lipschitz_number(&[5.0, 5.0, 5.0], &line).unwrap(), 0.0);
        assert_eq!(lipschitz_number(&[0.0, 1.0, 2.0], &line).unwrap(), 1.0);
        let two = MetricSpace::real_line(&[0.0, 2.0], 0).unwrap();
        assert_eq!(lipschitz_number(&[0.0, 3.0], &two).unwrap(), 1.5);
        assert_eq!(
            lipschitz_number(&[0.0], &two).unwrap_err(),
            Error::LengthMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn lower_sets_of_a_chain() {
        let line = MetricSpace::real_line(&[1.0, 2.0, 3.0], 0).unwrap();
        let chain = FinitePoset::chain(&line).unwrap();
        assert!(chain.is_lower_set(&[]));
        assert!(chain.is_lower_set(&[0, 1]));
        assert!(!chain.is_lower_set(&[1]));
        let mut sets = chain.lower_sets().unwrap();
        sets.sort();
        assert_eq!(sets, vec![0b000, 0b001, 0b011, 0b111]);
    }

    #[test]
    fn antichain_lower_sets_are_all_subsets() {
        let sp = MetricSpace::discrete(4, 0).unwrap();
        let anti = FinitePoset::antichain(&sp);
        assert_eq!(anti.lower_sets().unwrap().len(), 16);
    }

    #[test]
    fn order_axioms_are_checked() {
        let sp = MetricSpace::discrete(2, 0).unwrap();
        let cyc = vec![vec![true, true], vec![true, true]];
        assert!(matches!(
            FinitePoset::new(&sp, cyc),
            Err(Error::MalformedOrder(_))
        ));
        let nonrefl = vec![vec![false, false], vec![false, true]];
        assert!(FinitePoset::new(&sp, nonrefl).is_err());
    }

    #[test]
    fn lower_set_count_matches_brute_force() {
        // Diamond: 0 <= 1, 0 <= 2, 1 <= 3, 2 <= 3.
        let sp = MetricSpace::discrete(4, 0).unwrap();
        let rel = [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)];
        let mut leq = vec![vec![false; 4]; 4];
        for i in 0..4 {
            leq[i][i] = true;
        }
        for &(a, b) in &rel {
            leq[a][b] = true;
        }
        let poset = FinitePoset::new(&sp, leq).unwrap();
        let brute: Vec<u32> = (0u32..16)
            .filter(|&m| poset.is_lower_set(&mask_points(m, 4)))
            .collect();
        let mut enumerated = poset.lower_sets().unwrap();
        enumerated.sort();
        assert_eq!(enumerated, brute);
        assert_eq!(brute.len(), 6);
    }
}
