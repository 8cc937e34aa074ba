//! Finitely supported probability measures and zero-mass signed measures.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, dot};
use crate::space::{LipschitzFunction, MetricSpace};
use crate::tolerance::tolerances;

/// Anything that is a weight vector over the points of a space.
pub trait Weights {
    fn space(&self) -> &MetricSpace;
    fn weights(&self) -> &[f64];
}

/// A probability vector over the points of a metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMeasure {
    space: MetricSpace,
    w: Vec<f64>,
}

impl ProbMeasure {
    pub fn new(space: &MetricSpace, w: Vec<f64>) -> Result<Self> {
        space.ensure_len(w.len())?;
        if let Some((i, x)) = w.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidProbability(format!(
                "weight {i} = {x} is not a finite nonnegative number"
            )));
        }
        let total = compensated_sum(w.iter().copied());
        if (total - 1.0).abs() > tolerances().mass {
            return Err(Error::InvalidProbability(format!(
                "weights sum to {total}"
            )));
        }
        Ok(ProbMeasure {
            space: space.clone(),
            w,
        })
    }

    pub fn dirac(space: &MetricSpace, at: usize) -> Self {
        let mut w = vec![0.0; space.len()];
        w[at] = 1.0;
        ProbMeasure {
            space: space.clone(),
            w,
        }
    }

    pub fn uniform(space: &MetricSpace) -> Self {
        let n = space.len();
        ProbMeasure {
            space: space.clone(),
            w: vec![1.0 / n as f64; n],
        }
    }

    /// `(1 - lambda) * self + lambda * other`.
    pub fn mix(&self, other: &ProbMeasure, lambda: f64) -> Result<ProbMeasure> {
        mix(self, other, lambda)
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.w
    }

    /// Mass of a set of points.
    pub fn mass_of(&self, set: &[usize]) -> f64 {
        compensated_sum(set.iter().map(|&i| self.w[i]))
    }
}

impl Weights for ProbMeasure {
    fn space(&self) -> &MetricSpace {
        &self.space
    }
    fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// A finite signed measure over the points of a metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    space: MetricSpace,
    w: Vec<f64>,
}

impl SignedMeasure {
    pub fn new(space: &MetricSpace, w: Vec<f64>) -> Result<Self> {
        space.ensure_len(w.len())?;
        if let Some(x) = w.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidProbability(format!("weight {x} is not finite")));
        }
        Ok(SignedMeasure {
            space: space.clone(),
            w,
        })
    }

    /// A signed measure that must have zero total mass (an element of the KR space).
    pub fn kr(space: &MetricSpace, w: Vec<f64>) -> Result<Self> {
        let m = Self::new(space, w)?;
        m.ensure_kr()?;
        Ok(m)
    }

    pub fn zero(space: &MetricSpace) -> Self {
        SignedMeasure {
            space: space.clone(),
            w: vec![0.0; space.len()],
        }
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.w.iter().copied())
    }

    /// Total variation, `sum |w_i|`.
    pub fn variation(&self) -> f64 {
        compensated_sum(self.w.iter().map(|x| x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0.0)
    }

    /// Zero total mass within the mass tolerance, scaled by the variation.
    pub fn is_kr(&self) -> bool {
        self.total_mass().abs() <= tolerances().mass * self.variation().max(1.0)
    }

    pub(crate) fn ensure_kr(&self) -> Result<()> {
        if self.is_kr() {
            Ok(())
        } else {
            Err(Error::NonzeroTotalMass(self.total_mass()))
        }
    }

    pub fn scaled(&self, a: f64) -> SignedMeasure {
        SignedMeasure {
            space: self.space.clone(),
            w: self.w.iter().map(|x| a * x).collect(),
        }
    }

    pub fn plus(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        self.space.ensure_same(&other.space)?;
        Ok(SignedMeasure {
            space: self.space.clone(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a + b).collect(),
        })
    }

    /// Split into `alpha * (p - q)` with `alpha` the positive mass and `p`, `q`
    /// the normalized positive and negative parts. `None` for the zero measure.
    pub fn jordan_split(&self) -> Option<(f64, ProbMeasure, ProbMeasure)> {
        let pos: Vec<f64> = self.w.iter().map(|x| x.max(0.0)).collect();
        let neg: Vec<f64> = self.w.iter().map(|x| (-x).max(0.0)).collect();
        let alpha_pos = compensated_sum(pos.iter().copied());
        let alpha_neg = compensated_sum(neg.iter().copied());
        if alpha_pos == 0.0 || alpha_neg == 0.0 {
            return None;
        }
        let p = pos.iter().map(|x| x / alpha_pos).collect();
        let q = neg.iter().map(|x| x / alpha_neg).collect();
        Some((
            alpha_pos,
            ProbMeasure {
                space: self.space.clone(),
                w: p,
            },
            ProbMeasure {
                space: self.space.clone(),
                w: q,
            },
        ))
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.w
    }
}

impl Weights for SignedMeasure {
    fn space(&self) -> &MetricSpace {
        &self.space
    }
    fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// `(1 - lambda) p + lambda q`.
pub fn mix(p: &ProbMeasure, q: &ProbMeasure, lambda: f64) -> Result<ProbMeasure> {
    p.space.ensure_same(&q.space)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let w = p
        .w
        .iter()
        .zip(&q.w)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    Ok(ProbMeasure {
        space: p.space.clone(),
        w,
    })
}

/// `alpha (p - q)`, an element of the KR space.
pub fn kr_element(p: &ProbMeasure, q: &ProbMeasure, alpha: f64) -> Result<SignedMeasure> {
    p.space.ensure_same(&q.space)?;
    if alpha < 0.0 || alpha.is_nan() {
        return Err(Error::NegativeScale(alpha));
    }
    let w = p
        .w
        .iter()
        .zip(&q.w)
        .map(|(a, b)| alpha * (a - b))
        .collect();
    Ok(SignedMeasure {
        space: p.space.clone(),
        w,
    })
}

/// `p - q` without the scale argument.
pub fn difference(p: &ProbMeasure, q: &ProbMeasure) -> Result<SignedMeasure> {
    kr_element(p, q, 1.0)
}

/// Integral of `u` against a probability or signed measure.
pub fn expectation<M: Weights + ?Sized>(u: &LipschitzFunction, m: &M) -> Result<f64> {
    u.space().ensure_same(m.space())?;
    Ok(dot(u.values(), m.weights()))
}
