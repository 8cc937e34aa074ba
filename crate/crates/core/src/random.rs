//! Seeded generators for random spaces, measures and utility families.
//!
//! Everything randomized in the crate draws from [`ChaCha8Rng`] so that a
//! seed fixes every output on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::ProbMeasure;
use crate::space::MetricSpace;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for a named sub-task, so adding a task never shifts
/// the draws of another.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, then a splitmix64 finalizer with the seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `n` random points of the unit square with Euclidean distance; base 0.
///
/// Points closer than 1e-3 are redrawn so the space validates.
pub fn random_space(rng: &mut Rng64, n: usize) -> MetricSpace {
    loop {
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
        while pts.len() < n {
            let c = vec![rng.gen::<f64>(), rng.gen::<f64>()];
            let far = pts.iter().all(|p| {
                let d2: f64 = p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 > 1e-6
            });
            if far {
                pts.push(c);
            }
        }
        if let Ok(sp) = MetricSpace::euclidean(&pts, 0) {
            return sp;
        }
    }
}

/// `n` distinct points on the real line drawn from `[0, 10)`, sorted.
pub fn random_line(rng: &mut Rng64, n: usize) -> MetricSpace {
    loop {
        let mut xs: Vec<f64> = (0..n).map(|_| (rng.gen::<f64>() * 1000.0).round() / 100.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() == n {
            if let Ok(sp) = MetricSpace::real_line(&xs, 0) {
                return sp;
            }
        }
    }
}

/// Random probability vector; with probability 1/4 some coordinates are
/// zeroed so that supports differ.
pub fn random_weights(rng: &mut Rng64, n: usize) -> Vec<f64> {
    let sparse = rng.gen_bool(0.25);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.gen_bool(0.5) {
                0.0
            } else {
                -(1.0 - rng.gen::<f64>()).ln()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

pub fn random_prob(rng: &mut Rng64, space: &MetricSpace) -> ProbMeasure {
    loop {
        if let Ok(p) = ProbMeasure::new(space, random_weights(rng, space.len())) {
            return p;
        }
    }
}

/// Values uniform in `[-1, 1)`.
pub fn random_values(rng: &mut Rng64, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect()
}
