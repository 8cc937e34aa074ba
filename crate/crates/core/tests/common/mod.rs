#![allow(dead_code)]

use krorder::measure::ProbMeasure;
use krorder::preorder::UtilityFamily;
use krorder::random::{random_prob, random_space, random_values, rng, Rng64};
use krorder::space::MetricSpace;
use rand::Rng;

pub fn setup(seed: u64, max_n: usize) -> (Rng64, MetricSpace) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_n);
    let sp = random_space(&mut r, n);
    (r, sp)
}

pub fn family(r: &mut Rng64, sp: &MetricSpace, max_k: usize) -> UtilityFamily {
    let k = r.gen_range(1..=max_k);
    let values = (0..k).map(|_| random_values(r, sp.len())).collect();
    UtilityFamily::new(sp, values).unwrap()
}

pub fn probs<const N: usize>(r: &mut Rng64, sp: &MetricSpace) -> [ProbMeasure; N] {
    std::array::from_fn(|_| random_prob(r, sp))
}
