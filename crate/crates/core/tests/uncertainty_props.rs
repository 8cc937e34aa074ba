use krorder::measure::{ProbMeasure, Weights};
use krorder::preorder::{ComparisonResult, UtilityFamily};
use krorder::random::{random_prob, random_values, random_weights, Rng64};
use krorder::space::MetricSpace;
use krorder::uncertainty::{
    compare_acts, extract_prior, is_locally_prob_sophisticated, Act, Prior, StateUtilityFamily,
};
use proptest::prelude::*;
use rand::Rng;

mod common;

struct Instance {
    r: Rng64,
    sp: MetricSpace,
    states: Vec<String>,
    prior: Prior,
    base: UtilityFamily,
    fam: StateUtilityFamily,
}

fn instance(seed: u64) -> Instance {
    let (mut r, sp) = common::setup(seed, 6);
    let s = r.gen_range(1..5);
    let states: Vec<String> = (0..s).map(|i| format!("w{i}")).collect();
    let prior = Prior::new(random_weights(&mut r, s)).unwrap();
    let k = r.gen_range(1..4);
    let base = UtilityFamily::new(&sp, (0..k).map(|_| random_values(&mut r, sp.len())).collect()).unwrap();
    let fam = StateUtilityFamily::from_prior(states.clone(), &prior, &base).unwrap();
    Instance { r, sp, states, prior, base, fam }
}

fn random_act(r: &mut Rng64, sp: &MetricSpace, states: &[String]) -> Act {
    Act::new(states.to_vec(), states.iter().map(|_| random_prob(r, sp)).collect()).unwrap()
}

/// `sum_ω μ(ω) ∫u df(ω)` for every base member.
fn single_prior_values(base: &UtilityFamily, prior: &Prior, f: &Act) -> Vec<f64> {
    base.members()
        .iter()
        .map(|u| {
            prior
                .alpha()
                .iter()
                .zip(f.measures())
                .map(|(a, m)| a * u.values().iter().zip(m.weights()).map(|(x, y)| x * y).sum::<f64>())
                .sum()
        })
        .collect()
}

proptest! {
    #[test]
    fn prior_round_trip_and_single_prior_formula(seed in any::<u64>()) {
        let mut it = instance(seed);
        if it.base.members().iter().all(|u| u.is_constant()) {
            return Ok(());
        }
        let (mu, _) = extract_prior(&it.fam).unwrap();
        for (a, b) in mu.alpha().iter().zip(it.prior.alpha()) {
            prop_assert!((a - b).abs() <= 1e-12, "{:?} vs {:?}", mu.alpha(), it.prior.alpha());
        }
        let f = random_act(&mut it.r, &it.sp, &it.states);
        let g = random_act(&mut it.r, &it.sp, &it.states);
        let (vf, vg) = (single_prior_values(&it.base, &it.prior, &f), single_prior_values(&it.base, &it.prior, &g));
        let gaps: Vec<f64> = vf.iter().zip(&vg).map(|(a, b)| a - b).collect();
        if gaps.iter().all(|d| d.abs() > 1e-6) {
            let fg = gaps.iter().all(|d| *d > 0.0);
            let gf = gaps.iter().all(|d| *d < 0.0);
            let expected = match (fg, gf) {
                (true, false) => ComparisonResult::StrictBetter,
                (false, true) => ComparisonResult::StrictWorse,
                _ => ComparisonResult::Incomparable,
            };
            prop_assert_eq!(compare_acts(&it.fam, &f, &g).unwrap(), expected);
        }
    }

    #[test]
    fn recovered_prior_makes_every_act_sophisticated(seed in any::<u64>()) {
        let mut it = instance(seed);
        if it.base.members().iter().all(|u| u.is_constant()) {
            return Ok(());
        }
        let (mu, _) = extract_prior(&it.fam).unwrap();
        let f = random_act(&mut it.r, &it.sp, &it.states);
        let found = is_locally_prob_sophisticated(&it.fam, &f, std::slice::from_ref(&mu)).unwrap();
        if !f.is_constant() {
            prop_assert_eq!(found.as_ref(), Some(&mu));
        }
        prop_assert!(is_locally_prob_sophisticated(&it.fam, &f, &[]).unwrap().is_some());
    }

    #[test]
    fn act_comparison_is_affine(seed in any::<u64>()) {
        let mut it = instance(seed);
        let f = random_act(&mut it.r, &it.sp, &it.states);
        let g = random_act(&mut it.r, &it.sp, &it.states);
        let h = random_act(&mut it.r, &it.sp, &it.states);
        let l: f64 = it.r.gen_range(0.0..0.9);
        let gaps: Vec<f64> = single_prior_values(&it.base, &it.prior, &f)
            .iter()
            .zip(single_prior_values(&it.base, &it.prior, &g))
            .map(|(a, b)| a - b)
            .collect();
        if gaps.iter().all(|d| d.abs() > 1e-6) {
            let before = compare_acts(&it.fam, &f, &g).unwrap();
            let after = compare_acts(&it.fam, &f.mix(&h, l).unwrap(), &g.mix(&h, l).unwrap()).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}

#[test]
fn constant_act_is_sophisticated_under_any_family() {
    let sp = MetricSpace::discrete(3, 0).unwrap();
    let states = vec!["s".to_string(), "t".to_string()];
    let fam = StateUtilityFamily::new(&sp, states.clone(), vec![vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]]).unwrap();
    let f = Act::constant(states, &ProbMeasure::uniform(&sp)).unwrap();
    assert!(is_locally_prob_sophisticated(&fam, &f, &[]).unwrap().is_some());
}
