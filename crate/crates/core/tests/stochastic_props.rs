use krorder::measure::{mix, ProbMeasure, Weights};
use krorder::preorder::weakly_prefers;
use krorder::random::{random_line, random_prob, random_space, rng, Rng64};
use krorder::space::{FinitePoset, MetricSpace};
use krorder::stochastic::{fosd_univariate, stochastic_order_poset, sufficient_scale, threshold_family};
use proptest::prelude::*;
use rand::Rng;

fn random_poset(r: &mut Rng64, sp: &MetricSpace) -> FinitePoset {
    let n = sp.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
        for j in i + 1..n {
            leq[i][j] = r.gen_bool(0.4);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    FinitePoset::new(sp, leq).unwrap()
}

/// Push random amounts of mass upward along the order, which yields a
/// measure dominating the input.
fn push_up(r: &mut Rng64, poset: &FinitePoset, q: &ProbMeasure) -> ProbMeasure {
    let n = poset.len();
    let mut w = q.weights().to_vec();
    for _ in 0..n {
        let i = r.gen_range(0..n);
        let ups: Vec<usize> = (0..n).filter(|&j| poset.leq(i, j)).collect();
        let j = ups[r.gen_range(0..ups.len())];
        let m = w[i] * r.gen::<f64>();
        w[i] -= m;
        w[j] += m;
    }
    ProbMeasure::new(poset.space(), w).unwrap()
}

fn instance(seed: u64) -> (Rng64, FinitePoset) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=8);
    let sp = random_space(&mut r, n);
    let poset = random_poset(&mut r, &sp);
    (r, poset)
}

proptest! {
    #[test]
    fn fosd_matches_the_threshold_family(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=8);
        let sp = random_line(&mut r, n);
        let fam = threshold_family(&sp, sufficient_scale(&sp)).unwrap();
        let q = random_prob(&mut r, &sp);
        let chain = FinitePoset::chain(&sp).unwrap();
        let p = if r.gen_bool(0.5) { push_up(&mut r, &chain, &q) } else { random_prob(&mut r, &sp) };
        prop_assert_eq!(fosd_univariate(&p, &q).unwrap().dominates, weakly_prefers(&fam, &p, &q).unwrap());
    }

    #[test]
    fn poset_order_is_a_partial_order(seed in any::<u64>()) {
        let (mut r, poset) = instance(seed);
        let s = random_prob(&mut r, poset.space());
        let q = push_up(&mut r, &poset, &s);
        let p = push_up(&mut r, &poset, &q);
        let dom = |a: &ProbMeasure, b: &ProbMeasure| stochastic_order_poset(a, b, &poset).unwrap().dominates;
        prop_assert!(dom(&s, &s));
        prop_assert!(dom(&q, &s) && dom(&p, &q) && dom(&p, &s));
        let t = random_prob(&mut r, poset.space());
        if dom(&t, &s) && dom(&s, &t) {
            let close = t.weights().iter().zip(s.weights()).all(|(a, b)| (a - b).abs() <= 1e-9);
            prop_assert!(close);
        }
    }

    #[test]
    fn dominance_survives_mixing(seed in any::<u64>()) {
        let (mut r, poset) = instance(seed);
        let q = random_prob(&mut r, poset.space());
        let p = push_up(&mut r, &poset, &q);
        let s = random_prob(&mut r, poset.space());
        let l: f64 = r.gen();
        let d = stochastic_order_poset(&mix(&p, &s, l).unwrap(), &mix(&q, &s, l).unwrap(), &poset).unwrap();
        prop_assert!(d.dominates);
    }

    #[test]
    fn violating_set_is_a_lower_set_with_excess_mass(seed in any::<u64>()) {
        let (mut r, poset) = instance(seed);
        let [p, q] = [random_prob(&mut r, poset.space()), random_prob(&mut r, poset.space())];
        let d = stochastic_order_poset(&p, &q, &poset).unwrap();
        if let Some(set) = d.violating_set {
            prop_assert!(!d.dominates);
            prop_assert!(poset.is_lower_set(&set));
            prop_assert!(p.mass_of(&set) > q.mass_of(&set));
            let rest: Vec<usize> = (0..poset.len()).filter(|i| !set.contains(i)).collect();
            prop_assert!(poset.is_upper_set(&rest));
        }
    }
}
