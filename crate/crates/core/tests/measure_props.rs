use krorder::measure::{expectation, kr_element, mix, Weights};
use krorder::numeric::compensated_sum;
use krorder::random::random_values;
use krorder::space::{lipschitz_number, LipschitzFunction};
use krorder::transport::{kr_norm, w1, w1_dual, w1_primal, mixture_contraction};
use proptest::prelude::*;
use rand::Rng;

mod common;

proptest! {
    #[test]
    fn lipschitz_number_bounds_every_quotient(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let f = random_values(&mut r, sp.len());
        let l = lipschitz_number(&f, &sp).unwrap();
        for i in 0..sp.len() {
            for j in 0..sp.len() {
                prop_assert!(l * sp.dist(i, j) >= (f[i] - f[j]).abs() * (1.0 - 1e-12));
            }
        }
        let u = LipschitzFunction::new(&sp, f).unwrap();
        prop_assert!((u.base_normalized().lip() - u.lip()).abs() <= 1e-12 * (1.0 + u.lip()));
    }

    #[test]
    fn expectation_is_affine_in_the_measure(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let u = LipschitzFunction::new(&sp, random_values(&mut r, sp.len())).unwrap();
        let [p, q] = common::probs::<2>(&mut r, &sp);
        let (ep, eq) = (expectation(&u, &p).unwrap(), expectation(&u, &q).unwrap());
        for k in 0..=10 {
            let l = k as f64 / 10.0;
            let m = expectation(&u, &mix(&p, &q, l).unwrap()).unwrap();
            prop_assert!((m - ((1.0 - l) * ep + l * eq)).abs() <= 1e-12);
        }
    }

    #[test]
    fn kr_element_respects_the_w1_bound_and_has_zero_mass(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let u = LipschitzFunction::new(&sp, random_values(&mut r, sp.len())).unwrap();
        let [p, q] = common::probs::<2>(&mut r, &sp);
        let mu = kr_element(&p, &q, 1.0).unwrap();
        prop_assert!(compensated_sum(mu.weights().iter().copied()).abs() <= 1e-15);
        let e = expectation(&u, &mu).unwrap();
        prop_assert!(e.abs() <= u.lip() * w1(&p, &q).unwrap() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn w1_is_a_metric(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let [p, q, s] = common::probs::<3>(&mut r, &sp);
        let (pq, qp) = (w1(&p, &q).unwrap(), w1(&q, &p).unwrap());
        prop_assert_eq!(pq, qp);
        prop_assert!(pq <= w1(&p, &s).unwrap() + w1(&s, &q).unwrap() + 1e-8);
        prop_assert!(w1(&p, &p).unwrap().abs() <= 1e-12);
        if pq <= 1e-12 {
            prop_assert!(p.weights().iter().zip(q.weights()).all(|(a, b)| (a - b).abs() <= 1e-9));
        }
    }

    #[test]
    fn primal_and_dual_agree(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 15);
        let [p, q] = common::probs::<2>(&mut r, &sp);
        let cost = w1_primal(&p, &q).unwrap().cost;
        let dual = w1_dual(&p, &q).unwrap();
        prop_assert!((cost - dual.value).abs() <= 1e-8 * (1.0 + cost));
        prop_assert!(dual.f.lip() <= 1.0 + 1e-9);
    }

    #[test]
    fn mixing_never_expands_w1(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let [p, q, s] = common::probs::<3>(&mut r, &sp);
        let l: f64 = r.gen();
        let c = mixture_contraction(&p, &q, &s, l).unwrap();
        prop_assert!(c.mixed <= c.scaled + 1e-8 * (1.0 + c.scaled));
    }

    #[test]
    fn kr_norm_is_a_norm(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 10);
        let [p, q, s, t] = common::probs::<4>(&mut r, &sp);
        let a = kr_element(&p, &q, 1.0).unwrap();
        let b = kr_element(&s, &t, 1.0).unwrap();
        let c: f64 = r.gen_range(-3.0..3.0);
        let na = kr_norm(&a).unwrap();
        prop_assert!((kr_norm(&a.scaled(c)).unwrap() - c.abs() * na).abs() <= 1e-8 * (1.0 + na));
        let nb = kr_norm(&b).unwrap();
        prop_assert!(kr_norm(&a.plus(&b).unwrap()).unwrap() <= na + nb + 1e-8);
    }
}
