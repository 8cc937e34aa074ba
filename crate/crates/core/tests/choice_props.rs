use krorder::choice::{
    affine_core_approx, default_lambda_grid, default_probes, max_set, max_set_convex, scalarization_bounds,
    ChoiceProblem,
};
use krorder::preorder::{comparison_slack, expectation_gaps, make_proper_family, weakly_prefers, UtilityFamily};
use krorder::random::{random_prob, random_values};
use proptest::prelude::*;
use rand::Rng;

mod common;

fn menu_and_family(seed: u64) -> (Vec<krorder::measure::ProbMeasure>, UtilityFamily, krorder::random::Rng64) {
    let (mut r, sp) = common::setup(seed, 6);
    let fam = common::family(&mut r, &sp, 3);
    let menu = (0..r.gen_range(1..7)).map(|_| random_prob(&mut r, &sp)).collect();
    (menu, fam, r)
}

proptest! {
    /// The lower bound always sits inside MAX, and every item that is
    /// maximal against mixtures of the menu sits inside the upper bound.
    #[test]
    fn scalarization_bounds_bracket_hull_maximal_items(seed in any::<u64>()) {
        let (menu, fam, _) = menu_and_family(seed);
        let panel: Vec<_> = menu
            .iter()
            .enumerate()
            .flat_map(|(i, a)| menu[i + 1..].iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        let proper = make_proper_family(&fam, &panel).unwrap();
        let problem = match ChoiceProblem::new(menu.clone(), fam.clone(), proper.family) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let b = scalarization_bounds(&problem).unwrap();
        let max = max_set(&menu, &fam).unwrap();
        prop_assert!(b.lower.iter().all(|i| max.contains(i)), "{:?} vs {:?}", b.lower, max);
        let hull = max_set_convex(&menu, &fam).unwrap();
        prop_assert!(hull.iter().all(|i| b.upper.contains(i)), "{:?} vs {:?}", hull, b.upper);
        prop_assert!(hull.iter().all(|i| max.contains(i)));
    }

    #[test]
    fn growing_the_family_never_shrinks_max(seed in any::<u64>()) {
        let (menu, fam, mut r) = menu_and_family(seed);
        let sp = fam.space().clone();
        let extra = krorder::space::LipschitzFunction::new(&sp, random_values(&mut r, sp.len())).unwrap();
        let bigger = fam.extended(vec![extra]).unwrap();
        let small = max_set(&menu, &fam).unwrap();
        let big = max_set(&menu, &bigger).unwrap();
        prop_assert!(small.iter().all(|i| big.contains(i)), "{small:?} vs {big:?}");
    }

    /// For an affine preference the mixture test passes exactly on the
    /// pairs it ranks, away from slack-level ties.
    #[test]
    fn mixture_test_is_sound_for_affine_preferences(seed in any::<u64>()) {
        let (menu, fam, mut r) = menu_and_family(seed);
        let sp = fam.space().clone();
        let (p, q) = (random_prob(&mut r, &sp), random_prob(&mut r, &sp));
        let probes = default_probes(&sp, &menu);
        let t = affine_core_approx(&fam, &p, &q, &probes, &default_lambda_grid()).unwrap();
        if t.holds {
            prop_assert!(weakly_prefers(&fam, &p, &q).unwrap());
        }
        let clear = expectation_gaps(&fam, &p, &q)
            .unwrap()
            .iter()
            .zip(fam.members())
            .all(|(g, u)| *g > 16.0 * comparison_slack(u));
        if clear {
            prop_assert!(t.holds);
        }
    }
}
