use krorder::random::rng;
use krorder::solver::{
    bipartite_edges, farkas_value, min_cost_flow, residuals, solve_lp, LinearProgram, LpSolution, Pricing, Relation,
    Simplex, SimplexOptions,
};
use krorder::transport::w1_primal;
use proptest::prelude::*;
use rand::Rng;

mod common;

/// A random program with `n, m <= 12` that is feasible by construction
/// (rows hold at a planted point) and bounded by a budget row.
fn feasible_lp(seed: u64) -> LinearProgram {
    let mut r = rng(seed);
    let n = r.gen_range(1..=12);
    let m = r.gen_range(1..=11);
    let x0: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
    let obj: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let mut lp = if r.gen_bool(0.5) {
        LinearProgram::maximize(obj)
    } else {
        LinearProgram::minimize(obj)
    };
    for _ in 0..m {
        let a: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let act: f64 = a.iter().zip(&x0).map(|(a, x)| a * x).sum();
        match r.gen_range(0..3) {
            0 => lp.add(a, Relation::Le, act + r.gen::<f64>()),
            1 => lp.add(a, Relation::Ge, act - r.gen::<f64>()),
            _ => lp.add(a, Relation::Eq, act),
        };
    }
    lp.add(vec![1.0; n], Relation::Le, n as f64 + 1.0);
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn strong_duality_on_random_programs(seed in any::<u64>()) {
        let lp = feasible_lp(seed);
        let sol = solve_lp(&lp).unwrap();
        let opt = sol.optimum().expect("feasible and bounded by construction");
        let res = residuals(&lp, opt);
        let scale = 1.0 + opt.objective.abs();
        prop_assert!(res.primal <= 1e-8 * scale, "{res:?}");
        prop_assert!(res.dual <= 1e-8 * scale, "{res:?}");
        prop_assert!(res.gap <= 1e-8 * scale, "{res:?}");
    }
}

proptest! {
    #[test]
    fn pricing_rules_agree(seed in any::<u64>()) {
        let lp = feasible_lp(seed);
        let partial = solve_lp(&lp).unwrap().into_optimum().unwrap().objective;
        let bland = Simplex::new(SimplexOptions { pricing: Pricing::Bland, max_iterations: None })
            .solve(&lp)
            .unwrap()
            .into_optimum()
            .unwrap()
            .objective;
        prop_assert!((partial - bland).abs() <= 1e-8 * (1.0 + partial.abs()));
    }

    /// A budget row contradicting a lower bound on the same sum is
    /// infeasible, and the certificate must check out on the original rows.
    #[test]
    fn infeasible_programs_carry_a_valid_certificate(seed in any::<u64>()) {
        let mut lp = feasible_lp(seed);
        let n = lp.num_vars();
        lp.add(vec![1.0; n], Relation::Ge, n as f64 + 2.0);
        match solve_lp(&lp).unwrap() {
            LpSolution::Infeasible(cert) => {
                let v = farkas_value(&lp, &cert, 1e-9).expect("sign conditions");
                prop_assert!(v < 0.0);
            }
            other => prop_assert!(false, "expected infeasible, got {:?}", other.status()),
        }
    }

    #[test]
    fn flow_matches_transport_program(seed in any::<u64>()) {
        let (mut r, sp) = common::setup(seed, 15);
        let [p, q] = common::probs::<2>(&mut r, &sp);
        let n = sp.len();
        let plan = w1_primal(&p, &q).unwrap();
        // Transport LP over the n x n coupling.
        let mut lp = LinearProgram::minimize((0..n * n).map(|k| sp.dist(k / n, k % n)).collect());
        for i in 0..n {
            let row = (0..n * n).map(|k| if k / n == i { 1.0 } else { 0.0 }).collect();
            lp.add(row, Relation::Eq, p.weights()[i]);
        }
        for j in 0..n {
            let col = (0..n * n).map(|k| if k % n == j { 1.0 } else { 0.0 }).collect();
            lp.add(col, Relation::Eq, q.weights()[j]);
        }
        let lp_cost = solve_lp(&lp).unwrap().into_optimum().unwrap().objective;
        prop_assert!((plan.cost - lp_cost).abs() <= 1e-8 * (1.0 + lp_cost), "{} vs {}", plan.cost, lp_cost);

        // The same instance as a raw bipartite flow.
        let mut supplies = p.weights().to_vec();
        supplies.extend(q.weights().iter().map(|x| -x));
        let sinks: Vec<usize> = (n..2 * n).collect();
        let edges = bipartite_edges(&(0..n).collect::<Vec<_>>(), &sinks, |i, j| sp.dist(i, j - n));
        let flow = min_cost_flow(2 * n, &supplies, &edges).unwrap();
        prop_assert!((flow.cost - lp_cost).abs() <= 1e-8 * (1.0 + lp_cost));
    }
}

use krorder::measure::Weights;

/// Beale's cycling example; Bland's rule must terminate on it.
#[test]
fn bland_terminates_on_beale() {
    let mut lp = LinearProgram::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
    lp.add(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
    lp.add(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
    lp.add(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
    for pricing in [Pricing::Bland, Pricing::Partial] {
        let opt = Simplex::new(SimplexOptions { pricing, max_iterations: Some(1000) })
            .solve(&lp)
            .unwrap()
            .into_optimum()
            .unwrap();
        assert!((opt.objective + 0.05).abs() < 1e-12, "{pricing:?}: {}", opt.objective);
    }
}
