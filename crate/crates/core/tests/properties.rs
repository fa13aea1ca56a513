//! Randomized property tests: structural identities of the data structures,
//! differential checks between the solvers, invariants of the greedy state,
//! and round trips through the mechanism reduction.

mod common;

use chainlp::fast::{compute_blockers, solve_fast, RangeAddArray};
use chainlp::gen::{random_lp, random_mechanism, WeightModel};
use chainlp::greedy::solve_greedy;
use chainlp::model::{LpInstance, Tolerances};
use chainlp::oracle::solve_exact;
use chainlp::reduction::{build_reward, sort_types, verify_incentives, MechanismInstance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arb_instance(max_n: usize) -> impl Strategy<Value = LpInstance> {
    (1usize..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.01f64..10.0, n),
            proptest::collection::vec(0.01f64..10.0, n),
            0.0f64..1.2,
        )
            .prop_map(|(mut q, z, frac)| {
                q.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let sat: f64 = q.iter().zip(&z).map(|(a, b)| a * b).sum();
                LpInstance::new(q, z, sat * frac).unwrap()
            })
    })
}

fn arb_mechanism() -> impl Strategy<Value = MechanismInstance> {
    (1usize..=8).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.05f64..10.0, n),
            0.05f64..10.0,
            0.05f64..10.0,
        )
            .prop_map(|(q, b, c)| MechanismInstance::new(&q, b, c).unwrap())
    })
}

proptest! {
    #[test]
    fn prefix_sums_compose_exactly(inst in arb_instance(12)) {
        let n = inst.n();
        let p = inst.prefix();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n + 1 {
                    let whole = p.sum(i, k);
                    let split = p.sum(i, j) + p.sum(j, k);
                    prop_assert!(
                        common::rel_close(whole, split, 1e-13),
                        "sum({}, {}) = {} but split at {} gives {}", i, k, whole, j, split
                    );
                }
            }
        }
    }

    #[test]
    fn segment_average_is_between_extremes(inst in arb_instance(12)) {
        let n = inst.n();
        for i in 1..=n {
            for j in i + 1..=n + 1 {
                let seg = &inst.z()[i - 1..j - 1];
                let lo = seg.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = seg.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let avg = inst.avg(i, j).unwrap();
                prop_assert!(avg >= lo - 1e-12 && avg <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn greedy_and_fast_agree(inst in arb_instance(40)) {
        let tol = Tolerances::default();
        let (gsol, _) = solve_greedy(&inst);
        let fsol = solve_fast(&inst);
        prop_assert!(gsol.check_feasible(&inst, &tol).is_ok());
        prop_assert!(fsol.check_feasible(&inst, &tol).is_ok());
        for (a, b) in gsol.x.iter().zip(&fsol.x) {
            prop_assert!(common::rel_close(*a, *b, 1e-9), "{a} vs {b}");
        }
        common::check_exhaustion_dichotomy(&inst, &fsol, 1e-9);
        common::check_exhaustion_dichotomy(&inst, &gsol, 1e-9);
    }

    #[test]
    fn greedy_state_equations_hold(inst in arb_instance(25)) {
        let (_, trace) = solve_greedy(&inst);
        common::check_state_equations(&inst, &trace);
    }

    #[test]
    fn blockers_explain_the_greedy_run(inst in arb_instance(25)) {
        let (_, trace) = solve_greedy(&inst);
        let table = compute_blockers(&inst);
        common::check_blockers_match_trace(&trace, &table);
        common::check_blocker_order(&trace, &table, inst.n());
        common::check_avg_inequalities(&inst, &trace, &table);
        common::check_blocker_recurrence(&inst, &table);
        prop_assert!(table.merges <= 2 * inst.n());
    }

    #[test]
    fn frozen_y_equals_segment_average(inst in arb_instance(40)) {
        let table = compute_blockers(&inst);
        let p = inst.prefix();
        for i in 1..=inst.n() {
            let want = p.avg(i, table.b[i]);
            prop_assert!(
                common::rel_close(table.y[i], want, 1e-12),
                "y[{}] = {} but avg(i, b(i)) = {}", i, table.y[i], want
            );
        }
    }

    #[test]
    fn fenwick_matches_naive_array(
        n in 1usize..60,
        ops in proptest::collection::vec((any::<u16>(), any::<u16>(), -100i64..100), 0..80),
    ) {
        let mut fen: RangeAddArray<i64> = RangeAddArray::new(n);
        let mut naive = vec![0i64; n + 1];
        for (a, b, d) in ops {
            let i = (a as usize % n) + 1;
            let j = (b as usize % n) + 1;
            let (i, j) = (i.min(j), i.max(j));
            fen.range_add(i, j, d).unwrap();
            for v in naive[i..=j].iter_mut() {
                *v += d;
            }
        }
        for i in 1..=n {
            prop_assert_eq!(fen.point_query(i).unwrap(), naive[i]);
        }
    }

    #[test]
    fn instance_validation_is_deterministic(inst in arb_instance(12)) {
        let again = LpInstance::new(inst.q().to_vec(), inst.z().to_vec(), inst.budget()).unwrap();
        prop_assert_eq!(&again, &inst);
    }

    #[test]
    fn sorting_round_trips_through_restore(mech in arb_mechanism()) {
        let (sorted, perm) = sort_types(mech.q()).unwrap();
        prop_assert_eq!(&sorted, mech.q());
        for (s, &orig) in perm.iter().enumerate() {
            prop_assert_eq!(mech.q()[orig], sorted[s]);
        }
        // restore_order undoes the instance's own sort
        let tagged: Vec<f64> = (0..mech.n()).map(|s| s as f64).collect();
        let restored = mech.restore_order(&tagged);
        for (orig, &tag) in restored.iter().enumerate() {
            prop_assert_eq!(mech.original_order()[tag as usize], orig);
        }
    }

    #[test]
    fn budget_lhs_matches_lp_budget_row(mech in arb_mechanism()) {
        let lp = mech.to_lp();
        let sol = solve_fast(&lp);
        let lhs = mech.budget_lhs(&sol.x).unwrap();
        let row: f64 = sol.x.iter().zip(lp.z()).map(|(a, b)| a * b).sum();
        prop_assert!(
            common::rel_close(lhs, mech.cost() * row, 1e-12),
            "lhs {} vs C * z.x {}", lhs, mech.cost() * row
        );
        prop_assert!(lhs <= mech.budget() * (1.0 + 1e-9));
    }

    #[test]
    fn scaling_budget_and_cost_preserves_solutions(
        mech in arb_mechanism(),
        alpha in prop_oneof![Just(2.0f64), Just(0.25), 0.1f64..10.0],
    ) {
        let scaled = MechanismInstance::new(
            mech.q(),
            mech.budget() * alpha,
            mech.cost() * alpha,
        ).unwrap();
        let a = solve_fast(&mech.to_lp());
        let b = solve_fast(&scaled.to_lp());
        for (u, v) in a.x.iter().zip(&b.x) {
            prop_assert!(common::rel_close(*u, *v, 1e-9), "{u} vs {v}");
        }
    }

    #[test]
    fn optimal_profiles_admit_incentive_compatible_rewards(mech in arb_mechanism()) {
        let tol = Tolerances::default();
        let sol = solve_fast(&mech.to_lp());
        let schedule = build_reward(&mech, &sol.x, &tol).unwrap();
        // thresholds strictly increasing, levels non-decreasing
        for w in schedule.breakpoints().windows(2) {
            prop_assert!(w[0].0 < w[1].0);
            prop_assert!(w[0].1 <= w[1].1);
        }
        let report = verify_incentives(&schedule, &mech, &sol.x, &tol);
        prop_assert!(report.all_pass(), "{:?}", report);
    }

    #[test]
    fn overbudget_profiles_are_rejected(mech in arb_mechanism()) {
        let tol = Tolerances::default();
        // the full-bound profile exceeds the budget whenever K < saturation
        let lp = mech.to_lp();
        if lp.budget() < 0.99 * lp.saturation_cost() {
            let full = mech.q().to_vec();
            prop_assert!(build_reward(&mech, &full, &tol).is_err());
        }
    }
}

#[test]
fn solvers_match_exact_oracle_on_dyadic_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..200 {
        let n = rng.random_range(1..=6);
        let exact = common::random_dyadic_instance(&mut rng, n);
        common::assert_exact_float_view(&exact);
        let truth = solve_exact(&exact).unwrap();
        let lp = exact.to_lp();
        let (gsol, _) = solve_greedy(&lp);
        let fsol = solve_fast(&lp);
        let want = truth.objective_f64();
        assert!(
            common::rel_close(gsol.objective, want, 1e-9),
            "trial {trial}: greedy {} vs oracle {want}",
            gsol.objective
        );
        assert!(
            common::rel_close(fsol.objective, want, 1e-9),
            "trial {trial}: fast {} vs oracle {want}",
            fsol.objective
        );
    }
}

#[test]
fn generated_instances_are_solvable_at_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for model in [WeightModel::Uniform, WeightModel::Mechanism] {
        let inst = random_lp(&mut rng, 2000, model);
        let sol = solve_fast(&inst);
        assert!(sol.check_feasible(&inst, &Tolerances::default()).is_ok());
        common::check_exhaustion_dichotomy(&inst, &sol, 1e-9);
    }
}

#[test]
fn random_mechanisms_round_trip_through_the_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tol = Tolerances::default();
    for _ in 0..50 {
        let n = rng.random_range(2..=30);
        let mech = random_mechanism(&mut rng, n);
        let lp = mech.to_lp();
        let sol = solve_fast(&lp);
        let lhs = mech.budget_lhs(&sol.x).unwrap();
        assert!(lhs <= mech.budget() * (1.0 + 1e-9));
        let schedule = build_reward(&mech, &sol.x, &tol).unwrap();
        let report = verify_incentives(&schedule, &mech, &sol.x, &tol);
        assert!(report.all_pass());
    }
}
