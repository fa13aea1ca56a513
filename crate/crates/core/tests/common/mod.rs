//! Shared helpers for the integration and acceptance suites: greedy-trace
//! replay, invariant checkers for the solver state equations, and exact
//! dyadic-rational instance generation for oracle comparisons.

#![allow(dead_code)]

use chainlp::fast::BlockerTable;
use chainlp::greedy::GreedyTrace;
use chainlp::model::{LpInstance, Solution};
use chainlp::oracle::{ratio, Rational, RationalInstance};
use num_traits::ToPrimitive;
use rand::Rng;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Replayed state of one greedy iteration boundary.
pub struct ReplayState {
    /// Membership of S_l over 0..=n+1.
    pub in_s: Vec<bool>,
    /// 1-based working profile.
    pub x: Vec<f64>,
    /// 1-based y values as the algorithm maintains them.
    pub y: Vec<f64>,
}

impl ReplayState {
    pub fn right(&self, i: usize) -> usize {
        let mut j = i + 1;
        while !self.in_s[j] {
            j += 1;
        }
        j
    }

    pub fn left(&self, i: usize) -> usize {
        let mut j = i - 1;
        while !self.in_s[j] {
            j -= 1;
        }
        j
    }
}

/// Replays a greedy trace, invoking `check(l, state, record)` immediately
/// after the l-th iteration (1-based).
pub fn replay_trace<F>(inst: &LpInstance, trace: &GreedyTrace, mut check: F)
where
    F: FnMut(usize, &ReplayState, &chainlp::greedy::IterationRecord),
{
    let n = inst.n();
    let prefix = inst.prefix();
    let mut state = ReplayState {
        in_s: {
            let mut v = vec![false; n + 2];
            v[0] = true;
            v[n + 1] = true;
            v
        },
        x: vec![0.0; n + 1],
        y: {
            let mut v = vec![0.0; n + 1];
            for i in 1..=n {
                v[i] = prefix.avg(i, n + 1);
            }
            v
        },
    };
    for (idx, rec) in trace.records.iter().enumerate() {
        for i in rec.chosen..rec.right {
            state.x[i] += rec.delta;
        }
        for i in rec.left + 1..rec.chosen {
            state.y[i] = prefix.avg(i, rec.chosen);
        }
        state.in_s[rec.chosen] = true;
        check(idx + 1, &state, rec);
    }
}

/// The state equations at every iteration boundary: members of S sit at
/// their bounds (the most recent possibly excepted), non-members copy their
/// left neighbor, maintained y values equal the segment averages, and the
/// residual budget matches K - z.x.
pub fn check_state_equations(inst: &LpInstance, trace: &GreedyTrace) {
    let n = inst.n();
    let prefix = inst.prefix();
    replay_trace(inst, trace, |l, state, rec| {
        for i in 1..=n {
            if state.in_s[i] {
                if i != rec.chosen {
                    assert!(
                        rel_close(state.x[i], inst.q_at(i), 1e-12),
                        "iter {l}: member {i} not at bound"
                    );
                }
            } else {
                let prev = if i > 1 { state.x[i - 1] } else { 0.0 };
                assert!(
                    rel_close(state.x[i], prev, 1e-12),
                    "iter {l}: non-member {i} does not copy left neighbor"
                );
                let want = prefix.avg(i, state.right(i));
                assert!(
                    rel_close(state.y[i], want, 1e-12),
                    "iter {l}: y[{i}] = {} but avg(i, right) = {want}",
                    state.y[i]
                );
            }
        }
        let used: f64 = (1..=n).map(|i| inst.z_at(i) * state.x[i]).sum();
        let residual = inst.budget() - used;
        assert!(
            (rec.budget_after - residual).abs() <= 1e-12 * inst.budget().max(1.0),
            "iter {l}: recorded budget {} but K - z.x = {residual}",
            rec.budget_after
        );
    });
}

/// Termination dichotomy: either the budget is spent exactly or every
/// variable sits at its bound.
pub fn check_exhaustion_dichotomy(inst: &LpInstance, sol: &Solution, eps: f64) {
    let budget_tight =
        (sol.budget_used - inst.budget()).abs() <= eps * inst.budget().max(1.0);
    let all_full = sol
        .x
        .iter()
        .zip(inst.q())
        .all(|(&xi, &qi)| rel_close(xi, qi, eps));
    assert!(
        budget_tight || all_full,
        "neither budget-tight (used {} of {}) nor fully saturated",
        sol.budget_used,
        inst.budget()
    );
}

/// Every greedy iteration's right neighbor equals the precomputed blocker of
/// the chosen index.
pub fn check_blockers_match_trace(trace: &GreedyTrace, table: &BlockerTable) {
    for rec in &trace.records {
        assert_eq!(
            rec.right, table.b[rec.chosen],
            "i_R = {} but b({}) = {}",
            rec.right, rec.chosen, table.b[rec.chosen]
        );
    }
}

/// Execution order around each blocker: b(i) before i, and i before any j
/// strictly between i and b(i).
pub fn check_blocker_order(trace: &GreedyTrace, table: &BlockerTable, n: usize) {
    let mut position = vec![usize::MAX; n + 2];
    for (idx, rec) in trace.records.iter().enumerate() {
        position[rec.chosen] = idx;
    }
    for i in 1..=n {
        if position[i] == usize::MAX {
            continue;
        }
        let b = table.b[i];
        if b <= n {
            assert!(
                position[b] != usize::MAX && position[b] < position[i],
                "iteration choosing b({i}) = {b} must precede the one choosing {i}"
            );
        }
        for j in i + 1..b.min(n + 1) {
            if position[j] != usize::MAX {
                assert!(
                    position[j] > position[i],
                    "iteration choosing {j} in ({i}, b({i})) must come after {i}"
                );
            }
        }
    }
}

/// Segment-average inequalities at each iteration: for i* < i < b(i*),
/// avg(i*, i) <= avg(i, b(i*)); for i_L < i < i*, avg(i, b(i*)) < avg(i, i*).
pub fn check_avg_inequalities(inst: &LpInstance, trace: &GreedyTrace, table: &BlockerTable) {
    let prefix = inst.prefix();
    let slack = 1e-9;
    for rec in &trace.records {
        let b = table.b[rec.chosen];
        for i in rec.chosen + 1..b {
            let lhs = prefix.avg(rec.chosen, i);
            let rhs = prefix.avg(i, b);
            assert!(
                lhs <= rhs * (1.0 + slack) + slack,
                "avg({}, {i}) = {lhs} > avg({i}, {b}) = {rhs}",
                rec.chosen
            );
        }
        for i in rec.left + 1..rec.chosen {
            let lhs = prefix.avg(i, b);
            let rhs = prefix.avg(i, rec.chosen);
            assert!(
                lhs <= rhs * (1.0 + slack) + slack,
                "avg({i}, {b}) = {lhs} not below avg({i}, {}) = {rhs}",
                rec.chosen
            );
        }
    }
}

/// Blocker recurrence: every b(i) is an iterate b^m(i+1), the merged-over
/// averages are non-decreasing along the chain, and the stopping step
/// reverses strictly.
pub fn check_blocker_recurrence(inst: &LpInstance, table: &BlockerTable) {
    let n = inst.n();
    let prefix = inst.prefix();
    let slack = 1e-9;
    for i in 1..=n {
        let target = table.b[i];
        let mut cursor = i + 1; // b^0(i + 1)
        let mut m = 0usize;
        while cursor != target {
            assert!(
                cursor <= n,
                "b({i}) = {target} is not an iterate of b over {}",
                i + 1
            );
            let next = table.b[cursor];
            // merged step: avg(i, b^t) <= avg(b^t, b^{t+1})
            let lhs = prefix.avg(i, cursor);
            let rhs = prefix.avg(cursor, next);
            assert!(
                lhs <= rhs * (1.0 + slack) + slack,
                "merge step t={m} for i={i}: avg({i},{cursor}) = {lhs} > avg({cursor},{next}) = {rhs}"
            );
            cursor = next;
            m += 1;
        }
        // stopping step, when a further iterate exists
        if target <= n {
            let next = table.b[target];
            let lhs = prefix.avg(i, target);
            let rhs = prefix.avg(target, next);
            assert!(
                lhs >= rhs * (1.0 - slack) - slack,
                "stop step for i={i}: avg({i},{target}) = {lhs} not above avg({target},{next}) = {rhs}"
            );
        }
    }
}

/// Random dyadic rationals: exactly representable as f64, so the float
/// solvers and the exact oracle see the identical instance.
pub fn random_dyadic_instance<R: Rng>(rng: &mut R, n: usize) -> RationalInstance {
    let mut q: Vec<Rational> = (0..n)
        .map(|_| ratio(rng.random_range(1..=64), 1 << rng.random_range(0..6)))
        .collect();
    q.sort();
    let z: Vec<Rational> = (0..n)
        .map(|_| ratio(rng.random_range(1..=64), 1 << rng.random_range(0..6)))
        .collect();
    let saturation: Rational = q.iter().zip(&z).map(|(a, b)| a * b).sum();
    let k = saturation * ratio(rng.random_range(1..=256), 256);
    RationalInstance::new(q, z, k).expect("generated rational instance is valid")
}

/// Checks that the rational instance converts to floats without rounding.
pub fn assert_exact_float_view(inst: &RationalInstance) {
    let lp = inst.to_lp();
    for (r, &f) in inst.q().iter().zip(lp.q()) {
        assert_eq!(r.to_f64().unwrap(), f);
    }
}

/// Float view of an exact budget-use value.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("representable")
}
