//! The quadratic greedy reference solver.
//!
//! The solver keeps a set `S` of full/boundary indices (with sentinels `0`
//! and `n + 1`) and, per iteration, picks the index `i*` not in `S` that
//! minimizes `(y_i, i)` lexicographically, where `y_i` is the mean weight of
//! the segment from `i` up to the next member of `S`. It then raises the
//! whole segment `x_{i*} .. x_{i_R - 1}` by as much as the bound `q_{i*}` or
//! the remaining budget permits, refreshes the `y` values to its left, and
//! inserts `i*` into `S`.
//!
//! This is the correctness reference the faster solver is differentially
//! tested against; every iteration is recorded in a trace so tests can replay
//! and audit intermediate state.

use crate::model::{LpInstance, Solution, Tolerances};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreedyError {
    #[error("no candidate left: every index is already in S")]
    NoCandidate,
}

/// One iteration of the greedy loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// The chosen index `i*` (1-based).
    pub chosen: usize,
    /// Nearest member of `S` below `i*` at selection time.
    pub left: usize,
    /// Nearest member of `S` above `i*` at selection time.
    pub right: usize,
    /// Amount added to `x_{i*} .. x_{right - 1}`.
    pub delta: f64,
    /// Remaining budget after the update.
    pub budget_after: f64,
}

/// Full iteration history of one solve, in execution order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GreedyTrace {
    pub records: Vec<IterationRecord>,
}

/// Working state of the greedy loop, exposed so the selection rule can be
/// exercised directly in tests.
#[derive(Debug, Clone)]
pub struct GreedyState {
    n: usize,
    /// Membership in `S`, indices `0..=n+1`; sentinels always present.
    in_s: Vec<bool>,
    members: usize,
    /// Working profile, 1-based (`x[0]` unused).
    pub x: Vec<f64>,
    /// Segment averages, 1-based (`y[0]` unused).
    pub y: Vec<f64>,
    /// Remaining budget.
    pub budget: f64,
}

impl GreedyState {
    pub fn new(inst: &LpInstance) -> Self {
        let n = inst.n();
        let prefix = inst.prefix();
        let mut in_s = vec![false; n + 2];
        in_s[0] = true;
        in_s[n + 1] = true;
        let mut y = vec![0.0; n + 1];
        for i in 1..=n {
            y[i] = prefix.avg(i, n + 1);
        }
        GreedyState {
            n,
            in_s,
            members: 0,
            x: vec![0.0; n + 1],
            y,
            budget: inst.budget(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.in_s[i]
    }

    pub fn is_complete(&self) -> bool {
        self.members == self.n
    }

    /// The selection rule: `argmin` of `(y_i, i)` over `i` not in `S`, ties
    /// broken by the smallest index.
    pub fn select_next(&self) -> Result<usize, GreedyError> {
        let mut best: Option<usize> = None;
        for i in 1..=self.n {
            if self.in_s[i] {
                continue;
            }
            match best {
                Some(b) if self.y[i] >= self.y[b] => {}
                _ => best = Some(i),
            }
        }
        best.ok_or(GreedyError::NoCandidate)
    }

    fn neighbors(&self, i_star: usize) -> (usize, usize) {
        let mut left = i_star - 1;
        while !self.in_s[left] {
            left -= 1;
        }
        let mut right = i_star + 1;
        while !self.in_s[right] {
            right += 1;
        }
        (left, right)
    }
}

/// Solves the instance with the quadratic greedy, returning the optimal
/// solution and the iteration trace.
pub fn solve_greedy(inst: &LpInstance) -> (Solution, GreedyTrace) {
    solve_greedy_with(inst, &Tolerances::default())
}

pub fn solve_greedy_with(inst: &LpInstance, tol: &Tolerances) -> (Solution, GreedyTrace) {
    let prefix = inst.prefix();
    let eps_zero = tol.eps_zero(inst.budget());
    let mut state = GreedyState::new(inst);
    let mut trace = GreedyTrace::default();

    while state.budget > eps_zero && !state.is_complete() {
        let i_star = state.select_next().expect("S incomplete");
        let (left, right) = state.neighbors(i_star);
        let width = (right - i_star) as f64;
        let rate = width * state.y[i_star];
        let d = (state.budget / rate)
            .min(inst.q_at(i_star) - state.x[i_star])
            .max(0.0);
        state.budget -= d * rate;
        for i in i_star..right {
            state.x[i] += d;
        }
        for i in left + 1..i_star {
            state.y[i] = prefix.avg(i, i_star);
        }
        state.in_s[i_star] = true;
        state.members += 1;
        trace.records.push(IterationRecord {
            chosen: i_star,
            left,
            right,
            delta: d,
            budget_after: state.budget,
        });
    }

    let x = state.x[1..].to_vec();
    (Solution::from_profile(inst, x), trace)
}
