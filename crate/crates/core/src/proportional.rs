//! Equilibria of the proportional mechanism and its efficiency against the
//! optimal step-reward mechanism.
//!
//! Under proportional division, agent `i` gets `x_i B / sum_j x_j` and pays
//! cost `x_i C / q_i`; with all-zero qualities every utility is 0 by
//! convention. For two agents the interior pure equilibrium has the closed
//! form `x_1 + x_2 = B q_1 q_2 / (C (q_1 + q_2))` with
//! `x_1 = S^2 C / (q_2 B)` and `x_2 = S^2 C / (q_1 B)`. For more agents we
//! iterate exact single-agent best responses; that extension is numerical,
//! not a proven result, and is labeled as such in the output.

use crate::fast::solve_fast;
use crate::reduction::MechanismInstance;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("closed form leaves the strategy space (not an interior equilibrium)")]
    NotInterior,
    #[error("best-response dynamics did not converge within {iterations} iterations")]
    DidNotConverge {
        iterations: usize,
        last: Vec<f64>,
    },
    #[error("the proportional mechanism needs at least two agents")]
    TooFewAgents,
    #[error("parameters must be strictly positive")]
    InvalidParameters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumMethod {
    ClosedForm2Agent,
    BestResponse,
}

/// An equilibrium (or best fixed-point candidate) of the proportional game.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumProfile {
    pub x: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub method: EquilibriumMethod,
    /// Largest utility any agent could gain by deviating, from the
    /// fixed-point verification sweep.
    pub max_deviation_gain: f64,
}

fn utility(x: f64, others: f64, q: f64, budget: f64, cost: f64) -> f64 {
    let total = x + others;
    if total <= 0.0 {
        return 0.0;
    }
    x * budget / total - x * cost / q
}

// Exact best response of one agent against a fixed opposing mass `s`:
// the interior stationary point of x B / (x + s) - x C / q clamped to
// [0, q]. For s = 0 the supremum sits at x -> 0+, which no action attains;
// a tiny positive step keeps the dynamics out of the degenerate corner.
fn best_response(s: f64, q: f64, budget: f64, cost: f64) -> f64 {
    if s <= 0.0 {
        return q * 1e-9;
    }
    let stationary = (s * budget * q / cost).sqrt() - s;
    stationary.clamp(0.0, q)
}

// Largest gain available to one agent over a grid plus the analytic
// stationary point.
fn deviation_gain(x: &[f64], i: usize, q: f64, budget: f64, cost: f64) -> f64 {
    let others: f64 = x
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| v)
        .sum();
    let current = utility(x[i], others, q, budget, cost);
    let mut best = utility(0.0, others, q, budget, cost);
    const GRID: usize = 1000;
    for g in 1..=GRID {
        let cand = q * g as f64 / GRID as f64;
        best = best.max(utility(cand, others, q, budget, cost));
    }
    let br = best_response(others, q, budget, cost);
    best = best.max(utility(br, others, q, budget, cost));
    best - current
}

fn verify_fixed_point(x: &[f64], q: &[f64], budget: f64, cost: f64) -> f64 {
    (0..x.len())
        .map(|i| deviation_gain(x, i, q[i], budget, cost))
        .fold(0.0, f64::max)
}

/// The two-agent interior equilibrium in closed form.
pub fn equilibrium_2agent(
    q1: f64,
    q2: f64,
    budget: f64,
    cost: f64,
) -> Result<EquilibriumProfile, EquilibriumError> {
    if !(q1 > 0.0 && q2 > 0.0 && budget > 0.0 && cost > 0.0) {
        return Err(EquilibriumError::InvalidParameters);
    }
    let s = budget * q1 * q2 / (cost * (q1 + q2));
    let x1 = s * s * cost / (q2 * budget);
    let x2 = s * s * cost / (q1 * budget);
    if x1 > q1 || x2 > q2 {
        return Err(EquilibriumError::NotInterior);
    }
    // interior optimality needs the utility slope at the upper bound to be
    // non-positive for both agents
    let slope1 = x2 * budget / ((q1 + x2) * (q1 + x2)) - cost / q1;
    let slope2 = x1 * budget / ((q2 + x1) * (q2 + x1)) - cost / q2;
    if slope1 > 1e-12 * cost || slope2 > 1e-12 * cost {
        return Err(EquilibriumError::NotInterior);
    }
    debug_assert!(((x1 + x2) - s).abs() <= 1e-9 * s.max(1.0));
    let x = vec![x1, x2];
    let gain = verify_fixed_point(&x, &[q1, q2], budget, cost);
    Ok(EquilibriumProfile {
        x,
        converged: true,
        iterations: 0,
        method: EquilibriumMethod::ClosedForm2Agent,
        max_deviation_gain: gain,
    })
}

/// Damped best-response iteration for `n >= 2` agents.
///
/// Converges when the largest per-agent update drops below `tol`; a damping
/// factor of 0.5 kicks in for an agent whose update direction flips twice in
/// a row. The returned profile carries the outcome of an explicit
/// fixed-point deviation sweep.
pub fn best_response_dynamics(
    q: &[f64],
    budget: f64,
    cost: f64,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumProfile, EquilibriumError> {
    let n = q.len();
    if n < 2 {
        return Err(EquilibriumError::TooFewAgents);
    }
    if !(budget > 0.0 && cost > 0.0 && tol > 0.0) || q.iter().any(|&v| !(v > 0.0)) {
        return Err(EquilibriumError::InvalidParameters);
    }
    let mut x: Vec<f64> = q.iter().map(|&v| v / 2.0).collect();
    let mut last_dir = vec![0i8; n];
    let mut flips = vec![0u8; n];
    let total0: f64 = x.iter().sum();
    let mut total = total0;
    for it in 1..=max_iter {
        let mut max_change = 0.0f64;
        for i in 0..n {
            let others = total - x[i];
            let br = best_response(others, q[i], budget, cost);
            let dir = (br - x[i]).signum() as i8;
            if dir != 0 && dir == -last_dir[i] {
                flips[i] = flips[i].saturating_add(1);
            } else if dir != last_dir[i] {
                flips[i] = 0;
            }
            last_dir[i] = dir;
            let next = if flips[i] >= 2 {
                0.5 * (x[i] + br)
            } else {
                br
            };
            max_change = max_change.max((next - x[i]).abs());
            total += next - x[i];
            x[i] = next;
        }
        if max_change < tol {
            let gain = verify_fixed_point(&x, q, budget, cost);
            return Ok(EquilibriumProfile {
                x,
                converged: true,
                iterations: it,
                method: EquilibriumMethod::BestResponse,
                max_deviation_gain: gain,
            });
        }
    }
    Err(EquilibriumError::DidNotConverge {
        iterations: max_iter,
        last: x,
    })
}

/// Side-by-side outcome of the proportional mechanism and the optimal one.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub equilibrium: EquilibriumProfile,
    /// Gross product under the proportional equilibrium.
    pub proportional_product: f64,
    /// Optimal gross product from the LP reduction.
    pub optimal_objective: f64,
    /// proportional_product / optimal_objective.
    pub ratio: f64,
}

/// Computes the proportional equilibrium, the optimal objective, and their
/// ratio for one mechanism instance.
pub fn compare_mechanisms(
    mech: &MechanismInstance,
) -> Result<EfficiencyReport, EquilibriumError> {
    let q = mech.q();
    if q.len() < 2 {
        return Err(EquilibriumError::TooFewAgents);
    }
    let equilibrium = if q.len() == 2 {
        match equilibrium_2agent(q[0], q[1], mech.budget(), mech.cost()) {
            Ok(profile) => profile,
            Err(EquilibriumError::NotInterior) => {
                best_response_dynamics(q, mech.budget(), mech.cost(), 1e-12, 10_000)?
            }
            Err(e) => return Err(e),
        }
    } else {
        best_response_dynamics(q, mech.budget(), mech.cost(), 1e-12, 10_000)?
    };
    let proportional_product: f64 = equilibrium.x.iter().sum();
    let optimal = solve_fast(&mech.to_lp());
    Ok(EfficiencyReport {
        ratio: proportional_product / optimal.objective,
        proportional_product,
        optimal_objective: optimal.objective,
        equilibrium,
    })
}

/// Gross product of the proportional equilibrium divided by the optimal one.
pub fn efficiency_ratio(mech: &MechanismInstance) -> Result<f64, EquilibriumError> {
    Ok(compare_mechanisms(mech)?.ratio)
}
