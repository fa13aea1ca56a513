//! Translation between the reward-mechanism design problem and the
//! chain-constrained LP, plus construction and verification of the optimal
//! step reward function.
//!
//! A mechanism instance consists of agent types `q_i` (best producible
//! quality), a reward budget `B` and a cost constant `C`; producing quality
//! `x` costs agent `i` exactly `x * C / q_i`. A non-decreasing step reward
//! function `f` can incentivize a monotone profile `x*` iff
//!
//! ```text
//! C * ( x_n/q_n + sum_{i<n} [ (n-i)(1/q_i - 1/q_{i+1}) + 1/q_i ] * x_i ) <= B,
//! ```
//!
//! which is the LP budget row with `z_i = (n-i)(1/q_i - 1/q_{i+1}) + 1/q_i`
//! (`z_n = 1/q_n`) and `K = B / C`.

use crate::model::{LpInstance, Tolerances};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("agent type q[{index}] = {value} must be strictly positive and finite")]
    NonPositiveBound { index: usize, value: f64 },
    #[error("budget B = {value} must be strictly positive and finite")]
    NonPositiveBudget { value: f64 },
    #[error("cost constant C = {value} must be strictly positive and finite")]
    NonPositiveCost { value: f64 },
    #[error("no agents given")]
    EmptyInstance,
    #[error("profile has length {got} but the instance has {expected} agents")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("profile is not non-decreasing at index {index}")]
    NonMonotoneProfile { index: usize },
    #[error("profile value x[{index}] = {value} is outside [0, q[{index}] = {bound}]")]
    ProfileOutOfBounds { index: usize, value: f64, bound: f64 },
    #[error("required payout {required} exceeds budget B = {budget}")]
    BudgetExceeded { required: f64, budget: f64 },
}

/// A mechanism-design instance: agent types, budget and cost constant.
///
/// Types are stored sorted non-decreasing; `original_order` maps each sorted
/// position back to the caller's index so solutions can be reported in the
/// order the types were given.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismInstance {
    q: Vec<f64>,
    budget: f64,
    cost: f64,
    original_order: Vec<usize>,
}

/// Stable ascending sort of the raw types.
///
/// Returns the sorted array together with the permutation `perm` such that
/// `sorted[s] == raw_q[perm[s]]`.
pub fn sort_types(raw_q: &[f64]) -> Result<(Vec<f64>, Vec<usize>), ReductionError> {
    if raw_q.is_empty() {
        return Err(ReductionError::EmptyInstance);
    }
    for (idx, &v) in raw_q.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(ReductionError::NonPositiveBound {
                index: idx + 1,
                value: v,
            });
        }
    }
    let mut perm: Vec<usize> = (0..raw_q.len()).collect();
    perm.sort_by(|&a, &b| raw_q[a].partial_cmp(&raw_q[b]).unwrap());
    let sorted = perm.iter().map(|&i| raw_q[i]).collect();
    Ok((sorted, perm))
}

impl MechanismInstance {
    pub fn new(raw_q: &[f64], budget: f64, cost: f64) -> Result<Self, ReductionError> {
        let (q, original_order) = sort_types(raw_q)?;
        if !(budget > 0.0) || !budget.is_finite() {
            return Err(ReductionError::NonPositiveBudget { value: budget });
        }
        if !(cost > 0.0) || !cost.is_finite() {
            return Err(ReductionError::NonPositiveCost { value: cost });
        }
        Ok(MechanismInstance {
            q,
            budget,
            cost,
            original_order,
        })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Types sorted non-decreasing.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn original_order(&self) -> &[usize] {
        &self.original_order
    }

    /// Maps a profile in sorted order back to the caller's original order.
    pub fn restore_order(&self, x_sorted: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x_sorted.len()];
        for (s, &orig) in self.original_order.iter().enumerate() {
            out[orig] = x_sorted[s];
        }
        out
    }

    /// The equivalent LP: `z_i = (n-i)(1/q_i - 1/q_{i+1}) + 1/q_i` for
    /// `i < n`, `z_n = 1/q_n`, and `K = B/C`.
    pub fn to_lp(&self) -> LpInstance {
        let n = self.q.len();
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let w = if i + 1 < n {
                (n - i - 1) as f64 * (1.0 / self.q[i] - 1.0 / self.q[i + 1]) + 1.0 / self.q[i]
            } else {
                1.0 / self.q[i]
            };
            z.push(w);
        }
        LpInstance::new(self.q.clone(), z, self.budget / self.cost)
            .expect("reduction of a valid mechanism is a valid LP")
    }

    /// Left-hand side of the budget condition for a sorted profile `x`:
    /// `C * (x_n/q_n + sum_{i<n} z_i x_i)`.
    pub fn budget_lhs(&self, x: &[f64]) -> Result<f64, ReductionError> {
        let n = self.q.len();
        if x.len() != n {
            return Err(ReductionError::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut acc = x[n - 1] / self.q[n - 1];
        for i in 0..n - 1 {
            let zi = (n - i - 1) as f64 * (1.0 / self.q[i] - 1.0 / self.q[i + 1]) + 1.0 / self.q[i];
            acc += zi * x[i];
        }
        Ok(self.cost * acc)
    }
}

/// A non-decreasing step reward function given as (threshold, level) pairs.
///
/// `value(x)` is the level of the greatest threshold `<= x` and `0` below the
/// first threshold. Thresholds are strictly increasing and levels
/// non-decreasing; an agent exactly at a threshold receives that level.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardSchedule {
    breakpoints: Vec<(f64, f64)>,
}

impl RewardSchedule {
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn value(&self, x: f64) -> f64 {
        // last threshold <= x
        match self
            .breakpoints
            .partition_point(|&(t, _)| t <= x)
        {
            0 => 0.0,
            p => self.breakpoints[p - 1].1,
        }
    }
}

/// Builds the optimal step reward function for a sorted monotone profile.
///
/// The level at threshold `x_i` is the telescoping sum
/// `C * sum_{j<=i} (x_j - x_{j-1}) / q_j` with `x_0 = 0`. Duplicate
/// thresholds from pooled segments collapse into a single breakpoint; zero
/// thresholds contribute nothing and stay merged into the implicit base
/// level 0.
pub fn build_reward(
    mech: &MechanismInstance,
    x_star: &[f64],
    tol: &Tolerances,
) -> Result<RewardSchedule, ReductionError> {
    let n = mech.n();
    if x_star.len() != n {
        return Err(ReductionError::DimensionMismatch {
            expected: n,
            got: x_star.len(),
        });
    }
    let q = mech.q();
    let mut prev = 0.0;
    for (idx, &xi) in x_star.iter().enumerate() {
        let slack = tol.eps_feas * q[idx].max(1.0);
        if xi < prev - slack {
            return Err(ReductionError::NonMonotoneProfile { index: idx + 1 });
        }
        if xi < -slack || xi > q[idx] + slack {
            return Err(ReductionError::ProfileOutOfBounds {
                index: idx + 1,
                value: xi,
                bound: q[idx],
            });
        }
        prev = xi;
    }
    let required = mech.budget_lhs(x_star)?;
    if required > mech.budget() * (1.0 + tol.eps_feas) {
        return Err(ReductionError::BudgetExceeded {
            required,
            budget: mech.budget(),
        });
    }

    let mut breakpoints: Vec<(f64, f64)> = Vec::new();
    let mut level = 0.0;
    let mut prev_x = 0.0;
    for i in 0..n {
        let xi = x_star[i].clamp(0.0, q[i]);
        level += mech.cost() * (xi - prev_x) / q[i];
        prev_x = xi;
        if xi <= 0.0 {
            continue;
        }
        match breakpoints.last_mut() {
            // pooled agents share a threshold only up to float noise in the
            // solver output; collapse near-duplicates, keeping the smallest
            // x so every pooled agent still clears the threshold
            Some(last) if xi <= last.0 + tol.eps_feas * last.0.max(1.0) => {
                last.0 = last.0.min(xi);
                last.1 = last.1.max(level);
            }
            _ => breakpoints.push((xi, level)),
        }
    }
    Ok(RewardSchedule { breakpoints })
}

/// Per-agent outcome of the incentive check.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentIncentive {
    /// 1-based agent index in sorted order.
    pub index: usize,
    /// Utility at the prescribed quality.
    pub utility: f64,
    /// Best deviation found and its utility.
    pub best_deviation: f64,
    pub deviation_utility: f64,
    pub pass: bool,
}

/// Result of [`verify_incentives`]: per-agent checks plus the global budget
/// and non-negativity conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct IncentiveReport {
    pub agents: Vec<AgentIncentive>,
    pub total_payout: f64,
    pub budget_respected: bool,
    pub schedule_nonnegative: bool,
}

impl IncentiveReport {
    pub fn all_pass(&self) -> bool {
        self.budget_respected
            && self.schedule_nonnegative
            && self.agents.iter().all(|a| a.pass)
    }
}

/// Checks that no agent prefers any deviation to its prescribed quality.
///
/// Because `f` is a non-decreasing step function, each agent's utility on a
/// step is maximized at the left endpoint, so it suffices to test the finite
/// candidate set `{0} ∪ {thresholds t : t <= q_i}`. Ties are resolved toward
/// the prescribed quality with absolute slack `eps_feas * C`.
pub fn verify_incentives(
    schedule: &RewardSchedule,
    mech: &MechanismInstance,
    x_star: &[f64],
    tol: &Tolerances,
) -> IncentiveReport {
    let c = mech.cost();
    let slack = tol.eps_feas * c;
    let mut agents = Vec::with_capacity(mech.n());
    let mut total_payout = 0.0;
    for (idx, (&xi, &qi)) in x_star.iter().zip(mech.q()).enumerate() {
        let utility = schedule.value(xi) - xi * c / qi;
        total_payout += schedule.value(xi);
        let mut best_deviation = 0.0;
        let mut deviation_utility = 0.0; // u_i(0) = 0
        for &(t, level) in schedule.breakpoints() {
            if t > qi {
                break;
            }
            let u = level - t * c / qi;
            if u > deviation_utility {
                deviation_utility = u;
                best_deviation = t;
            }
        }
        agents.push(AgentIncentive {
            index: idx + 1,
            utility,
            best_deviation,
            deviation_utility,
            pass: utility >= deviation_utility - slack,
        });
    }
    let schedule_nonnegative = schedule
        .breakpoints()
        .iter()
        .all(|&(_, level)| level >= 0.0);
    IncentiveReport {
        agents,
        total_payout,
        budget_respected: total_payout <= mech.budget() * (1.0 + tol.eps_feas),
        schedule_nonnegative,
    }
}
