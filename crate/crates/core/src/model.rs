//! Core numeric types shared by every solver: validated instances, solutions,
//! prefix sums over the budget weights, and the tolerance knobs.
//!
//! The problem solved throughout this crate is
//!
//! ```text
//! maximize    x_1 + x_2 + ... + x_n
//! subject to  0 <= x_i <= q_i            (bounds, q non-decreasing)
//!             x_1 <= x_2 <= ... <= x_n   (chain)
//!             z_1 x_1 + ... + z_n x_n <= K
//! ```
//!
//! with all `q_i > 0`, `z_i > 0` and `K >= 0`. Indices in the public API are
//! 1-based to match the solver descriptions; the sentinels `0` and `n + 1`
//! appear in the solvers.

use thiserror::Error;

/// Validation and query errors for [`LpInstance`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("instance has no variables")]
    EmptyInstance,
    #[error("upper bound q[{index}] = {value} must be strictly positive and finite")]
    NonPositiveBound { index: usize, value: f64 },
    #[error("upper bounds are not non-decreasing at index {index}")]
    UnsortedBounds { index: usize },
    #[error("budget weight z[{index}] = {value} must be strictly positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("budget K = {value} must be non-negative and finite")]
    NegativeBudget { value: f64 },
    #[error("q has length {q_len} but z has length {z_len}")]
    LengthMismatch { q_len: usize, z_len: usize },
    #[error("index pair ({i}, {j}) out of range for n = {n} (need 1 <= i < j <= n + 1)")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
}

/// Feasibility violations reported by [`Solution::check_feasible`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("x[{index}] = {value} violates bound q[{index}] = {bound}")]
    BoundViolated { index: usize, value: f64, bound: f64 },
    #[error("x[{index}] = {value} breaks monotonicity (previous {previous})")]
    NotMonotone { index: usize, value: f64, previous: f64 },
    #[error("budget use {used} exceeds K = {budget}")]
    BudgetExceeded { used: f64, budget: f64 },
}

/// Numeric slack used by the float solvers and feasibility checks.
///
/// `eps_feas` is a relative feasibility slack; `eps_zero_rel` scales with the
/// budget to decide when a residual budget counts as exhausted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps_feas: f64,
    pub eps_zero_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_feas: 1e-9,
            eps_zero_rel: 1e-12,
        }
    }
}

impl Tolerances {
    /// Absolute threshold below which a residual budget is treated as zero.
    pub fn eps_zero(&self, budget: f64) -> f64 {
        (self.eps_zero_rel * budget).max(1e-300)
    }

    /// Default tolerances, with `eps_feas` overridable through the
    /// `CHAINLP_TOL` environment variable.
    pub fn from_env() -> Self {
        let mut tol = Tolerances::default();
        if let Ok(raw) = std::env::var("CHAINLP_TOL") {
            if let Ok(v) = raw.trim().parse::<f64>() {
                if v > 0.0 && v.is_finite() {
                    tol.eps_feas = v;
                }
            }
        }
        tol
    }
}

/// Cumulative sums of the budget weights, answering `sum(i, j)` and
/// `avg(i, j)` queries in O(1).
///
/// `sum(i, j) = z_i + z_{i+1} + ... + z_{j-1}` over 1-based indices with
/// `1 <= i < j <= n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSums {
    // cum[j] = z_1 + ... + z_j, cum[0] = 0
    cum: Vec<f64>,
}

impl PrefixSums {
    pub fn new(z: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(z.len() + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for &w in z {
            acc += w;
            cum.push(acc);
        }
        PrefixSums { cum }
    }

    pub fn n(&self) -> usize {
        self.cum.len() - 1
    }

    /// `z_i + ... + z_{j-1}` as a single prefix-sum difference.
    ///
    /// Panics when the `1 <= i < j <= n + 1` contract is broken; use
    /// [`LpInstance::sum`] for a checked variant.
    #[inline]
    pub fn sum(&self, i: usize, j: usize) -> f64 {
        assert!(1 <= i && i < j && j <= self.n() + 1, "sum({i}, {j}) out of range");
        self.cum[j - 1] - self.cum[i - 1]
    }

    /// `sum(i, j) / (j - i)`.
    #[inline]
    pub fn avg(&self, i: usize, j: usize) -> f64 {
        self.sum(i, j) / (j - i) as f64
    }
}

/// A validated instance of the chain-constrained LP.
///
/// Immutable after construction; shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    q: Vec<f64>,
    z: Vec<f64>,
    k: f64,
    prefix: PrefixSums,
}

impl LpInstance {
    /// Validates the raw arrays and budget; inputs are copied, not mutated.
    pub fn new(q: Vec<f64>, z: Vec<f64>, k: f64) -> Result<Self, ModelError> {
        if q.is_empty() || z.is_empty() {
            return Err(ModelError::EmptyInstance);
        }
        if q.len() != z.len() {
            return Err(ModelError::LengthMismatch {
                q_len: q.len(),
                z_len: z.len(),
            });
        }
        for (idx, &b) in q.iter().enumerate() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(ModelError::NonPositiveBound {
                    index: idx + 1,
                    value: b,
                });
            }
            if idx > 0 && b < q[idx - 1] {
                return Err(ModelError::UnsortedBounds { index: idx + 1 });
            }
        }
        for (idx, &w) in z.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(ModelError::NonPositiveWeight {
                    index: idx + 1,
                    value: w,
                });
            }
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(ModelError::NegativeBudget { value: k });
        }
        let prefix = PrefixSums::new(&z);
        Ok(LpInstance { q, z, k, prefix })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn budget(&self) -> f64 {
        self.k
    }

    /// 1-based access to `q_i`.
    #[inline]
    pub fn q_at(&self, i: usize) -> f64 {
        self.q[i - 1]
    }

    /// 1-based access to `z_i`.
    #[inline]
    pub fn z_at(&self, i: usize) -> f64 {
        self.z[i - 1]
    }

    pub fn prefix(&self) -> &PrefixSums {
        &self.prefix
    }

    /// Checked `sum(i, j)` over 1-based indices, `1 <= i < j <= n + 1`.
    pub fn sum(&self, i: usize, j: usize) -> Result<f64, ModelError> {
        if i < 1 || i >= j || j > self.n() + 1 {
            return Err(ModelError::IndexOutOfRange { i, j, n: self.n() });
        }
        Ok(self.prefix.sum(i, j))
    }

    /// Checked `avg(i, j) = sum(i, j) / (j - i)`.
    pub fn avg(&self, i: usize, j: usize) -> Result<f64, ModelError> {
        Ok(self.sum(i, j)? / (j - i) as f64)
    }

    /// `z_1 q_1 + ... + z_n q_n`, the budget needed to fill every variable.
    pub fn saturation_cost(&self) -> f64 {
        self.z.iter().zip(&self.q).map(|(w, b)| w * b).sum()
    }
}

/// A quality profile together with its objective value and budget use.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub budget_used: f64,
}

impl Solution {
    /// Wraps a profile, computing the objective and budget use against `inst`.
    pub fn from_profile(inst: &LpInstance, x: Vec<f64>) -> Self {
        let objective = x.iter().sum();
        let budget_used = x.iter().zip(inst.z()).map(|(xi, zi)| xi * zi).sum();
        Solution {
            x,
            objective,
            budget_used,
        }
    }

    /// Verifies bounds, monotonicity and the budget, each with relative slack
    /// `tol.eps_feas`.
    pub fn check_feasible(
        &self,
        inst: &LpInstance,
        tol: &Tolerances,
    ) -> Result<(), FeasibilityError> {
        let eps = tol.eps_feas;
        let mut prev = 0.0;
        for (idx, (&xi, &qi)) in self.x.iter().zip(inst.q()).enumerate() {
            let slack = eps * qi.max(1.0);
            if xi < -slack || xi > qi + slack {
                return Err(FeasibilityError::BoundViolated {
                    index: idx + 1,
                    value: xi,
                    bound: qi,
                });
            }
            if xi < prev - slack {
                return Err(FeasibilityError::NotMonotone {
                    index: idx + 1,
                    value: xi,
                    previous: prev,
                });
            }
            prev = xi;
        }
        let k = inst.budget();
        if self.budget_used > k + eps * k.max(1.0) {
            return Err(FeasibilityError::BudgetExceeded {
                used: self.budget_used,
                budget: k,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_well_formed_instance() {
        let inst = LpInstance::new(vec![1.0, 2.0], vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.budget(), 1.0);
    }

    #[test]
    fn validate_rejects_unsorted_bounds() {
        let err = LpInstance::new(vec![2.0, 1.0], vec![1.0, 1.0], 1.0).unwrap_err();
        assert_eq!(err, ModelError::UnsortedBounds { index: 2 });
    }

    #[test]
    fn validate_rejects_zero_weight() {
        let err = LpInstance::new(vec![1.0], vec![0.0], 1.0).unwrap_err();
        assert_eq!(
            err,
            ModelError::NonPositiveWeight {
                index: 1,
                value: 0.0
            }
        );
    }

    #[test]
    fn validate_rejects_empty_and_negative_budget() {
        assert_eq!(
            LpInstance::new(vec![], vec![], 1.0).unwrap_err(),
            ModelError::EmptyInstance
        );
        assert!(matches!(
            LpInstance::new(vec![1.0], vec![1.0], -0.5).unwrap_err(),
            ModelError::NegativeBudget { .. }
        ));
    }

    #[test]
    fn zero_budget_is_accepted() {
        let inst = LpInstance::new(vec![1.0], vec![1.0], 0.0).unwrap();
        assert_eq!(inst.budget(), 0.0);
    }

    #[test]
    fn sum_and_avg_match_hand_values() {
        let inst = LpInstance::new(vec![1.0, 2.0, 4.0], vec![2.0, 0.75, 0.25], 2.0).unwrap();
        assert_eq!(inst.sum(1, 4).unwrap(), 3.0);
        assert_eq!(inst.avg(2, 4).unwrap(), 0.5);
        // single-term sum
        for i in 1..=3 {
            assert_eq!(inst.sum(i, i + 1).unwrap(), inst.z_at(i));
        }
    }

    #[test]
    fn sum_rejects_bad_ranges() {
        let inst = LpInstance::new(vec![1.0, 2.0], vec![1.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            inst.sum(2, 2),
            Err(ModelError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            inst.sum(1, 4),
            Err(ModelError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            inst.sum(0, 2),
            Err(ModelError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn feasibility_check_flags_budget_overrun() {
        let inst = LpInstance::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let sol = Solution::from_profile(&inst, vec![1.0, 1.0]);
        assert!(matches!(
            sol.check_feasible(&inst, &Tolerances::default()),
            Err(FeasibilityError::BudgetExceeded { .. })
        ));
    }
}
