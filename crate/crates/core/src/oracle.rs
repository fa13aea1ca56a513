//! Exact ground-truth optimizer for small instances.
//!
//! The feasible region is a bounded, nonempty polytope cut out by the
//! `2n + 1` inequalities `x_i <= q_i`, `x_i >= x_{i-1}` (with `x_0 = 0`) and
//! `z . x <= K`, so the optimum is attained at a vertex. The oracle
//! enumerates every subset of exactly `n` constraints, solves the rational
//! equality system when it is nonsingular, filters for feasibility, and keeps
//! the best objective. All arithmetic is exact; nothing is shared with the
//! float solvers, which makes this a trustworthy differential reference.

use crate::model::LpInstance;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;
use thiserror::Error;

pub type Rational = BigRational;

/// Combinatorial limit for the vertex enumeration.
pub const MAX_ORACLE_VARS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance has {n} variables; the oracle enumerates vertices only up to n = {MAX_ORACLE_VARS}")]
    TooLarge { n: usize },
    #[error("instance has no variables")]
    EmptyInstance,
    #[error("bound q[{index}] must be strictly positive")]
    NonPositiveBound { index: usize },
    #[error("bounds are not non-decreasing at index {index}")]
    UnsortedBounds { index: usize },
    #[error("weight z[{index}] must be strictly positive")]
    NonPositiveWeight { index: usize },
    #[error("budget K must be non-negative")]
    NegativeBudget,
}

/// An exact-rational copy of the LP data.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalInstance {
    q: Vec<Rational>,
    z: Vec<Rational>,
    k: Rational,
}

impl RationalInstance {
    pub fn new(q: Vec<Rational>, z: Vec<Rational>, k: Rational) -> Result<Self, OracleError> {
        if q.is_empty() || z.is_empty() || q.len() != z.len() {
            return Err(OracleError::EmptyInstance);
        }
        for (idx, b) in q.iter().enumerate() {
            if !b.is_positive() {
                return Err(OracleError::NonPositiveBound { index: idx + 1 });
            }
            if idx > 0 && b < &q[idx - 1] {
                return Err(OracleError::UnsortedBounds { index: idx + 1 });
            }
        }
        for (idx, w) in z.iter().enumerate() {
            if !w.is_positive() {
                return Err(OracleError::NonPositiveWeight { index: idx + 1 });
            }
        }
        if k.is_negative() {
            return Err(OracleError::NegativeBudget);
        }
        Ok(RationalInstance { q, z, k })
    }

    /// Exact conversion of a float instance: every finite binary float is a
    /// rational.
    pub fn from_lp(inst: &LpInstance) -> Self {
        let conv = |v: f64| Rational::from_float(v).expect("finite float");
        RationalInstance {
            q: inst.q().iter().copied().map(conv).collect(),
            z: inst.z().iter().copied().map(conv).collect(),
            k: conv(inst.budget()),
        }
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[Rational] {
        &self.q
    }

    pub fn z(&self) -> &[Rational] {
        &self.z
    }

    pub fn budget(&self) -> &Rational {
        &self.k
    }

    /// Nearest-float view of the instance, for feeding the float solvers.
    pub fn to_lp(&self) -> LpInstance {
        let conv = |v: &Rational| v.to_f64().expect("representable");
        LpInstance::new(
            self.q.iter().map(conv).collect(),
            self.z.iter().map(conv).collect(),
            conv(&self.k),
        )
        .expect("valid rational instance rounds to a valid float instance")
    }
}

/// An exact optimal solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    pub budget_used: Rational,
}

impl ExactSolution {
    fn from_vertex(inst: &RationalInstance, x: Vec<Rational>) -> Self {
        let objective = x.iter().sum();
        let budget_used = x.iter().zip(&inst.z).map(|(a, b)| a * b).sum();
        ExactSolution {
            x,
            objective,
            budget_used,
        }
    }

    pub fn objective_f64(&self) -> f64 {
        self.objective.to_f64().expect("representable")
    }

    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(|v| v.to_f64().unwrap()).collect()
    }
}

// Rows of the constraint system as (coefficients, rhs) of equalities.
// Order: n bound rows (x_i = q_i), n chain rows (x_i - x_{i-1} = 0), budget.
fn constraint_rows(inst: &RationalInstance) -> Vec<(Vec<Rational>, Rational)> {
    let n = inst.n();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut rows = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let mut coeffs = vec![zero.clone(); n];
        coeffs[i] = one.clone();
        rows.push((coeffs, inst.q[i].clone()));
    }
    for i in 0..n {
        let mut coeffs = vec![zero.clone(); n];
        coeffs[i] = one.clone();
        if i > 0 {
            coeffs[i - 1] = -one.clone();
        }
        rows.push((coeffs, zero.clone()));
    }
    rows.push((inst.z.clone(), inst.k.clone()));
    rows
}

// Exact Gaussian elimination; None when the selected rows are singular.
fn solve_square(rows: &[(Vec<Rational>, Rational)], picked: &[usize]) -> Option<Vec<Rational>> {
    let n = picked.len();
    let mut a: Vec<Vec<Rational>> = picked.iter().map(|&r| rows[r].0.clone()).collect();
    let mut rhs: Vec<Rational> = picked.iter().map(|&r| rows[r].1.clone()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = a[col][col].clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &inv;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[r] -= sub;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc -= &a[row][c] * &x[c];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

fn is_feasible(inst: &RationalInstance, x: &[Rational]) -> bool {
    let zero = Rational::zero();
    let mut prev = &zero;
    for (i, xi) in x.iter().enumerate() {
        if xi < prev || xi > &inst.q[i] {
            return false;
        }
        prev = xi;
    }
    let used: Rational = x.iter().zip(&inst.z).map(|(a, b)| a * b).sum();
    used <= inst.k
}

// Lexicographic-combination iterator over n-subsets of 0..m.
struct Combinations {
    m: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    fn new(m: usize, k: usize) -> Self {
        let state = if k <= m {
            Some((0..k).collect())
        } else {
            None
        };
        Combinations { m, state }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        // advance to the next combination
        let k = current.len();
        let mut next = current.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if next[i] < self.m - (k - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.state = Some(next);
                break;
            }
        }
        Some(current)
    }
}

fn check_size(inst: &RationalInstance) -> Result<(), OracleError> {
    if inst.n() > MAX_ORACLE_VARS {
        Err(OracleError::TooLarge { n: inst.n() })
    } else {
        Ok(())
    }
}

/// Enumerates every feasible vertex of the polytope exactly once.
pub fn enumerate_candidates(inst: &RationalInstance) -> Result<Vec<Vec<Rational>>, OracleError> {
    check_size(inst)?;
    let rows = constraint_rows(inst);
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for picked in Combinations::new(rows.len(), inst.n()) {
        if let Some(x) = solve_square(&rows, &picked) {
            if is_feasible(inst, &x) {
                seen.insert(x);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Exact optimum by vertex enumeration; ties resolved toward the
/// lexicographically largest profile so the result is deterministic under
/// parallel reduction.
pub fn solve_exact(inst: &RationalInstance) -> Result<ExactSolution, OracleError> {
    check_size(inst)?;
    let rows = constraint_rows(inst);
    let best = Combinations::new(rows.len(), inst.n())
        .par_bridge()
        .filter_map(|picked| {
            let x = solve_square(&rows, &picked)?;
            if is_feasible(inst, &x) {
                let obj: Rational = x.iter().sum();
                Some((obj, x))
            } else {
                None
            }
        })
        .reduce_with(|a, b| match a.0.cmp(&b.0) {
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Equal => {
                if a.1 >= b.1 {
                    a
                } else {
                    b
                }
            }
        })
        .expect("the zero profile is always a feasible vertex");
    Ok(ExactSolution::from_vertex(inst, best.1))
}

/// Convenience: small integer-pair rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
