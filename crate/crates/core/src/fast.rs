//! The O(n log n) solver.
//!
//! Two observations turn the quadratic greedy into a log-linear algorithm:
//!
//! 1. For each index `i` there is a *blocker* `b(i)`: the member of `S` that
//!    terminates `i`'s pooled segment in the greedy run (`n + 1` if none).
//!    If every `y_i` is fixed to `avg(i, b(i))` up front and never updated,
//!    the greedy picks the same indices in the same order. The blockers
//!    satisfy `b(i) = b^m(i+1)` for some `m >= 0`, which yields an amortized
//!    O(n) right-to-left computation.
//! 2. With the `y` values frozen, the per-iteration argmin over the shrinking
//!    candidate set with `(y_i, i)` tie-breaking is simply ascending sorted
//!    order, and the segment updates of `x` become range-add/point-query
//!    operations on a Fenwick tree.

use crate::model::{LpInstance, Solution, Tolerances};
use std::ops::{AddAssign, SubAssign};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FenwickError {
    #[error("range ({i}, {j}) out of bounds for length {n} (need 1 <= i <= j <= n)")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
}

/// Fenwick (binary indexed) tree supporting range-add and point-query, both
/// O(log n). Indices are 1-based; ranges are inclusive.
///
/// Internally stores deltas: a range add on `[i, j]` adds at `i` and
/// subtracts past `j`; a point query is the prefix sum of deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeAddArray<T> {
    tree: Vec<T>,
    n: usize,
}

impl<T: Copy + Default + AddAssign + SubAssign> RangeAddArray<T> {
    pub fn new(n: usize) -> Self {
        RangeAddArray {
            tree: vec![T::default(); n + 1],
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn add_at(&mut self, mut i: usize, d: T) {
        while i <= self.n {
            self.tree[i] += d;
            i += i & i.wrapping_neg();
        }
    }

    #[inline]
    fn sub_at(&mut self, mut i: usize, d: T) {
        while i <= self.n {
            self.tree[i] -= d;
            i += i & i.wrapping_neg();
        }
    }

    /// Adds `d` to every position in `[i, j]` (1-based, inclusive).
    pub fn range_add(&mut self, i: usize, j: usize, d: T) -> Result<(), FenwickError> {
        if i < 1 || i > j || j > self.n {
            return Err(FenwickError::IndexOutOfRange { i, j, n: self.n });
        }
        self.add_at(i, d);
        if j + 1 <= self.n {
            self.sub_at(j + 1, d);
        }
        Ok(())
    }

    /// The accumulated value at position `i` (1-based).
    pub fn point_query(&self, i: usize) -> Result<T, FenwickError> {
        if i < 1 || i > self.n {
            return Err(FenwickError::IndexOutOfRange { i, j: i, n: self.n });
        }
        let mut acc = T::default();
        let mut k = i;
        while k > 0 {
            acc += self.tree[k];
            k &= k - 1;
        }
        Ok(acc)
    }
}

/// Per-index blockers `b(i)` and the frozen segment averages
/// `y_i = avg(i, b(i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockerTable {
    /// 1-based; `b[0]` unused. `b[i] in {i+1, ..., n+1}`, `b[n] = n + 1`.
    pub b: Vec<usize>,
    /// 1-based; `y[0]` unused.
    pub y: Vec<f64>,
    /// Number of merge steps taken while building the table (at most `n`).
    pub merges: usize,
}

/// Computes the blocker table right to left in amortized O(n).
///
/// `y` is maintained by the incremental weighted-average update
/// `y_i <- ((b_i - i) y_i + (b_{b_i} - b_i) y_{b_i}) / (b_{b_i} - i)` so no
/// prefix sums are needed; with prefix sums available the two routes agree
/// (tested).
pub fn compute_blockers(inst: &LpInstance) -> BlockerTable {
    let n = inst.n();
    let mut b = vec![0usize; n + 1];
    let mut y = vec![0.0f64; n + 1];
    let mut merges = 0usize;
    b[n] = n + 1;
    y[n] = inst.z_at(n);
    for i in (1..n).rev() {
        let mut bi = i + 1;
        let mut yi = inst.z_at(i);
        while bi != n + 1 && yi <= y[bi] {
            let span_i = (bi - i) as f64;
            let span_b = (b[bi] - bi) as f64;
            yi = (span_i * yi + span_b * y[bi]) / (span_i + span_b);
            bi = b[bi];
            merges += 1;
        }
        b[i] = bi;
        y[i] = yi;
    }
    BlockerTable { b, y, merges }
}

/// Solves the instance in O(n log n).
pub fn solve_fast(inst: &LpInstance) -> Solution {
    solve_fast_with(inst, &Tolerances::default())
}

pub fn solve_fast_with(inst: &LpInstance, tol: &Tolerances) -> Solution {
    let n = inst.n();
    let table = compute_blockers(inst);
    let eps_zero = tol.eps_zero(inst.budget());

    // With y frozen, the greedy's argmin over remaining candidates with
    // smallest-index tie-breaking is exactly this order.
    let mut order: Vec<(f64, u32)> = (1..=n).map(|i| (table.y[i], i as u32)).collect();
    order.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    // The Fenwick tree answers the interleaved point queries; the plain
    // difference array mirrors the same range adds so the final profile is a
    // single linear sweep instead of n more tree queries.
    let mut fen: RangeAddArray<f64> = RangeAddArray::new(n);
    let mut diff = vec![0.0f64; n + 2];
    let mut budget = inst.budget();
    for &(yi, i) in &order {
        if budget <= eps_zero {
            break;
        }
        let i = i as usize;
        let xi = fen.point_query(i).expect("index in range");
        let width = (table.b[i] - i) as f64;
        let rate = width * yi;
        let d = (budget / rate).min(inst.q_at(i) - xi).max(0.0);
        fen.range_add(i, table.b[i] - 1, d).expect("range in bounds");
        diff[i] += d;
        diff[table.b[i]] -= d;
        budget -= d * rate;
    }

    let mut x = Vec::with_capacity(n);
    let mut acc = 0.0;
    for d in diff.iter().take(n + 1).skip(1) {
        acc += d;
        x.push(acc);
    }
    Solution::from_profile(inst, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LpInstance;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn blockers_without_merges() {
        let inst = LpInstance::new(vec![1.0, 2.0, 4.0], vec![2.0, 0.75, 0.25], 2.0).unwrap();
        let t = compute_blockers(&inst);
        assert_eq!(&t.b[1..], &[2, 3, 4]);
        assert_eq!(&t.y[1..], &[2.0, 0.75, 0.25]);
        assert_eq!(t.merges, 0);
    }

    #[test]
    fn blockers_with_cascading_merges() {
        let inst = LpInstance::new(vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0], 1.0).unwrap();
        let t = compute_blockers(&inst);
        assert_eq!(&t.b[1..], &[4, 4, 4]);
        assert_eq!(&t.y[1..], &[2.0, 2.5, 3.0]);
    }

    #[test]
    fn blockers_single_variable() {
        let inst = LpInstance::new(vec![1.0], vec![7.0], 1.0).unwrap();
        let t = compute_blockers(&inst);
        assert_eq!(&t.b[1..], &[2]);
        assert_eq!(&t.y[1..], &[7.0]);
    }

    #[test]
    fn fenwick_covered_and_uncovered_points() {
        let mut arr: RangeAddArray<f64> = RangeAddArray::new(5);
        arr.range_add(2, 4, 1.5).unwrap();
        assert_eq!(arr.point_query(3).unwrap(), 1.5);
        assert_eq!(arr.point_query(5).unwrap(), 0.0);
        arr.range_add(1, 5, 1.0).unwrap();
        arr.range_add(3, 3, 2.0).unwrap();
        assert_eq!(arr.point_query(3).unwrap(), 4.5);
        assert_eq!(arr.point_query(1).unwrap(), 1.0);
    }

    #[test]
    fn fenwick_rejects_bad_ranges() {
        let mut arr: RangeAddArray<i64> = RangeAddArray::new(4);
        assert!(arr.range_add(0, 2, 1).is_err());
        assert!(arr.range_add(3, 2, 1).is_err());
        assert!(arr.range_add(2, 5, 1).is_err());
        assert!(arr.point_query(0).is_err());
        assert!(arr.point_query(5).is_err());
    }

    #[test]
    fn fast_matches_worked_traces() {
        let inst = LpInstance::new(vec![1.0, 2.0, 4.0], vec![2.0, 0.75, 0.25], 2.0).unwrap();
        let sol = solve_fast(&inst);
        assert!(close(sol.x[0], 0.0, 1e-12));
        assert!(close(sol.x[1], 4.0 / 3.0, 1e-12));
        assert!(close(sol.x[2], 4.0, 1e-12));

        let inst = LpInstance::new(vec![0.5, 0.5], vec![2.0, 2.0], 1.0).unwrap();
        let sol = solve_fast(&inst);
        assert!(close(sol.x[0], 0.25, 1e-12));
        assert!(close(sol.x[1], 0.25, 1e-12));
    }

    #[test]
    fn fast_fills_bounds_under_ample_budget() {
        let inst = LpInstance::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0], 100.0).unwrap();
        let sol = solve_fast(&inst);
        assert_eq!(sol.x, vec![1.0, 2.0, 3.0]);
    }
}
