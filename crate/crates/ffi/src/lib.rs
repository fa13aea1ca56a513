//! C ABI over the chainlp solvers.
//!
//! All objects are opaque handles created and destroyed by this library;
//! every fallible call returns a [`ChainlpStatus`] and writes its result
//! through an out-pointer. Passing a null handle yields
//! `CHAINLP_STATUS_NULL_POINTER` instead of undefined behavior. Handles are
//! not thread-safe for concurrent mutation but may be shared for reads.

use chainlp::model::{LpInstance, Tolerances};
use chainlp::oracle::{solve_exact, RationalInstance};
use chainlp::reduction::{build_reward, verify_incentives, MechanismInstance, RewardSchedule};
use chainlp::{solve_fast, solve_greedy};
use std::os::raw::c_char;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainlpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// The input data failed validation.
    InvalidArgument = 2,
    /// The exact oracle refuses instances this large.
    TooLarge = 3,
    /// The profile violates feasibility or exceeds the budget.
    Infeasible = 4,
    /// The handle does not carry the data the call needs
    /// (e.g. rewards require a mechanism instance).
    WrongKind = 5,
}

/// Solver selector for [`chainlp_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainlpAlgorithm {
    /// Quadratic greedy reference.
    Greedy = 0,
    /// O(n log n) solver.
    Fast = 1,
    /// Exact rational vertex enumeration (small n only).
    Oracle = 2,
}

enum InstanceData {
    Lp(LpInstance),
    Mechanism(MechanismInstance),
}

/// Opaque problem instance, either in LP form or in mechanism form.
pub struct ChainlpInstance {
    data: InstanceData,
}

/// Opaque solution: profile, objective and budget use.
pub struct ChainlpSolution {
    x: Vec<f64>,
    objective: f64,
    budget_used: f64,
}

/// Opaque step reward function as (threshold, level) breakpoints.
pub struct ChainlpReward {
    schedule: RewardSchedule,
}

impl ChainlpInstance {
    fn lp(&self) -> LpInstance {
        match &self.data {
            InstanceData::Lp(lp) => lp.clone(),
            InstanceData::Mechanism(mech) => mech.to_lp(),
        }
    }
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Creates an instance from LP data: bounds `q`, weights `z` (both of
/// length `n`) and budget `k`. On success writes the new handle to `out`.
///
/// # Safety
/// `q` and `z` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chainlp_instance_from_lp(
    q: *const f64,
    z: *const f64,
    n: usize,
    k: f64,
    out: *mut *mut ChainlpInstance,
) -> ChainlpStatus {
    if out.is_null() {
        return ChainlpStatus::NullPointer;
    }
    let (Some(q), Some(z)) = (slice_arg(q, n), slice_arg(z, n)) else {
        return ChainlpStatus::NullPointer;
    };
    match LpInstance::new(q.to_vec(), z.to_vec(), k) {
        Ok(lp) => {
            *out = Box::into_raw(Box::new(ChainlpInstance {
                data: InstanceData::Lp(lp),
            }));
            ChainlpStatus::Ok
        }
        Err(_) => ChainlpStatus::InvalidArgument,
    }
}

/// Creates an instance from mechanism data: agent types `q` (any order),
/// reward budget `budget` and cost constant `cost`.
///
/// # Safety
/// `q` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chainlp_instance_from_mechanism(
    q: *const f64,
    n: usize,
    budget: f64,
    cost: f64,
    out: *mut *mut ChainlpInstance,
) -> ChainlpStatus {
    if out.is_null() {
        return ChainlpStatus::NullPointer;
    }
    let Some(q) = slice_arg(q, n) else {
        return ChainlpStatus::NullPointer;
    };
    match MechanismInstance::new(q, budget, cost) {
        Ok(mech) => {
            *out = Box::into_raw(Box::new(ChainlpInstance {
                data: InstanceData::Mechanism(mech),
            }));
            ChainlpStatus::Ok
        }
        Err(_) => ChainlpStatus::InvalidArgument,
    }
}

/// Number of variables (agents) in the instance; 0 for a null handle.
///
/// # Safety
/// `inst` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_instance_n(inst: *const ChainlpInstance) -> usize {
    if inst.is_null() {
        return 0;
    }
    match &(*inst).data {
        InstanceData::Lp(lp) => lp.n(),
        InstanceData::Mechanism(mech) => mech.n(),
    }
}

/// Frees an instance handle; null is a no-op.
///
/// # Safety
/// `inst` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn chainlp_instance_free(inst: *mut ChainlpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Solves the instance with the selected algorithm. Mechanism instances are
/// reduced to their LP first and the solution is reported in the caller's
/// original agent order.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solve(
    inst: *const ChainlpInstance,
    algorithm: ChainlpAlgorithm,
    out: *mut *mut ChainlpSolution,
) -> ChainlpStatus {
    if inst.is_null() || out.is_null() {
        return ChainlpStatus::NullPointer;
    }
    let inst = &*inst;
    let lp = inst.lp();
    let sol = match algorithm {
        ChainlpAlgorithm::Greedy => solve_greedy(&lp).0,
        ChainlpAlgorithm::Fast => solve_fast(&lp),
        ChainlpAlgorithm::Oracle => {
            let exact = RationalInstance::from_lp(&lp);
            match solve_exact(&exact) {
                Ok(truth) => chainlp::model::Solution::from_profile(&lp, truth.x_f64()),
                Err(_) => return ChainlpStatus::TooLarge,
            }
        }
    };
    if sol.check_feasible(&lp, &Tolerances::default()).is_err() {
        return ChainlpStatus::Infeasible;
    }
    let x = match &inst.data {
        InstanceData::Lp(_) => sol.x.clone(),
        InstanceData::Mechanism(mech) => mech.restore_order(&sol.x),
    };
    *out = Box::into_raw(Box::new(ChainlpSolution {
        x,
        objective: sol.objective,
        budget_used: sol.budget_used,
    }));
    ChainlpStatus::Ok
}

/// Number of entries in the solution profile; 0 for a null handle.
///
/// # Safety
/// `sol` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solution_len(sol: *const ChainlpSolution) -> usize {
    if sol.is_null() {
        0
    } else {
        (*sol).x.len()
    }
}

/// Objective value (sum of the profile); NaN for a null handle.
///
/// # Safety
/// `sol` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solution_objective(sol: *const ChainlpSolution) -> f64 {
    if sol.is_null() {
        f64::NAN
    } else {
        (*sol).objective
    }
}

/// Budget consumed by the solution; NaN for a null handle.
///
/// # Safety
/// `sol` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solution_budget_used(sol: *const ChainlpSolution) -> f64 {
    if sol.is_null() {
        f64::NAN
    } else {
        (*sol).budget_used
    }
}

/// Copies the solution profile into `buf` (capacity `len`); returns the
/// number of values written.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solution_values(
    sol: *const ChainlpSolution,
    buf: *mut f64,
    len: usize,
) -> usize {
    if sol.is_null() || buf.is_null() {
        return 0;
    }
    let x = &(*sol).x;
    let count = x.len().min(len);
    std::ptr::copy_nonoverlapping(x.as_ptr(), buf, count);
    count
}

/// Frees a solution handle; null is a no-op.
///
/// # Safety
/// `sol` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn chainlp_solution_free(sol: *mut ChainlpSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Builds the step reward function for a target profile over a mechanism
/// instance. The profile is given in the caller's original agent order.
/// Fails with `CHAINLP_STATUS_WRONG_KIND` for LP-form instances and with
/// `CHAINLP_STATUS_INFEASIBLE` when the profile cannot be incentivized
/// within the budget.
///
/// # Safety
/// `inst` must be a live handle; `x` must point to `len` readable doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_build(
    inst: *const ChainlpInstance,
    x: *const f64,
    len: usize,
    out: *mut *mut ChainlpReward,
) -> ChainlpStatus {
    if inst.is_null() || out.is_null() {
        return ChainlpStatus::NullPointer;
    }
    let Some(x) = slice_arg(x, len) else {
        return ChainlpStatus::NullPointer;
    };
    let InstanceData::Mechanism(mech) = &(*inst).data else {
        return ChainlpStatus::WrongKind;
    };
    if x.len() != mech.n() {
        return ChainlpStatus::InvalidArgument;
    }
    // back to sorted order for the construction
    let mut sorted = vec![0.0; x.len()];
    for (s, &orig) in mech.original_order().iter().enumerate() {
        sorted[s] = x[orig];
    }
    match build_reward(mech, &sorted, &Tolerances::default()) {
        Ok(schedule) => {
            *out = Box::into_raw(Box::new(ChainlpReward { schedule }));
            ChainlpStatus::Ok
        }
        Err(_) => ChainlpStatus::Infeasible,
    }
}

/// Number of breakpoints in the reward function; 0 for a null handle.
///
/// # Safety
/// `reward` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_len(reward: *const ChainlpReward) -> usize {
    if reward.is_null() {
        0
    } else {
        (*reward).schedule.breakpoints().len()
    }
}

/// Copies up to `len` breakpoints into `thresholds` and `levels`; returns
/// the number of pairs written.
///
/// # Safety
/// `reward` must be a live handle; both buffers must hold `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_breakpoints(
    reward: *const ChainlpReward,
    thresholds: *mut f64,
    levels: *mut f64,
    len: usize,
) -> usize {
    if reward.is_null() || thresholds.is_null() || levels.is_null() {
        return 0;
    }
    let bps = (*reward).schedule.breakpoints();
    let count = bps.len().min(len);
    for (i, &(t, l)) in bps.iter().take(count).enumerate() {
        *thresholds.add(i) = t;
        *levels.add(i) = l;
    }
    count
}

/// Reward paid at quality `x`; NaN for a null handle.
///
/// # Safety
/// `reward` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_value(reward: *const ChainlpReward, x: f64) -> f64 {
    if reward.is_null() {
        f64::NAN
    } else {
        (*reward).schedule.value(x)
    }
}

/// Checks incentive compatibility of a reward function against a target
/// profile (caller order); writes 1 to `pass` when no agent has a
/// profitable deviation and the budget holds, else 0.
///
/// # Safety
/// `inst` and `reward` must be live handles; `x` must point to `len`
/// readable doubles; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_verify(
    reward: *const ChainlpReward,
    inst: *const ChainlpInstance,
    x: *const f64,
    len: usize,
    pass: *mut i32,
) -> ChainlpStatus {
    if reward.is_null() || inst.is_null() || pass.is_null() {
        return ChainlpStatus::NullPointer;
    }
    let Some(x) = slice_arg(x, len) else {
        return ChainlpStatus::NullPointer;
    };
    let InstanceData::Mechanism(mech) = &(*inst).data else {
        return ChainlpStatus::WrongKind;
    };
    if x.len() != mech.n() {
        return ChainlpStatus::InvalidArgument;
    }
    let mut sorted = vec![0.0; x.len()];
    for (s, &orig) in mech.original_order().iter().enumerate() {
        sorted[s] = x[orig];
    }
    let report = verify_incentives(
        &(*reward).schedule,
        mech,
        &sorted,
        &Tolerances::default(),
    );
    *pass = report.all_pass() as i32;
    ChainlpStatus::Ok
}

/// Frees a reward handle; null is a no-op.
///
/// # Safety
/// `reward` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn chainlp_reward_free(reward: *mut ChainlpReward) {
    if !reward.is_null() {
        drop(Box::from_raw(reward));
    }
}

/// Static description of a status code; never null.
#[no_mangle]
pub extern "C" fn chainlp_status_message(status: ChainlpStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        ChainlpStatus::Ok => b"ok\0",
        ChainlpStatus::NullPointer => b"null pointer argument\0",
        ChainlpStatus::InvalidArgument => b"invalid argument\0",
        ChainlpStatus::TooLarge => b"instance too large for the exact oracle\0",
        ChainlpStatus::Infeasible => b"infeasible profile or budget exceeded\0",
        ChainlpStatus::WrongKind => b"operation needs a mechanism-form instance\0",
    };
    msg.as_ptr() as *const c_char
}
