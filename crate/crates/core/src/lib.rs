//! Solvers for linear programs with bounded, monotonically ordered variables
//! and a single weighted budget constraint, together with the
//! reward-mechanism layer that reduces content-platform incentive design to
//! that LP.
//!
//! The pieces:
//!
//! - [`model`]: validated instances, solutions, prefix sums, tolerances.
//! - [`reduction`]: mechanism <-> LP translation, step reward construction
//!   and incentive verification.
//! - [`greedy`]: the quadratic greedy reference solver with a full trace.
//! - [`fast`]: the O(n log n) solver (blocker precomputation + Fenwick tree).
//! - [`oracle`]: exact rational vertex enumeration for small instances.
//! - [`proportional`]: equilibria of the proportional mechanism and its
//!   efficiency ratio against the optimum.
//! - [`gen`]: seeded random instance generation.
//! - [`io`]: instance file parsing and report serialization.
//!
//! The `chainlp` binary exposes the `solve`, `reward`, `compare` and `bench`
//! subcommands on top of these modules.

pub mod fast;
pub mod gen;
pub mod greedy;
pub mod io;
pub mod model;
pub mod oracle;
pub mod proportional;
pub mod reduction;

pub use fast::{compute_blockers, solve_fast, solve_fast_with, BlockerTable, RangeAddArray};
pub use greedy::{solve_greedy, solve_greedy_with, GreedyTrace};
pub use model::{LpInstance, ModelError, PrefixSums, Solution, Tolerances};
pub use oracle::{solve_exact, RationalInstance};
pub use reduction::{
    build_reward, sort_types, verify_incentives, MechanismInstance, RewardSchedule,
};
