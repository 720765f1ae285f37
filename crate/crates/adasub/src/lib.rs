//! Adaptive stochastic optimization with adaptive submodular objectives.
//!
//! The toolkit models sequential selection problems where picking an item
//! reveals a random outcome, and later choices may depend on everything
//! observed so far. Decision strategies are represented as policy trees and
//! constructed by the adaptive greedy rule, optionally accelerated with lazy
//! marginal re-evaluation. Companion modules provide exhaustive property
//! checkers, brute-force optimal baselines, and data-dependent upper bounds
//! so that the approximation guarantees can be verified on small instances.
//!
//! Modules:
//! - [`model`]: items, outcome states, realizations, observation sequences,
//!   and priors (tabular or independent per item).
//! - [`objectives`]: built-in objective functions (stochastic coverage,
//!   cascade seeding, hypothesis identification, deterministic set functions)
//!   plus exact and Monte Carlo expectation machinery.
//! - [`greedy`]: policy trees, stopping rules, naive and lazy greedy
//!   construction, policy evaluation and replay.
//! - [`verify`]: monotonicity/submodularity checkers and exact oracles.
//! - [`bounds`]: data-dependent optimality gap certificates.
//! - [`instance`]: JSON instance schema and validation.
//! - [`corpus`]: small worked instances and seeded random generators used by
//!   tests and benchmarks.

pub mod bounds;
pub mod corpus;
pub mod error;
pub mod greedy;
pub mod instance;
pub mod model;
pub mod objectives;
pub mod seed;
pub mod verify;

pub use bounds::{
    bound_trace, bound_trace_budget, opt_upper_bound, opt_upper_bound_budget, BoundCertificate,
};
pub use error::{Error, Result};
pub use greedy::{
    build_policy, evaluate_policy, execute_policy, greedy_step, Engine, PolicyMetrics, PolicyNode,
    PolicyTree, SelectionRule, StoppingRule,
};
pub use instance::Instance;
pub use model::{
    condition, consistent, enumerate_support, sample, Caps, IndependentPrior, Item, ItemId,
    PartialRealization, Prior, Realization, StateId, TabularPrior,
};
pub use objectives::{
    make_deterministic, Backend, CascadeObjective, CoverageObjective, Evaluator, MarginalBenefit,
    Objective, SetFunctionObjective, SetFunctionTable, VersionSpaceObjective,
};
pub use verify::{
    check_adaptive_monotone, check_adaptive_submodular, classic_greedy, min_positive_increment,
    oracle_cover, oracle_max, quota_gap, CheckReport, OracleResult, Property, Witness,
};

/// Comparison slack for quantities carried by exact arithmetic (probability
/// normalization, idempotence of conditioning, worked-example regressions).
pub const TOL_EXACT: f64 = 1e-12;

/// Comparison slack for quantities accumulated across many floating point
/// operations (support sums, guarantee ratios, quota satisfaction).
pub const TOL_SUM: f64 = 1e-9;
