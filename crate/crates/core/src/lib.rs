//! Exact solver for linear contracts over combinatorial action sets.
//!
//! A principal offers the agent a fraction `alpha` of a normalized reward;
//! the agent responds with the action set maximizing `alpha * f(S) - c(S)`,
//! breaking ties toward the higher reward. This crate enumerates every
//! contract at which the agent's demand changes, picks the optimal contract,
//! and ships the demand oracles and instance reductions the enumeration is
//! exercised with: exhaustive subset search, the supermodular/submodular
//! case, matching-based rewards, parametric shortest-path pipelines, and
//! one-sided-cost reformulations. All arithmetic is exact rational.

pub mod envelope;
pub mod error;
pub mod generators;
pub mod io;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod set;
pub mod verify;

pub use envelope::{
    all_critical_values, cv_segment, indifference_point, optimal_contract, utility_curve,
    BestResponse, ContractCurve, CurvePoint, DemandOracle,
};
pub use error::{Error, Result};
pub use matching::{
    make_matching_contract_instance, matching_demand, max_weight_matching, BipartiteEdge,
    BipartiteInstance, LexWeight, Matching, MatchingDemand,
};
pub use model::{
    agent_utility, demand_compare, principal_utility, Breakpoint, ContractInstance, SetFunction,
    TableInstance,
};
pub use oracle::{brute_force_demand, BruteForceDemand, SupermodularDemand};
pub use rational::Rational;
pub use reductions::{
    matching_to_demand, min_perfect_matching, one_sided_to_vertex, path_to_matching,
    shortest_path_value, ParametricMatchingInstance, ParametricPathInstance, RadoVertexInstance,
};
pub use set::ActionSet;
