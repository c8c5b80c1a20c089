use crate::rational::Rational;
use thiserror::Error;

/// Errors raised by instance validation, oracle evaluation, enumeration and
/// the reduction pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("reward {value} for set {set} is outside [0, 1]")]
    RewardOutOfRange { set: String, value: Rational },

    #[error("cost {value} for set {set} is negative")]
    NegativeCost { set: String, value: Rational },

    #[error("ground set of size {n} exceeds the enumeration cap {cap}")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("ground set sizes differ: reward has {reward}, cost has {cost}")]
    GroundSetMismatch { reward: usize, cost: usize },

    #[error("equal rewards {reward} on both sides of an indifference point; the demand oracle does not tie-break consistently")]
    EqualRewards { reward: Rational },

    #[error("invalid segment [{lo}, {hi}]: need 0 <= lo < hi <= 1")]
    InvalidSegment { lo: Rational, hi: Rational },

    #[error("demand oracle produced a non-monotone breakpoint sequence: {detail}")]
    InconsistentOracle { detail: String },

    #[error("set function violates the asserted class: {detail}")]
    ClassViolation { detail: String },

    #[error("duplicate edge ({v}, {u})")]
    DuplicateEdge { v: String, u: String },

    #[error("edge endpoint {name} is not a declared vertex")]
    UnknownEndpoint { name: String },

    #[error("edge ({v}, {u}) has negative {field} value {value}")]
    NegativeEdgeValue {
        v: String,
        u: String,
        field: &'static str,
        value: Rational,
    },

    #[error(
        "instance is flagged normalized but its maximum matching reward is {max_matching} > 1"
    )]
    NormalizationViolation { max_matching: Rational },

    #[error("instance is not normalized; normalize it before building a contract instance")]
    NotNormalized,

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("alpha {alpha} is outside the validity range [{lo}, {hi}]")]
    OutsideValidityRange {
        alpha: Rational,
        lo: Rational,
        hi: Rational,
    },

    #[error("edge ({from}, {to}) has negative weight {value} at alpha = {alpha}")]
    NegativeEdgeWeight {
        from: String,
        to: String,
        alpha: Rational,
        value: Rational,
    },

    #[error("target vertex is unreachable from the source")]
    UnreachableTarget,

    #[error("transform scale K is zero: all affine rewards and costs vanish")]
    DegenerateTransform,

    #[error("alpha2 must be positive, got {alpha2}")]
    NonPositiveAlpha2 { alpha2: Rational },

    #[error("costs are not one-sided: resource {u} carries edge costs {first} and {second}")]
    CostNotOneSided {
        u: String,
        first: Rational,
        second: Rational,
    },

    #[error("invalid instance: {detail}")]
    InvalidInstance { detail: String },

    #[error("invalid generator spec: {detail}")]
    InvalidGeneratorSpec { detail: String },

    #[error("invalid argument: {detail}")]
    InvalidArgument { detail: String },

    #[error("schema error: {detail}")]
    Schema { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
