//! Error type shared by every module in the crate.

use thiserror::Error;

use crate::model::{ItemId, StateId};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analyzing an instance.
#[derive(Debug, Error)]
pub enum Error {
    /// An item id outside the instance's dense `0..n` range was referenced.
    #[error("unknown item id {0}")]
    UnknownItem(ItemId),

    /// A state id at or beyond the item's declared state count was referenced.
    #[error("item {item} has no state {state}")]
    InvalidState { item: ItemId, state: StateId },

    /// The same item appears twice in an observation sequence.
    #[error("item {0} observed twice")]
    DuplicateObservation(ItemId),

    /// A marginal benefit was requested for an item already in the domain.
    #[error("item {0} already selected")]
    AlreadySelected(ItemId),

    /// Conditioning produced zero posterior mass.
    #[error("observations have zero probability under the prior")]
    InconsistentObservation,

    /// Joint support enumeration would exceed the configured cap.
    #[error("support size {size} exceeds enumeration cap {cap}")]
    SupportTooLarge { size: u128, cap: u64 },

    /// An exhaustive check or oracle would exceed its configured size cap.
    #[error("state space too large: {0}")]
    TooLarge(String),

    /// The requested quota cannot be reached under some realization.
    #[error("quota {quota} unattainable under realization {realization}")]
    InfeasibleQuota { quota: f64, realization: String },

    /// A greedy step was requested with no selectable item left.
    #[error("no selectable items remain")]
    Exhausted,

    /// A policy tree violates a structural rule.
    #[error("malformed policy: {0}")]
    MalformedPolicy(String),

    /// Instance data failed validation; the message names the offending field.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A configuration combination is not supported.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
