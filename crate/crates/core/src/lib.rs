//! Online chain-of-thought verification over finite verifier classes.
//!
//! A verifier class is an explicit, finite set of YES/NO tables over an
//! enumerated universe of `(problem, reasoning-prefix)` instances. On top of
//! that representation the crate provides:
//!
//! - exact Littlestone-style dimensions ([`dimensions`]): plain Ldim, the
//!   soundness-budgeted SC dimension, the cost-weighted WSC dimension and the
//!   three-cost SCL dimension, each with witness mistake trees;
//! - the matching optimal online learners and a few simple baselines
//!   ([`learners`]);
//! - the two reductions between chain-of-thought and prefix verification
//!   ([`reductions`]);
//! - adversaries that realize the lower bounds ([`adversary`]);
//! - verifier-guided boosting of weak stochastic provers ([`boosting`]).
//!
//! All costs and dimension values are exact rationals.

pub mod adversary;
pub mod bitset;
pub mod boosting;
pub mod dimensions;
pub mod domain;
pub mod error;
pub mod families;
pub mod learners;
pub mod rational;
pub mod reductions;
pub mod rng;

pub use bitset::VerifierSet;
pub use domain::{
    check_realizable, check_realizable_cot, classify_mistake, classify_prefix_mistake, Answer,
    ClassLimits, ClassShape, CostVector, CotInstance, Instance, Label, MistakeKind, MistakeMode,
    Oracle, PrefixInstance, PrefixLabel, Problem, Round, StepToken, Totals, Transcript,
    VerifierClass, VersionSpace,
};
pub use error::{Error, Result};
pub use rational::Ratio;
