//! Domain vocabulary: instances, labels, verifier classes, version spaces,
//! oracles, mistake classification and transcripts.

mod class;
mod io;
mod oracle;
mod transcript;
mod types;

pub use class::{
    check_realizable, check_realizable_cot, ClassLimits, ClassShape, CotEntry, VerifierClass,
};
pub use io::{ClassFile, VerifierRows};
pub use oracle::{Oracle, VersionSpace};
pub use transcript::{Answer, Instance, Round, Totals, Transcript};
pub use types::{
    classify_mistake, classify_prefix_mistake, CostVector, CotInstance, Label, MistakeKind,
    MistakeMode, PrefixInstance, PrefixLabel, Problem, StepToken,
};
