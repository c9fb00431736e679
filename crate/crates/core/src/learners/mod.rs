//! Online verifiers with a uniform predict/update interface, and the drivers
//! that play them against an oracle.

mod cot;
mod prefix;
mod river;

use std::sync::Arc;

use crate::bitset::VerifierSet;
use crate::domain::{
    CostVector, CotInstance, Label, MistakeMode, Oracle, PrefixInstance, PrefixLabel, Transcript,
    VerifierClass,
};
use crate::error::{Error, Result};

pub use cot::{MajorityVote, RejectAll, SclSoa, SoundConservative};
pub use prefix::{ScSoa, WscSoa};
pub use river::RiverLearner;

/// A deterministic prefix verifier learner.
///
/// `update` is given only the revealed label; learners that care about their
/// own mistake recompute the prediction for the same instance.
pub trait PrefixLearner {
    fn class(&self) -> &Arc<VerifierClass>;
    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel>;
    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()>;

    /// Current version space, for learners that keep one.
    fn alive(&self) -> Option<&VerifierSet> {
        None
    }
}

/// A deterministic chain-of-thought verifier learner.
pub trait CotLearner {
    fn class(&self) -> &Arc<VerifierClass>;
    fn predict(&self, z: &CotInstance) -> Result<Label>;
    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()>;

    fn alive(&self) -> Option<&VerifierSet> {
        None
    }
}

impl<T: PrefixLearner + ?Sized> PrefixLearner for Box<T> {
    fn class(&self) -> &Arc<VerifierClass> {
        (**self).class()
    }
    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        (**self).predict(z)
    }
    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()> {
        (**self).update(z, truth)
    }
    fn alive(&self) -> Option<&VerifierSet> {
        (**self).alive()
    }
}

impl<T: CotLearner + ?Sized> CotLearner for Box<T> {
    fn class(&self) -> &Arc<VerifierClass> {
        (**self).class()
    }
    fn predict(&self, z: &CotInstance) -> Result<Label> {
        (**self).predict(z)
    }
    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        (**self).update(z, truth)
    }
    fn alive(&self) -> Option<&VerifierSet> {
        (**self).alive()
    }
}

/// Restriction that refuses to empty the version space.
pub(crate) fn nonempty(set: VerifierSet) -> Result<VerifierSet> {
    if set.is_empty() {
        Err(Error::EmptyVersionSpace)
    } else {
        Ok(set)
    }
}

fn same_class(a: &VerifierClass, b: &VerifierClass) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ClassMismatch)
    }
}

/// Plays `learner` on `sequence`, revealing the oracle's label after each
/// prediction. Every strict prefix of each instance must be correct.
pub fn run_prefix<L: PrefixLearner + ?Sized>(
    learner: &mut L,
    oracle: &Oracle,
    sequence: &[PrefixInstance],
    costs: &CostVector,
) -> Result<Transcript> {
    same_class(learner.class(), oracle.class())?;
    let mut t = Transcript::new(costs.clone(), MistakeMode::PrefixLevel);
    for z in sequence {
        if !oracle.promise_holds(z)? {
            return Err(Error::PromiseViolated(z.to_string()));
        }
        let y = oracle.prefix_label(z)?;
        let p = learner.predict(z)?;
        learner.update(z, y)?;
        t.push_prefix(z.clone(), p, y);
    }
    Ok(t)
}

/// Plays a chain-of-thought learner on `sequence`; `mode` picks the mistake
/// taxonomy used for the transcript.
pub fn run_cot<L: CotLearner + ?Sized>(
    learner: &mut L,
    oracle: &Oracle,
    sequence: &[CotInstance],
    costs: &CostVector,
    mode: MistakeMode,
) -> Result<Transcript> {
    same_class(learner.class(), oracle.class())?;
    let mut t = Transcript::new(costs.clone(), mode);
    for z in sequence {
        let y = oracle.cot_label(z)?;
        let p = learner.predict(z)?;
        learner.update(z, y)?;
        t.push_cot(z.clone(), p, y);
    }
    Ok(t)
}

/// Forwards updates to the wrapped learner only on rounds it gets wrong, and
/// keeps a copy of the learner after each such update.
#[derive(Clone, Debug)]
pub struct Conservative<L> {
    initial: L,
    current: L,
    snapshots: Vec<L>,
}

impl<L: Clone> Conservative<L> {
    pub fn new(inner: L) -> Self {
        Conservative {
            initial: inner.clone(),
            current: inner,
            snapshots: Vec::new(),
        }
    }

    pub fn current(&self) -> &L {
        &self.current
    }

    /// Hypotheses after each mistake, in order.
    pub fn snapshots(&self) -> &[L] {
        &self.snapshots
    }

    /// The initial hypothesis followed by every post-mistake snapshot.
    pub fn hypotheses(&self) -> Vec<L> {
        std::iter::once(self.initial.clone())
            .chain(self.snapshots.iter().cloned())
            .collect()
    }
}

impl<L: PrefixLearner + Clone> PrefixLearner for Conservative<L> {
    fn class(&self) -> &Arc<VerifierClass> {
        self.current.class()
    }

    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        self.current.predict(z)
    }

    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()> {
        if self.current.predict(z)? != truth {
            self.current.update(z, truth)?;
            self.snapshots.push(self.current.clone());
        }
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        self.current.alive()
    }
}

#[cfg(test)]
mod tests;
