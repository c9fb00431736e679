//! Adapters between chain-of-thought and prefix verification learners.

use std::sync::Arc;

use crate::bitset::VerifierSet;
use crate::domain::{
    classify_mistake, classify_prefix_mistake, CotInstance, Label, MistakeMode, PrefixInstance,
    PrefixLabel, Totals, VerifierClass,
};
use crate::error::{Error, Result};
use crate::learners::{CotLearner, PrefixLearner};
use crate::rational;

fn tally(t: &mut Totals, kind: crate::domain::MistakeKind) {
    t.add(kind, &rational::zero());
}

/// Chain-of-thought learner built from a prefix learner: flags the first
/// prefix the inner learner rejects, and on a mistake feeds back the single
/// prefix that decided it.
#[derive(Clone, Debug)]
pub struct CotFromPrefix<P> {
    inner: P,
    inner_totals: Totals,
}

impl<P: PrefixLearner> CotFromPrefix<P> {
    pub fn new(inner: P) -> Self {
        CotFromPrefix {
            inner,
            inner_totals: Totals::default(),
        }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    /// Mistakes of the inner learner on the examples fed to it.
    pub fn inner_totals(&self) -> &Totals {
        &self.inner_totals
    }

    fn feed(&mut self, z: PrefixInstance, y: PrefixLabel) -> Result<()> {
        let p = self.inner.predict(&z)?;
        tally(&mut self.inner_totals, classify_prefix_mistake(p, y));
        self.inner.update(&z, y)
    }
}

impl<P: PrefixLearner> CotLearner for CotFromPrefix<P> {
    fn class(&self) -> &Arc<VerifierClass> {
        self.inner.class()
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        for l in 1..=z.len() {
            if self.inner.predict(&z.prefix(l))? == PrefixLabel::No {
                return Ok(Label::FaultAt(l as u16));
            }
        }
        Ok(Label::AllCorrect)
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        let p = self.predict(z)?;
        match (p, truth) {
            (Label::FaultAt(i), _) if p < truth => {
                self.feed(z.prefix(i as usize), PrefixLabel::Yes)
            }
            (_, Label::FaultAt(j)) if p > truth => self.feed(z.prefix(j as usize), PrefixLabel::No),
            _ => Ok(()),
        }
    }

    fn alive(&self) -> Option<&VerifierSet> {
        self.inner.alive()
    }
}

/// Prefix learner built from a chain-of-thought learner, for classes with a
/// fail token `F` that every verifier rejects after a correct prefix. A
/// prefix is padded with `F` to full length and rejected iff the inner
/// learner flags a step no later than its end.
#[derive(Clone, Debug)]
pub struct PrefixFromCot<C> {
    inner: C,
    inner_totals: Totals,
}

impl<C: CotLearner> PrefixFromCot<C> {
    /// Checks the fail token against every verifier and universe prefix.
    pub fn new(inner: C) -> Result<Self> {
        inner.class().validate_fail_token()?;
        Ok(PrefixFromCot {
            inner,
            inner_totals: Totals::default(),
        })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn inner_totals(&self) -> &Totals {
        &self.inner_totals
    }

    fn padded(&self, z: &PrefixInstance) -> Result<CotInstance> {
        self.inner.class().pad_with_fail(z)
    }
}

impl<C: CotLearner> PrefixLearner for PrefixFromCot<C> {
    fn class(&self) -> &Arc<VerifierClass> {
        self.inner.class()
    }

    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        let p = self.inner.predict(&self.padded(z)?)?;
        Ok(PrefixLabel::from_bool(p > Label::FaultAt(z.len() as u16)))
    }

    /// Every round feeds the inner learner the label the oracle would give
    /// the padded trace.
    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()> {
        let padded = self.padded(z)?;
        let l = z.len();
        let max_len = self.inner.class().max_len();
        if l > max_len || l == 0 {
            return Err(Error::UnknownInstance(z.to_string()));
        }
        let label = match truth {
            PrefixLabel::No => Label::FaultAt(l as u16),
            PrefixLabel::Yes if l < max_len => Label::FaultAt(l as u16 + 1),
            PrefixLabel::Yes => Label::AllCorrect,
        };
        let p = self.inner.predict(&padded)?;
        tally(
            &mut self.inner_totals,
            classify_mistake(p, label, MistakeMode::PrefixLevel),
        );
        self.inner.update(&padded, label)
    }

    fn alive(&self) -> Option<&VerifierSet> {
        self.inner.alive()
    }
}
