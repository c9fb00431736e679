use std::sync::Arc;

use crate::bitset::VerifierSet;
use crate::dimensions::Engine;
use crate::domain::{CotInstance, Label, VerifierClass};
use crate::error::Result;

use super::{nonempty, CotLearner};

fn restrict(
    class: &VerifierClass,
    alive: &VerifierSet,
    z: &CotInstance,
    truth: Label,
) -> Result<VerifierSet> {
    nonempty(class.cot_restrict(alive, class.cot_index_of(z)?, truth))
}

/// Halving on fault positions: flags the first step that at most half of the
/// consistent verifiers accept.
#[derive(Clone, Debug)]
pub struct MajorityVote {
    class: Arc<VerifierClass>,
    alive: VerifierSet,
}

impl MajorityVote {
    pub fn new(class: Arc<VerifierClass>) -> Self {
        let alive = class.all();
        MajorityVote { class, alive }
    }
}

impl CotLearner for MajorityVote {
    fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        let idx = self.class.cot_index_of(z)?;
        let half = self.alive.len();
        for (i, &p) in self.class.cot_entries()[idx].prefixes.iter().enumerate() {
            let accepting = self.alive.intersection(self.class.accept_set(p)).len();
            if 2 * accepting <= half {
                return Ok(Label::FaultAt(i as u16 + 1));
            }
        }
        Ok(Label::AllCorrect)
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        self.alive = restrict(&self.class, &self.alive, z, truth)?;
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}

/// Accepts a step only when every consistent verifier does, so it never
/// accepts a faulty trace.
#[derive(Clone, Debug)]
pub struct SoundConservative {
    class: Arc<VerifierClass>,
    alive: VerifierSet,
}

impl SoundConservative {
    pub fn new(class: Arc<VerifierClass>) -> Self {
        let alive = class.all();
        SoundConservative { class, alive }
    }
}

impl CotLearner for SoundConservative {
    fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        let idx = self.class.cot_index_of(z)?;
        Ok(self
            .class
            .cot_partition(&self.alive, idx)
            .first()
            .map_or(Label::AllCorrect, |(y, _)| *y))
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        self.alive = restrict(&self.class, &self.alive, z, truth)?;
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}

/// Flags step 1 of every trace unless all consistent verifiers accept it.
#[derive(Clone, Debug)]
pub struct RejectAll {
    class: Arc<VerifierClass>,
    alive: VerifierSet,
}

impl RejectAll {
    pub fn new(class: Arc<VerifierClass>) -> Self {
        let alive = class.all();
        RejectAll { class, alive }
    }
}

impl CotLearner for RejectAll {
    fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        let idx = self.class.cot_index_of(z)?;
        let parts = self.class.cot_partition(&self.alive, idx);
        Ok(match parts.as_slice() {
            [(Label::AllCorrect, _)] => Label::AllCorrect,
            _ => Label::FaultAt(1),
        })
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        self.alive = restrict(&self.class, &self.alive, z, truth)?;
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}

/// Optimal learner for the three-cost sequence-level loss: among achievable
/// labels, predicts the one minimizing the worst case of immediate loss plus
/// the remaining dimension. Ties go to the smallest label.
#[derive(Clone)]
pub struct SclSoa {
    engine: Arc<Engine>,
    alive: VerifierSet,
}

impl SclSoa {
    /// Costs come from the engine and must satisfy `γ_s ≥ γ_c ≥ γ_l ≥ 0`.
    pub fn new(engine: Arc<Engine>) -> Result<Self> {
        engine.costs().ordered()?;
        let alive = engine.class().all();
        Ok(SclSoa { engine, alive })
    }
}

impl CotLearner for SclSoa {
    fn class(&self) -> &Arc<VerifierClass> {
        self.engine.class()
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        let class = self.engine.class();
        let parts = class.cot_partition(&self.alive, class.cot_index_of(z)?);
        if parts.len() <= 1 {
            return Ok(parts.first().map_or(Label::AllCorrect, |(y, _)| *y));
        }
        let values: Vec<_> = parts
            .iter()
            .map(|(y, s)| (*y, self.engine.scl(s)))
            .collect();
        let costs = self.engine.costs();
        let mut best = None;
        for &(i, _) in &values {
            let worst = values
                .iter()
                .map(|(j, v)| costs.sequence_loss(i, *j) + v)
                .max()
                .expect("at least two labels");
            if best.as_ref().is_none_or(|(_, b)| worst < *b) {
                best = Some((i, worst));
            }
        }
        Ok(best.expect("at least two labels").0)
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        let class = self.engine.class().clone();
        self.alive = restrict(&class, &self.alive, z, truth)?;
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}
