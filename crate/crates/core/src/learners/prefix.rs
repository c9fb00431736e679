use std::sync::Arc;

use crate::bitset::VerifierSet;
use crate::dimensions::Engine;
use crate::domain::{CostVector, PrefixInstance, PrefixLabel, VerifierClass};
use crate::error::Result;

use super::{nonempty, PrefixLearner};

/// Optimal learner under a soundness-mistake budget `k`.
///
/// Predicts YES on unanimous acceptance, NO when the budget is spent or
/// nobody accepts, and otherwise NO iff the budgeted dimension after a
/// completeness mistake is at most the one after a soundness mistake.
#[derive(Clone)]
pub struct ScSoa {
    engine: Arc<Engine>,
    alive: VerifierSet,
    budget: u32,
}

impl ScSoa {
    pub fn new(engine: Arc<Engine>, k: u32) -> Self {
        let alive = engine.class().all();
        ScSoa {
            engine,
            alive,
            budget: k,
        }
    }

    /// Starts from a restricted version space instead of the whole class.
    pub fn with_alive(mut self, alive: VerifierSet) -> Self {
        self.alive = alive;
        self
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    fn predict_at(&self, idx: usize) -> PrefixLabel {
        let class = self.engine.class();
        let yes = self.alive.intersection(class.accept_set(idx));
        if yes.len() == self.alive.len() {
            return PrefixLabel::Yes;
        }
        if self.budget == 0 || yes.is_empty() {
            return PrefixLabel::No;
        }
        let no = self.alive.difference(&yes);
        let m_c = self.engine.sc(&yes, self.budget);
        let m_s = self.engine.sc(&no, self.budget - 1);
        if m_c <= m_s {
            PrefixLabel::No
        } else {
            PrefixLabel::Yes
        }
    }
}

impl PrefixLearner for ScSoa {
    fn class(&self) -> &Arc<VerifierClass> {
        self.engine.class()
    }

    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        Ok(self.predict_at(self.engine.class().index_of(z)?))
    }

    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()> {
        let class = self.engine.class().clone();
        let idx = class.index_of(z)?;
        let prediction = self.predict_at(idx);
        self.alive = nonempty(class.restrict_set(&self.alive, idx, truth))?;
        if prediction == PrefixLabel::Yes && truth == PrefixLabel::No {
            self.budget -= 1;
        }
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}

/// Optimal learner for the cost `γ_s·M_s + γ_c·M_c`: predicts NO iff
/// `γ_c + WSC(V|YES) ≤ γ_s + WSC(V|NO)`.
#[derive(Clone)]
pub struct WscSoa {
    engine: Arc<Engine>,
    alive: VerifierSet,
}

impl WscSoa {
    /// The engine's costs are the learner's costs.
    pub fn new(engine: Arc<Engine>) -> Self {
        let alive = engine.class().all();
        WscSoa { engine, alive }
    }

    pub fn costs(&self) -> &CostVector {
        self.engine.costs()
    }

    fn predict_at(&self, idx: usize) -> PrefixLabel {
        let class = self.engine.class();
        let yes = self.alive.intersection(class.accept_set(idx));
        if yes.len() == self.alive.len() {
            return PrefixLabel::Yes;
        }
        if yes.is_empty() {
            return PrefixLabel::No;
        }
        let no = self.alive.difference(&yes);
        let costs = self.engine.costs();
        let m_c = &costs.gamma_c + self.engine.wsc(&yes);
        let m_s = &costs.gamma_s + self.engine.wsc(&no);
        if m_c <= m_s {
            PrefixLabel::No
        } else {
            PrefixLabel::Yes
        }
    }
}

impl PrefixLearner for WscSoa {
    fn class(&self) -> &Arc<VerifierClass> {
        self.engine.class()
    }

    fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        Ok(self.predict_at(self.engine.class().index_of(z)?))
    }

    fn update(&mut self, z: &PrefixInstance, truth: PrefixLabel) -> Result<()> {
        let class = self.engine.class().clone();
        let idx = class.index_of(z)?;
        self.alive = nonempty(class.restrict_set(&self.alive, idx, truth))?;
        Ok(())
    }

    fn alive(&self) -> Option<&VerifierSet> {
        Some(&self.alive)
    }
}
