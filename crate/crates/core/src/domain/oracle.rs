use std::sync::Arc;

use crate::bitset::VerifierSet;
use crate::error::{Error, Result};

use super::class::VerifierClass;
use super::types::{CotInstance, Label, PrefixInstance, PrefixLabel};

/// Labels instances according to a target verifier `h*` of the class.
#[derive(Clone, Debug)]
pub struct Oracle {
    class: Arc<VerifierClass>,
    target: usize,
}

impl Oracle {
    pub fn new(class: Arc<VerifierClass>, target: usize) -> Result<Self> {
        if target >= class.n_verifiers() {
            return Err(Error::InvalidParameter(format!(
                "target {target} outside class of {} verifiers",
                class.n_verifiers()
            )));
        }
        Ok(Oracle { class, target })
    }

    pub fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn prefix_label(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        self.class.label(self.target, z)
    }

    pub fn prefix_label_at(&self, idx: usize) -> PrefixLabel {
        PrefixLabel::from_bool(self.class.accepts(self.target, idx))
    }

    pub fn cot_label(&self, z: &CotInstance) -> Result<Label> {
        Ok(self
            .class
            .cot_label(self.target, self.class.cot_index_of(z)?))
    }

    /// Whether every strict prefix of `z` is correct, i.e. whether `z` may be
    /// shown under the prefix-verification promise.
    pub fn promise_holds(&self, z: &PrefixInstance) -> Result<bool> {
        for l in 1..z.len() {
            if !self.prefix_label(&z.truncate(l))?.is_yes() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The verifiers of a class still consistent with the feedback seen so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VersionSpace {
    class: Arc<VerifierClass>,
    alive: VerifierSet,
}

impl VersionSpace {
    pub fn full(class: Arc<VerifierClass>) -> Self {
        let alive = class.all();
        VersionSpace { class, alive }
    }

    pub fn with_alive(class: Arc<VerifierClass>, alive: VerifierSet) -> Self {
        assert_eq!(alive.capacity(), class.n_verifiers());
        VersionSpace { class, alive }
    }

    pub fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    pub fn alive(&self) -> &VerifierSet {
        &self.alive
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn contains(&self, verifier: usize) -> bool {
        self.alive.contains(verifier)
    }

    pub fn restrict(&self, z: &PrefixInstance, y: PrefixLabel) -> Result<VersionSpace> {
        Ok(self.restrict_at(self.class.index_of(z)?, y))
    }

    pub fn restrict_at(&self, idx: usize, y: PrefixLabel) -> VersionSpace {
        VersionSpace {
            class: self.class.clone(),
            alive: self.class.restrict_set(&self.alive, idx, y),
        }
    }

    pub fn restrict_cot(&self, z: &CotInstance, y: Label) -> Result<VersionSpace> {
        Ok(self.restrict_cot_at(self.class.cot_index_of(z)?, y))
    }

    pub fn restrict_cot_at(&self, idx: usize, y: Label) -> VersionSpace {
        VersionSpace {
            class: self.class.clone(),
            alive: self.class.cot_restrict(&self.alive, idx, y),
        }
    }
}
