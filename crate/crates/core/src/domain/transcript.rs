use serde::{Deserialize, Serialize};

use crate::rational::{self, Ratio};

use super::types::{
    classify_mistake, classify_prefix_mistake, CostVector, CotInstance, Label, MistakeKind,
    MistakeMode, PrefixInstance, PrefixLabel,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    Prefix(PrefixInstance),
    Cot(CotInstance),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Prefix(PrefixLabel),
    Cot(Label),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub instance: Instance,
    pub prediction: Answer,
    pub truth: Answer,
    pub kind: MistakeKind,
    #[serde(with = "rational")]
    pub cost: Ratio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub soundness: u64,
    pub completeness: u64,
    pub location: u64,
    #[serde(with = "rational")]
    pub cost: Ratio,
}

impl Default for Totals {
    fn default() -> Self {
        Totals {
            soundness: 0,
            completeness: 0,
            location: 0,
            cost: rational::zero(),
        }
    }
}

impl Totals {
    pub fn mistakes(&self) -> u64 {
        self.soundness + self.completeness + self.location
    }

    pub fn add(&mut self, kind: MistakeKind, cost: &Ratio) {
        match kind {
            MistakeKind::None => {}
            MistakeKind::Soundness => self.soundness += 1,
            MistakeKind::Completeness => self.completeness += 1,
            MistakeKind::Location => self.location += 1,
        }
        self.cost += cost;
    }
}

/// Per-round record of an online run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub costs: CostVector,
    pub mode: MistakeMode,
    pub rounds: Vec<Round>,
    pub totals: Totals,
    /// Tallies of the wrapped learner when the run goes through a reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Totals>,
}

impl Transcript {
    pub fn new(costs: CostVector, mode: MistakeMode) -> Self {
        Transcript {
            costs,
            mode,
            rounds: Vec::new(),
            totals: Totals::default(),
            inner: None,
        }
    }

    pub fn push_prefix(&mut self, z: PrefixInstance, prediction: PrefixLabel, truth: PrefixLabel) {
        let kind = classify_prefix_mistake(prediction, truth);
        self.push(
            Instance::Prefix(z),
            Answer::Prefix(prediction),
            Answer::Prefix(truth),
            kind,
        );
    }

    pub fn push_cot(&mut self, z: CotInstance, prediction: Label, truth: Label) {
        let kind = classify_mistake(prediction, truth, self.mode);
        self.push(
            Instance::Cot(z),
            Answer::Cot(prediction),
            Answer::Cot(truth),
            kind,
        );
    }

    fn push(&mut self, instance: Instance, prediction: Answer, truth: Answer, kind: MistakeKind) {
        let cost = self.costs.cost(kind);
        self.totals.add(kind, &cost);
        self.rounds.push(Round {
            instance,
            prediction,
            truth,
            kind,
            cost,
        });
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Totals folded from the rounds, recomputing each round's cost.
    pub fn recompute(&self) -> Totals {
        let mut t = Totals::default();
        for r in &self.rounds {
            t.add(r.kind, &self.costs.cost(r.kind));
        }
        t
    }

    pub fn consistent(&self) -> bool {
        self.rounds
            .iter()
            .all(|r| r.cost == self.costs.cost(r.kind))
            && self.recompute() == self.totals
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::types::{Problem, StepToken};
    use proptest::prelude::*;

    fn label(i: u8) -> Label {
        if i == 0 {
            Label::AllCorrect
        } else {
            Label::FaultAt(i as u16)
        }
    }

    proptest! {
        #[test]
        fn totals_fold(rounds in proptest::collection::vec((0u8..4, 0u8..4), 0..40),
                       s in 0i64..5, c in 0i64..5, l in 0i64..5) {
            let costs = CostVector::new(rational::int(s), rational::int(c), rational::int(l));
            let mut t = Transcript::new(costs.clone(), MistakeMode::SequenceLevel);
            for (p, y) in rounds {
                t.push_cot(CotInstance::new(Problem(0), vec![StepToken(0); 3]), label(p), label(y));
            }
            prop_assert!(t.consistent());
            let tot = &t.totals;
            let expect = &costs.gamma_s * rational::int(tot.soundness as i64)
                + &costs.gamma_c * rational::int(tot.completeness as i64)
                + &costs.gamma_l * rational::int(tot.location as i64);
            prop_assert_eq!(&tot.cost, &expect);
        }
    }

    #[test]
    fn json_uses_fractions() {
        let mut t = Transcript::new(
            CostVector::two(rational::ratio(3, 2), rational::one()),
            MistakeMode::PrefixLevel,
        );
        t.push_prefix(
            PrefixInstance::new(Problem(0), vec![StepToken(1)]),
            PrefixLabel::Yes,
            PrefixLabel::No,
        );
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains("\"cost\":\"3/2\""), "{text}");
        let back: Transcript = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}
