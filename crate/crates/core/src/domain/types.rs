use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Ratio};

/// Index into a class alphabet of reasoning steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StepToken(pub u16);

/// Index into a class's enumerated problem set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Problem(pub u32);

/// A problem together with a nonempty reasoning prefix `τ_{1:ℓ}`.
///
/// The derived order is not the canonical universe order; use
/// [`PrefixInstance::canonical_cmp`] for that.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrefixInstance {
    pub problem: Problem,
    pub steps: Vec<StepToken>,
}

impl PrefixInstance {
    pub fn new(problem: Problem, steps: Vec<StepToken>) -> Self {
        PrefixInstance { problem, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The length-`len` prefix of this instance.
    pub fn truncate(&self, len: usize) -> PrefixInstance {
        PrefixInstance {
            problem: self.problem,
            steps: self.steps[..len].to_vec(),
        }
    }

    pub fn extend(&self, token: StepToken) -> PrefixInstance {
        let mut steps = self.steps.clone();
        steps.push(token);
        PrefixInstance {
            problem: self.problem,
            steps,
        }
    }

    /// Order by (problem, length, lexicographic tokens).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.problem
            .cmp(&other.problem)
            .then(self.steps.len().cmp(&other.steps.len()))
            .then_with(|| self.steps.cmp(&other.steps))
    }
}

impl fmt::Display for PrefixInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}:[", self.problem.0)?;
        for (i, t) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", t.0)?;
        }
        write!(f, "]")
    }
}

/// A problem with a full-length reasoning trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CotInstance {
    pub problem: Problem,
    pub steps: Vec<StepToken>,
}

impl CotInstance {
    pub fn new(problem: Problem, steps: Vec<StepToken>) -> Self {
        CotInstance { problem, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `τ_{1:len}` as a prefix instance, `1 ≤ len ≤ L`.
    pub fn prefix(&self, len: usize) -> PrefixInstance {
        PrefixInstance {
            problem: self.problem,
            steps: self.steps[..len].to_vec(),
        }
    }

    pub fn as_prefix(&self) -> PrefixInstance {
        self.prefix(self.steps.len())
    }
}

impl fmt::Display for CotInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_prefix().fmt(f)
    }
}

/// Chain-of-thought label: location of the first faulty step, or all correct.
///
/// The derived order is `FaultAt(1) < … < FaultAt(L) < AllCorrect`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    FaultAt(u16),
    AllCorrect,
}

// Serialized as the fault position, or the string "inf".
impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Label::FaultAt(i) => s.serialize_u16(*i),
            Label::AllCorrect => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pos(u16),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Pos(0) => Err(serde::de::Error::custom("fault positions start at 1")),
            Raw::Pos(i) => Ok(Label::FaultAt(i)),
            Raw::Text(t) if t == "inf" => Ok(Label::AllCorrect),
            Raw::Text(t) => t
                .parse::<u16>()
                .ok()
                .filter(|&i| i > 0)
                .map(Label::FaultAt)
                .ok_or_else(|| serde::de::Error::custom(format!("bad label {t:?}"))),
        }
    }
}

impl Label {
    pub fn is_fault(self) -> bool {
        matches!(self, Label::FaultAt(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::FaultAt(i) => write!(f, "{i}"),
            Label::AllCorrect => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrefixLabel {
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "YES")]
    Yes,
}

impl PrefixLabel {
    pub fn from_bool(accept: bool) -> Self {
        if accept {
            PrefixLabel::Yes
        } else {
            PrefixLabel::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == PrefixLabel::Yes
    }

    pub fn flip(self) -> Self {
        match self {
            PrefixLabel::Yes => PrefixLabel::No,
            PrefixLabel::No => PrefixLabel::Yes,
        }
    }
}

impl fmt::Display for PrefixLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrefixLabel::Yes => "YES",
            PrefixLabel::No => "NO",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MistakeKind {
    None,
    Soundness,
    Completeness,
    Location,
}

/// Which taxonomy turns a (prediction, truth) pair into a [`MistakeKind`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MistakeMode {
    /// Predicting the fault too late is a soundness mistake, too early a
    /// completeness mistake.
    PrefixLevel,
    /// Accepting a faulty trace is a soundness mistake, rejecting a correct one
    /// a completeness mistake, and naming the wrong fault position a location
    /// mistake.
    SequenceLevel,
}

pub fn classify_mistake(prediction: Label, truth: Label, mode: MistakeMode) -> MistakeKind {
    if prediction == truth {
        return MistakeKind::None;
    }
    match mode {
        MistakeMode::PrefixLevel => {
            if prediction > truth {
                MistakeKind::Soundness
            } else {
                MistakeKind::Completeness
            }
        }
        MistakeMode::SequenceLevel => match (prediction, truth) {
            (Label::AllCorrect, Label::FaultAt(_)) => MistakeKind::Soundness,
            (Label::FaultAt(_), Label::AllCorrect) => MistakeKind::Completeness,
            _ => MistakeKind::Location,
        },
    }
}

pub fn classify_prefix_mistake(prediction: PrefixLabel, truth: PrefixLabel) -> MistakeKind {
    match (prediction, truth) {
        (PrefixLabel::Yes, PrefixLabel::No) => MistakeKind::Soundness,
        (PrefixLabel::No, PrefixLabel::Yes) => MistakeKind::Completeness,
        _ => MistakeKind::None,
    }
}

/// Per-mistake costs `γ_s`, `γ_c`, `γ_l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostVector {
    #[serde(with = "rational")]
    pub gamma_s: Ratio,
    #[serde(with = "rational")]
    pub gamma_c: Ratio,
    #[serde(with = "rational")]
    pub gamma_l: Ratio,
}

impl CostVector {
    /// Counts mistakes: every kind costs one.
    pub fn unit() -> Self {
        CostVector {
            gamma_s: rational::one(),
            gamma_c: rational::one(),
            gamma_l: rational::one(),
        }
    }

    pub fn new(gamma_s: Ratio, gamma_c: Ratio, gamma_l: Ratio) -> Self {
        CostVector {
            gamma_s,
            gamma_c,
            gamma_l,
        }
    }

    pub fn two(gamma_s: Ratio, gamma_c: Ratio) -> Self {
        CostVector {
            gamma_s,
            gamma_c,
            gamma_l: rational::zero(),
        }
    }

    pub fn nonnegative(&self) -> Result<()> {
        let z = rational::zero();
        if self.gamma_s < z || self.gamma_c < z || self.gamma_l < z {
            return Err(Error::InvalidCosts("costs must be nonnegative".into()));
        }
        Ok(())
    }

    /// `γ_s ≥ γ_c ≥ γ_l ≥ 0`, required by the three-cost game.
    pub fn ordered(&self) -> Result<()> {
        self.nonnegative()?;
        if self.gamma_s < self.gamma_c || self.gamma_c < self.gamma_l {
            return Err(Error::InvalidCosts(format!(
                "need gamma_s >= gamma_c >= gamma_l, got {}, {}, {}",
                rational::format(&self.gamma_s),
                rational::format(&self.gamma_c),
                rational::format(&self.gamma_l)
            )));
        }
        Ok(())
    }

    pub fn cost(&self, kind: MistakeKind) -> Ratio {
        match kind {
            MistakeKind::None => rational::zero(),
            MistakeKind::Soundness => self.gamma_s.clone(),
            MistakeKind::Completeness => self.gamma_c.clone(),
            MistakeKind::Location => self.gamma_l.clone(),
        }
    }

    /// Sequence-level loss `ℓ(ŷ, y)`.
    pub fn sequence_loss(&self, prediction: Label, truth: Label) -> Ratio {
        self.cost(classify_mistake(
            prediction,
            truth,
            MistakeMode::SequenceLevel,
        ))
    }

    pub fn scale(&self, c: &Ratio) -> Self {
        CostVector {
            gamma_s: &self.gamma_s * c,
            gamma_c: &self.gamma_c * c,
            gamma_l: &self.gamma_l * c,
        }
    }
}
