//! Adversaries that force mistakes on deterministic learners, by walking a
//! shattered mistake tree or by the two explicit constructions for the
//! bit-string and complement classes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dimensions::{MistakeTree, TreeKind, TreeNode};
use crate::domain::{
    Answer, CostVector, CotInstance, Instance, Label, MistakeMode, Problem, StepToken, Transcript,
    VerifierClass, VersionSpace,
};
use crate::error::{Error, Result};
use crate::learners::{CotLearner, PrefixLearner};
use crate::rational::{self, Ratio};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The forced cost equals the learner's guarantee.
    Tight,
    /// Both bounds hold with slack.
    Met,
    /// The forced cost fell below the lower bound or rose above the guarantee.
    Violated,
}

/// Compares a forced cost with a lower bound and an optional guarantee.
pub fn verdict(cost: &Ratio, lower: &Ratio, upper: Option<&Ratio>) -> Verdict {
    if cost < lower || upper.is_some_and(|u| cost > u) {
        Verdict::Violated
    } else if upper == Some(cost) {
        Verdict::Tight
    } else {
        Verdict::Met
    }
}

fn alive_space(class: &Arc<VerifierClass>, alive: Option<&crate::VerifierSet>) -> VersionSpace {
    match alive {
        Some(a) => VersionSpace::with_alive(class.clone(), a.clone()),
        None => VersionSpace::full(class.clone()),
    }
}

/// Walks `tree` from the root, presenting each node's prefix and revealing
/// the label opposite to the learner's prediction. Stops at a leaf.
pub fn play_tree_adversary<L: PrefixLearner + ?Sized>(
    tree: &MistakeTree,
    learner: &mut L,
) -> Result<Transcript> {
    let class = learner.class().clone();
    if !crate::dimensions::verify_shattered(tree, &alive_space(&class, learner.alive()))? {
        return Err(Error::TreeNotShattered);
    }
    let mut t = Transcript::new(tree.costs.clone(), MistakeMode::PrefixLevel);
    let mut node = tree.root.as_ref();
    while let Some(n) = node {
        let Instance::Prefix(z) = &n.instance else {
            return Err(Error::MalformedTree(
                "prefix adversary got a trace node".into(),
            ));
        };
        let p = learner.predict(z)?;
        let y = p.flip();
        let edge = n
            .edges
            .iter()
            .find(|e| e.label == Answer::Prefix(y))
            .ok_or_else(|| Error::MalformedTree(format!("node {z} lacks a {y} edge")))?;
        learner.update(z, y)?;
        t.push_prefix(z.clone(), p, y);
        node = edge.child.as_deref();
    }
    Ok(t)
}

/// Trace version of [`play_tree_adversary`]: at each node the adversary
/// takes the edge whose label costs the learner most, the first on ties.
pub fn play_cot_tree_adversary<L: CotLearner + ?Sized>(
    tree: &MistakeTree,
    learner: &mut L,
) -> Result<Transcript> {
    let class = learner.class().clone();
    if !crate::dimensions::verify_shattered(tree, &alive_space(&class, learner.alive()))? {
        return Err(Error::TreeNotShattered);
    }
    let mut t = Transcript::new(tree.costs.clone(), MistakeMode::SequenceLevel);
    let mut node: Option<&TreeNode> = tree.root.as_ref();
    while let Some(n) = node {
        let Instance::Cot(z) = &n.instance else {
            return Err(Error::MalformedTree(
                "trace adversary got a prefix node".into(),
            ));
        };
        let p = learner.predict(z)?;
        let mut best: Option<(Ratio, Label, Option<&TreeNode>)> = None;
        for e in &n.edges {
            let Answer::Cot(y) = e.label else {
                return Err(Error::MalformedTree("trace node has a prefix edge".into()));
            };
            let loss = tree.costs.sequence_loss(p, y);
            if y != p && best.as_ref().is_none_or(|(b, _, _)| loss > *b) {
                best = Some((loss, y, e.child.as_deref()));
            }
        }
        let Some((_, y, child)) = best else {
            return Err(Error::MalformedTree(format!(
                "node {z} has no edge against {p}"
            )));
        };
        learner.update(z, y)?;
        t.push_cot(z.clone(), p, y);
        node = child;
    }
    Ok(t)
}

/// Lower bound the tree certifies for a learner that keeps at most `k`
/// soundness mistakes (ignored for weighted trees).
pub fn tree_lower_bound(tree: &MistakeTree, k: u32) -> Ratio {
    match tree.kind {
        TreeKind::Sc => rational::int(tree.difficulty(k).unwrap_or(0) as i64),
        _ => tree.min_path_weight(),
    }
}

/// Checks that every label revealed in `t` is consistent with one verifier.
pub fn transcript_realizable(class: &VerifierClass, t: &Transcript) -> Result<Option<usize>> {
    let mut alive = class.all();
    for r in &t.rounds {
        alive = match (&r.instance, r.truth) {
            (Instance::Prefix(z), Answer::Prefix(y)) => {
                class.restrict_set(&alive, class.index_of(z)?, y)
            }
            (Instance::Cot(z), Answer::Cot(y)) => {
                class.cot_restrict(&alive, class.cot_index_of(z)?, y)
            }
            _ => {
                return Err(Error::SchemaError(
                    "round mixes prefix and trace labels".into(),
                ))
            }
        };
    }
    Ok(alive.first())
}

fn ones_after(known: &[StepToken], len: usize) -> CotInstance {
    let mut steps = known.to_vec();
    steps.resize(len, StepToken(1));
    CotInstance::new(Problem(0), steps)
}

/// Bit-string adversary for `singleton_bitstring_class(max_len)`: with the
/// first `m` bits of the proof revealed, it shows those bits followed by
/// ones, and names as the first fault whichever of the next two candidates
/// the learner did not predict. Every round is a mistake and at most two
/// bits are revealed per round.
pub fn prop31_adversary<L: CotLearner + ?Sized>(
    max_len: usize,
    learner: &mut L,
) -> Result<Transcript> {
    let class = learner.class().clone();
    if class.max_len() != max_len || class.n_verifiers() != 1 << max_len {
        return Err(Error::InvalidParameter(format!(
            "class is not the bit-string class of length {max_len}"
        )));
    }
    let mut t = Transcript::new(CostVector::unit(), MistakeMode::SequenceLevel);
    let mut known: Vec<StepToken> = Vec::new();
    while known.len() < max_len {
        let m = known.len();
        let z = ones_after(&known, max_len);
        let first = Label::FaultAt(m as u16 + 1);
        let second = if m + 2 <= max_len {
            Label::FaultAt(m as u16 + 2)
        } else {
            Label::AllCorrect
        };
        let p = learner.predict(&z)?;
        let y = if p == first { second } else { first };
        learner.update(&z, y)?;
        t.push_cot(z, p, y);
        match y {
            Label::FaultAt(i) if i as usize == m + 1 => known.push(StepToken(0)),
            Label::FaultAt(_) => known.extend([StepToken(1), StepToken(0)]),
            Label::AllCorrect => known.push(StepToken(1)),
        }
    }
    Ok(t)
}

/// Complement-class adversary for `complement_class(n, L)`: presents the
/// designated traces in order, declaring each one the learner rejects
/// correct, so the last one is the target's only faulty trace.
pub fn prop32_adversary<L: CotLearner + ?Sized>(n: usize, learner: &mut L) -> Result<Transcript> {
    let class = learner.class().clone();
    let max_len = class.max_len();
    let designated = crate::families::complement_designated(n, max_len);
    if class.n_verifiers() != n {
        return Err(Error::InvalidParameter(format!(
            "class has {} verifiers, expected {n}",
            class.n_verifiers()
        )));
    }
    let mut t = Transcript::new(CostVector::unit(), MistakeMode::PrefixLevel);
    for (i, z) in designated.iter().enumerate() {
        let p = learner.predict(z)?;
        if p == Label::AllCorrect {
            return Err(Error::LearnerNotSound(z.to_string()));
        }
        let y = if i + 1 == n {
            Label::FaultAt(max_len as u16)
        } else {
            Label::AllCorrect
        };
        learner.update(z, y)?;
        t.push_cot(z.clone(), p, y);
    }
    Ok(t)
}
