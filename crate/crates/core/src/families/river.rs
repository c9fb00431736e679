use std::collections::HashMap;

use crate::domain::{
    ClassLimits, ClassShape, CotInstance, PrefixInstance, Problem, StepToken, VerifierClass,
};
use crate::error::{Error, Result};

const FARMER: u16 = 8;
const CHICKEN: u16 = 4;
const FOX: u16 = 2;
const CORN: u16 = 1;

/// Which edge sets the hidden part of a verifier ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiverMode {
    /// Subsets of the unrevealed edges only.
    Unrevealed,
    /// Every subset of the legal-move graph; verifiers differing only on
    /// revealed edges behave identically.
    Full,
}

/// The river-crossing verifier class and the graph it was built from.
///
/// States are 4-bit tokens giving the bank of (farmer, chicken, fox, corn),
/// most significant bit first. Edges are unordered pairs of safe states one
/// legal boat trip apart.
#[derive(Clone, Debug)]
pub struct RiverCrossing {
    pub class: VerifierClass,
    edges: Vec<(u16, u16)>,
    edge_ids: HashMap<(u16, u16), usize>,
    revealed: Vec<bool>,
    hidden: Vec<usize>,
}

pub fn is_safe(s: u16) -> bool {
    let farmer = s & FARMER != 0;
    let chicken = s & CHICKEN != 0;
    let fox = s & FOX != 0;
    let corn = s & CORN != 0;
    !((chicken == fox && chicken != farmer) || (chicken == corn && chicken != farmer))
}

/// All legal moves between safe states, as sorted pairs `(u, v)` with `u < v`.
pub fn legal_edges() -> Vec<(u16, u16)> {
    let mut out = Vec::new();
    for u in 0..16u16 {
        if !is_safe(u) {
            continue;
        }
        let side = u & FARMER != 0;
        for cargo in [0, CHICKEN, FOX, CORN] {
            if cargo != 0 && (u & cargo != 0) != side {
                continue;
            }
            let v = u ^ FARMER ^ cargo;
            if is_safe(v) && u < v {
                out.push((u, v));
            }
        }
    }
    out.sort();
    out
}

fn key(u: u16, v: u16) -> (u16, u16) {
    (u.min(v), u.max(v))
}

fn rule(
    edge_ids: &HashMap<(u16, u16), usize>,
    accepted: &[bool],
    max_len: usize,
    z: &PrefixInstance,
) -> bool {
    let t = z.len();
    if t == 1 {
        return z.steps[0] == RiverCrossing::START;
    }
    let edge_ok = edge_ids
        .get(&key(z.steps[t - 2].0, z.steps[t - 1].0))
        .is_some_and(|&e| accepted[e]);
    edge_ok && (t < max_len || z.steps[t - 1] == RiverCrossing::GOAL)
}

fn accepted_edges(revealed: &[bool], hidden: &[usize], verifier: usize) -> Vec<bool> {
    let mut acc = revealed.to_vec();
    for (j, &e) in hidden.iter().enumerate() {
        if verifier >> j & 1 == 1 {
            acc[e] = true;
        }
    }
    acc
}

impl RiverCrossing {
    pub const START: StepToken = StepToken(0);
    pub const GOAL: StepToken = StepToken(15);

    pub fn edges(&self) -> &[(u16, u16)] {
        &self.edges
    }

    pub fn edge_id(&self, u: StepToken, v: StepToken) -> Option<usize> {
        self.edge_ids.get(&key(u.0, v.0)).copied()
    }

    pub fn is_revealed(&self, edge: usize) -> bool {
        self.revealed[edge]
    }

    /// Edge ids that vary across verifiers; bit `j` of a verifier id selects
    /// `hidden_edges()[j]`.
    pub fn hidden_edges(&self) -> &[usize] {
        &self.hidden
    }

    /// `E_0 ∪ Ẽ` for verifier `v`, indexed by edge id.
    pub fn accepted_edges(&self, verifier: usize) -> Vec<bool> {
        accepted_edges(&self.revealed, &self.hidden, verifier)
    }

    /// Id of the verifier whose accepted edge set is `accepted ∪ E_0`.
    pub fn verifier_for(&self, accepted: &[bool]) -> Result<usize> {
        let mut v = 0;
        for (e, &on) in accepted.iter().enumerate() {
            if !on || self.revealed[e] && !self.hidden.contains(&e) {
                continue;
            }
            let j = self.hidden.iter().position(|&h| h == e).ok_or_else(|| {
                Error::InvalidParameter(format!("edge {:?} cannot be hidden", self.edges[e]))
            })?;
            v |= 1 << j;
        }
        Ok(v)
    }

    /// The acceptance rule of a verifier with accepted edge set `accepted`
    /// on prefix `τ_{1:t}`: the start state at `t = 1`, an accepted edge into
    /// step `t` afterwards, and additionally the goal state at `t = L`.
    pub fn accepts_with(&self, accepted: &[bool], z: &PrefixInstance) -> bool {
        rule(&self.edge_ids, accepted, self.class.max_len(), z)
    }

    /// A shortest solution, padded by crossing back and forth when `L`
    /// exceeds eight states. `None` when `L` is too short or the parity of
    /// the padding does not work out.
    pub fn solution(&self) -> Option<CotInstance> {
        let path = [0u16, 12, 4, 14, 2, 11, 3, 15];
        let l = self.class.max_len();
        if l < path.len() || (l - path.len()) % 2 == 1 {
            return None;
        }
        let mut steps: Vec<StepToken> = path.iter().map(|&s| StepToken(s)).collect();
        while steps.len() < l {
            steps.insert(1, StepToken(12));
            steps.insert(2, StepToken(0));
        }
        Some(CotInstance::new(Problem(0), steps))
    }
}

/// River-crossing class with revealed edges `revealed` (pairs of states) and
/// trace length `max_len`.
///
/// The universe holds every single state and every extension by one state of
/// a walk in the legal-move graph that starts at the start state.
pub fn river_crossing_class(
    revealed: &[(u16, u16)],
    max_len: usize,
    mode: RiverMode,
    limits: ClassLimits,
) -> Result<RiverCrossing> {
    if !(1..=12).contains(&max_len) {
        return Err(Error::CapExceeded(format!("L = {max_len} outside 1..=12")));
    }
    let edges = legal_edges();
    let edge_ids: HashMap<(u16, u16), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut is_revealed = vec![false; edges.len()];
    for &(u, v) in revealed {
        let e = edge_ids
            .get(&key(u, v))
            .ok_or_else(|| Error::InvalidParameter(format!("({u},{v}) is not a legal move")))?;
        is_revealed[*e] = true;
    }
    let hidden: Vec<usize> = (0..edges.len())
        .filter(|&e| mode == RiverMode::Full || !is_revealed[e])
        .collect();
    if hidden.len() >= usize::BITS as usize - 1 || 1usize << hidden.len() > limits.max_verifiers {
        return Err(Error::CapExceeded(format!(
            "2^{} verifiers > cap {}",
            hidden.len(),
            limits.max_verifiers
        )));
    }

    let states: Vec<String> = (0..16u16).map(|s| format!("{s:04b}")).collect();
    let mut universe: Vec<PrefixInstance> = (0..16)
        .map(|s| PrefixInstance::new(Problem(0), vec![StepToken(s)]))
        .collect();
    let mut walks = vec![PrefixInstance::new(Problem(0), vec![RiverCrossing::START])];
    for _ in 2..=max_len {
        for w in &walks {
            universe.extend((0..16).map(|s| w.extend(StepToken(s))));
        }
        walks = walks
            .iter()
            .flat_map(|w| {
                let last = w.steps[w.len() - 1].0;
                let ids = &edge_ids;
                (0..16u16)
                    .filter(move |&s| ids.contains_key(&key(last, s)))
                    .map(move |s| w.extend(StepToken(s)))
            })
            .collect();
        if universe.len() > limits.max_universe {
            return Err(Error::CapExceeded(format!(
                "universe exceeds cap {}",
                limits.max_universe
            )));
        }
    }

    let n = 1usize << hidden.len();
    let tables: Vec<Vec<bool>> = (0..n)
        .map(|v| accepted_edges(&is_revealed, &hidden, v))
        .collect();
    let class = VerifierClass::from_fn(
        ClassShape::new(states, vec!["river".into()], max_len),
        universe,
        n,
        limits,
        |v, z| rule(&edge_ids, &tables[v], max_len, z),
    )?;
    Ok(RiverCrossing {
        class,
        edges,
        edge_ids,
        revealed: is_revealed,
        hidden,
    })
}
