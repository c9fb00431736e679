use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::bitset::VerifierSet;
use crate::error::{Error, Result};

use super::types::{CotInstance, Label, PrefixInstance, PrefixLabel, StepToken};

/// Size caps for generated and loaded classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassLimits {
    pub max_verifiers: usize,
    pub max_universe: usize,
}

impl Default for ClassLimits {
    fn default() -> Self {
        ClassLimits {
            max_verifiers: 4096,
            max_universe: 65536,
        }
    }
}

/// Alphabet, problem set, trace length and optional fail token of a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassShape {
    pub sigma: Vec<String>,
    pub problems: Vec<String>,
    pub max_len: usize,
    pub fail_token: Option<StepToken>,
}

impl ClassShape {
    pub fn new(sigma: Vec<String>, problems: Vec<String>, max_len: usize) -> Self {
        ClassShape {
            sigma,
            problems,
            max_len,
            fail_token: None,
        }
    }
}

/// A full-length trace from the universe together with the universe indices
/// of its `L` prefixes.
#[derive(Clone, Debug)]
pub struct CotEntry {
    pub instance: CotInstance,
    pub prefixes: Vec<usize>,
}

/// A finite class of verifiers, each a total YES/NO table over an enumerated
/// universe of prefix instances.
///
/// Tables are stored column-wise: for every universe instance the set of
/// verifiers that accept it. Restricting a version space to a labelled
/// instance is then a single bitset intersection.
#[derive(Clone, Debug)]
pub struct VerifierClass {
    sigma: Vec<String>,
    problems: Vec<String>,
    max_len: usize,
    fail_token: Option<StepToken>,
    universe: Vec<PrefixInstance>,
    index: HashMap<PrefixInstance, usize>,
    accept: Vec<VerifierSet>,
    n_verifiers: usize,
    cot: Vec<CotEntry>,
    cot_index: HashMap<CotInstance, usize>,
    fingerprint: u64,
}

impl PartialEq for VerifierClass {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.sigma == other.sigma
            && self.problems == other.problems
            && self.max_len == other.max_len
            && self.fail_token == other.fail_token
            && self.universe == other.universe
            && self.accept == other.accept
    }
}

impl Eq for VerifierClass {}

impl VerifierClass {
    /// Builds a class from a membership predicate `accepts(verifier, instance)`.
    /// The universe is sorted into canonical order and deduplicated.
    pub fn from_fn(
        shape: ClassShape,
        mut universe: Vec<PrefixInstance>,
        n_verifiers: usize,
        limits: ClassLimits,
        accepts: impl Fn(usize, &PrefixInstance) -> bool,
    ) -> Result<Self> {
        universe.sort_by(|a, b| a.canonical_cmp(b));
        universe.dedup();
        check_caps(n_verifiers, universe.len(), limits)?;
        let accept = universe
            .iter()
            .map(|z| {
                VerifierSet::from_ids(n_verifiers, (0..n_verifiers).filter(|&v| accepts(v, z)))
            })
            .collect();
        Self::assemble(shape, universe, n_verifiers, accept)
    }

    /// Builds a class from per-verifier rows that follow `universe` order.
    /// The universe must already be in canonical order.
    pub fn from_rows(
        shape: ClassShape,
        universe: Vec<PrefixInstance>,
        rows: &[Vec<bool>],
        limits: ClassLimits,
    ) -> Result<Self> {
        check_caps(rows.len(), universe.len(), limits)?;
        for w in universe.windows(2) {
            if w[0].canonical_cmp(&w[1]) != std::cmp::Ordering::Less {
                return Err(Error::SchemaError(format!(
                    "universe not in canonical order at {} / {}",
                    w[0], w[1]
                )));
            }
        }
        for (v, row) in rows.iter().enumerate() {
            if row.len() != universe.len() {
                return Err(Error::SchemaError(format!(
                    "verifier {v} has {} rows, universe has {}",
                    row.len(),
                    universe.len()
                )));
            }
        }
        let n = rows.len();
        let accept = (0..universe.len())
            .map(|i| VerifierSet::from_ids(n, (0..n).filter(|&v| rows[v][i])))
            .collect();
        Self::assemble(shape, universe, n, accept)
    }

    fn assemble(
        shape: ClassShape,
        universe: Vec<PrefixInstance>,
        n_verifiers: usize,
        accept: Vec<VerifierSet>,
    ) -> Result<Self> {
        let ClassShape {
            sigma,
            problems,
            max_len,
            fail_token,
        } = shape;
        if sigma.len() < 2 {
            return Err(Error::SchemaError(
                "alphabet needs at least two steps".into(),
            ));
        }
        if problems.is_empty() {
            return Err(Error::SchemaError("problem set is empty".into()));
        }
        if max_len == 0 {
            return Err(Error::SchemaError(
                "max trace length must be positive".into(),
            ));
        }
        if let Some(f) = fail_token {
            if f.0 as usize >= sigma.len() {
                return Err(Error::SchemaError(format!(
                    "fail token {} outside alphabet",
                    f.0
                )));
            }
        }
        let mut index = HashMap::with_capacity(universe.len());
        for (i, z) in universe.iter().enumerate() {
            if z.problem.0 as usize >= problems.len() {
                return Err(Error::SchemaError(format!("{z}: unknown problem")));
            }
            if z.steps.is_empty() || z.steps.len() > max_len {
                return Err(Error::SchemaError(format!(
                    "{z}: prefix length must be in 1..={max_len}"
                )));
            }
            if let Some(t) = z.steps.iter().find(|t| t.0 as usize >= sigma.len()) {
                return Err(Error::SchemaError(format!(
                    "{z}: token {} outside alphabet",
                    t.0
                )));
            }
            if index.insert(z.clone(), i).is_some() {
                return Err(Error::SchemaError(format!("{z}: duplicated in universe")));
            }
        }

        let mut cot = Vec::new();
        let mut cot_index = HashMap::new();
        for z in universe.iter().filter(|z| z.steps.len() == max_len) {
            let prefixes: Option<Vec<usize>> = (1..=max_len)
                .map(|l| index.get(&z.truncate(l)).copied())
                .collect();
            if let Some(prefixes) = prefixes {
                let instance = CotInstance::new(z.problem, z.steps.clone());
                cot_index.insert(instance.clone(), cot.len());
                cot.push(CotEntry { instance, prefixes });
            }
        }

        let mut hasher = DefaultHasher::new();
        sigma.hash(&mut hasher);
        problems.hash(&mut hasher);
        max_len.hash(&mut hasher);
        fail_token.hash(&mut hasher);
        universe.hash(&mut hasher);
        accept.hash(&mut hasher);
        let fingerprint = hasher.finish();

        Ok(VerifierClass {
            sigma,
            problems,
            max_len,
            fail_token,
            universe,
            index,
            accept,
            n_verifiers,
            cot,
            cot_index,
            fingerprint,
        })
    }

    pub fn sigma(&self) -> &[String] {
        &self.sigma
    }

    pub fn problems(&self) -> &[String] {
        &self.problems
    }

    /// `L`, the length of a full trace.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn fail_token(&self) -> Option<StepToken> {
        self.fail_token
    }

    pub fn universe(&self) -> &[PrefixInstance] {
        &self.universe
    }

    pub fn n_verifiers(&self) -> usize {
        self.n_verifiers
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn all(&self) -> VerifierSet {
        VerifierSet::full(self.n_verifiers)
    }

    pub fn index_of(&self, z: &PrefixInstance) -> Result<usize> {
        self.index
            .get(z)
            .copied()
            .ok_or_else(|| Error::UnknownInstance(z.to_string()))
    }

    pub fn contains(&self, z: &PrefixInstance) -> bool {
        self.index.contains_key(z)
    }

    /// Verifiers answering YES on universe instance `idx`.
    pub fn accept_set(&self, idx: usize) -> &VerifierSet {
        &self.accept[idx]
    }

    pub fn accepts(&self, verifier: usize, idx: usize) -> bool {
        self.accept[idx].contains(verifier)
    }

    pub fn label(&self, verifier: usize, z: &PrefixInstance) -> Result<PrefixLabel> {
        Ok(PrefixLabel::from_bool(
            self.accepts(verifier, self.index_of(z)?),
        ))
    }

    /// Verifier `v`'s table in universe order.
    pub fn row(&self, verifier: usize) -> Vec<bool> {
        self.accept.iter().map(|s| s.contains(verifier)).collect()
    }

    /// Members of `alive` that label `idx` with `y`.
    pub fn restrict_set(&self, alive: &VerifierSet, idx: usize, y: PrefixLabel) -> VerifierSet {
        match y {
            PrefixLabel::Yes => alive.intersection(&self.accept[idx]),
            PrefixLabel::No => alive.difference(&self.accept[idx]),
        }
    }

    /// Full-length traces all of whose prefixes lie in the universe.
    pub fn cot_entries(&self) -> &[CotEntry] {
        &self.cot
    }

    pub fn cot_index_of(&self, z: &CotInstance) -> Result<usize> {
        if z.steps.len() != self.max_len {
            return Err(Error::UnknownInstance(format!(
                "{z}: trace length {} but L = {}",
                z.steps.len(),
                self.max_len
            )));
        }
        self.cot_index
            .get(z)
            .copied()
            .ok_or_else(|| Error::UnknownInstance(z.to_string()))
    }

    /// Sequence-level label that verifier `v` assigns to cot entry `idx`.
    pub fn cot_label(&self, verifier: usize, idx: usize) -> Label {
        self.cot[idx]
            .prefixes
            .iter()
            .position(|&p| !self.accept[p].contains(verifier))
            .map_or(Label::AllCorrect, |i| Label::FaultAt(i as u16 + 1))
    }

    /// Partition of `alive` by sequence-level label on cot entry `idx`, in
    /// label order, omitting empty parts.
    pub fn cot_partition(&self, alive: &VerifierSet, idx: usize) -> Vec<(Label, VerifierSet)> {
        let mut parts = Vec::new();
        let mut remaining = alive.clone();
        for (i, &p) in self.cot[idx].prefixes.iter().enumerate() {
            if remaining.is_empty() {
                break;
            }
            let rejecting = remaining.difference(&self.accept[p]);
            if !rejecting.is_empty() {
                parts.push((Label::FaultAt(i as u16 + 1), rejecting));
                remaining = remaining.intersection(&self.accept[p]);
            }
        }
        if !remaining.is_empty() {
            parts.push((Label::AllCorrect, remaining));
        }
        parts
    }

    /// Members of `alive` whose sequence-level label on `idx` is `y`.
    pub fn cot_restrict(&self, alive: &VerifierSet, idx: usize, y: Label) -> VerifierSet {
        let prefixes = &self.cot[idx].prefixes;
        let mut set = alive.clone();
        let accepted = match y {
            Label::AllCorrect => prefixes.len(),
            Label::FaultAt(i) => (i as usize).saturating_sub(1).min(prefixes.len()),
        };
        for &p in &prefixes[..accepted] {
            set = set.intersection(&self.accept[p]);
        }
        if let Label::FaultAt(i) = y {
            match prefixes.get(i as usize - 1) {
                Some(&p) => set = set.difference(&self.accept[p]),
                None => return VerifierSet::empty(self.n_verifiers),
            }
        }
        set
    }

    /// Checks the fail-token hypothesis against every universe instance:
    /// whenever `(τ_{1:ℓ-1}, F)` is in the universe and `τ_{1:ℓ-1}` is fully
    /// accepted by some verifier (so it may be correct), every verifier must
    /// reject `(τ_{1:ℓ-1}, F)`.
    ///
    /// Prefixes whose own prefixes fall outside the universe cannot be
    /// judged and are skipped.
    pub fn validate_fail_token(&self) -> Result<StepToken> {
        let f = self.fail_token.ok_or(Error::FailTokenRequired)?;
        let all = self.all();
        for (idx, z) in self.universe.iter().enumerate() {
            if z.steps.last() != Some(&f) || self.accept[idx].is_empty() {
                continue;
            }
            let head = z.steps.len() - 1;
            let mut possibly_correct = all.clone();
            let mut judged = true;
            for l in 1..=head {
                match self.index.get(&z.truncate(l)) {
                    Some(&p) => possibly_correct = possibly_correct.intersection(&self.accept[p]),
                    None => {
                        judged = false;
                        break;
                    }
                }
            }
            if judged && !possibly_correct.is_empty() {
                return Err(Error::FailTokenInvalid(z.to_string()));
            }
        }
        Ok(f)
    }

    /// `(τ_{1:ℓ}, F, …, F)` padded to length `L`.
    pub fn pad_with_fail(&self, z: &PrefixInstance) -> Result<CotInstance> {
        let f = self.fail_token.ok_or(Error::FailTokenRequired)?;
        let mut steps = z.steps.clone();
        steps.resize(self.max_len, f);
        let padded = CotInstance::new(z.problem, steps);
        self.cot_index_of(&padded)?;
        Ok(padded)
    }

    pub fn shape(&self) -> ClassShape {
        ClassShape {
            sigma: self.sigma.clone(),
            problems: self.problems.clone(),
            max_len: self.max_len,
            fail_token: self.fail_token,
        }
    }
}

fn check_caps(n_verifiers: usize, universe: usize, limits: ClassLimits) -> Result<()> {
    if n_verifiers == 0 {
        return Err(Error::SchemaError("class has no verifiers".into()));
    }
    if n_verifiers > limits.max_verifiers {
        return Err(Error::CapExceeded(format!(
            "{n_verifiers} verifiers > cap {}",
            limits.max_verifiers
        )));
    }
    if universe > limits.max_universe {
        return Err(Error::CapExceeded(format!(
            "{universe} universe instances > cap {}",
            limits.max_universe
        )));
    }
    Ok(())
}

/// Some verifier consistent with every labelled prefix, if one exists.
pub fn check_realizable(
    class: &VerifierClass,
    labeled: &[(PrefixInstance, PrefixLabel)],
) -> Result<Option<usize>> {
    let mut alive = class.all();
    for (z, y) in labeled {
        alive = class.restrict_set(&alive, class.index_of(z)?, *y);
    }
    Ok(alive.first())
}

/// Some verifier whose sequence-level labels match every labelled trace.
pub fn check_realizable_cot(
    class: &VerifierClass,
    labeled: &[(CotInstance, Label)],
) -> Result<Option<usize>> {
    let mut alive = class.all();
    for (z, y) in labeled {
        alive = class.cot_restrict(&alive, class.cot_index_of(z)?, *y);
    }
    Ok(alive.first())
}
