use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::prover::{Categorical, ProverSet};
use super::{s1_size, s2_size, timeout_budget, BoostParams};
use crate::domain::{
    MistakeKind, Oracle, PrefixInstance, PrefixLabel, Problem, StepToken, VerifierClass,
};
use crate::error::{Error, Result};
use crate::learners::{Conservative, PrefixLearner};
use crate::rational::{self, Ratio};
use crate::rng::{self, purpose};

/// Oracle wrapper that counts label queries.
pub struct CountingOracle<'a> {
    oracle: &'a Oracle,
    pub calls: u64,
}

impl<'a> CountingOracle<'a> {
    pub fn new(oracle: &'a Oracle) -> Self {
        CountingOracle { oracle, calls: 0 }
    }

    pub fn label(&mut self, z: &PrefixInstance) -> Result<PrefixLabel> {
        self.calls += 1;
        self.oracle
            .prefix_label(z)
            .map_err(|e| Error::OracleUnavailable(e.to_string()))
    }

    /// Whether `z` and all of its prefixes are correct.
    pub fn correct(&mut self, z: &PrefixInstance) -> Result<bool> {
        for l in 1..=z.len() {
            if !self.label(&z.truncate(l))?.is_yes() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A hypothesis frozen into a table over the class universe.
#[derive(Clone, Debug)]
pub struct FrozenVerifier {
    class: Arc<VerifierClass>,
    table: Vec<bool>,
}

impl FrozenVerifier {
    pub fn freeze<L: PrefixLearner + ?Sized>(learner: &L) -> Result<Self> {
        let class = learner.class().clone();
        let table = class
            .universe()
            .iter()
            .map(|z| learner.predict(z).map(PrefixLabel::is_yes))
            .collect::<Result<_>>()?;
        Ok(FrozenVerifier { class, table })
    }

    pub fn from_table(class: Arc<VerifierClass>, table: Vec<bool>) -> Result<Self> {
        if table.len() != class.universe().len() {
            return Err(Error::InvalidParameter(
                "table does not cover the universe".into(),
            ));
        }
        Ok(FrozenVerifier { class, table })
    }

    /// The verifier `v` of the class itself.
    pub fn member(class: Arc<VerifierClass>, v: usize) -> Self {
        let table = class.row(v);
        FrozenVerifier { class, table }
    }

    pub fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn predict(&self, z: &PrefixInstance) -> Result<PrefixLabel> {
        Ok(PrefixLabel::from_bool(self.table[self.class.index_of(z)?]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleOutcome {
    MadeMistake(MistakeKind),
    Timeout,
    FullProof,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    SoundnessMistake,
    CompletenessMistake,
    Correct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofOutcome {
    Proof(Vec<StepToken>),
    IDontKnow,
}

fn candidates<R: Rng + ?Sized>(
    provers: &ProverSet,
    prefix: &PrefixInstance,
    rng: &mut R,
) -> Result<Vec<PrefixInstance>> {
    provers
        .provers
        .iter()
        .map(|p| Ok(prefix.extend(p.sample(prefix, rng)?)))
        .collect()
}

/// One training pass over problem `x`: grow a trace step by step from the
/// provers' samples, checking every prediction against the oracle. The first
/// disagreement is fed to the learner and ends the pass.
pub fn process_example<L, R>(
    x: Problem,
    provers: &ProverSet,
    budget: usize,
    learner: &mut L,
    oracle: &mut CountingOracle,
    rng: &mut R,
) -> Result<ExampleOutcome>
where
    L: PrefixLearner + ?Sized,
    R: Rng + ?Sized,
{
    let max_len = learner.class().max_len();
    let mut prefix = PrefixInstance::new(x, Vec::new());
    for _ in 0..max_len {
        let mut chosen = None;
        for _ in 0..budget {
            let batch = candidates(provers, &prefix, rng)?;
            let mut first_yes = None;
            for c in batch {
                let v = learner.predict(&c)?;
                let y = oracle.label(&c)?;
                if v != y {
                    learner.update(&c, y)?;
                    let kind = if v.is_yes() {
                        MistakeKind::Soundness
                    } else {
                        MistakeKind::Completeness
                    };
                    return Ok(ExampleOutcome::MadeMistake(kind));
                }
                if v.is_yes() && first_yes.is_none() {
                    first_yes = Some(c);
                }
            }
            if first_yes.is_some() {
                chosen = first_yes;
                break;
            }
        }
        match chosen {
            Some(c) => prefix = c,
            None => return Ok(ExampleOutcome::Timeout),
        }
    }
    for l in 1..=max_len {
        let z = prefix.truncate(l);
        if !oracle.label(&z)?.is_yes() {
            learner.update(&z, PrefixLabel::No)?;
            return Ok(ExampleOutcome::MadeMistake(MistakeKind::Soundness));
        }
    }
    Ok(ExampleOutcome::FullProof)
}

/// Rejection sampling guided by `h`: at each step, sample one candidate per
/// prover, keep the first one `h` accepts, and give up after `budget` all-rejected batches. Every
/// prediction is appended to `record` when given.
pub fn weak_to_strong<R: Rng + ?Sized>(
    x: Problem,
    provers: &ProverSet,
    budget: usize,
    h: &FrozenVerifier,
    rng: &mut R,
    mut record: Option<&mut Vec<(PrefixInstance, PrefixLabel)>>,
) -> Result<ProofOutcome> {
    let max_len = h.class().max_len();
    let mut prefix = PrefixInstance::new(x, Vec::new());
    for _ in 0..max_len {
        let mut chosen = None;
        for _ in 0..budget {
            for c in candidates(provers, &prefix, rng)? {
                let v = h.predict(&c)?;
                if let Some(r) = record.as_deref_mut() {
                    r.push((c.clone(), v));
                }
                if v.is_yes() && chosen.is_none() {
                    chosen = Some(c);
                }
            }
            if chosen.is_some() {
                break;
            }
        }
        match chosen {
            Some(c) => prefix = c,
            None => return Ok(ProofOutcome::IDontKnow),
        }
    }
    Ok(ProofOutcome::Proof(prefix.steps))
}

/// Runs `h` as the test-time prover would and grades the run with the oracle.
pub fn test_hypothesis<R: Rng + ?Sized>(
    x: Problem,
    provers: &ProverSet,
    budget: usize,
    h: &FrozenVerifier,
    oracle: &mut CountingOracle,
    rng: &mut R,
) -> Result<TestOutcome> {
    let mut record = Vec::new();
    match weak_to_strong(x, provers, budget, h, rng, Some(&mut record))? {
        ProofOutcome::Proof(steps) => {
            if !oracle.correct(&PrefixInstance::new(x, steps))? {
                return Ok(TestOutcome::SoundnessMistake);
            }
        }
        ProofOutcome::IDontKnow => {
            for (z, v) in &record {
                if !v.is_yes() && oracle.correct(z)? {
                    return Ok(TestOutcome::CompletenessMistake);
                }
            }
        }
    }
    Ok(TestOutcome::Correct)
}

/// The trained prover: the selected hypothesis driving rejection sampling.
#[derive(Clone, Debug)]
pub struct BoostedProver {
    pub verifier: FrozenVerifier,
    pub provers: Arc<ProverSet>,
    pub params: BoostParams,
    pub budget: usize,
}

impl BoostedProver {
    pub fn new(
        verifier: FrozenVerifier,
        provers: Arc<ProverSet>,
        params: BoostParams,
    ) -> Result<Self> {
        let budget = timeout_budget(
            &provers.alpha,
            provers.k(),
            verifier.class().max_len(),
            &params.epsilon_prime,
        );
        Ok(BoostedProver {
            verifier,
            provers,
            params,
            budget,
        })
    }

    pub fn prove<R: Rng + ?Sized>(&self, x: Problem, rng: &mut R) -> Result<ProofOutcome> {
        weak_to_strong(x, &self.provers, self.budget, &self.verifier, rng, None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisScore {
    pub index: usize,
    pub soundness_errors: u64,
    pub completeness_errors: u64,
    #[serde(with = "rational")]
    pub soundness_rate: Ratio,
    #[serde(with = "rational")]
    pub completeness_rate: Ratio,
}

/// Everything a build run measured, whether or not a hypothesis qualified.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildReport {
    pub m_s: u64,
    pub m_c: u64,
    pub budget: usize,
    pub s1: usize,
    pub s2: usize,
    pub outcomes: Outcomes,
    /// Post-mistake snapshots; the initial hypothesis is tested as well.
    pub snapshots: usize,
    pub scores: Vec<HypothesisScore>,
    #[serde(with = "rational")]
    pub soundness_threshold: Ratio,
    #[serde(with = "rational")]
    pub completeness_threshold: Ratio,
    pub selected: Option<usize>,
    pub training_calls: u64,
    pub testing_calls: u64,
    pub max_calls_per_example: u64,
    pub call_budget_per_example: u64,
    #[serde(skip)]
    pub hypotheses: Vec<FrozenVerifier>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcomes {
    pub soundness_mistakes: u64,
    pub completeness_mistakes: u64,
    pub timeouts: u64,
    pub full_proofs: u64,
}

/// Oracle queries one training example may make: `k` per batch, `budget`
/// batches per step, `L` steps, then `L` for the final check.
pub fn call_budget(k: usize, max_len: usize, budget: usize) -> u64 {
    (max_len * k * budget + max_len) as u64
}

/// Trains `learner` on `|S1|` draws, then scores the initial hypothesis and
/// every snapshot on `|S2|` fresh draws. `(m_s, m_c)` are the learner's
/// soundness and completeness mistake bounds.
#[allow(clippy::too_many_arguments)]
pub fn train<L: PrefixLearner + Clone>(
    provers: &ProverSet,
    dist: &Categorical<Problem>,
    params: &BoostParams,
    learner: L,
    (m_s, m_c): (u64, u64),
    oracle: &Oracle,
    seed: u64,
) -> Result<BuildReport> {
    params.validate()?;
    provers.check_class(learner.class())?;
    if m_s + m_c == 0 {
        return Err(Error::InvalidParameter("need M_s + M_c >= 1".into()));
    }
    let class = learner.class().clone();
    let max_len = class.max_len();
    let budget = timeout_budget(&provers.alpha, provers.k(), max_len, &params.epsilon_prime);
    let call_budget_per_example = call_budget(provers.k(), max_len, budget);
    let s1 = s1_size(m_s, m_c, params);
    let s2 = s2_size(m_s, m_c, params);

    let mut draws = rng::stream(seed, purpose::PROBLEM_DRAW, 0);
    let mut prover_rng = rng::stream(seed, purpose::PROVER, 0);
    let mut cons = Conservative::new(learner);
    let mut outcomes = Outcomes::default();
    let mut training_calls = 0;
    let mut max_calls_per_example = 0;
    for _ in 0..s1 {
        let x = *dist.sample(&mut draws);
        let mut counted = CountingOracle::new(oracle);
        match process_example(x, provers, budget, &mut cons, &mut counted, &mut prover_rng)? {
            ExampleOutcome::MadeMistake(MistakeKind::Soundness) => outcomes.soundness_mistakes += 1,
            ExampleOutcome::MadeMistake(_) => outcomes.completeness_mistakes += 1,
            ExampleOutcome::Timeout => outcomes.timeouts += 1,
            ExampleOutcome::FullProof => outcomes.full_proofs += 1,
        }
        training_calls += counted.calls;
        max_calls_per_example = max_calls_per_example.max(counted.calls);
    }
    let snapshots = cons.snapshots().len();
    if snapshots as u64 > m_s + m_c {
        return Err(Error::InvalidParameter(format!(
            "learner made {snapshots} mistakes, above its declared bound {}",
            m_s + m_c
        )));
    }
    let hypotheses = cons
        .hypotheses()
        .iter()
        .map(FrozenVerifier::freeze)
        .collect::<Result<Vec<_>>>()?;

    let mut test_draws = rng::stream(seed, purpose::PROBLEM_DRAW, 1);
    let mut test_rng = rng::stream(seed, purpose::PROVER, 1);
    let mut counts = vec![(0u64, 0u64); hypotheses.len()];
    let mut counted = CountingOracle::new(oracle);
    for _ in 0..s2 {
        let x = *dist.sample(&mut test_draws);
        for (h, c) in hypotheses.iter().zip(counts.iter_mut()) {
            match test_hypothesis(x, provers, budget, h, &mut counted, &mut test_rng)? {
                TestOutcome::SoundnessMistake => c.0 += 1,
                TestOutcome::CompletenessMistake => c.1 += 1,
                TestOutcome::Correct => {}
            }
        }
    }
    let (soundness_threshold, completeness_threshold) = params.thresholds(m_s, m_c);
    let n = rational::int(s2 as i64);
    let scores: Vec<HypothesisScore> = counts
        .iter()
        .enumerate()
        .map(|(index, &(s, c))| HypothesisScore {
            index,
            soundness_errors: s,
            completeness_errors: c,
            soundness_rate: rational::int(s as i64) / &n,
            completeness_rate: rational::int(c as i64) / &n,
        })
        .collect();
    let selected = scores
        .iter()
        .find(|s| {
            s.soundness_rate <= soundness_threshold && s.completeness_rate <= completeness_threshold
        })
        .map(|s| s.index);
    Ok(BuildReport {
        m_s,
        m_c,
        budget,
        s1,
        s2,
        outcomes,
        snapshots,
        scores,
        soundness_threshold,
        completeness_threshold,
        selected,
        training_calls,
        testing_calls: counted.calls,
        max_calls_per_example,
        call_budget_per_example,
        hypotheses,
    })
}

/// Trains and selects a hypothesis; fails when none meets both thresholds.
pub fn build_vhp<L: PrefixLearner + Clone>(
    provers: Arc<ProverSet>,
    dist: &Categorical<Problem>,
    params: &BoostParams,
    learner: L,
    bounds: (u64, u64),
    oracle: &Oracle,
    seed: u64,
) -> Result<(BoostedProver, BuildReport)> {
    let report = train(&provers, dist, params, learner, bounds, oracle, seed)?;
    let i = report.selected.ok_or(Error::NoHypothesisQualified)?;
    let vhp = BoostedProver::new(report.hypotheses[i].clone(), provers, params.clone())?;
    Ok((vhp, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rates {
    pub trials: u64,
    #[serde(with = "rational")]
    pub abstain: Ratio,
    #[serde(with = "rational")]
    pub incorrect_proof: Ratio,
    #[serde(with = "rational")]
    pub correct_proof: Ratio,
}

/// Grades `n_trials` fresh runs of the boosted prover against the oracle.
pub fn evaluate_vhp(
    vhp: &BoostedProver,
    dist: &Categorical<Problem>,
    n_trials: u64,
    oracle: &Oracle,
    seed: u64,
) -> Result<Rates> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut draws = rng::stream(seed, purpose::EVALUATION, 0);
    let mut prover_rng = rng::stream(seed, purpose::EVALUATION, 1);
    let mut counted = CountingOracle::new(oracle);
    let (mut abstain, mut incorrect) = (0i64, 0i64);
    for _ in 0..n_trials {
        let x = *dist.sample(&mut draws);
        match vhp.prove(x, &mut prover_rng)? {
            ProofOutcome::IDontKnow => abstain += 1,
            ProofOutcome::Proof(steps) => {
                if !counted.correct(&PrefixInstance::new(x, steps))? {
                    incorrect += 1;
                }
            }
        }
    }
    let n = n_trials as i64;
    Ok(Rates {
        trials: n_trials,
        abstain: rational::ratio(abstain, n),
        incorrect_proof: rational::ratio(incorrect, n),
        correct_proof: rational::ratio(n - abstain - incorrect, n),
    })
}
