use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{evaluate_vhp, train, BoostedProver, Rates};
use super::Scenario;
use crate::dimensions;
use crate::domain::{CostVector, Oracle, VersionSpace};
use crate::error::{Error, Result};
use crate::learners::ScSoa;
use crate::rational::{self, Ratio};
use crate::rng;

/// One seeded build-and-evaluate run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub run: u64,
    pub seed: u64,
    pub snapshots: usize,
    pub selected: Option<usize>,
    pub max_calls_per_example: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Rates>,
    /// Abstention rate at most the bound plus three standard errors.
    pub abstain_within: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub runs: u64,
    pub trials: u64,
    pub seed: u64,
    pub m_s: u64,
    pub m_c: u64,
    pub budget: usize,
    pub s1: usize,
    pub s2: usize,
    pub call_budget_per_example: u64,
    #[serde(with = "rational")]
    pub gamma: Ratio,
    #[serde(with = "rational")]
    pub abstain_bound: Ratio,
    /// Bound plus three standard errors at `trials` draws.
    pub abstain_threshold: f64,
    pub built: u64,
    pub within_bound: u64,
    pub required: u64,
    pub max_incorrect_proof: Option<String>,
    pub max_calls_per_example: u64,
    pub per_run: Vec<RunSummary>,
}

impl ExperimentReport {
    /// Calls within budget, no incorrect proof from a sound verifier, and
    /// enough runs inside the abstention bound.
    pub fn holds(&self) -> bool {
        let sound_ok = self.m_s > 0
            || self
                .per_run
                .iter()
                .filter_map(|r| r.rates.as_ref())
                .all(|r| r.incorrect_proof == rational::zero());
        self.max_calls_per_example <= self.call_budget_per_example
            && sound_ok
            && self.within_bound >= self.required
    }
}

/// Mistake bounds `(k, SC-Ldim(H, k))` of an SC-SOA verifier with budget `k`.
pub fn sc_bounds(scenario: &Scenario) -> (u64, u64) {
    let k = scenario.sc_budget;
    let v = dimensions::sc_ldim(&VersionSpace::full(scenario.class.clone()), k).value;
    let total: u64 = v.to_integer().try_into().unwrap_or(u64::MAX);
    (k as u64, total)
}

/// Builds and evaluates `runs` independent boosted provers from child seeds
/// of `seed`, training an SC-SOA verifier each time.
pub fn run_experiment(
    scenario: &Scenario,
    runs: u64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if runs == 0 || trials == 0 {
        return Err(Error::InvalidParameter(
            "need at least one run and one trial".into(),
        ));
    }
    let oracle = Oracle::new(scenario.class.clone(), scenario.target)?;
    let (m_s, m_c) = sc_bounds(scenario);
    let engine = dimensions::engine(scenario.class.clone(), CostVector::unit());
    let gamma = scenario.provers.gamma(&scenario.dist, &oracle)?;
    let (eps_s, eps_c) = scenario.params.split(m_s, m_c);
    let abstain_bound = rational::one() - &gamma + eps_c + eps_s + &scenario.params.epsilon_prime;
    let b = rational::to_f64(&abstain_bound).clamp(0.0, 1.0);
    let abstain_threshold = b + 3.0 * (b * (1.0 - b) / trials as f64).sqrt();

    let per_run: Vec<(RunSummary, super::BuildReport)> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let s = rng::child_seed(seed, run);
            let learner = ScSoa::new(engine.clone(), scenario.sc_budget);
            let report = train(
                &scenario.provers,
                &scenario.dist,
                &scenario.params,
                learner,
                (m_s, m_c),
                &oracle,
                s,
            )?;
            let rates = match report.selected {
                Some(i) => {
                    let vhp = BoostedProver::new(
                        report.hypotheses[i].clone(),
                        scenario.provers.clone(),
                        scenario.params.clone(),
                    )?;
                    Some(evaluate_vhp(&vhp, &scenario.dist, trials, &oracle, s)?)
                }
                None => None,
            };
            let abstain_within = rates
                .as_ref()
                .is_some_and(|r| rational::to_f64(&r.abstain) <= abstain_threshold);
            Ok((
                RunSummary {
                    run,
                    seed: s,
                    snapshots: report.snapshots,
                    selected: report.selected,
                    max_calls_per_example: report.max_calls_per_example,
                    rates,
                    abstain_within,
                },
                report,
            ))
        })
        .collect::<Result<_>>()?;
    let first = &per_run[0].1;
    let (budget, s1, s2, call_budget_per_example) = (
        first.budget,
        first.s1,
        first.s2,
        first.call_budget_per_example,
    );
    let max_incorrect_proof = per_run
        .iter()
        .filter_map(|(r, _)| r.rates.as_ref().map(|x| x.incorrect_proof.clone()))
        .max()
        .map(|r| rational::format(&r));
    let delta = rational::to_f64(&scenario.params.delta);
    let per_run: Vec<RunSummary> = per_run.into_iter().map(|(r, _)| r).collect();
    Ok(ExperimentReport {
        runs,
        trials,
        seed,
        m_s,
        m_c,
        budget,
        s1,
        s2,
        call_budget_per_example,
        gamma,
        abstain_bound,
        abstain_threshold,
        built: per_run.iter().filter(|r| r.selected.is_some()).count() as u64,
        within_bound: per_run.iter().filter(|r| r.abstain_within).count() as u64,
        required: ((1.0 - delta) * runs as f64).ceil() as u64,
        max_incorrect_proof,
        max_calls_per_example: per_run
            .iter()
            .map(|r| r.max_calls_per_example)
            .max()
            .unwrap_or(0),
        per_run,
    })
}
