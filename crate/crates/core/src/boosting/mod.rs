//! Turning a weak set of step provers into a reliable one with a learned
//! verifier: training on sampled problems, selecting a hypothesis on fresh
//! problems, and rejection sampling at test time.

mod experiment;
mod pipeline;
mod prover;
mod scenario;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Ratio};

pub use experiment::{run_experiment, sc_bounds, ExperimentReport, RunSummary};
pub use pipeline::{
    build_vhp, call_budget, evaluate_vhp, process_example, test_hypothesis, train, weak_to_strong,
    BoostedProver, BuildReport, CountingOracle, ExampleOutcome, FrozenVerifier, HypothesisScore,
    Outcomes, ProofOutcome, Rates, TestOutcome,
};
pub use prover::{Categorical, ProblemGoodness, Prover, ProverSet};
pub use scenario::{standard_scenario, Scenario, ScenarioFile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoostParams {
    #[serde(with = "rational")]
    pub epsilon: Ratio,
    #[serde(with = "rational")]
    pub epsilon_prime: Ratio,
    #[serde(with = "rational")]
    pub delta: Ratio,
    #[serde(default = "default_s2")]
    pub s2_constant: u64,
}

fn default_s2() -> u64 {
    32
}

impl BoostParams {
    pub fn new(epsilon: Ratio, epsilon_prime: Ratio, delta: Ratio) -> Result<Self> {
        let p = BoostParams {
            epsilon,
            epsilon_prime,
            delta,
            s2_constant: default_s2(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let open = |name: &str, r: &Ratio| {
            if *r <= rational::zero() || *r >= rational::one() {
                Err(Error::InvalidParameter(format!(
                    "{name} = {} outside (0, 1)",
                    rational::format(r)
                )))
            } else {
                Ok(())
            }
        };
        open("epsilon", &self.epsilon)?;
        open("epsilon_prime", &self.epsilon_prime)?;
        open("delta", &self.delta)?;
        if self.s2_constant == 0 {
            return Err(Error::InvalidParameter(
                "s2_constant must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// `(ε_s, ε_c)`: `ε` split in proportion to the two mistake bounds.
    pub fn split(&self, m_s: u64, m_c: u64) -> (Ratio, Ratio) {
        let m = rational::int((m_s + m_c) as i64);
        (
            &self.epsilon * rational::int(m_s as i64) / &m,
            &self.epsilon * rational::int(m_c as i64) / &m,
        )
    }

    /// Selection thresholds on empirical soundness and completeness error.
    pub fn thresholds(&self, m_s: u64, m_c: u64) -> (Ratio, Ratio) {
        let (s, c) = self.split(m_s, m_c);
        let f = rational::ratio(3, 4);
        (s * &f, c * f)
    }
}

/// Batches tried per step before giving up: `⌈(1/α)·ln(kL/ε')⌉`, at least 1.
pub fn timeout_budget(alpha: &Ratio, k: usize, max_len: usize, epsilon_prime: &Ratio) -> usize {
    let a = rational::to_f64(alpha);
    let e = rational::to_f64(epsilon_prime);
    let b = ((k * max_len) as f64 / e).ln() / a;
    (b.ceil().max(1.0)) as usize
}

/// Training sample size `⌈8((M_c+M_s)/ε + ln(2/δ))⌉`.
pub fn s1_size(m_s: u64, m_c: u64, params: &BoostParams) -> usize {
    let m = (m_s + m_c) as f64;
    let eps = rational::to_f64(&params.epsilon);
    let delta = rational::to_f64(&params.delta);
    (8.0 * (m / eps + (2.0 / delta).ln())).ceil() as usize
}

/// Selection sample size
/// `⌈c·(1/ε)·((M_s+M_c)/(min(M_s,M_c)+1))·ln((M_s+M_c)/δ)⌉`.
pub fn s2_size(m_s: u64, m_c: u64, params: &BoostParams) -> usize {
    let m = (m_s + m_c) as f64;
    let eps = rational::to_f64(&params.epsilon);
    let delta = rational::to_f64(&params.delta);
    let ratio = m / (m_s.min(m_c) as f64 + 1.0);
    (params.s2_constant as f64 / eps * ratio * (m / delta).ln()).ceil() as usize
}
