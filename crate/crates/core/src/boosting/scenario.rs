use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::prover::{Categorical, Prover, ProverSet};
use super::BoostParams;
use crate::domain::{
    ClassFile, ClassLimits, ClassShape, PrefixInstance, Problem, StepToken, VerifierClass,
};
use crate::error::{Error, Result};
use crate::families::full_universe;
use crate::rational::{self, Ratio};

/// Everything a boosting run needs besides the seed.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub class: Arc<VerifierClass>,
    pub target: usize,
    pub provers: Arc<ProverSet>,
    pub dist: Categorical<Problem>,
    pub params: BoostParams,
    /// Soundness budget `k` of the SC-SOA verifier being trained.
    pub sc_budget: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ProblemWeight {
    problem: u32,
    #[serde(with = "rational")]
    p: Ratio,
}

/// On-disk form of a [`Scenario`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    class: ClassFile,
    target: usize,
    provers: ProverSet,
    dist: Vec<ProblemWeight>,
    params: BoostParams,
    #[serde(default)]
    sc_budget: u32,
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            class: ClassFile::from_class(&s.class),
            target: s.target,
            provers: (*s.provers).clone(),
            dist: s
                .dist
                .pairs()
                .map(|(x, p)| ProblemWeight {
                    problem: x.0,
                    p: p.clone(),
                })
                .collect(),
            params: s.params.clone(),
            sc_budget: s.sc_budget,
        }
    }

    pub fn into_scenario(self, limits: ClassLimits) -> Result<Scenario> {
        let class = Arc::new(self.class.into_class(limits)?);
        if self.target >= class.n_verifiers() {
            return Err(Error::InvalidParameter(format!(
                "target {} is not a verifier",
                self.target
            )));
        }
        self.provers.check_class(&class)?;
        self.params.validate()?;
        if let Some(w) = self
            .dist
            .iter()
            .find(|w| w.problem as usize >= class.problems().len())
        {
            return Err(Error::InvalidParameter(format!(
                "distribution names unknown problem {}",
                w.problem
            )));
        }
        let dist = Categorical::new(
            self.dist
                .into_iter()
                .map(|w| (Problem(w.problem), w.p))
                .collect(),
        )?;
        Ok(Scenario {
            class,
            target: self.target,
            provers: Arc::new(self.provers),
            dist,
            params: self.params,
            sc_budget: self.sc_budget,
        })
    }
}

const PROBLEMS: u32 = 16;
const GOOD: u32 = 12;
const LEN: usize = 4;

/// Correct bit of verifier `j` at step `l` (1-based) of problem `x`.
fn standard_bit(j: usize, x: u32, l: usize) -> u16 {
    (((j >> (l % 3)) & 1) as u16) ^ (((x >> (l - 1)) & 1) as u16)
}

/// The reference scenario: 16 equally likely problems over binary steps of
/// length 4, eight verifiers, and two provers. On problems 0..12 the first
/// prover puts 1/2 on the correct step at odd positions and the second at
/// even ones, both 1/4 elsewhere; on problems 12..16 both put 1/4 everywhere.
pub fn standard_scenario(target: usize) -> Result<Scenario> {
    let limits = ClassLimits::default();
    let shape = ClassShape::new(
        vec!["0".into(), "1".into()],
        (0..PROBLEMS).map(|x| format!("x{x}")).collect(),
        LEN,
    );
    let class = Arc::new(VerifierClass::from_fn(
        shape,
        full_universe(PROBLEMS, 2, LEN),
        8,
        limits,
        |j, z| z.steps[z.len() - 1].0 == standard_bit(j, z.problem.0, z.len()),
    )?);
    if target >= class.n_verifiers() {
        return Err(Error::InvalidParameter(format!(
            "target {target} is not a verifier"
        )));
    }
    let mut provers = vec![Prover::new("odd"), Prover::new("even")];
    for x in 0..PROBLEMS {
        let mut layer = vec![PrefixInstance::new(Problem(x), Vec::new())];
        for l in 1..=LEN {
            let c = standard_bit(target, x, l);
            for z in &layer {
                for (j, p) in provers.iter_mut().enumerate() {
                    let strong = x < GOOD && (l % 2 == 1) == (j == 0);
                    let m = if strong {
                        rational::ratio(1, 2)
                    } else {
                        rational::ratio(1, 4)
                    };
                    let rest = rational::one() - &m;
                    p.insert(z.clone(), vec![(StepToken(c), m), (StepToken(1 - c), rest)])?;
                }
            }
            layer = layer
                .iter()
                .flat_map(|z| [z.extend(StepToken(0)), z.extend(StepToken(1))])
                .collect();
        }
    }
    let mut set = ProverSet::new(provers, rational::ratio(1, 2))?;
    set.declared_good = Some((0..GOOD).collect());
    Ok(Scenario {
        class,
        target,
        provers: Arc::new(set),
        dist: Categorical::uniform((0..PROBLEMS).map(Problem).collect())?,
        params: BoostParams::new(
            rational::ratio(1, 5),
            rational::ratio(1, 20),
            rational::ratio(1, 5),
        )?,
        sc_budget: 0,
    })
}
