use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Oracle, PrefixInstance, Problem, StepToken, VerifierClass};
use crate::error::{Error, Result};
use crate::rational::{self, Ratio};

/// Exact sampler over a finite support with rational weights summing to 1.
#[derive(Clone, Debug)]
pub struct Categorical<T> {
    items: Vec<T>,
    weights: Vec<Ratio>,
    cumulative: Vec<u64>,
    total: u64,
}

impl<T: Clone> Categorical<T> {
    pub fn new(pairs: Vec<(T, Ratio)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        let mut sum = rational::zero();
        let mut denom = BigInt::one();
        for (_, w) in &pairs {
            if w.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "negative weight {}",
                    rational::format(w)
                )));
            }
            sum += w;
            denom = denom.lcm(w.denom());
        }
        if sum != rational::one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {}, not 1",
                rational::format(&sum)
            )));
        }
        let total = denom
            .to_u64()
            .ok_or_else(|| Error::InvalidParameter("weight denominators too large".into()))?;
        let mut acc = 0u64;
        let mut cumulative = Vec::with_capacity(pairs.len());
        for (_, w) in &pairs {
            acc += (w * Ratio::from_integer(denom.clone()))
                .to_integer()
                .to_u64()
                .unwrap_or(0);
            cumulative.push(acc);
        }
        let (items, weights) = pairs.into_iter().unzip();
        Ok(Categorical {
            items,
            weights,
            cumulative,
            total,
        })
    }

    pub fn uniform(items: Vec<T>) -> Result<Self> {
        let n = items.len() as i64;
        Self::new(
            items
                .into_iter()
                .map(|t| (t, rational::ratio(1, n.max(1))))
                .collect(),
        )
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &T {
        let r = rng.gen_range(0..self.total);
        let i = self.cumulative.partition_point(|&c| c <= r);
        &self.items[i]
    }

    pub fn support(&self) -> impl Iterator<Item = (&T, &Ratio)> {
        self.items
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| !w.is_zero())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&T, &Ratio)> {
        self.items.iter().zip(&self.weights)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct WeightedToken {
    token: u16,
    #[serde(with = "rational")]
    p: Ratio,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProverRow {
    problem: u32,
    prefix: Vec<u16>,
    next: Vec<WeightedToken>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProverFile {
    #[serde(default)]
    name: String,
    rows: Vec<ProverRow>,
}

/// A table-driven prover: a next-step distribution for each prefix it may
/// be asked to extend.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ProverFile", into = "ProverFile")]
pub struct Prover {
    pub name: String,
    table: HashMap<PrefixInstance, Categorical<StepToken>>,
}

impl TryFrom<ProverFile> for Prover {
    type Error = Error;

    fn try_from(f: ProverFile) -> Result<Self> {
        let mut p = Prover::new(f.name);
        for row in f.rows {
            let z = PrefixInstance::new(
                Problem(row.problem),
                row.prefix.into_iter().map(StepToken).collect(),
            );
            p.insert(
                z,
                row.next
                    .into_iter()
                    .map(|w| (StepToken(w.token), w.p))
                    .collect(),
            )?;
        }
        Ok(p)
    }
}

impl From<Prover> for ProverFile {
    fn from(p: Prover) -> Self {
        let mut rows: Vec<ProverRow> = p
            .table
            .iter()
            .map(|(z, d)| ProverRow {
                problem: z.problem.0,
                prefix: z.steps.iter().map(|t| t.0).collect(),
                next: d
                    .pairs()
                    .map(|(t, w)| WeightedToken {
                        token: t.0,
                        p: w.clone(),
                    })
                    .collect(),
            })
            .collect();
        rows.sort_by(|a, b| {
            (a.problem, a.prefix.len(), &a.prefix).cmp(&(b.problem, b.prefix.len(), &b.prefix))
        });
        ProverFile { name: p.name, rows }
    }
}

impl Prover {
    pub fn new(name: impl Into<String>) -> Self {
        Prover {
            name: name.into(),
            table: HashMap::new(),
        }
    }

    /// Sets the next-step distribution after `prefix`.
    pub fn insert(&mut self, prefix: PrefixInstance, next: Vec<(StepToken, Ratio)>) -> Result<()> {
        let d = Categorical::new(next)?;
        self.table.insert(prefix, d);
        Ok(())
    }

    pub fn distribution(&self, prefix: &PrefixInstance) -> Result<&Categorical<StepToken>> {
        self.table.get(prefix).ok_or_else(|| {
            Error::InvalidParameter(format!("prover {} has no entry for {prefix}", self.name))
        })
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        prefix: &PrefixInstance,
        rng: &mut R,
    ) -> Result<StepToken> {
        Ok(*self.distribution(prefix)?.sample(rng))
    }

    /// Probability that the next step after `prefix` is accepted by the oracle.
    pub fn correct_mass(&self, prefix: &PrefixInstance, oracle: &Oracle) -> Result<Ratio> {
        let mut m = rational::zero();
        for (t, w) in self.distribution(prefix)?.support() {
            if oracle.prefix_label(&prefix.extend(*t))?.is_yes() {
                m += w;
            }
        }
        Ok(m)
    }

    fn check(&self, class: &VerifierClass) -> Result<()> {
        let sigma = class.sigma().len();
        for (z, d) in &self.table {
            if z.len() >= class.max_len() || z.problem.0 as usize >= class.problems().len() {
                return Err(Error::InvalidParameter(format!(
                    "prover {} entry {z} outside the class",
                    self.name
                )));
            }
            if let Some((t, _)) = d.pairs().find(|(t, _)| t.0 as usize >= sigma) {
                return Err(Error::InvalidParameter(format!(
                    "prover {} emits unknown token {}",
                    self.name, t.0
                )));
            }
        }
        Ok(())
    }
}

/// The `k` provers sampled side by side, with the goodness level they are
/// claimed to reach.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProverSet {
    pub provers: Vec<Prover>,
    #[serde(with = "rational")]
    pub alpha: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_good: Option<Vec<u32>>,
}

/// Result of scanning every reachable correct prefix of one problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemGoodness {
    pub problem: u32,
    pub good: bool,
    /// Smallest best-prover correct mass over reachable correct prefixes.
    #[serde(with = "rational")]
    pub worst: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PrefixInstance>,
}

impl ProverSet {
    pub fn new(provers: Vec<Prover>, alpha: Ratio) -> Result<Self> {
        let s = ProverSet {
            provers,
            alpha,
            declared_good: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.provers.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.provers.is_empty() {
            return Err(Error::InvalidParameter("need at least one prover".into()));
        }
        if self.alpha <= rational::zero() || self.alpha > rational::one() {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} outside (0, 1]",
                rational::format(&self.alpha)
            )));
        }
        Ok(())
    }

    pub fn check_class(&self, class: &VerifierClass) -> Result<()> {
        self.validate()?;
        self.provers.iter().try_for_each(|p| p.check(class))
    }

    /// Checks, for problem `x`, that at every correct prefix the provers can
    /// produce, some prover puts mass at least `alpha` on correct next steps.
    pub fn goodness(&self, x: Problem, oracle: &Oracle) -> Result<ProblemGoodness> {
        let max_len = oracle.class().max_len();
        let mut worst: Option<(Ratio, PrefixInstance)> = None;
        let mut layer = vec![PrefixInstance::new(x, Vec::new())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for z in &layer {
                let mut best = rational::zero();
                for p in &self.provers {
                    best = best.max(p.correct_mass(z, oracle)?);
                }
                if worst.as_ref().is_none_or(|(w, _)| best < *w) {
                    worst = Some((best, z.clone()));
                }
                if z.len() + 1 == max_len {
                    continue;
                }
                for p in &self.provers {
                    for (t, _) in p.distribution(z)?.support() {
                        let c = z.extend(*t);
                        if oracle.prefix_label(&c)?.is_yes() && !next.contains(&c) {
                            next.push(c);
                        }
                    }
                }
            }
            layer = next;
        }
        let (worst, at) = worst.expect("the empty prefix is always scanned");
        let good = worst >= self.alpha;
        Ok(ProblemGoodness {
            problem: x.0,
            good,
            witness: (!good).then_some(at),
            worst,
        })
    }

    /// Mass under `dist` of the problems the set is `alpha`-good on.
    pub fn gamma(&self, dist: &Categorical<Problem>, oracle: &Oracle) -> Result<Ratio> {
        let mut g = rational::zero();
        for (x, w) in dist.support() {
            if self.goodness(*x, oracle)?.good {
                g += w;
            }
        }
        Ok(g)
    }
}
