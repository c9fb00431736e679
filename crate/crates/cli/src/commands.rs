use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use cotverify::adversary::{self, Verdict};
use cotverify::boosting::{self, Scenario, ScenarioFile};
use cotverify::dimensions::{self, DimKind};
use cotverify::domain::ClassFile;
use cotverify::learners::{
    run_cot, run_prefix, CotLearner, MajorityVote, PrefixLearner, RejectAll, ScSoa, SclSoa,
    SoundConservative, WscSoa,
};
use cotverify::rational::{self, Ratio};
use cotverify::reductions::{CotFromPrefix, PrefixFromCot};
use cotverify::rng::{self, purpose};
use cotverify::{
    ClassLimits, CostVector, CotInstance, MistakeMode, Oracle, PrefixInstance, VerifierClass,
    VersionSpace,
};

use crate::classes;
use crate::{
    AdversaryChoice, BoostAction, BoostArgs, BoostRunArgs, Cli, Command, CostArgs, DimArgs,
    DimChoice, DuelArgs, LearnerArgs, LearnerChoice, ModeChoice, RunArgs, ScenarioArgs,
};

const BOUND_VIOLATED: u8 = 3;

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("setting up the thread pool")?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Families { name, fail_token } => families(name, fail_token, out),
        Command::Dim(a) => dim(a, out),
        Command::Run(a) => run(a, out),
        Command::Duel(a) => duel(a, out),
        Command::Boost(a) => boost(a, out),
    }
}

fn write(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.context("writing stdout"),
            }
        }
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    write(out, &serde_json::to_string_pretty(value)?)
}

fn limits() -> ClassLimits {
    ClassLimits::default()
}

fn load(spec: &str) -> Result<Arc<VerifierClass>> {
    Ok(Arc::new(classes::resolve(spec, limits())?))
}

fn costs(a: &CostArgs) -> Result<CostVector> {
    Ok(CostVector::new(
        rational::parse(&a.gamma_s)?,
        rational::parse(&a.gamma_c)?,
        rational::parse(&a.gamma_l)?,
    ))
}

fn families(name: Option<String>, fail_token: bool, out: Option<&Path>) -> Result<ExitCode> {
    match name {
        None => {
            let corpus: Vec<Value> = cotverify::families::corpus()
                .iter()
                .map(|(n, c)| {
                    json!({
                        "name": n,
                        "verifiers": c.n_verifiers(),
                        "universe": c.universe().len(),
                        "L": c.max_len(),
                    })
                })
                .collect();
            emit(
                out,
                &json!({ "families": classes::FAMILIES, "corpus": corpus }),
            )?;
        }
        Some(n) => {
            let n = if fail_token { format!("{n}+F") } else { n };
            let class = classes::build_family(&n, limits())?;
            write(out, ClassFile::from_class(&class).to_json().trim_end())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dim_kind(choice: DimChoice, k: u32, c: &CostArgs) -> Result<DimKind> {
    Ok(match choice {
        DimChoice::Ldim => DimKind::Plain,
        DimChoice::Sc => DimKind::Sc { k },
        DimChoice::Wsc => DimKind::Wsc { costs: costs(c)? },
        DimChoice::Scl => DimKind::Scl { costs: costs(c)? },
    })
}

fn dim(a: DimArgs, out: Option<&Path>) -> Result<ExitCode> {
    let class = load(&a.class)?;
    let kind = dim_kind(a.kind, a.k, &a.costs)?;
    let mut r = dimensions::compute(&VersionSpace::full(class), &kind, a.parallel)?;
    if let (Some(path), Some(tree)) = (&a.dot, &r.witness) {
        fs::write(path, tree.to_dot()).with_context(|| format!("writing {}", path.display()))?;
    }
    if a.no_witness {
        r.witness = None;
    }
    let mut report = json!({ "class": a.class, "kind": format!("{:?}", a.kind).to_lowercase() });
    match &kind {
        DimKind::Sc { k } => report["k"] = json!(k),
        DimKind::Wsc { costs } | DimKind::Scl { costs } => {
            report["costs"] = serde_json::to_value(costs)?
        }
        DimKind::Plain => {}
    }
    report["value"] = json!(rational::format(&r.value));
    report["stats"] = serde_json::to_value(r.stats)?;
    if let Some(t) = &r.witness {
        report["witness"] = serde_json::to_value(t)?;
    }
    emit(out, &report)?;
    Ok(ExitCode::SUCCESS)
}

enum Built {
    Prefix(Box<dyn PrefixLearner>),
    Cot(Box<dyn CotLearner>),
}

/// The learner, the dimension kind its guarantee is stated in, and that
/// guarantee when the learner is an optimal one.
fn build_learner(
    class: &Arc<VerifierClass>,
    a: &LearnerArgs,
) -> Result<(Built, DimKind, Option<Ratio>)> {
    let c = costs(&a.costs)?;
    let vs = VersionSpace::full(class.clone());
    Ok(match a.learner {
        LearnerChoice::ScSoa => {
            let e = dimensions::engine(class.clone(), CostVector::unit());
            let value = dimensions::sc_ldim(&vs, a.k).value;
            (
                Built::Prefix(Box::new(ScSoa::new(e, a.k))),
                DimKind::Sc { k: a.k },
                Some(value),
            )
        }
        LearnerChoice::WscSoa => {
            c.nonnegative()?;
            let e = dimensions::engine(class.clone(), c.clone());
            let value = dimensions::wsc_ldim(&vs, &c)?.value;
            (
                Built::Prefix(Box::new(WscSoa::new(e))),
                DimKind::Wsc { costs: c },
                Some(value),
            )
        }
        LearnerChoice::SclSoa => {
            let e = dimensions::engine(class.clone(), c.clone());
            let l = SclSoa::new(e)?;
            let value = dimensions::scl_ldim(&vs, &c)?.value;
            (
                Built::Cot(Box::new(l)),
                DimKind::Scl { costs: c },
                Some(value),
            )
        }
        LearnerChoice::Majority => (
            Built::Cot(Box::new(MajorityVote::new(class.clone()))),
            DimKind::Scl { costs: c },
            None,
        ),
        LearnerChoice::SoundConservative => (
            Built::Cot(Box::new(SoundConservative::new(class.clone()))),
            DimKind::Scl { costs: c },
            None,
        ),
        LearnerChoice::RejectAll => (
            Built::Cot(Box::new(RejectAll::new(class.clone()))),
            DimKind::Scl { costs: c },
            None,
        ),
    })
}

fn read_sequence(path: &PathBuf) -> Result<Vec<PrefixInstance>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn random_prefixes(oracle: &Oracle, n: usize, seed: u64) -> Result<Vec<PrefixInstance>> {
    let mut pool = Vec::new();
    for z in oracle.class().universe() {
        if oracle.promise_holds(z)? {
            pool.push(z.clone());
        }
    }
    let mut rng = rng::stream(seed, purpose::SEQUENCE, 0);
    Ok((0..n)
        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
        .collect())
}

fn random_traces(class: &VerifierClass, n: usize, seed: u64) -> Result<Vec<CotInstance>> {
    let pool = class.cot_entries();
    if pool.is_empty() {
        bail!("class has no full-length traces");
    }
    let mut rng = rng::stream(seed, purpose::SEQUENCE, 1);
    Ok((0..n)
        .map(|_| pool[rng.gen_range(0..pool.len())].instance.clone())
        .collect())
}

fn run(a: RunArgs, out: Option<&Path>) -> Result<ExitCode> {
    let class = load(&a.learner.class)?;
    let oracle = Oracle::new(class.clone(), a.target)?;
    let (learner, kind, _) = build_learner(&class, &a.learner)?;
    let run_costs = match &kind {
        DimKind::Wsc { costs } | DimKind::Scl { costs } => costs.clone(),
        _ => CostVector::unit(),
    };
    let mode = match a.mode {
        ModeChoice::Prefix => MistakeMode::PrefixLevel,
        ModeChoice::Sequence => MistakeMode::SequenceLevel,
    };
    let prefixes = || -> Result<Vec<PrefixInstance>> {
        match &a.sequence {
            Some(p) => read_sequence(p),
            None => random_prefixes(&oracle, a.random, a.seed),
        }
    };
    let traces = || -> Result<Vec<CotInstance>> {
        match &a.sequence {
            Some(p) => Ok(read_sequence(p)?
                .into_iter()
                .map(|z| CotInstance::new(z.problem, z.steps))
                .collect()),
            None => random_traces(&class, a.random, a.seed),
        }
    };
    let transcript = match (learner, a.via_prefix, a.via_cot) {
        (Built::Prefix(mut l), false, false) => {
            run_prefix(&mut l, &oracle, &prefixes()?, &run_costs)?
        }
        (Built::Cot(mut l), false, false) => {
            run_cot(&mut l, &oracle, &traces()?, &run_costs, mode)?
        }
        (Built::Prefix(l), true, _) => {
            let mut w = CotFromPrefix::new(l);
            let mut t = run_cot(&mut w, &oracle, &traces()?, &run_costs, mode)?;
            t.inner = Some(w.inner_totals().clone());
            t
        }
        (Built::Cot(l), _, true) => {
            let mut w = PrefixFromCot::new(l)?;
            let mut t = run_prefix(&mut w, &oracle, &prefixes()?, &run_costs)?;
            t.inner = Some(w.inner_totals().clone());
            t
        }
        (Built::Prefix(_), _, true) => bail!(
            "--via-cot needs a trace learner (scl-soa, majority, sound-conservative, reject-all)"
        ),
        (Built::Cot(_), true, _) => bail!("--via-prefix needs a prefix learner (sc-soa, wsc-soa)"),
    };
    emit(
        out,
        &json!({
            "class": a.learner.class,
            "learner": format!("{:?}", a.learner.learner),
            "target": a.target,
            "transcript": transcript,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn duel(a: DuelArgs, out: Option<&Path>) -> Result<ExitCode> {
    let class = load(&a.learner.class)?;
    let (learner, kind, guarantee) = build_learner(&class, &a.learner)?;
    let k = a.learner.k;
    let result = match a.adversary {
        AdversaryChoice::Tree => {
            let vs = VersionSpace::full(class.clone());
            let tree = match dimensions::extract_witness(&vs, &kind) {
                Ok(t) => t,
                Err(cotverify::Error::NoWitness) => dimensions::MistakeTree {
                    kind: kind.tree_kind(),
                    costs: match &kind {
                        DimKind::Wsc { costs } | DimKind::Scl { costs } => costs.clone(),
                        _ => CostVector::unit(),
                    },
                    root: None,
                },
                Err(e) => return Err(e.into()),
            };
            let t = match learner {
                Built::Prefix(mut l) => adversary::play_tree_adversary(&tree, &mut l)?,
                Built::Cot(mut l) => adversary::play_cot_tree_adversary(&tree, &mut l)?,
            };
            let lower = adversary::tree_lower_bound(&tree, k);
            let mut v = adversary::verdict(&t.totals.cost, &lower, guarantee.as_ref());
            if matches!(kind, DimKind::Sc { .. }) && t.totals.soundness > k as u64 {
                v = Verdict::Violated;
            }
            Ok((t, lower, guarantee, v))
        }
        AdversaryChoice::Bitstring => {
            let Built::Cot(mut l) = learner else {
                bail!("the bit-string adversary plays trace learners");
            };
            let len = class.max_len();
            let t = adversary::prop31_adversary(len, &mut l)?;
            let lower = rational::int((len / 2) as i64);
            let upper =
                (a.learner.learner == LearnerChoice::Majority).then(|| rational::int(len as i64));
            let v = adversary::verdict(&t.totals.cost, &lower, upper.as_ref());
            Ok((t, lower, upper, v))
        }
        AdversaryChoice::Complement => {
            let Built::Cot(mut l) = learner else {
                bail!("the complement adversary plays trace learners");
            };
            let n = class.n_verifiers();
            let lower = rational::int(n as i64 - 1);
            let upper =
                (a.learner.learner == LearnerChoice::SoundConservative).then(|| lower.clone());
            match adversary::prop32_adversary(n, &mut l) {
                Ok(t) => {
                    let v = adversary::verdict(
                        &rational::int(t.totals.completeness as i64),
                        &lower,
                        upper.as_ref(),
                    );
                    Ok((t, lower, upper, v))
                }
                Err(e @ cotverify::Error::LearnerNotSound(_)) => Err(e),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let (report, code) = match result {
        Ok((t, lower, upper, v)) => {
            let realizable = adversary::transcript_realizable(&class, &t)?.is_some();
            (
                json!({
                    "class": a.learner.class,
                    "learner": format!("{:?}", a.learner.learner),
                    "adversary": format!("{:?}", a.adversary).to_lowercase(),
                    "lower_bound": rational::format(&lower),
                    "guarantee": upper.as_ref().map(rational::format),
                    "cost": rational::format(&t.totals.cost),
                    "realizable": realizable,
                    "verdict": v,
                    "transcript": t,
                }),
                if v == Verdict::Violated {
                    BOUND_VIOLATED
                } else {
                    0
                },
            )
        }
        Err(e) => (
            json!({
                "class": a.learner.class,
                "learner": format!("{:?}", a.learner.learner),
                "adversary": format!("{:?}", a.adversary).to_lowercase(),
                "verdict": Verdict::Violated,
                "note": e.to_string(),
            }),
            BOUND_VIOLATED,
        ),
    };
    emit(out, &report)?;
    Ok(ExitCode::from(code))
}

fn scenario(a: &ScenarioArgs) -> Result<Scenario> {
    match &a.scenario {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let file: ScenarioFile =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            Ok(file.into_scenario(limits())?)
        }
        None => Ok(boosting::standard_scenario(a.target)?),
    }
}

fn boost(a: BoostArgs, out: Option<&Path>) -> Result<ExitCode> {
    match a.action {
        None => boost_run(a.run, out),
        Some(BoostAction::Standard(s)) => {
            emit(out, &ScenarioFile::from_scenario(&scenario(&s)?))?;
            Ok(ExitCode::SUCCESS)
        }
        Some(BoostAction::VerifyAlpha(s)) => {
            let sc = scenario(&s)?;
            let oracle = Oracle::new(sc.class.clone(), sc.target)?;
            let mut problems = Vec::new();
            for (x, _) in sc.dist.pairs() {
                problems.push(sc.provers.goodness(*x, &oracle)?);
            }
            let gamma = sc.provers.gamma(&sc.dist, &oracle)?;
            let declared_ok = sc.provers.declared_good.as_ref().is_none_or(|d| {
                d.iter()
                    .all(|x| problems.iter().any(|g| g.problem == *x && g.good))
            });
            emit(
                out,
                &json!({
                    "alpha": rational::format(&sc.provers.alpha),
                    "k": sc.provers.k(),
                    "gamma": rational::format(&gamma),
                    "declared_good_verified": declared_ok,
                    "problems": problems,
                }),
            )?;
            Ok(ExitCode::from(if declared_ok { 0 } else { BOUND_VIOLATED }))
        }
    }
}

fn boost_run(a: BoostRunArgs, out: Option<&Path>) -> Result<ExitCode> {
    let sc = scenario(&a.scenario)?;
    let mut report = boosting::run_experiment(&sc, a.runs, a.trials, a.seed)?;
    let holds = report.holds();
    if a.summary {
        report.per_run.clear();
    }
    let mut v = serde_json::to_value(&report)?;
    v["verdict"] = json!(if holds { "met" } else { "violated" });
    emit(out, &v)?;
    Ok(ExitCode::from(if holds { 0 } else { BOUND_VIOLATED }))
}
