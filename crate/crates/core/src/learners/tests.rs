use super::*;
use crate::dimensions;
use crate::domain::{ClassLimits, Problem, StepToken};
use crate::families::{self, RiverMode};
use crate::rational::int;

fn lim() -> ClassLimits {
    ClassLimits::default()
}

fn cz(steps: &[u16]) -> CotInstance {
    CotInstance::new(Problem(0), steps.iter().map(|&t| StepToken(t)).collect())
}

fn pz(steps: &[u16]) -> PrefixInstance {
    PrefixInstance::new(Problem(0), steps.iter().map(|&t| StepToken(t)).collect())
}

#[test]
fn majority_examples() {
    let c = Arc::new(families::indicator_class(4, lim()).unwrap());
    let m = MajorityVote::new(c.clone());
    assert_eq!(m.predict(&cz(&[0b1000])).unwrap(), Label::FaultAt(1));
    let all_accept = Arc::new(families::complement_class(2, 2, lim()).unwrap());
    let m = MajorityVote::new(all_accept);
    assert_eq!(m.predict(&cz(&[1, 1])).unwrap(), Label::AllCorrect);
}

#[test]
fn sound_conservative_on_complement() {
    let c = Arc::new(
        families::complement_class(3, 1, lim())
            .unwrap_or_else(|_| families::complement_class(3, 2, lim()).unwrap()),
    );
    let designated = families::complement_designated(3, c.max_len());
    // target 2: the learner rejects traces 0 and 1 wrongly before it knows
    let oracle = Oracle::new(c.clone(), 2).unwrap();
    let mut l = SoundConservative::new(c.clone());
    let t = run_cot(
        &mut l,
        &oracle,
        &designated,
        &CostVector::unit(),
        MistakeMode::PrefixLevel,
    )
    .unwrap();
    assert_eq!((t.totals.soundness, t.totals.completeness), (0, 2));
    assert!(t.consistent());
}

#[test]
fn empty_sequence_is_free() {
    let c = Arc::new(families::indicator_class(3, lim()).unwrap());
    let oracle = Oracle::new(c.clone(), 0).unwrap();
    let mut l = MajorityVote::new(c);
    let t = run_cot(
        &mut l,
        &oracle,
        &[],
        &CostVector::unit(),
        MistakeMode::PrefixLevel,
    )
    .unwrap();
    assert!(t.is_empty());
    assert_eq!(t.totals.cost, int(0));
}

#[test]
fn sc_soa_examples() {
    let c = Arc::new(families::indicator_class(4, lim()).unwrap());
    let e = dimensions::engine(c.clone(), CostVector::unit());
    let l = ScSoa::new(e.clone(), 0);
    assert_eq!(l.predict(&pz(&[0b1000])).unwrap(), PrefixLabel::No);
    let single = ScSoa::new(e, 2).with_alive(VerifierSet::from_ids(4, [0]));
    assert_eq!(single.predict(&pz(&[0b1000])).unwrap(), PrefixLabel::Yes);
}

#[test]
fn sc_soa_spends_budget_on_soundness_mistakes() {
    let c = Arc::new(families::complement_class(4, 2, lim()).unwrap());
    let e = dimensions::engine(c.clone(), CostVector::unit());
    let oracle = Oracle::new(c.clone(), 3).unwrap();
    let mut l = ScSoa::new(e, 1);
    let seq: Vec<_> = families::complement_designated(4, 2)
        .iter()
        .map(CotInstance::as_prefix)
        .collect();
    let t = run_prefix(&mut l, &oracle, &seq, &CostVector::unit()).unwrap();
    assert!(t.totals.soundness <= 1);
    assert!(t.totals.mistakes() <= 1);
}

#[test]
fn wsc_soa_prefers_cheap_mistake() {
    let c = Arc::new(
        VerifierClass::from_fn(
            crate::domain::ClassShape::new(vec!["0".into(), "1".into()], vec!["x".into()], 1),
            families::full_universe(1, 2, 1),
            2,
            lim(),
            |v, z| z.steps[0] == StepToken(0) || v == 1,
        )
        .unwrap(),
    );
    let e = dimensions::engine(c, CostVector::two(int(3), int(1)));
    let l = WscSoa::new(e);
    assert_eq!(l.predict(&pz(&[1])).unwrap(), PrefixLabel::No);
    assert_eq!(l.predict(&pz(&[0])).unwrap(), PrefixLabel::Yes);
}

#[test]
fn promise_is_enforced() {
    let c = Arc::new(families::singleton_bitstring_class(2, lim()).unwrap());
    let oracle = Oracle::new(c.clone(), 0b11).unwrap();
    let mut l = ScSoa::new(dimensions::engine(c, CostVector::unit()), 0);
    let r = run_prefix(&mut l, &oracle, &[pz(&[0, 1])], &CostVector::unit());
    assert!(matches!(r, Err(Error::PromiseViolated(_))));
}

#[test]
fn class_mismatch_detected() {
    let a = Arc::new(families::indicator_class(3, lim()).unwrap());
    let b = Arc::new(families::indicator_class(4, lim()).unwrap());
    let oracle = Oracle::new(b, 0).unwrap();
    let mut l = MajorityVote::new(a);
    assert!(matches!(
        run_cot(
            &mut l,
            &oracle,
            &[],
            &CostVector::unit(),
            MistakeMode::PrefixLevel
        ),
        Err(Error::ClassMismatch)
    ));
}

#[test]
fn conservative_snapshots_follow_mistakes() {
    let c = Arc::new(families::complement_class(4, 2, lim()).unwrap());
    let e = dimensions::engine(c.clone(), CostVector::unit());
    let oracle = Oracle::new(c.clone(), 1).unwrap();
    let mut l = Conservative::new(ScSoa::new(e, 0));
    let mut seq: Vec<_> = families::complement_designated(4, 2)
        .iter()
        .map(CotInstance::as_prefix)
        .collect();
    seq.extend(seq.clone());
    let t = run_prefix(&mut l, &oracle, &seq, &CostVector::unit()).unwrap();
    assert_eq!(l.snapshots().len() as u64, t.totals.mistakes());
    assert_eq!(l.hypotheses().len(), l.snapshots().len() + 1);
    assert!(l.alive().unwrap().contains(1));
}

#[test]
fn river_learner_examples() {
    let edges = families::legal_edges();
    let rc = families::river_crossing_class(&[], 8, RiverMode::Unrevealed, lim()).unwrap();
    let sol = rc.solution().unwrap();
    let path_edges: Vec<(u16, u16)> = sol
        .steps
        .windows(2)
        .map(|w| (w[0].0.min(w[1].0), w[0].0.max(w[1].0)))
        .collect();
    // reveal every edge of the solution: accepted without mistakes
    let revealed = river_crossing_class_with(&path_edges);
    let class = Arc::new(revealed.class.clone());
    let puzzle = Arc::new(revealed);
    let oracle = Oracle::new(class.clone(), 0).unwrap();
    let mut l = RiverLearner::new(puzzle, class.clone()).unwrap();
    let t = run_cot(
        &mut l,
        &oracle,
        std::slice::from_ref(&sol),
        &CostVector::unit(),
        MistakeMode::PrefixLevel,
    )
    .unwrap();
    assert_eq!(t.totals.mistakes(), 0);
    assert_eq!(
        t.rounds[0].truth,
        crate::domain::Answer::Cot(Label::AllCorrect)
    );

    // nothing revealed, target knows every edge: at most |E*| mistakes, and
    // the learned edges carry the proof the second time
    let class = Arc::new(rc.class.clone());
    let puzzle = Arc::new(rc);
    let target = class.n_verifiers() - 1;
    let oracle = Oracle::new(class.clone(), target).unwrap();
    let mut l = RiverLearner::new(puzzle, class).unwrap();
    let seq = vec![sol.clone(); 10];
    let t = run_cot(
        &mut l,
        &oracle,
        &seq,
        &CostVector::unit(),
        MistakeMode::PrefixLevel,
    )
    .unwrap();
    assert!(t.totals.mistakes() <= edges.len() as u64);
    assert_eq!(t.totals.soundness, 0);
    assert_eq!(l.predict(&sol).unwrap(), Label::AllCorrect);
}

fn river_crossing_class_with(revealed: &[(u16, u16)]) -> families::RiverCrossing {
    families::river_crossing_class(revealed, 8, RiverMode::Unrevealed, lim()).unwrap()
}

#[test]
fn scl_soa_unanimous_is_free() {
    let c = Arc::new(families::indicator_class(1, lim()).unwrap());
    let e = dimensions::engine(c.clone(), CostVector::unit());
    let mut l = SclSoa::new(e).unwrap();
    let oracle = Oracle::new(c.clone(), 0).unwrap();
    let seq: Vec<_> = c.cot_entries().iter().map(|e| e.instance.clone()).collect();
    let t = run_cot(
        &mut l,
        &oracle,
        &seq,
        &CostVector::unit(),
        MistakeMode::SequenceLevel,
    )
    .unwrap();
    assert_eq!(t.totals.cost, int(0));
}

#[test]
fn reject_all_on_conjunction() {
    let c = Arc::new(families::conjunction_class(3, lim()).unwrap());
    let costs = CostVector::new(int(1), int(1), int(0));
    let seq: Vec<_> = c.cot_entries().iter().map(|e| e.instance.clone()).collect();
    for target in 0..c.n_verifiers() {
        let oracle = Oracle::new(c.clone(), target).unwrap();
        let mut l = RejectAll::new(c.clone());
        let mut twice = seq.clone();
        twice.extend(seq.iter().cloned());
        let t = run_cot(&mut l, &oracle, &twice, &costs, MistakeMode::SequenceLevel).unwrap();
        assert!(t.totals.cost <= int(1));
    }
}
