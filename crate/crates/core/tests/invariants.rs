use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cotverify_oracles as brute;

use cotverify::dimensions;
use cotverify::families;
use cotverify::learners::{
    run_cot, run_prefix, CotLearner, MajorityVote, PrefixLearner, ScSoa, WscSoa,
};
use cotverify::rational::{int, ratio, Ratio};
use cotverify::reductions::CotFromPrefix;
use cotverify::{
    ClassLimits, CostVector, MistakeMode, Oracle, PrefixLabel, VerifierClass, VerifierSet,
    VersionSpace,
};

fn random_class(seed: u64, n: usize) -> Arc<VerifierClass> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Arc::new(families::random_class(2, 2, n, 0.5, &mut rng, ClassLimits::default()).unwrap())
}

fn subset(class: &VerifierClass, mask: u64) -> VerifierSet {
    let n = class.n_verifiers();
    let ids: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
    if ids.is_empty() {
        class.all()
    } else {
        VerifierSet::from_ids(n, ids)
    }
}

fn costs() -> impl Strategy<Value = CostVector> {
    (0i64..5, 1i64..4, 0i64..5, 1i64..4)
        .prop_map(|(a, b, c, d)| CostVector::two(ratio(a, b), ratio(c, d)))
}

fn ordered_costs() -> impl Strategy<Value = CostVector> {
    (0i64..4, 0i64..4, 0i64..4)
        .prop_map(|(l, c, s)| CostVector::new(int(l + c + s), int(l + c), int(l)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restrict_partitions_alive(seed in any::<u64>(), n in 1usize..8, mask in any::<u64>(), idx in 0usize..6) {
        let class = random_class(seed, n);
        let alive = subset(&class, mask);
        let yes = class.restrict_set(&alive, idx, PrefixLabel::Yes);
        let no = class.restrict_set(&alive, idx, PrefixLabel::No);
        prop_assert!(yes.is_disjoint(&no));
        prop_assert_eq!(yes.union(&no), alive.clone());
        let parts = class.cot_partition(&alive, idx.min(class.cot_entries().len() - 1));
        let mut total = VerifierSet::empty(class.n_verifiers());
        for (_, p) in &parts {
            prop_assert!(total.is_disjoint(p));
            total = total.union(p);
        }
        prop_assert_eq!(total, alive);
    }

    #[test]
    fn dimensions_grow_with_the_version_space(
        seed in any::<u64>(), n in 2usize..8, a in any::<u64>(), b in any::<u64>(), c in costs(), o in ordered_costs(),
    ) {
        let class = random_class(seed, n);
        let big = subset(&class, a | b);
        let small = subset(&class, a).intersection(&big);
        prop_assume!(!small.is_empty());
        let plain = dimensions::engine(class.clone(), c.clone());
        prop_assert!(plain.ldim(&small) <= plain.ldim(&big));
        for k in 0..3 {
            prop_assert!(plain.sc(&small, k) <= plain.sc(&big, k));
            prop_assert!(plain.sc(&big, k + 1) <= plain.sc(&big, k));
        }
        prop_assert!(plain.wsc(&small) <= plain.wsc(&big));
        let scl = dimensions::engine(class.clone(), o);
        prop_assert!(scl.scl(&small) <= scl.scl(&big));
    }

    #[test]
    fn weighted_dimensions_are_homogeneous(seed in any::<u64>(), n in 1usize..8, c in costs(), o in ordered_costs(), num in 1i64..7, den in 1i64..5) {
        let class = random_class(seed, n);
        let vs = VersionSpace::full(class.clone());
        let s: Ratio = ratio(num, den);
        let w = dimensions::wsc_ldim(&vs, &c).unwrap().value;
        let ws = dimensions::wsc_ldim(&vs, &c.scale(&s)).unwrap().value;
        prop_assert_eq!(ws, w * &s);
        let l = dimensions::scl_ldim(&vs, &o).unwrap().value;
        let ls = dimensions::scl_ldim(&vs, &o.scale(&s)).unwrap().value;
        prop_assert_eq!(ls, l * s);
    }

    #[test]
    fn target_survives_every_update(seed in any::<u64>(), n in 1usize..8, target in 0usize..8, picks in proptest::collection::vec(0usize..64, 0..12)) {
        let class = random_class(seed, n);
        let target = target % class.n_verifiers();
        let oracle = Oracle::new(class.clone(), target).unwrap();
        let pool = brute::promise_pool(&oracle);
        let seq: Vec<_> = picks.iter().map(|&i| pool[i % pool.len()].clone()).collect();
        let engine = dimensions::engine(class.clone(), CostVector::unit());
        let mut learner = ScSoa::new(engine, 1);
        let t = run_prefix(&mut learner, &oracle, &seq, &CostVector::unit()).unwrap();
        prop_assert!(learner.alive().unwrap().contains(target));
        prop_assert!(t.consistent());
        prop_assert_eq!(t.recompute(), t.totals.clone());
        let traces: Vec<_> = class.cot_entries().iter().map(|e| e.instance.clone()).collect();
        let tseq: Vec<_> = picks.iter().map(|&i| traces[i % traces.len()].clone()).collect();
        let mut mv = MajorityVote::new(class.clone());
        let t = run_cot(&mut mv, &oracle, &tseq, &CostVector::unit(), MistakeMode::SequenceLevel).unwrap();
        prop_assert!(mv.alive().unwrap().contains(target));
        prop_assert_eq!(t.recompute(), t.totals.clone());
    }

    #[test]
    fn wsc_soa_pays_for_each_mistake(seed in any::<u64>(), n in 1usize..8, target in 0usize..8, c in costs(), picks in proptest::collection::vec(0usize..64, 0..12)) {
        let class = random_class(seed, n);
        let target = target % class.n_verifiers();
        let oracle = Oracle::new(class.clone(), target).unwrap();
        let pool = brute::promise_pool(&oracle);
        let engine = dimensions::engine(class.clone(), c.clone());
        let mut learner = WscSoa::new(engine.clone());
        let start = engine.wsc(&class.all());
        let mut paid = int(0);
        for &i in &picks {
            let z = &pool[i % pool.len()];
            let before = engine.wsc(learner.alive().unwrap());
            let y = oracle.prefix_label(z).unwrap();
            let p = learner.predict(z).unwrap();
            learner.update(z, y).unwrap();
            let loss = c.cost(cotverify::classify_prefix_mistake(p, y));
            prop_assert!(loss <= before - engine.wsc(learner.alive().unwrap()));
            paid += loss;
        }
        prop_assert!(paid <= start);
    }

    #[test]
    fn trace_reduction_mistakes_match_inner(seed in any::<u64>(), n in 1usize..8, target in 0usize..8, k in 0u32..3, picks in proptest::collection::vec(0usize..64, 0..12)) {
        let class = random_class(seed, n);
        let target = target % class.n_verifiers();
        let oracle = Oracle::new(class.clone(), target).unwrap();
        let traces: Vec<_> = class.cot_entries().iter().map(|e| e.instance.clone()).collect();
        let seq: Vec<_> = picks.iter().map(|&i| traces[i % traces.len()].clone()).collect();
        let engine = dimensions::engine(class.clone(), CostVector::unit());
        let mut learner = CotFromPrefix::new(ScSoa::new(engine, k));
        let t = run_cot(&mut learner, &oracle, &seq, &CostVector::unit(), MistakeMode::PrefixLevel).unwrap();
        prop_assert_eq!(t.totals.soundness, learner.inner_totals().soundness);
        prop_assert_eq!(t.totals.completeness, learner.inner_totals().completeness);
        prop_assert!(t.totals.soundness <= k as u64);
    }
}
