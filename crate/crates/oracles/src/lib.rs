//! Brute-force reference dimensions, computed by literal tree search over
//! explicit version spaces, and an exhaustive driver for deterministic
//! learners. Nothing here touches the memoized game engine.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use cotverify::rational::{self, Ratio};
use cotverify::{CostVector, Label, Oracle, PrefixInstance, VerifierClass};

type Vs = Vec<usize>;

fn split(class: &VerifierClass, v: &[usize], idx: usize) -> (Vs, Vs) {
    v.iter().partition(|&&h| class.accepts(h, idx))
}

fn splitting(class: &VerifierClass, v: &[usize]) -> Vec<(Vs, Vs)> {
    (0..class.universe().len())
        .map(|i| split(class, v, i))
        .filter(|(y, n)| !y.is_empty() && !n.is_empty())
        .collect()
}

pub fn all(class: &VerifierClass) -> Vs {
    (0..class.n_verifiers()).collect()
}

/// Is there a shattered tree of depth `m` (every leaf at depth `m`)?
fn plain_tree(
    class: &VerifierClass,
    v: &[usize],
    m: u32,
    memo: &mut HashMap<(Vs, u32), bool>,
) -> bool {
    if m == 0 {
        return true;
    }
    if let Some(&r) = memo.get(&(v.to_vec(), m)) {
        return r;
    }
    let r = splitting(class, v)
        .iter()
        .any(|(y, n)| plain_tree(class, y, m - 1, memo) && plain_tree(class, n, m - 1, memo));
    memo.insert((v.to_vec(), m), r);
    r
}

pub fn ldim(class: &VerifierClass, v: &[usize]) -> u32 {
    let mut memo = HashMap::new();
    (0..v.len() as u32)
        .rev()
        .find(|&m| plain_tree(class, v, m, &mut memo))
        .unwrap_or(0)
}

/// Is there a shattered tree on which every path with at most `k` NO edges
/// has length at least `m`? A path leaving through its `(k+1)`-th NO edge is
/// unconstrained, so that subtree may be a bare leaf.
fn sc_tree(
    class: &VerifierClass,
    v: &[usize],
    k: u32,
    m: u32,
    memo: &mut HashMap<(Vs, u32, u32), bool>,
) -> bool {
    if m == 0 {
        return true;
    }
    if let Some(&r) = memo.get(&(v.to_vec(), k, m)) {
        return r;
    }
    let r = splitting(class, v).iter().any(|(y, n)| {
        sc_tree(class, y, k, m - 1, memo) && (k == 0 || sc_tree(class, n, k - 1, m - 1, memo))
    });
    memo.insert((v.to_vec(), k, m), r);
    r
}

pub fn sc(class: &VerifierClass, v: &[usize], k: u32) -> u32 {
    let mut memo = HashMap::new();
    (0..v.len() as u32)
        .rev()
        .find(|&m| sc_tree(class, v, k, m, &mut memo))
        .unwrap_or(0)
}

/// Every value `a·x + b·y + c·z` a tree of depth below `depth` can certify.
fn candidates(weights: &[Ratio], depth: usize) -> Vec<Ratio> {
    let mut out = BTreeSet::new();
    let mut layer: BTreeSet<Ratio> = [rational::zero()].into();
    for _ in 0..depth {
        let next: BTreeSet<Ratio> = layer
            .iter()
            .flat_map(|s| weights.iter().map(move |w| s + w))
            .collect();
        out.extend(layer);
        layer = next;
    }
    out.extend(layer);
    let mut v: Vec<Ratio> = out.into_iter().collect();
    v.sort();
    v
}

/// Is there a shattered tree whose root-to-leaf paths all weigh at least
/// `w`, YES edges weighing `γ_c` and NO edges `γ_s`?
fn wsc_tree(
    class: &VerifierClass,
    v: &[usize],
    costs: &CostVector,
    w: &Ratio,
    memo: &mut HashMap<(Vs, Ratio), bool>,
) -> bool {
    if *w <= rational::zero() {
        return true;
    }
    if let Some(&r) = memo.get(&(v.to_vec(), w.clone())) {
        return r;
    }
    let r = splitting(class, v).iter().any(|(y, n)| {
        wsc_tree(class, y, costs, &(w - &costs.gamma_c), memo)
            && wsc_tree(class, n, costs, &(w - &costs.gamma_s), memo)
    });
    memo.insert((v.to_vec(), w.clone()), r);
    r
}

pub fn wsc(class: &VerifierClass, v: &[usize], costs: &CostVector) -> Ratio {
    let mut memo = HashMap::new();
    let cands = candidates(
        &[costs.gamma_c.clone(), costs.gamma_s.clone()],
        v.len().saturating_sub(1),
    );
    cands
        .into_iter()
        .rev()
        .find(|w| wsc_tree(class, v, costs, w, &mut memo))
        .unwrap_or_else(rational::zero)
}

fn cot_parts(class: &VerifierClass, v: &[usize], idx: usize) -> Vec<(Label, Vs)> {
    let mut parts: Vec<(Label, Vs)> = Vec::new();
    for &h in v {
        let y = class.cot_label(h, idx);
        match parts.iter_mut().find(|(l, _)| *l == y) {
            Some((_, p)) => p.push(h),
            None => parts.push((y, vec![h])),
        }
    }
    parts
}

/// Trace-tree version: each node offers either a (fault, all-correct) pair
/// weighing `(γ_s, γ_c)` or two distinct faults weighing `γ_l` each.
fn scl_tree(
    class: &VerifierClass,
    v: &[usize],
    costs: &CostVector,
    w: &Ratio,
    memo: &mut HashMap<(Vs, Ratio), bool>,
) -> bool {
    if *w <= rational::zero() {
        return true;
    }
    if let Some(&r) = memo.get(&(v.to_vec(), w.clone())) {
        return r;
    }
    let mut r = false;
    'outer: for idx in 0..class.cot_entries().len() {
        let parts = cot_parts(class, v, idx);
        for (i, (a, va)) in parts.iter().enumerate() {
            for (b, vb) in parts.iter().skip(i + 1) {
                let (wa, wb) = match (a, b) {
                    (Label::AllCorrect, _) => (&costs.gamma_c, &costs.gamma_s),
                    (_, Label::AllCorrect) => (&costs.gamma_s, &costs.gamma_c),
                    _ => (&costs.gamma_l, &costs.gamma_l),
                };
                if scl_tree(class, va, costs, &(w - wa), memo)
                    && scl_tree(class, vb, costs, &(w - wb), memo)
                {
                    r = true;
                    break 'outer;
                }
            }
        }
    }
    memo.insert((v.to_vec(), w.clone()), r);
    r
}

pub fn scl(class: &VerifierClass, v: &[usize], costs: &CostVector) -> Ratio {
    let mut memo = HashMap::new();
    let ws = [
        costs.gamma_s.clone(),
        costs.gamma_c.clone(),
        costs.gamma_l.clone(),
    ];
    let cands = candidates(&ws, v.len().saturating_sub(1));
    cands
        .into_iter()
        .rev()
        .find(|w| scl_tree(class, v, costs, w, &mut memo))
        .unwrap_or_else(rational::zero)
}

/// Universe prefixes that may be shown for `target` under the promise.
pub fn promise_pool(oracle: &Oracle) -> Vec<PrefixInstance> {
    oracle
        .class()
        .universe()
        .iter()
        .filter(|z| oracle.promise_holds(z).unwrap())
        .cloned()
        .collect()
}

/// Componentwise worst totals over continuations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Worst {
    pub soundness: u64,
    pub completeness: u64,
    pub location: u64,
    pub mistakes: u64,
    pub cost: Ratio,
}

impl Worst {
    pub fn round(kind: cotverify::MistakeKind, costs: &CostVector) -> Worst {
        use cotverify::MistakeKind::*;
        let mut w = Worst::default();
        match kind {
            None => {}
            Soundness => w.soundness = 1,
            Completeness => w.completeness = 1,
            Location => w.location = 1,
        }
        w.mistakes = w.soundness + w.completeness + w.location;
        w.cost = costs.cost(kind);
        w
    }

    pub fn plus(&self, o: &Worst) -> Worst {
        Worst {
            soundness: self.soundness + o.soundness,
            completeness: self.completeness + o.completeness,
            location: self.location + o.location,
            mistakes: self.mistakes + o.mistakes,
            cost: &self.cost + &o.cost,
        }
    }

    pub fn max(&self, o: &Worst) -> Worst {
        Worst {
            soundness: self.soundness.max(o.soundness),
            completeness: self.completeness.max(o.completeness),
            location: self.location.max(o.location),
            mistakes: self.mistakes.max(o.mistakes),
            cost: self.cost.clone().max(o.cost.clone()),
        }
    }
}

/// Worst totals of `learner` over every sequence of at most `depth` rounds
/// drawn from `pool`. `play` runs one round and scores it. Deterministic
/// learners whose behaviour depends only on `key` are merged on equal keys,
/// which keeps the enumeration exact.
pub fn worst_case<L: Clone, K: Hash + Eq + Clone, T>(
    learner: &L,
    depth: usize,
    pool: &[T],
    key: &impl Fn(&L) -> K,
    play: &mut impl FnMut(&mut L, &T) -> Worst,
    memo: &mut HashMap<(K, usize), Worst>,
) -> Worst {
    if depth == 0 {
        return Worst::default();
    }
    let k = (key(learner), depth);
    if let Some(w) = memo.get(&k) {
        return w.clone();
    }
    let mut best = Worst::default();
    for z in pool {
        let mut l = learner.clone();
        let here = play(&mut l, z);
        let rest = worst_case(&l, depth - 1, pool, key, play, memo);
        best = best.max(&here.plus(&rest));
    }
    memo.insert(k, best.clone());
    best
}
