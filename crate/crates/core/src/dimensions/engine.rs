use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;

use crate::bitset::VerifierSet;
use crate::domain::{CostVector, Label, VerifierClass};
use crate::rational::{self, Ratio};

/// Environment variable bounding the number of entries per memo table.
pub const MEMO_CAP_VAR: &str = "COTVERIFY_MEMO_CAP";

const DEFAULT_MEMO_CAP: usize = 1 << 22;

/// A prefix instance on which the alive set disagrees.
#[derive(Clone, Debug)]
pub struct Split {
    pub idx: usize,
    pub yes: VerifierSet,
    pub no: VerifierSet,
}

/// A full trace on which the alive set produces at least two labels.
#[derive(Clone, Debug)]
pub struct CotSplit {
    pub idx: usize,
    pub parts: Vec<(Label, VerifierSet)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct DimStats {
    pub memo_hits: u64,
    pub nodes_expanded: u64,
}

/// Memoized minimax over version spaces of one class.
///
/// Values depend only on the alive set (and the remaining soundness budget
/// for the SC game), so memo entries are shared by every caller: learners
/// on successive rounds and concurrent runs on other threads.
pub struct Engine {
    class: Arc<VerifierClass>,
    costs: CostVector,
    parallel: bool,
    memo_cap: usize,
    plain: DashMap<VerifierSet, u32>,
    sc: DashMap<(VerifierSet, u32), u32>,
    wsc: DashMap<VerifierSet, Ratio>,
    scl: DashMap<VerifierSet, Ratio>,
    hits: AtomicU64,
    expanded: AtomicU64,
}

fn floor_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - 1 - n.leading_zeros()
    }
}

impl Engine {
    pub fn new(class: Arc<VerifierClass>, costs: CostVector) -> Self {
        let memo_cap = std::env::var(MEMO_CAP_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MEMO_CAP);
        Engine {
            class,
            costs,
            parallel: false,
            memo_cap,
            plain: DashMap::new(),
            sc: DashMap::new(),
            wsc: DashMap::new(),
            scl: DashMap::new(),
            hits: AtomicU64::new(0),
            expanded: AtomicU64::new(0),
        }
    }

    /// Evaluates the candidate moves of the root call on the rayon pool.
    /// Values are unchanged; only the statistics lose determinism.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn memo_cap(mut self, cap: usize) -> Self {
        self.memo_cap = cap;
        self
    }

    pub fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn stats(&self) -> DimStats {
        DimStats {
            memo_hits: self.hits.load(Ordering::Relaxed),
            nodes_expanded: self.expanded.load(Ordering::Relaxed),
        }
    }

    /// Splitting prefix instances in universe order, one per distinct YES part.
    pub fn splits(&self, alive: &VerifierSet) -> Vec<Split> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for idx in 0..self.class.universe().len() {
            let yes = alive.intersection(self.class.accept_set(idx));
            if yes.is_empty() || yes.len() == alive.len() || !seen.insert(yes.clone()) {
                continue;
            }
            let no = alive.difference(&yes);
            out.push(Split { idx, yes, no });
        }
        out
    }

    /// Full traces with at least two achievable labels, one per distinct
    /// partition.
    pub fn cot_splits(&self, alive: &VerifierSet) -> Vec<CotSplit> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for idx in 0..self.class.cot_entries().len() {
            let parts = self.class.cot_partition(alive, idx);
            if parts.len() < 2 || !seen.insert(parts.clone()) {
                continue;
            }
            out.push(CotSplit { idx, parts });
        }
        out
    }

    fn remember<K: std::hash::Hash + Eq, V>(&self, map: &DashMap<K, V>, key: K, value: V) {
        if map.len() < self.memo_cap {
            map.insert(key, value);
        }
    }

    fn hit(&self) {
        self.hits.fetch_add(1, Ordering::Relaxed);
    }

    fn expand(&self) {
        self.expanded.fetch_add(1, Ordering::Relaxed);
    }

    /// Littlestone dimension of `alive`.
    pub fn ldim(&self, alive: &VerifierSet) -> u32 {
        self.ldim_at(alive, self.parallel)
    }

    fn ldim_at(&self, alive: &VerifierSet, par: bool) -> u32 {
        if alive.len() <= 1 {
            return 0;
        }
        if let Some(v) = self.plain.get(alive) {
            self.hit();
            return *v;
        }
        self.expand();
        let splits = self.splits(alive);
        let best = if par {
            splits
                .par_iter()
                .map(|s| 1 + self.ldim_at(&s.yes, false).min(self.ldim_at(&s.no, false)))
                .max()
                .unwrap_or(0)
        } else {
            let ub = floor_log2(alive.len());
            let mut best = 0;
            for s in &splits {
                if best >= ub {
                    break;
                }
                let (small, big) = if s.yes.len() <= s.no.len() {
                    (&s.yes, &s.no)
                } else {
                    (&s.no, &s.yes)
                };
                if floor_log2(small.len()) < best {
                    continue;
                }
                let a = self.ldim_at(small, false);
                if a < best {
                    continue;
                }
                best = best.max(1 + a.min(self.ldim_at(big, false)));
            }
            best
        };
        self.remember(&self.plain, alive.clone(), best);
        best
    }

    /// Value of the budgeted game: the adversary picks a splitting instance
    /// and contradicts the learner; a wrong YES costs one unit of the
    /// soundness budget `k`, which the learner may not overdraw.
    pub fn sc(&self, alive: &VerifierSet, k: u32) -> u32 {
        self.sc_at(alive, k, self.parallel)
    }

    /// Value of one adversary move in the budgeted game.
    pub fn sc_move(&self, s: &Split, k: u32) -> u32 {
        let curvy = self.sc_at(&s.yes, k, false);
        if k == 0 {
            1 + curvy
        } else {
            1 + curvy.min(self.sc_at(&s.no, k - 1, false))
        }
    }

    fn sc_at(&self, alive: &VerifierSet, k: u32, par: bool) -> u32 {
        if alive.len() <= 1 {
            return 0;
        }
        let key = (alive.clone(), k);
        if let Some(v) = self.sc.get(&key) {
            self.hit();
            return *v;
        }
        self.expand();
        let splits = self.splits(alive);
        let best = if par {
            splits
                .par_iter()
                .map(|s| self.sc_move(s, k))
                .max()
                .unwrap_or(0)
        } else {
            let ub = alive.len() as u32 - 1;
            let mut best = 0;
            for s in &splits {
                if best >= ub {
                    break;
                }
                if s.yes.len() as u32 <= best {
                    continue;
                }
                let curvy = self.sc_at(&s.yes, k, false);
                if curvy < best {
                    continue;
                }
                let v = if k == 0 {
                    1 + curvy
                } else {
                    1 + curvy.min(self.sc_at(&s.no, k - 1, false))
                };
                best = best.max(v);
            }
            best
        };
        self.remember(&self.sc, key, best);
        best
    }

    /// Weighted game value with the engine's `γ_s`, `γ_c`.
    pub fn wsc(&self, alive: &VerifierSet) -> Ratio {
        self.wsc_at(alive, self.parallel)
    }

    pub fn wsc_move(&self, s: &Split) -> Ratio {
        let curvy = &self.costs.gamma_c + self.wsc_at(&s.yes, false);
        let straight = &self.costs.gamma_s + self.wsc_at(&s.no, false);
        curvy.min(straight)
    }

    fn wsc_at(&self, alive: &VerifierSet, par: bool) -> Ratio {
        if alive.len() <= 1 {
            return rational::zero();
        }
        if let Some(v) = self.wsc.get(alive) {
            self.hit();
            return v.clone();
        }
        self.expand();
        let splits = self.splits(alive);
        let best = if par {
            splits
                .par_iter()
                .map(|s| self.wsc_move(s))
                .max()
                .unwrap_or_else(rational::zero)
        } else {
            let mut best = rational::zero();
            for s in &splits {
                let curvy = &self.costs.gamma_c + self.wsc_at(&s.yes, false);
                if curvy <= best {
                    continue;
                }
                let straight = &self.costs.gamma_s + self.wsc_at(&s.no, false);
                let v = curvy.min(straight);
                if v > best {
                    best = v;
                }
            }
            best
        };
        self.remember(&self.wsc, alive.clone(), best.clone());
        best
    }

    /// Three-cost sequence-level game value with the engine's costs.
    pub fn scl(&self, alive: &VerifierSet) -> Ratio {
        self.scl_at(alive, self.parallel)
    }

    /// Best branch structure at one trace: its value and the two labels
    /// whose edges the adversary offers.
    pub fn scl_move(&self, s: &CotSplit) -> (Ratio, Label, Label) {
        let values: Vec<(Label, Ratio)> = s
            .parts
            .iter()
            .map(|(y, set)| (*y, self.scl_at(set, false)))
            .collect();
        scl_best(&self.costs, &values)
    }

    fn scl_at(&self, alive: &VerifierSet, par: bool) -> Ratio {
        if alive.len() <= 1 {
            return rational::zero();
        }
        if let Some(v) = self.scl.get(alive) {
            self.hit();
            return v.clone();
        }
        self.expand();
        let splits = self.cot_splits(alive);
        let best = if par {
            splits
                .par_iter()
                .map(|s| self.scl_move(s).0)
                .max()
                .unwrap_or_else(rational::zero)
        } else {
            splits
                .iter()
                .map(|s| self.scl_move(s).0)
                .max()
                .unwrap_or_else(rational::zero)
        };
        self.remember(&self.scl, alive.clone(), best.clone());
        best
    }
}

/// Best of the s/c pairs and l-pairs available among labelled child values.
/// Ties keep the first option in the order: s/c pairs by fault position,
/// then l-pairs lexicographically.
pub(crate) fn scl_best(costs: &CostVector, values: &[(Label, Ratio)]) -> (Ratio, Label, Label) {
    let mut best: Option<(Ratio, Label, Label)> = None;
    let mut offer = |v: Ratio, a: Label, b: Label| {
        if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
            best = Some((v, a, b));
        }
    };
    let all_correct = values.iter().find(|(y, _)| *y == Label::AllCorrect);
    if let Some((_, v_inf)) = all_correct {
        for (y, v) in values.iter().filter(|(y, _)| y.is_fault()) {
            let s = &costs.gamma_s + v;
            let c = &costs.gamma_c + v_inf;
            offer(s.min(c), *y, Label::AllCorrect);
        }
    }
    let faults: Vec<&(Label, Ratio)> = values.iter().filter(|(y, _)| y.is_fault()).collect();
    for i in 0..faults.len() {
        for j in i + 1..faults.len() {
            let v = (&costs.gamma_l + &faults[i].1).min(&costs.gamma_l + &faults[j].1);
            offer(v, faults[i].0, faults[j].0);
        }
    }
    best.expect("a trace split offers at least one branch structure")
}
