//! Exact Littlestone-style dimensions by memoized minimax over version
//! spaces, witness mistake trees, and the leaf-count recurrence used to bound
//! the weighted dimension.

mod engine;
mod tree;

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::bitset::VerifierSet;
use crate::domain::{
    Answer, CostVector, CotInstance, Instance, PrefixLabel, VerifierClass, VersionSpace,
};
use crate::error::{Error, Result};
use crate::rational::{self, Ratio};

pub use engine::{CotSplit, DimStats, Engine, Split, MEMO_CAP_VAR};
pub use tree::{verify_shattered, Edge, EdgeType, MistakeTree, TreeKind, TreeNode};

/// Which dimension to compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DimKind {
    Plain,
    Sc { k: u32 },
    Wsc { costs: CostVector },
    Scl { costs: CostVector },
}

impl DimKind {
    fn costs(&self) -> CostVector {
        match self {
            DimKind::Wsc { costs } | DimKind::Scl { costs } => costs.clone(),
            _ => CostVector::unit(),
        }
    }

    pub fn tree_kind(&self) -> TreeKind {
        match self {
            DimKind::Plain => TreeKind::Plain,
            DimKind::Sc { .. } => TreeKind::Sc,
            DimKind::Wsc { .. } => TreeKind::Wsc,
            DimKind::Scl { .. } => TreeKind::Scl,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            DimKind::Wsc { costs } => costs.nonnegative(),
            DimKind::Scl { costs } => costs.ordered(),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimResult {
    #[serde(with = "rational")]
    pub value: Ratio,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<MistakeTree>,
    pub stats: DimStats,
}

/// Computes a dimension of `vs`, with a witness tree when the value is
/// positive.
pub fn compute(vs: &VersionSpace, kind: &DimKind, parallel: bool) -> Result<DimResult> {
    kind.validate()?;
    let engine = Engine::new(vs.class().clone(), kind.costs()).parallel(parallel);
    let value = value_of(&engine, vs.alive(), kind);
    let witness = match extract(&engine, vs.alive(), kind) {
        Ok(t) => Some(t),
        Err(Error::NoWitness) => None,
        Err(e) => return Err(e),
    };
    Ok(DimResult {
        value,
        witness,
        stats: engine.stats(),
    })
}

pub fn value_of(engine: &Engine, alive: &VerifierSet, kind: &DimKind) -> Ratio {
    match kind {
        DimKind::Plain => rational::int(engine.ldim(alive) as i64),
        DimKind::Sc { k } => rational::int(engine.sc(alive, *k) as i64),
        DimKind::Wsc { .. } => engine.wsc(alive),
        DimKind::Scl { .. } => engine.scl(alive),
    }
}

pub fn ldim(vs: &VersionSpace) -> DimResult {
    compute(vs, &DimKind::Plain, false).expect("plain dimension has no parameters to reject")
}

pub fn sc_ldim(vs: &VersionSpace, k: u32) -> DimResult {
    compute(vs, &DimKind::Sc { k }, false).expect("budgeted dimension has no parameters to reject")
}

pub fn wsc_ldim(vs: &VersionSpace, costs: &CostVector) -> Result<DimResult> {
    compute(
        vs,
        &DimKind::Wsc {
            costs: costs.clone(),
        },
        false,
    )
}

pub fn scl_ldim(vs: &VersionSpace, costs: &CostVector) -> Result<DimResult> {
    compute(
        vs,
        &DimKind::Scl {
            costs: costs.clone(),
        },
        false,
    )
}

/// Witness tree for the dimension of `vs`: shattered by `vs`, and its
/// minimum path weight (or its difficulty for the budgeted kind) equals the
/// dimension value.
pub fn extract_witness(vs: &VersionSpace, kind: &DimKind) -> Result<MistakeTree> {
    kind.validate()?;
    let engine = Engine::new(vs.class().clone(), kind.costs());
    extract(&engine, vs.alive(), kind)
}

/// Witness extraction reusing `engine`'s memo.
pub fn extract(engine: &Engine, alive: &VerifierSet, kind: &DimKind) -> Result<MistakeTree> {
    let root = match kind {
        DimKind::Plain => plain_node(engine, alive),
        DimKind::Sc { k } => sc_node(engine, alive, *k),
        DimKind::Wsc { .. } => wsc_node(engine, alive),
        DimKind::Scl { .. } => scl_node(engine, alive),
    };
    match root {
        None => Err(Error::NoWitness),
        Some(root) => Ok(MistakeTree {
            kind: kind.tree_kind(),
            costs: kind.costs(),
            root: Some(root),
        }),
    }
}

fn prefix_instance(engine: &Engine, idx: usize) -> Instance {
    Instance::Prefix(engine.class().universe()[idx].clone())
}

fn edge(label: PrefixLabel, weight: Ratio, child: Option<TreeNode>) -> Edge {
    let ty = match label {
        PrefixLabel::Yes => EdgeType::Curvy,
        PrefixLabel::No => EdgeType::Straight,
    };
    Edge {
        label: Answer::Prefix(label),
        ty,
        weight,
        child: child.map(Box::new),
    }
}

fn plain_node(engine: &Engine, alive: &VerifierSet) -> Option<TreeNode> {
    let target = engine.ldim(alive);
    if target == 0 {
        return None;
    }
    let s = engine
        .splits(alive)
        .into_iter()
        .find(|s| 1 + engine.ldim(&s.yes).min(engine.ldim(&s.no)) == target)
        .expect("a split attains the memoized value");
    Some(TreeNode {
        instance: prefix_instance(engine, s.idx),
        edges: vec![
            edge(
                PrefixLabel::Yes,
                rational::one(),
                plain_node(engine, &s.yes),
            ),
            edge(PrefixLabel::No, rational::one(), plain_node(engine, &s.no)),
        ],
    })
}

fn sc_node(engine: &Engine, alive: &VerifierSet, k: u32) -> Option<TreeNode> {
    let target = engine.sc(alive, k);
    if target == 0 {
        return None;
    }
    let s = engine
        .splits(alive)
        .into_iter()
        .find(|s| engine.sc_move(s, k) == target)
        .expect("a split attains the memoized value");
    let yes = sc_node(engine, &s.yes, k);
    // Paths through a straight edge beyond the budget carry no length
    // requirement, so that side stays a leaf.
    let no = if k == 0 {
        None
    } else {
        sc_node(engine, &s.no, k - 1)
    };
    Some(TreeNode {
        instance: prefix_instance(engine, s.idx),
        edges: vec![
            edge(PrefixLabel::Yes, rational::one(), yes),
            edge(PrefixLabel::No, rational::one(), no),
        ],
    })
}

fn wsc_node(engine: &Engine, alive: &VerifierSet) -> Option<TreeNode> {
    let target = engine.wsc(alive);
    if target == rational::zero() {
        return None;
    }
    let s = engine
        .splits(alive)
        .into_iter()
        .find(|s| engine.wsc_move(s) == target)?;
    let costs = engine.costs().clone();
    Some(TreeNode {
        instance: prefix_instance(engine, s.idx),
        edges: vec![
            edge(PrefixLabel::Yes, costs.gamma_c, wsc_node(engine, &s.yes)),
            edge(PrefixLabel::No, costs.gamma_s, wsc_node(engine, &s.no)),
        ],
    })
}

fn scl_node(engine: &Engine, alive: &VerifierSet) -> Option<TreeNode> {
    let target = engine.scl(alive);
    if target == rational::zero() {
        return None;
    }
    let (s, a, b) = engine.cot_splits(alive).into_iter().find_map(|s| {
        let (v, a, b) = engine.scl_move(&s);
        (v == target).then_some((s, a, b))
    })?;
    let costs = engine.costs();
    let class = engine.class();
    let make = |y: crate::domain::Label, ty: EdgeType| {
        let weight = match ty {
            EdgeType::Straight => costs.gamma_s.clone(),
            EdgeType::Curvy => costs.gamma_c.clone(),
            EdgeType::Location => costs.gamma_l.clone(),
        };
        let child = class.cot_restrict(alive, s.idx, y);
        Edge {
            label: Answer::Cot(y),
            ty,
            weight,
            child: scl_node(engine, &child).map(Box::new),
        }
    };
    let edges = if b.is_fault() {
        vec![make(a, EdgeType::Location), make(b, EdgeType::Location)]
    } else {
        vec![make(a, EdgeType::Straight), make(b, EdgeType::Curvy)]
    };
    let entry = &class.cot_entries()[s.idx];
    Some(TreeNode {
        instance: Instance::Cot(CotInstance::new(
            entry.instance.problem,
            entry.instance.steps.clone(),
        )),
        edges,
    })
}

/// Value a witness certifies: its difficulty for the budgeted kind, its
/// minimum path weight otherwise.
pub fn certified_value(tree: &MistakeTree, kind: &DimKind) -> Ratio {
    match kind {
        DimKind::Sc { k } => rational::int(tree.difficulty(*k).unwrap_or(0) as i64),
        _ => tree.min_path_weight(),
    }
}

/// `L(w) = L(w-1) + L(w-d)` for `w > 0`, with `L(w) = 1` for `w ≤ 0`: the
/// fewest leaves a tree of weighted depth `w` can have when one edge of each
/// node costs `1` and the other costs `d`.
pub fn min_leaf_recurrence(w: u64, d: u64) -> BigUint {
    assert!(d >= 1, "d must be positive");
    let w = w as usize;
    let d = d as usize;
    let mut table: Vec<BigUint> = Vec::with_capacity(w + 1);
    let at = |table: &Vec<BigUint>, i: isize| -> BigUint {
        if i <= 0 {
            BigUint::from(1u32)
        } else {
            table[i as usize].clone()
        }
    };
    table.push(BigUint::from(1u32));
    for i in 1..=w {
        let v = at(&table, i as isize - 1) + at(&table, i as isize - d as isize);
        table.push(v);
    }
    table[w].clone()
}

/// Largest `w` with `L(w) ≤ n`, i.e. the largest weight a tree with at most
/// `n` leaves can certify under costs `(d, 1)`.
pub fn max_weight_for_leaves(n: u64, d: u64) -> u64 {
    let n = BigUint::from(n);
    let mut w = 0;
    while min_leaf_recurrence(w + 1, d) <= n {
        w += 1;
    }
    w
}

/// Shared engine for a class; handy for learners that repeatedly consult
/// the same game.
pub fn engine(class: Arc<VerifierClass>, costs: CostVector) -> Arc<Engine> {
    Arc::new(Engine::new(class, costs))
}
