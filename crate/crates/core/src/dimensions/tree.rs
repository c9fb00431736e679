use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::VerifierSet;
use crate::domain::{Answer, CostVector, Instance, Label, PrefixLabel, VersionSpace};
use crate::error::{Error, Result};
use crate::rational::{self, Ratio};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Plain,
    Sc,
    Wsc,
    Scl,
}

/// Straight edges (`s`) carry the labels a learner pays `γ_s` for missing,
/// curvy edges (`c`) the ones it pays `γ_c` for, and `l` edges the fault
/// positions of location mistakes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeType {
    #[serde(rename = "s")]
    Straight,
    #[serde(rename = "c")]
    Curvy,
    #[serde(rename = "l")]
    Location,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub label: Answer,
    #[serde(rename = "type")]
    pub ty: EdgeType,
    #[serde(with = "rational")]
    pub weight: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child: Option<Box<TreeNode>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub instance: Instance,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeTree {
    pub kind: TreeKind,
    pub costs: CostVector,
    pub root: Option<TreeNode>,
}

impl MistakeTree {
    pub fn depth(&self) -> usize {
        fn go(n: &TreeNode) -> usize {
            1 + n
                .edges
                .iter()
                .map(|e| e.child.as_deref().map_or(0, go))
                .max()
                .unwrap_or(0)
        }
        self.root.as_ref().map_or(0, go)
    }

    pub fn node_count(&self) -> usize {
        fn go(n: &TreeNode) -> usize {
            1 + n
                .edges
                .iter()
                .map(|e| e.child.as_deref().map_or(0, go))
                .sum::<usize>()
        }
        self.root.as_ref().map_or(0, go)
    }

    /// Root-to-leaf paths as lists of edges.
    pub fn paths(&self) -> Vec<Vec<&Edge>> {
        fn go<'a>(n: &'a TreeNode, prefix: &mut Vec<&'a Edge>, out: &mut Vec<Vec<&'a Edge>>) {
            for e in &n.edges {
                prefix.push(e);
                match e.child.as_deref() {
                    Some(c) => go(c, prefix, out),
                    None => out.push(prefix.clone()),
                }
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if let Some(r) = &self.root {
            go(r, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Smallest total edge weight along a root-to-leaf path; zero for the
    /// empty tree.
    pub fn min_path_weight(&self) -> Ratio {
        self.paths()
            .iter()
            .map(|p| p.iter().map(|e| e.weight.clone()).sum::<Ratio>())
            .min()
            .unwrap_or_else(rational::zero)
    }

    /// Largest `m` such that every root-to-leaf path with at most `k`
    /// straight edges has at least `m` edges. `None` when no path qualifies.
    pub fn difficulty(&self, k: u32) -> Option<usize> {
        if self.root.is_none() {
            return Some(0);
        }
        self.paths()
            .iter()
            .filter(|p| p.iter().filter(|e| e.ty == EdgeType::Straight).count() as u32 <= k)
            .map(Vec::len)
            .min()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph mistake_tree {\n  node [shape=box];\n");
        fn go(n: &TreeNode, id: &mut usize, out: &mut String) -> usize {
            let me = *id;
            *id += 1;
            let text = match &n.instance {
                Instance::Prefix(z) => z.to_string(),
                Instance::Cot(z) => z.to_string(),
            };
            let _ = writeln!(out, "  n{me} [label=\"{text}\"];");
            for e in &n.edges {
                let label = match e.label {
                    Answer::Prefix(y) => y.to_string(),
                    Answer::Cot(y) => y.to_string(),
                };
                let style = match e.ty {
                    EdgeType::Straight => "solid",
                    EdgeType::Curvy => "dashed",
                    EdgeType::Location => "dotted",
                };
                let target = match e.child.as_deref() {
                    Some(c) => go(c, id, out),
                    None => {
                        let leaf = *id;
                        *id += 1;
                        let _ = writeln!(out, "  n{leaf} [shape=point];");
                        leaf
                    }
                };
                let _ = writeln!(
                    out,
                    "  n{me} -> n{target} [label=\"{label} ({})\", style={style}];",
                    rational::format(&e.weight)
                );
            }
            me
        }
        if let Some(r) = &self.root {
            go(r, &mut 0, &mut out);
        }
        out.push_str("}\n");
        out
    }
}

fn check_structure(tree: &MistakeTree, n: &TreeNode) -> Result<()> {
    let bad = |m: String| Err(Error::MalformedTree(m));
    let costs = &tree.costs;
    let unit = rational::one();
    match tree.kind {
        TreeKind::Plain | TreeKind::Sc | TreeKind::Wsc => {
            if !matches!(n.instance, Instance::Prefix(_)) {
                return bad("prefix trees need prefix instances".into());
            }
            let [a, b] = &n.edges[..] else {
                return bad(format!("node has {} edges, expected 2", n.edges.len()));
            };
            for e in [a, b] {
                let (want_ty, want_w) = match e.label {
                    Answer::Prefix(PrefixLabel::Yes) => (EdgeType::Curvy, &costs.gamma_c),
                    Answer::Prefix(PrefixLabel::No) => (EdgeType::Straight, &costs.gamma_s),
                    Answer::Cot(_) => return bad("prefix tree edge carries a trace label".into()),
                };
                let want_w = if tree.kind == TreeKind::Wsc {
                    want_w
                } else {
                    &unit
                };
                if e.ty != want_ty || e.weight != *want_w {
                    return bad(format!(
                        "edge {:?} has type {:?} weight {}",
                        e.label, e.ty, e.weight
                    ));
                }
            }
            if a.label == b.label {
                return bad("both edges carry the same label".into());
            }
        }
        TreeKind::Scl => {
            if !matches!(n.instance, Instance::Cot(_)) {
                return bad("SCL trees need trace instances".into());
            }
            let [a, b] = &n.edges[..] else {
                return bad(format!("node has {} edges, expected 2", n.edges.len()));
            };
            for e in [a, b] {
                let Answer::Cot(y) = e.label else {
                    return bad("SCL edge carries a prefix label".into());
                };
                let want_w = match e.ty {
                    EdgeType::Straight => &costs.gamma_s,
                    EdgeType::Curvy => &costs.gamma_c,
                    EdgeType::Location => &costs.gamma_l,
                };
                let ok = match e.ty {
                    EdgeType::Straight | EdgeType::Location => y.is_fault(),
                    EdgeType::Curvy => y == Label::AllCorrect,
                };
                if !ok || e.weight != *want_w {
                    return bad(format!("edge {y} has type {:?} weight {}", e.ty, e.weight));
                }
            }
            let types = (a.ty, b.ty);
            let pair_ok = match types {
                (EdgeType::Location, EdgeType::Location) => a.label != b.label,
                (EdgeType::Straight, EdgeType::Curvy) | (EdgeType::Curvy, EdgeType::Straight) => {
                    true
                }
                _ => false,
            };
            if !pair_ok {
                return bad(format!("edge pair {types:?} is not an s/c or l/l pair"));
            }
        }
    }
    Ok(())
}

/// Checks the edge rules of `tree.kind` and that every root-to-leaf path is
/// consistent with some member of `vs`.
pub fn verify_shattered(tree: &MistakeTree, vs: &VersionSpace) -> Result<bool> {
    fn go(
        tree: &MistakeTree,
        n: &TreeNode,
        alive: &VerifierSet,
        vs: &VersionSpace,
    ) -> Result<bool> {
        check_structure(tree, n)?;
        let class = vs.class();
        for e in &n.edges {
            let next = match (&n.instance, e.label) {
                (Instance::Prefix(z), Answer::Prefix(y)) => {
                    class.restrict_set(alive, class.index_of(z)?, y)
                }
                (Instance::Cot(z), Answer::Cot(y)) => {
                    class.cot_restrict(alive, class.cot_index_of(z)?, y)
                }
                _ => {
                    return Err(Error::MalformedTree(
                        "edge label does not match instance".into(),
                    ))
                }
            };
            if next.is_empty() {
                return Ok(false);
            }
            if let Some(c) = e.child.as_deref() {
                if !go(tree, c, &next, vs)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
    match &tree.root {
        None => Ok(true),
        Some(r) => go(tree, r, vs.alive(), vs),
    }
}
