//! Generators for the concrete verifier classes used throughout the crate,
//! plus class-file loading and saving.

mod river;

use std::path::Path;

use rand::Rng;

use crate::domain::{
    ClassFile, ClassLimits, ClassShape, CotInstance, PrefixInstance, Problem, StepToken,
    VerifierClass,
};
use crate::error::{Error, Result};

pub use river::{is_safe, legal_edges, river_crossing_class, RiverCrossing, RiverMode};

fn binary() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn one_problem(name: &str) -> Vec<String> {
    vec![name.into()]
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::CapExceeded(what()))
    }
}

/// Every prefix of length `1..=max_len` over an alphabet of `sigma` tokens,
/// for each problem.
pub fn full_universe(problems: u32, sigma: u16, max_len: usize) -> Vec<PrefixInstance> {
    let mut out = Vec::new();
    for p in 0..problems {
        let mut layer = vec![PrefixInstance::new(Problem(p), Vec::new())];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|z| (0..sigma).map(move |t| z.extend(StepToken(t))))
                .collect();
            out.extend(layer.iter().cloned());
        }
    }
    out
}

fn bits(value: usize, width: usize) -> Vec<StepToken> {
    (0..width)
        .map(|i| StepToken(((value >> (width - 1 - i)) & 1) as u16))
        .collect()
}

/// Verifier `b` accepts step `l` exactly when it equals bit `l` of `b` (most
/// significant first): a correct proof is an unknown bit string.
pub fn singleton_bitstring_class(max_len: usize, limits: ClassLimits) -> Result<VerifierClass> {
    require((1..=16).contains(&max_len), || {
        format!("L = {max_len} outside 1..=16")
    })?;
    require(1usize << max_len <= limits.max_verifiers, || {
        format!("2^{max_len} verifiers > cap {}", limits.max_verifiers)
    })?;
    let n = 1usize << max_len;
    VerifierClass::from_fn(
        ClassShape::new(binary(), one_problem("x"), max_len),
        full_universe(1, 2, max_len),
        n,
        limits,
        |v, z| {
            let l = z.len() - 1;
            z.steps[l] == bits(v, max_len)[l]
        },
    )
}

/// The `n` designated traces of [`complement_class`]: the first `n` bit
/// strings of length `max_len` in lexicographic order.
pub fn complement_designated(n: usize, max_len: usize) -> Vec<CotInstance> {
    (0..n)
        .map(|i| CotInstance::new(Problem(0), bits(i, max_len)))
        .collect()
}

/// Verifier `i` rejects only the last prefix of designated trace `i`.
pub fn complement_class(n: usize, max_len: usize, limits: ClassLimits) -> Result<VerifierClass> {
    require((1..=16).contains(&max_len), || {
        format!("L = {max_len} outside 1..=16")
    })?;
    if n == 0 || n > 1usize << max_len {
        return Err(Error::CapExceeded(format!(
            "{n} designated traces do not fit in {{0,1}}^{max_len}"
        )));
    }
    let designated: Vec<PrefixInstance> = complement_designated(n, max_len)
        .iter()
        .map(CotInstance::as_prefix)
        .collect();
    VerifierClass::from_fn(
        ClassShape::new(binary(), one_problem("x"), max_len),
        full_universe(1, 2, max_len),
        n,
        limits,
        |v, z| *z != designated[v],
    )
}

/// Token id of the unit vector `e_i` (`i` counted from 1, leftmost bit).
pub fn unit_vector(n_bits: usize, i: usize) -> StepToken {
    StepToken(1 << (n_bits - i))
}

/// One-step class over all `n_bits`-bit vectors; verifier `i` accepts only
/// the unit vector `e_{i+1}`.
pub fn indicator_class(n_bits: usize, limits: ClassLimits) -> Result<VerifierClass> {
    require((1..=10).contains(&n_bits), || {
        format!("n_bits = {n_bits} outside 1..=10")
    })?;
    let sigma: Vec<String> = (0..1usize << n_bits)
        .map(|t| format!("{t:0width$b}", width = n_bits))
        .collect();
    let size = sigma.len() as u16;
    VerifierClass::from_fn(
        ClassShape::new(sigma, one_problem("x"), 1),
        full_universe(1, size, 1),
        n_bits,
        limits,
        |v, z| z.steps[0] == unit_vector(n_bits, v + 1),
    )
}

/// One verifier per sign pattern of a conjunction over `L` variables. A trace
/// is an assignment, and its first faulty step is the first violated literal.
/// Verifier `s` requires `x_l` to equal bit `l` of `s`.
pub fn conjunction_class(max_len: usize, limits: ClassLimits) -> Result<VerifierClass> {
    require((1..=12).contains(&max_len), || {
        format!("L = {max_len} outside 1..=12")
    })?;
    require(1usize << max_len <= limits.max_verifiers, || {
        format!("2^{max_len} verifiers > cap {}", limits.max_verifiers)
    })?;
    VerifierClass::from_fn(
        ClassShape::new(binary(), one_problem("assignment"), max_len),
        full_universe(1, 2, max_len),
        1usize << max_len,
        limits,
        |v, z| {
            let l = z.len() - 1;
            z.steps[l] == bits(v, max_len)[l]
        },
    )
}

/// Per-step mini-verifier class: each member is a table over the
/// length-`step` prefixes of the base universe, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepClass {
    pub tables: Vec<Vec<bool>>,
}

/// Product of per-step classes over the full universe of `shape`. Verifier
/// `(h_1, …, h_L)` judges a length-`i` prefix with `h_i`; verifier ids enumerate
/// tuples with `h_1` varying slowest.
pub fn product_class(
    shape: ClassShape,
    steps: &[StepClass],
    limits: ClassLimits,
) -> Result<VerifierClass> {
    if steps.len() != shape.max_len {
        return Err(Error::SchemaError(format!(
            "{} step classes for L = {}",
            steps.len(),
            shape.max_len
        )));
    }
    let total = steps
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.tables.len()))
        .filter(|&n| n <= limits.max_verifiers)
        .ok_or_else(|| {
            Error::CapExceeded(format!("product exceeds cap {}", limits.max_verifiers))
        })?;
    let universe = full_universe(
        shape.problems.len() as u32,
        shape.sigma.len() as u16,
        shape.max_len,
    );
    let mut sorted = universe.clone();
    sorted.sort_by(|a, b| a.canonical_cmp(b));
    // position of each instance among instances of the same length
    let mut rank = std::collections::HashMap::new();
    let mut seen = vec![0usize; shape.max_len + 1];
    for z in &sorted {
        rank.insert(z.clone(), seen[z.len()]);
        seen[z.len()] += 1;
    }
    for (i, s) in steps.iter().enumerate() {
        if s.tables.is_empty() || s.tables.iter().any(|t| t.len() != seen[i + 1]) {
            return Err(Error::SchemaError(format!(
                "step class {} needs nonempty tables of {} entries",
                i + 1,
                seen[i + 1]
            )));
        }
    }
    let radices: Vec<usize> = steps.iter().map(|s| s.tables.len()).collect();
    let digit = |mut v: usize, i: usize| {
        for r in radices[i + 1..].iter().rev() {
            v /= r;
        }
        v % radices[i]
    };
    VerifierClass::from_fn(shape, universe, total, limits, |v, z| {
        let i = z.len() - 1;
        steps[i].tables[digit(v, i)][rank[z]]
    })
}

/// Random product class over a binary alphabet with `sizes[i]` distinct
/// random mini-verifiers at step `i + 1`.
pub fn random_product_class(
    sizes: &[usize],
    rng: &mut impl Rng,
    limits: ClassLimits,
) -> Result<VerifierClass> {
    let max_len = sizes.len();
    require((1..=10).contains(&max_len), || {
        format!("L = {max_len} outside 1..=10")
    })?;
    let steps = sizes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let width = 1usize << (i + 1);
            let mut tables: Vec<Vec<bool>> = Vec::new();
            let mut attempts = 0;
            while tables.len() < k && attempts < 64 * k {
                let t: Vec<bool> = (0..width).map(|_| rng.gen_bool(0.5)).collect();
                if !tables.contains(&t) {
                    tables.push(t);
                }
                attempts += 1;
            }
            StepClass { tables }
        })
        .collect::<Vec<_>>();
    product_class(
        ClassShape::new(binary(), one_problem("x"), max_len),
        &steps,
        limits,
    )
}

/// A class of `n_verifiers` random tables over every prefix up to `max_len`
/// of an alphabet with `sigma` tokens. Each table entry is YES with
/// probability `p_yes`.
pub fn random_class(
    sigma: u16,
    max_len: usize,
    n_verifiers: usize,
    p_yes: f64,
    rng: &mut impl Rng,
    limits: ClassLimits,
) -> Result<VerifierClass> {
    let universe = full_universe(1, sigma, max_len);
    let rows: Vec<Vec<bool>> = (0..n_verifiers)
        .map(|_| universe.iter().map(|_| rng.gen_bool(p_yes)).collect())
        .collect();
    let names = (0..sigma).map(|t| t.to_string()).collect();
    let mut sorted: Vec<usize> = (0..universe.len()).collect();
    sorted.sort_by(|&a, &b| universe[a].canonical_cmp(&universe[b]));
    let universe_sorted = sorted.iter().map(|&i| universe[i].clone()).collect();
    let rows_sorted: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| sorted.iter().map(|&i| r[i]).collect())
        .collect();
    VerifierClass::from_rows(
        ClassShape::new(names, one_problem("x"), max_len),
        universe_sorted,
        &rows_sorted,
        limits,
    )
}

/// Adds a fresh fail token `F` to a class. The universe gains every
/// `(τ_{1:j}, F, …, F)` up to length `L` for in-universe `τ_{1:j}` (and the
/// all-`F` prefixes); all verifiers reject every one of them.
pub fn with_fail_token(class: &VerifierClass, limits: ClassLimits) -> Result<VerifierClass> {
    if class.fail_token().is_some() {
        return Err(Error::SchemaError(
            "class already declares a fail token".into(),
        ));
    }
    let mut shape = class.shape();
    let f = StepToken(shape.sigma.len() as u16);
    shape.sigma.push("F".into());
    shape.fail_token = Some(f);
    let max_len = shape.max_len;
    let mut universe: Vec<PrefixInstance> = class.universe().to_vec();
    let mut stems: Vec<PrefixInstance> = (0..shape.problems.len() as u32)
        .map(|p| PrefixInstance::new(Problem(p), Vec::new()))
        .collect();
    stems.extend(
        class
            .universe()
            .iter()
            .filter(|z| z.len() < max_len)
            .cloned(),
    );
    for stem in stems {
        let mut z = stem;
        while z.len() < max_len {
            z = z.extend(f);
            universe.push(z.clone());
        }
    }
    VerifierClass::from_fn(shape, universe, class.n_verifiers(), limits, |v, z| {
        !z.steps.contains(&f) && class.index_of(z).is_ok_and(|i| class.accepts(v, i))
    })
}

/// Small named classes shared by the exhaustive checks and the CLI.
pub fn corpus() -> Vec<(String, VerifierClass)> {
    let lim = ClassLimits::default();
    let mut out: Vec<(String, VerifierClass)> = Vec::new();
    let mut add = |name: &str, c: Result<VerifierClass>| {
        out.push((name.to_string(), c.expect("corpus class builds")))
    };
    add("indicator3", indicator_class(3, lim));
    add("indicator4", indicator_class(4, lim));
    add("bitstring2", singleton_bitstring_class(2, lim));
    add("complement3x2", complement_class(3, 2, lim));
    add("complement4x2", complement_class(4, 2, lim));
    add("conjunction2", conjunction_class(2, lim));
    add("complement5x3", complement_class(5, 3, lim));
    let steps = vec![
        StepClass {
            tables: vec![vec![true, false], vec![true, true]],
        },
        StepClass {
            tables: vec![
                vec![true, true, false, true],
                vec![false, true, true, true],
                vec![true, true, true, true],
            ],
        },
    ];
    add(
        "product2x3",
        product_class(ClassShape::new(binary(), one_problem("x"), 2), &steps, lim),
    );
    out
}

pub fn load_class(path: &Path, limits: ClassLimits) -> Result<VerifierClass> {
    let text = std::fs::read_to_string(path)?;
    ClassFile::parse(&text)?.into_class(limits)
}

pub fn save_class(class: &VerifierClass, path: &Path) -> Result<()> {
    std::fs::write(path, ClassFile::from_class(class).to_json())?;
    Ok(())
}
