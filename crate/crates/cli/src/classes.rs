//! Resolving `--class` arguments: a class file, or a family name such as
//! `indicator4`, `bitstring3`, `complement5x3`, `conjunction2` or `river6`,
//! optionally suffixed with `+F` for a fail-token variant.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cotverify::families::{self, RiverMode};
use cotverify::{ClassLimits, VerifierClass};

pub const FAMILIES: &[&str] = &[
    "indicator<n>",
    "bitstring<L>",
    "complement<n>x<L>",
    "conjunction<L>",
    "river<L>",
    "product2x3",
];

fn number(s: &str, what: &str) -> Result<usize> {
    s.parse()
        .with_context(|| format!("bad {what} in family name: {s:?}"))
}

pub fn build_family(name: &str, limits: ClassLimits) -> Result<VerifierClass> {
    if let Some(base) = name.strip_suffix("+F") {
        return Ok(families::with_fail_token(
            &build_family(base, limits)?,
            limits,
        )?);
    }
    if let Some((_, c)) = families::corpus().into_iter().find(|(n, _)| n == name) {
        return Ok(c);
    }
    let class = if let Some(n) = name.strip_prefix("indicator") {
        families::indicator_class(number(n, "bit count")?, limits)?
    } else if let Some(l) = name.strip_prefix("bitstring") {
        families::singleton_bitstring_class(number(l, "length")?, limits)?
    } else if let Some(l) = name.strip_prefix("conjunction") {
        families::conjunction_class(number(l, "length")?, limits)?
    } else if let Some(rest) = name.strip_prefix("complement") {
        let (n, l) = rest
            .split_once('x')
            .ok_or_else(|| anyhow!("complement classes are named complement<n>x<L>"))?;
        families::complement_class(number(n, "trace count")?, number(l, "length")?, limits)?
    } else if let Some(l) = name.strip_prefix("river") {
        families::river_crossing_class(&[], number(l, "length")?, RiverMode::Unrevealed, limits)?
            .class
    } else {
        bail!(
            "unknown class {name:?}; expected a file or one of {}",
            FAMILIES.join(", ")
        )
    };
    Ok(class)
}

/// A file path if it exists, else a family name (a trailing `.json` is
/// ignored so `indicator4.json` works without the file).
pub fn resolve(spec: &str, limits: ClassLimits) -> Result<VerifierClass> {
    let path = Path::new(spec);
    if path.exists() {
        return families::load_class(path, limits).with_context(|| format!("loading {spec}"));
    }
    let name = spec.strip_suffix(".json").unwrap_or(spec);
    let name = Path::new(name)
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or(name);
    build_family(name, limits)
}
