use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::class::{ClassLimits, ClassShape, VerifierClass};
use super::types::{PrefixInstance, Problem, StepToken};

/// One verifier's table, `rows[i]` being its answer (1 = YES) on the `i`-th
/// universe instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierRows {
    pub id: usize,
    pub rows: Vec<u8>,
}

/// On-disk form of a [`VerifierClass`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    pub sigma: Vec<String>,
    pub problems: Vec<String>,
    #[serde(rename = "L")]
    pub max_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fail_token: Option<u16>,
    pub universe: Vec<(u32, Vec<u16>)>,
    pub verifiers: Vec<VerifierRows>,
}

impl ClassFile {
    pub fn from_class(class: &VerifierClass) -> Self {
        ClassFile {
            sigma: class.sigma().to_vec(),
            problems: class.problems().to_vec(),
            max_len: class.max_len(),
            fail_token: class.fail_token().map(|t| t.0),
            universe: class
                .universe()
                .iter()
                .map(|z| (z.problem.0, z.steps.iter().map(|t| t.0).collect()))
                .collect(),
            verifiers: (0..class.n_verifiers())
                .map(|v| VerifierRows {
                    id: v,
                    rows: class.row(v).into_iter().map(u8::from).collect(),
                })
                .collect(),
        }
    }

    pub fn into_class(self, limits: ClassLimits) -> Result<VerifierClass> {
        let mut rows = Vec::with_capacity(self.verifiers.len());
        for (pos, v) in self.verifiers.iter().enumerate() {
            if v.id != pos {
                return Err(Error::SchemaError(format!(
                    "verifiers[{pos}].id is {}, expected {pos}",
                    v.id
                )));
            }
            if let Some(bad) = v.rows.iter().find(|&&b| b > 1) {
                return Err(Error::SchemaError(format!(
                    "verifiers[{pos}].rows holds {bad}; rows are 0 or 1"
                )));
            }
            rows.push(v.rows.iter().map(|&b| b == 1).collect());
        }
        let universe = self
            .universe
            .into_iter()
            .map(|(p, steps)| {
                PrefixInstance::new(Problem(p), steps.into_iter().map(StepToken).collect())
            })
            .collect();
        let shape = ClassShape {
            sigma: self.sigma,
            problems: self.problems,
            max_len: self.max_len,
            fail_token: self.fail_token.map(StepToken),
        };
        VerifierClass::from_rows(shape, universe, &rows, limits)
    }

    /// Parses JSON text. Syntax errors carry a line and column; type and
    /// field errors are reported as schema errors.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            if e.is_data() {
                Error::SchemaError(e.to_string())
            } else {
                Error::ParseError {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                }
            }
        })
    }

    /// Canonical text: one universe entry and one verifier per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let field = |name: &str, v: String| format!("  \"{name}\": {v},\n");
        out += &field("sigma", json(&self.sigma));
        out += &field("problems", json(&self.problems));
        out += &field("L", self.max_len.to_string());
        if let Some(f) = self.fail_token {
            out += &field("fail_token", f.to_string());
        }
        out += "  \"universe\": [";
        list(&mut out, self.universe.iter().map(json));
        out += "],\n  \"verifiers\": [";
        list(&mut out, self.verifiers.iter().map(json));
        out += "]\n}\n";
        out
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn list(out: &mut String, items: impl Iterator<Item = String>) {
    let mut first = true;
    for item in items {
        out.push_str(if first { "\n    " } else { ",\n    " });
        out.push_str(&item);
        first = false;
    }
    if !first {
        out.push_str("\n  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ClassFile {
        ClassFile {
            sigma: vec!["0".into(), "1".into()],
            problems: vec!["x".into()],
            max_len: 1,
            fail_token: None,
            universe: vec![(0, vec![0]), (0, vec![1])],
            verifiers: vec![
                VerifierRows {
                    id: 0,
                    rows: vec![1, 0],
                },
                VerifierRows {
                    id: 1,
                    rows: vec![0, 1],
                },
            ],
        }
    }

    #[test]
    fn text_round_trip() {
        let f = tiny();
        let text = f.to_json();
        assert_eq!(ClassFile::parse(&text).unwrap(), f);
        let class = f.clone().into_class(ClassLimits::default()).unwrap();
        assert_eq!(ClassFile::from_class(&class), f);
    }

    #[test]
    fn syntax_error_has_position() {
        match ClassFile::parse("{\n  \"sigma\": [,\n}") {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_row_is_schema_error() {
        let mut f = tiny();
        f.verifiers[1].rows.pop();
        assert!(matches!(
            f.into_class(ClassLimits::default()),
            Err(Error::SchemaError(_))
        ));
    }

    #[test]
    fn unordered_universe_rejected() {
        let mut f = tiny();
        f.universe.swap(0, 1);
        assert!(matches!(
            f.into_class(ClassLimits::default()),
            Err(Error::SchemaError(_))
        ));
    }
}
