//! Suite reports and their human/JSON renderings.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

/// Outcome of one verification suite: the expected and computed values are
/// carried verbatim so a failure can be diffed.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub params: Value,
    pub expected: Value,
    pub computed: Value,
    pub pass: bool,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "params": self.params,
            "expected": self.expected,
            "computed": self.computed,
            "pass": self.pass,
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }

    pub fn render_human(&self) -> String {
        let params = render_params(&self.params);
        if self.pass {
            format!(
                "PASS {}({params}): {} [{} ms]",
                self.suite,
                render_value(&self.computed),
                self.elapsed_ms
            )
        } else {
            format!(
                "FAIL {}({params}): expected {}, computed {} [{} ms]",
                self.suite,
                render_value(&self.expected),
                render_value(&self.computed),
                self.elapsed_ms
            )
        }
    }
}

fn render_params(params: &Value) -> String {
    match params.as_object() {
        Some(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", render_value(v)))
            .collect::<Vec<_>>()
            .join(", "),
        None => params.to_string(),
    }
}

/// Compact rendering: arrays as set braces, objects as `key -> value` rows.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::Array(items) => {
            let inner = items.iter().map(render_value).collect::<Vec<_>>().join(", ");
            format!("{{{inner}}}")
        }
        Value::Object(map) => {
            let inner = map
                .iter()
                .map(|(k, v)| format!("{k} -> {}", render_value(v)))
                .collect::<Vec<_>>()
                .join("; ");
            format!("[{inner}]")
        }
        other => other.to_string(),
    }
}

pub fn set_to_json(set: &BTreeSet<u64>) -> Value {
    Value::Array(set.iter().map(|&v| json!(v)).collect())
}

pub fn table_to_json(rows: &BTreeMap<u64, BTreeSet<u64>>) -> Value {
    let mut map = serde_json::Map::new();
    for (m, row) in rows {
        map.insert(m.to_string(), set_to_json(row));
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_reports_carry_both_sides() {
        let report = VerifyReport {
            suite: "borel".to_string(),
            params: json!({"p": 3, "k": 1}),
            expected: set_to_json(&BTreeSet::from([0, 1, 2, 4])),
            computed: set_to_json(&BTreeSet::from([0, 1, 2])),
            pass: false,
            elapsed_ms: 7,
        };
        let line = report.render_human();
        assert!(line.starts_with("FAIL borel("));
        assert!(line.contains("{0, 1, 2, 4}"));
        assert!(line.contains("{0, 1, 2}"));
    }

    #[test]
    fn table_rendering_is_rowwise() {
        let rows = BTreeMap::from([(4u64, BTreeSet::from([0u64, 3]))]);
        assert_eq!(render_value(&table_to_json(&rows)), "[4 -> {0, 3}]");
    }
}
