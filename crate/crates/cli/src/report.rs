//! Versioned, machine-readable report with an optional plain-text rendering.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violation,
    Dependent,
    Trivial,
    Nontrivial,
    Member,
    Nonmember,
    Undetermined,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub verdict: Verdict,
    pub details: Map<String, Value>,
    /// Set when a budget ran out; the process then exits with status 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_exceeded: Option<Budget>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct Budget {
    pub name: &'static str,
    pub limit: u64,
}

impl Report {
    pub fn new(command: &'static str, verdict: Verdict) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            verdict,
            details: Map::new(),
            budget_exceeded: None,
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.into(), value.into());
        self
    }

    pub fn exhausted(mut self, name: &'static str, limit: u64) -> Self {
        self.verdict = Verdict::Undetermined;
        self.budget_exceeded = Some(Budget { name, limit });
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let verdict = serde_json::to_value(self.verdict).expect("verdict serializes");
        let mut out = format!("{}: {}\n", self.command, verdict.as_str().unwrap_or_default());
        for (k, v) in &self.details {
            render(&mut out, k, v, 1);
        }
        if let Some(b) = &self.budget_exceeded {
            out.push_str(&format!("  budget exceeded: {} = {}\n", b.name, b.limit));
        }
        out.push_str(&format!("  time: {:.3} ms\n", self.timing.elapsed_ms));
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(_) | Value::Object(_) => None,
        other => Some(other.to_string()),
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Value::String(s) = v {
        if s.contains('\n') {
            out.push_str(&format!("{pad}{key}:\n"));
            s.lines().for_each(|l| out.push_str(&format!("{pad}  {l}\n")));
            return;
        }
    }
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| render(out, k, x, depth + 1)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| render(out, &i.to_string(), x, depth + 1)),
        _ => unreachable!(),
    }
}
