//! Versioned JSON reports. Every number carries a certification tag and the
//! output contains no timing data, so equal inputs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::coding::BoundReport;
use crate::error::{Error, Result};
use crate::optimize::{Certificate, ExtremalResult, Mode, Telemetry, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub graph: String,
    pub n: usize,
    pub q: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    /// `None` stands for infinity.
    pub value: Option<u128>,
    /// Set when `value` is a count `base^x`.
    pub base: Option<u32>,
    /// `log_base(value)` for counts.
    pub log: Option<f64>,
    pub certified: Certificate,
    pub bound: Option<u128>,
    pub witness: Option<Vec<usize>>,
}

impl Entry {
    pub fn exact(name: &str, value: u128) -> Entry {
        Entry { name: name.into(), value: Some(value), base: None, log: None, certified: Certificate::Exact, bound: None, witness: None }
    }

    pub fn count(name: &str, count: u128, base: u32) -> Entry {
        let log = crate::fds::LogCount::new(count, base).value();
        Entry { base: Some(base), log: Some(log), ..Entry::exact(name, count) }
    }

    pub fn infinite(name: &str) -> Entry {
        Entry { value: None, ..Entry::exact(name, 0) }
    }

    pub fn with_witness(mut self, witness: Vec<usize>) -> Entry {
        self.witness = Some(witness);
        self
    }

    pub fn from_result(r: &ExtremalResult) -> Entry {
        let mut e = match r.value {
            Value::Integer(v) => Entry::exact(r.quantity.name(), v as u128),
            Value::Count(c) => Entry::count(r.quantity.name(), c.count, c.base),
        };
        e.certified = r.certified;
        e.bound = r.bound;
        e
    }
}

/// One named claim with its expected and observed values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub instance: String,
    pub expected: String,
    pub actual: String,
    pub holds: bool,
}

impl Check {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

impl From<&BoundReport> for Check {
    fn from(b: &BoundReport) -> Check {
        Check {
            suite: "bounds".into(),
            name: b.name.clone(),
            instance: b.instance.clone(),
            expected: format!("{} {} {}", b.left, b.relation, b.right),
            actual: if b.holds { "holds".into() } else { "violated".into() },
            holds: b.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub instance: Option<Instance>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub quantities: Vec<Entry>,
    pub bounds: Vec<BoundReport>,
    pub checks: Vec<Check>,
    /// Paths of emitted witness files.
    pub witnesses: Vec<String>,
    pub telemetry: Option<Telemetry>,
    pub passed: bool,
    pub counterexample: Option<Check>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            instance: None,
            mode: None,
            seed: None,
            quantities: Vec::new(),
            bounds: Vec::new(),
            checks: Vec::new(),
            witnesses: Vec::new(),
            telemetry: None,
            passed: true,
            counterexample: None,
        }
    }

    /// Recomputes `passed` and `counterexample` from checks and bounds.
    pub fn settle(&mut self) {
        let first = self.checks.iter().find(|c| !c.holds).cloned().or_else(|| self.bounds.iter().find(|b| !b.holds).map(Check::from));
        self.passed = first.is_none();
        self.counterexample = first;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!("unsupported report schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}
