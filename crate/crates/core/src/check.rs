//! Outcome records shared by all verification routines.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub params: Map<String, Value>,
    pub status: Status,
    /// Where a failure occurred; always present on `Fail`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
    /// Why the check was skipped.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    /// Recorded (not asserted) observations.
    #[serde(skip_serializing_if = "Map::is_empty", default)]
    pub observed: Map<String, Value>,
    pub elapsed_ms: f64,
}

impl CheckResult {
    pub fn new(id: impl Into<String>) -> Self {
        CheckResult {
            id: id.into(),
            params: Map::new(),
            status: Status::Pass,
            witness: None,
            reason: None,
            observed: Map::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn skip(id: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = Self::new(id);
        r.status = Status::Skip;
        r.reason = Some(reason.into());
        r
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn observe(&mut self, key: &str, value: impl Into<Value>) {
        self.observed.insert(key.to_string(), value.into());
    }

    /// Marks the check failed; the first witness wins.
    pub fn fail(&mut self, witness: Value) {
        if self.status != Status::Fail {
            self.status = Status::Fail;
            self.witness = Some(witness);
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// Runs `body` against a fresh result and records the wall time.
    pub fn timed(id: impl Into<String>, body: impl FnOnce(&mut CheckResult)) -> Self {
        let start = Instant::now();
        let mut r = Self::new(id);
        body(&mut r);
        r.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        debug_assert!(r.status != Status::Fail || r.witness.is_some());
        r
    }

    /// Folds another result's verdict into this one.
    pub fn absorb(&mut self, other: &CheckResult) {
        if other.failed() {
            self.fail(serde_json::json!({ "sub_check": other.id, "witness": other.witness }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn first_witness_is_kept() {
        let mut r = CheckResult::new("x");
        r.fail(json!(1));
        r.fail(json!(2));
        assert_eq!(r.witness, Some(json!(1)));
        assert!(r.failed());
    }

    #[test]
    fn serializes_status_lowercase_and_omits_empty_fields() {
        let r = CheckResult::skip("a.b", "L not multiple of N").param("N", 3);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "skip");
        assert_eq!(v["reason"], "L not multiple of N");
        assert!(v.get("witness").is_none());
        assert!(v.get("observed").is_none());
    }
}
