//! Versioned JSON run report.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use sipotts_core::{CheckResult, Status};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

impl Summary {
    pub fn of(checks: &[CheckResult]) -> Self {
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        Summary { pass: count(Status::Pass), fail: count(Status::Fail), skip: count(Status::Skip) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: Value,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
    pub wall_ms: f64,
}

impl Report {
    pub fn new(config: Value, checks: Vec<CheckResult>, wall_ms: f64) -> Self {
        Report {
            schema: SCHEMA,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            summary: Summary::of(&checks),
            checks,
            wall_ms,
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let report: Report = serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
        if report.schema != SCHEMA {
            return Err(format!("{}: schema {} is not supported (expected {SCHEMA})", path.display(), report.schema));
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON") + "\n"
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// One line per check followed by the totals.
    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(s, "{status}  {:width$}  {}", c.id, Value::Object(c.params.clone()));
            if let Some(w) = &c.witness {
                let _ = write!(s, "  witness={w}");
            }
            if let Some(r) = &c.reason {
                let _ = write!(s, "  reason: {r}");
            }
            let _ = writeln!(s, "  ({:.0} ms)", c.elapsed_ms);
        }
        let _ = writeln!(
            s,
            "{} passed, {} failed, {} skipped in {:.1} s",
            self.summary.pass,
            self.summary.fail,
            self.summary.skip,
            self.wall_ms / 1000.0
        );
        s
    }
}
