//! Certificates: named checks with exact expected/actual values.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub description: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub stage: String,
    pub checks: Vec<Check>,
    /// Not written to artifact files; timing would break byte-identical runs.
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl Certificate {
    pub fn new(stage: impl Into<String>) -> Certificate {
        Certificate { stage: stage.into(), checks: Vec::new(), wall_time_ms: 0 }
    }

    /// Records a check comparing two exact values.
    pub fn check<T: fmt::Display + PartialEq>(&mut self, description: impl Into<String>, expected: T, actual: T) -> bool {
        let pass = expected == actual;
        self.checks.push(Check {
            description: description.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass,
        });
        pass
    }

    pub fn check_true(&mut self, description: impl Into<String>, actual: bool) -> bool {
        self.check(description, true, actual)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn merge(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage {} {}", self.stage, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {}: expected {} actual {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.description,
                c.expected,
                c.actual
            )?;
        }
        Ok(())
    }
}
