//! Reporting for the acceptance checks: one PASS/FAIL line per criterion.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let time = match self.budget {
            Some(b) => format!("{:.2} s of {} s", self.elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2} s", self.elapsed.as_secs_f64()),
        };
        write!(f, "{verdict} {:>2} {}: {} [{time}]", self.id, self.title, self.detail)
    }
}

/// Measured values and the verdict of each sub-check.
#[derive(Debug, Default)]
pub struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ok: bool, text: impl Into<String>) -> &mut Self {
        self.parts.push((ok, text.into()));
        self
    }

    pub fn passed(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|(ok, _)| *ok)
    }

    pub fn summary(&self) -> String {
        self.parts
            .iter()
            .map(|(ok, t)| if *ok { t.clone() } else { format!("{t} <- out of tolerance") })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Runs one criterion; a panic or error inside counts as a failure, as does
/// exceeding the runtime budget.
pub fn evaluate<F>(id: u32, title: &'static str, budget: Option<Duration>, f: F) -> Outcome
where
    F: FnOnce() -> Result<Checks, String>,
{
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(Ok(checks)) => (checks.passed(), checks.summary()),
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail.push_str("; over the time budget");
        }
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
        budget,
    }
}
