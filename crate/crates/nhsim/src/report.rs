//! Pass/fail reports: human-readable text plus one machine-readable line
//! per check, `CHECK <name> measured=<v> bound=<b> PASS|FAIL`.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    /// Pass iff `measured <= bound`.
    pub fn upper(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: slug(name.into()),
            measured,
            bound,
            pass: measured <= bound,
            note: None,
        }
    }

    /// Pass iff `measured >= bound` (refinement ratios and the like).
    pub fn lower(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: slug(name.into()),
            measured,
            bound,
            pass: measured >= bound,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn slug(name: String) -> String {
    name.chars()
        .map(|c| if c.is_whitespace() { '-' } else { c })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.title);
        for line in &self.notes {
            let _ = writeln!(out, "   {line}");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "CHECK {} measured={:.6e} bound={:.6e} {}{}",
                c.name,
                c.measured,
                c.bound,
                if c.pass { "PASS" } else { "FAIL" },
                c.note
                    .as_deref()
                    .map(|n| format!("  # {n}"))
                    .unwrap_or_default()
            );
        }
        let _ = writeln!(
            out,
            "RESULT {} {}",
            slug(self.title.clone()),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }
}
