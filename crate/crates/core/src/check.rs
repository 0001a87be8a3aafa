//! Bookkeeping for inequality checks along a trajectory.

use serde::{Deserialize, Serialize};

/// Outcome of checking one inequality `lhs <= rhs` (or `<`) at many times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub applicable: bool,
    /// Why the check was not applicable, or which nodes were skipped.
    pub note: Option<String>,
    pub checked: usize,
    pub skipped: usize,
    pub violations: usize,
    /// Largest `lhs - rhs`; negative when every instance holds with room.
    pub worst_excess: f64,
    /// Largest `(lhs - rhs) / scale` with the scale supplied per instance.
    pub worst_relative: f64,
    pub first_violation_time: Option<f64>,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            applicable: true,
            note: None,
            checked: 0,
            skipped: 0,
            violations: 0,
            worst_excess: f64::NEG_INFINITY,
            worst_relative: f64::NEG_INFINITY,
            first_violation_time: None,
        }
    }

    pub fn not_applicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut c = Self::new(name);
        c.applicable = false;
        c.note = Some(reason.into());
        c
    }

    /// Records `lhs <= rhs + tol` (or `lhs < rhs + tol` when `strict`) at time `t`.
    pub fn record(&mut self, t: f64, lhs: f64, rhs: f64, tol: f64, strict: bool) {
        let excess = lhs - rhs;
        self.checked += 1;
        self.worst_excess = self.worst_excess.max(excess);
        let scale = lhs.abs().max(rhs.abs());
        let rel = if scale > 0.0 { excess / scale } else { excess };
        self.worst_relative = self.worst_relative.max(rel);
        let bad = if strict { excess >= tol } else { excess > tol } || excess.is_nan();
        if bad {
            self.violations += 1;
            self.first_violation_time.get_or_insert(t);
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    /// Holds at every checked instance; vacuously true when not applicable.
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        if !self.applicable {
            return format!(
                "{}: not applicable ({})",
                self.name,
                self.note.as_deref().unwrap_or("-")
            );
        }
        let verdict = if self.passed() { "ok" } else { "VIOLATED" };
        let mut s = format!(
            "{}: {verdict}, checked {}, skipped {}, violations {}, worst excess {:e}, worst relative {:e}",
            self.name, self.checked, self.skipped, self.violations, self.worst_excess, self.worst_relative
        );
        if let Some(t) = self.first_violation_time {
            s.push_str(&format!(", first violation at t = {t:e}"));
        }
        s
    }
}
