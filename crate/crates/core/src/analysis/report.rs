use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsUpToConstant,
    Violated,
}

/// How a report's ratio turns into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Constant-free statement: a ratio above `1 + tolerance` is a violation.
    Strict,
    /// Statement with unnamed constants: any finite ratio is acceptable.
    Ratio,
    /// Recorded for documentation; never a failure.
    Informational,
}

/// Both sides of an estimate sampled along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub mode: CheckMode,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Largest `lhs / max(rhs, abs_floor)`; `0/0` counts as `0`.
    pub max_ratio: f64,
    /// Time at which `max_ratio` is attained.
    pub argmax_t: f64,
    /// Relative slack: `Holds` iff `max_ratio ≤ 1 + tolerance`.
    pub tolerance: f64,
    /// Denominators below this value are replaced by it.
    pub abs_floor: f64,
    pub verdict: Verdict,
    pub constants: BTreeMap<String, f64>,
    /// Secondary traces on the same times.
    pub extra: BTreeMap<String, Vec<f64>>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        mode: CheckMode,
        times: Vec<f64>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tolerance: f64,
        abs_floor: f64,
    ) -> Self {
        assert_eq!(times.len(), lhs.len(), "lhs trace length");
        assert_eq!(times.len(), rhs.len(), "rhs trace length");
        let mut report = Self {
            name: name.into(),
            mode,
            times,
            lhs,
            rhs,
            max_ratio: 0.0,
            argmax_t: 0.0,
            tolerance,
            abs_floor,
            verdict: Verdict::Holds,
            constants: BTreeMap::new(),
            extra: BTreeMap::new(),
            notes: Vec::new(),
        };
        report.evaluate();
        report
    }

    pub fn ratio_at(&self, i: usize) -> f64 {
        ratio(self.lhs[i], self.rhs[i], self.abs_floor)
    }

    pub fn ratios(&self) -> Vec<f64> {
        (0..self.times.len()).map(|i| self.ratio_at(i)).collect()
    }

    fn evaluate(&mut self) {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..self.times.len() {
            let r = self.ratio_at(i);
            // NaN propagates as a violation.
            if r.is_nan() || r > best.0 {
                best = (r, self.times[i]);
                if r.is_nan() {
                    break;
                }
            }
        }
        if self.times.is_empty() {
            best = (0.0, 0.0);
        }
        self.max_ratio = best.0;
        self.argmax_t = best.1;
        self.verdict = self.verdict_for(None);
    }

    fn verdict_for(&self, threshold: Option<f64>) -> Verdict {
        let r = self.max_ratio;
        if r <= 1.0 + self.tolerance {
            return Verdict::Holds;
        }
        match self.mode {
            CheckMode::Strict => Verdict::Violated,
            CheckMode::Ratio | CheckMode::Informational if !r.is_finite() => Verdict::Violated,
            CheckMode::Ratio => match threshold {
                Some(limit) if r > limit => Verdict::Violated,
                _ => Verdict::HoldsUpToConstant,
            },
            CheckMode::Informational => Verdict::HoldsUpToConstant,
        }
    }

    /// Treats ratio-mode reports above `threshold` as violations.
    pub fn escalate(&mut self, threshold: f64) {
        if self.mode == CheckMode::Ratio {
            self.verdict = self.verdict_for(Some(threshold));
            self.notes.push(format!("escalated: ratios above {threshold} count as violations"));
        }
    }

    /// A violation that should fail a run: strict or escalated ratio mode.
    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Violated && self.mode != CheckMode::Informational
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_owned(), value);
        self
    }

    pub fn with_extra(mut self, key: &str, trace: Vec<f64>) -> Self {
        assert_eq!(trace.len(), self.times.len(), "extra trace length");
        self.extra.insert(key.to_owned(), trace);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64, floor: f64) -> f64 {
    let den = rhs.max(floor);
    if den > 0.0 {
        lhs / den
    } else if lhs <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(f, "  mode       {:?}", self.mode)?;
        writeln!(f, "  verdict    {:?}", self.verdict)?;
        writeln!(f, "  max ratio  {:.6e} at t = {}", self.max_ratio, self.argmax_t)?;
        writeln!(f, "  tolerance  {:e}", self.tolerance)?;
        for (k, v) in &self.constants {
            writeln!(f, "  constant   {k} = {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note       {n}")?;
        }
        Ok(())
    }
}
