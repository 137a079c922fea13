use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Tolerances;
use crate::error::Result;
use crate::io;

pub const REPORT_SCHEMA: &str = "ncilw.experiment_report";

/// Exact-vs-numeric error at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub t: f64,
    pub max: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// Field of [`Tolerances`] this verdict is judged against.
    pub tolerance: String,
    pub limit: f64,
    pub value: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::Below => "<",
            Comparison::Above => ">",
        };
        write!(
            f,
            "[{}] {}: {:.3e} {op} {:.1e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PoleDiagnostics {
    pub min_pair_distance: f64,
    pub min_strip_margin: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub collision_time: Option<f64>,
}

/// Machine-checkable outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub parameters: serde_json::Value,
    pub tolerances: Tolerances,
    pub errors: Vec<ErrorNorms>,
    pub drift: Option<[f64; 3]>,
    pub poles: Option<PoleDiagnostics>,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(id: &str, parameters: &impl Serialize, tolerances: &Tolerances) -> Self {
        ExperimentReport {
            id: id.to_owned(),
            parameters: serde_json::to_value(parameters).unwrap_or(serde_json::Value::Null),
            tolerances: tolerances.clone(),
            errors: Vec::new(),
            drift: None,
            poles: None,
            metrics: BTreeMap::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    fn judge(&mut self, name: String, tolerance: &str, value: f64, comparison: Comparison) -> bool {
        let limit = self
            .tolerances
            .get(tolerance)
            .unwrap_or_else(|| panic!("unknown tolerance `{tolerance}`"));
        let passed = value.is_finite()
            && match comparison {
                Comparison::Below => value < limit,
                Comparison::Above => value > limit,
            };
        self.verdicts.push(Verdict {
            name,
            tolerance: tolerance.to_owned(),
            limit,
            value,
            comparison,
            passed,
        });
        passed
    }

    /// Records a verdict that passes when `value < tolerances[tolerance]`.
    pub fn below(&mut self, name: impl Into<String>, tolerance: &str, value: f64) -> bool {
        self.judge(name.into(), tolerance, value, Comparison::Below)
    }

    /// Records a verdict that passes when `value > tolerances[tolerance]`.
    pub fn above(&mut self, name: impl Into<String>, tolerance: &str, value: f64) -> bool {
        self.judge(name.into(), tolerance, value, Comparison::Above)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    /// Largest value among verdicts whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .filter(|v| v.name.starts_with(prefix))
            .max_by(|a, b| match a.comparison {
                Comparison::Below => a.value.total_cmp(&b.value),
                Comparison::Above => b.value.total_cmp(&a.value),
            })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, REPORT_SCHEMA, self)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        io::read_json(path, REPORT_SCHEMA)
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} ({})",
            self.id,
            if self.passed() { "pass" } else { "FAIL" }
        )?;
        for v in &self.verdicts {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_use_named_tolerances() {
        let mut r = ExperimentReport::new("demo", &(), &Tolerances::default());
        assert!(r.below("swap z1", "swap", 5e-4));
        assert!(!r.below("swap z2", "swap", 2e-3));
        assert!(!r.below("nan", "swap", f64::NAN));
        assert!(r.above("shift", "phase_shift_min", 0.5));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 2);
        assert_eq!(r.worst("swap").unwrap().value, 2e-3);
        assert_eq!(r.verdicts[0].limit, 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = ExperimentReport::new("demo", &[1.0, 2.0], &Tolerances::default());
        r.metric("x", 0.25);
        r.below("a", "residual", 1e-9);
        r.write_json(dir.path().join("r.json")).unwrap();
        assert_eq!(
            ExperimentReport::read_json(dir.path().join("r.json")).unwrap(),
            r
        );
    }
}
