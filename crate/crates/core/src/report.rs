//! Tabular convergence diagnostics shared by every check.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub n: usize,
    pub value: f64,
    pub reference: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Rows of `(n, computed, reference, gap)` plus named pass/fail verdicts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub title: String,
    pub rows: Vec<ReportRow>,
    pub verdicts: Vec<Verdict>,
}

impl ConvergenceReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, label: impl Into<String>, n: usize, value: f64, reference: f64) -> &ReportRow {
        let abs_gap = (value - reference).abs();
        let rel_gap = if reference != 0.0 {
            abs_gap / reference.abs()
        } else {
            abs_gap
        };
        self.rows.push(ReportRow {
            label: label.into(),
            n,
            value,
            reference,
            abs_gap,
            rel_gap,
        });
        self.rows.last().unwrap()
    }

    pub fn verdict(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Rows carrying `label`, in insertion order.
    pub fn series<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.label == label)
    }

    pub fn merge(&mut self, other: ConvergenceReport) {
        self.rows.extend(other.rows);
        self.verdicts.extend(other.verdicts);
    }

    /// Row table as CSV. Floats use the shortest round-trip representation,
    /// so equal reports give identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,n,value,reference,abs_gap,rel_gap\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{:e}",
                r.label, r.n, r.value, r.reference, r.abs_gap, r.rel_gap
            );
        }
        out
    }

    pub fn verdicts_csv(&self) -> String {
        let mut out = String::from("check,passed,detail\n");
        for v in &self.verdicts {
            let _ = writeln!(out, "{},{},\"{}\"", v.name, v.passed, v.detail.replace('"', "'"));
        }
        out
    }
}

/// True when each gap is at most `noise_factor` times the previous one.
pub fn gaps_non_increasing(gaps: &[f64], noise_factor: f64) -> bool {
    gaps.windows(2).all(|w| w[1] <= noise_factor * w[0])
}
