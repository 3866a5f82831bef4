//! Report rows, CSV output and the aligned summary table.

use std::io::Write;

use crate::HarnessError;

/// How a row decides pass/fail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    /// `ratio = lhs/rhs ≤ 1 + tolerance`.
    Bound,
    /// `ratio = lhs/rhs ≤ tolerance`; `lhs` is a residual, `rhs` its scale.
    Residual,
    /// `lower ≤ ratio ≤ 1 + tolerance`.
    Band { lower: f64 },
    /// Recorded, never fails.
    Info,
}

impl Check {
    fn label(&self) -> String {
        match self {
            Self::Bound => "bound".into(),
            Self::Residual => "residual".into(),
            Self::Band { lower } => format!("band>={lower}"),
            Self::Info => "info".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub case: String,
    pub check: Check,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub refine: u32,
}

fn quotient(lhs: f64, rhs: f64) -> f64 {
    if rhs != 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl ReportRow {
    pub fn new(experiment: &str, case: impl Into<String>, check: Check, lhs: f64, rhs: f64, tolerance: f64, refine: u32) -> Self {
        let ratio = quotient(lhs, rhs);
        let pass = match check {
            Check::Bound => ratio <= 1.0 + tolerance,
            Check::Residual => ratio <= tolerance,
            Check::Band { lower } => ratio >= lower && ratio <= 1.0 + tolerance,
            Check::Info => true,
        };
        Self { experiment: experiment.to_owned(), case: case.into(), check, lhs, rhs, ratio, tolerance, pass, refine }
    }

    pub fn bound(experiment: &str, case: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, refine: u32) -> Self {
        Self::new(experiment, case, Check::Bound, lhs, rhs, tolerance, refine)
    }

    pub fn residual(experiment: &str, case: impl Into<String>, residual: f64, scale: f64, tolerance: f64, refine: u32) -> Self {
        Self::new(experiment, case, Check::Residual, residual, scale, tolerance, refine)
    }

    pub fn info(experiment: &str, case: impl Into<String>, lhs: f64, rhs: f64, refine: u32) -> Self {
        Self::new(experiment, case, Check::Info, lhs, rhs, 0.0, refine)
    }
}

pub const CSV_HEADER: [&str; 9] = ["experiment", "case", "check", "lhs", "rhs", "ratio", "tolerance", "pass", "refine"];

/// The fixed number format shared by every CSV this crate writes.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Writes rows as CSV with fixed-precision numbers, so equal inputs give equal bytes.
pub fn write_rows<W: Write>(w: W, rows: &[ReportRow]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.experiment.clone(),
            r.case.clone(),
            r.check.label(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            num(r.tolerance),
            r.pass.to_string(),
            r.refine.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes an arbitrary table; floats use the same fixed format as report rows.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r.iter().map(|x| num(*x)))?;
    }
    out.flush()?;
    Ok(())
}

/// Left-aligned text table with two spaces between columns.
pub fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_owned() + "\n"
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

/// Per-experiment totals.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryLine {
    pub experiment: String,
    pub rows: usize,
    pub failures: usize,
    pub worst_ratio: f64,
}

pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryLine> {
    let mut out: Vec<SummaryLine> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|s| s.experiment == r.experiment) {
            Some(i) => i,
            None => {
                out.push(SummaryLine { experiment: r.experiment.clone(), rows: 0, failures: 0, worst_ratio: 0.0 });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.rows += 1;
        if !r.pass {
            s.failures += 1;
        }
        if r.check != Check::Info && r.ratio.is_finite() {
            s.worst_ratio = s.worst_ratio.max(r.ratio);
        } else if r.check != Check::Info {
            s.worst_ratio = f64::INFINITY;
        }
    }
    out
}

/// Aligned plain-text table of [`summarize`].
pub fn summary_table(rows: &[ReportRow]) -> String {
    let lines = summarize(rows);
    let width = lines.iter().map(|l| l.experiment.len()).max().unwrap_or(10).max(10);
    let mut s = format!("{:<width$}  {:>6}  {:>8}  {:>12}  {}\n", "experiment", "rows", "failures", "worst ratio", "status");
    for l in &lines {
        let status = if l.failures == 0 { "PASS" } else { "FAIL" };
        s.push_str(&format!("{:<width$}  {:>6}  {:>8}  {:>12.4e}  {}\n", l.experiment, l.rows, l.failures, l.worst_ratio, status));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rules() {
        assert!(ReportRow::bound("e", "c", 1.0, 1.0, 0.0, 0).pass);
        assert!(!ReportRow::bound("e", "c", 1.1, 1.0, 0.05, 0).pass);
        assert!(ReportRow::residual("e", "c", 1e-9, 1.0, 1e-8, 0).pass);
        assert!(!ReportRow::residual("e", "c", 1e-9, 0.0, 1e-8, 0).pass);
        let band = Check::Band { lower: 0.8 };
        assert!(!ReportRow::new("e", "c", band, 0.5, 1.0, 0.05, 0).pass);
        assert!(ReportRow::new("e", "c", band, 0.9, 1.0, 0.05, 0).pass);
        assert!(ReportRow::info("e", "c", f64::NAN, 1.0, 0).pass);
    }

    #[test]
    fn csv_and_summary() {
        let rows = vec![ReportRow::bound("a", "x,1", 1.0, 2.0, 0.0, 0), ReportRow::residual("b", "y", 1.0, 1.0, 0.1, 1)];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,case,check,lhs"));
        assert!(text.contains("\"x,1\""));
        let t = summary_table(&rows);
        assert!(t.contains("PASS") && t.contains("FAIL"));
    }
}
