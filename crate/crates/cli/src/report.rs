//! Machine-readable run records.

use gbs_qec::{CorrectionReport, ErrorSpec64, GbsLabel, Mode, Signature};
use serde::{Deserialize, Serialize};

/// Outcome of one protocol run as printed by `correct` and `sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: GbsLabel,
    pub errors: ErrorSpec64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub batch_parity: bool,
    /// `|⟨original|corrected⟩|`; absent when the protocol aborted.
    pub fidelity: Option<f64>,
    pub signature: Option<Signature>,
    pub report: Option<CorrectionReport>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// Aggregate over a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Lowest fidelity seen; `0` if any run aborted.
    pub worst_fidelity: f64,
}

impl SweepSummary {
    pub fn of(reports: &[RunReport]) -> Self {
        let passed = reports.iter().filter(|r| r.pass).count();
        let worst_fidelity = reports
            .iter()
            .map(|r| r.fidelity.unwrap_or(0.0))
            .fold(1.0f64, f64::min);
        Self {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
            worst_fidelity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub summary: SweepSummary,
    pub cases: Vec<RunReport>,
}

/// Flat row for CSV output.
#[derive(Serialize)]
pub(crate) struct CsvRow<'a> {
    label: String,
    errors: String,
    mode: Mode,
    fidelity: Option<f64>,
    phi_f: Option<u8>,
    p_f: Option<String>,
    restored_sign: Option<char>,
    relative_flip_pattern: Option<u64>,
    pass: bool,
    failure: Option<&'a str>,
    wall_time_ms: Option<f64>,
}

pub(crate) fn bits(b: &[u8]) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

impl<'a> From<&'a RunReport> for CsvRow<'a> {
    fn from(r: &'a RunReport) -> Self {
        Self {
            label: r.label.to_string(),
            errors: r.errors.to_string(),
            mode: r.mode,
            fidelity: r.fidelity,
            phi_f: r.report.as_ref().map(|c| c.phi_f),
            p_f: r.report.as_ref().map(|c| bits(&c.p_f)),
            restored_sign: r.report.as_ref().map(|c| c.restored_sign.as_char()),
            relative_flip_pattern: r.report.as_ref().map(|c| c.relative_flip_pattern),
            pass: r.pass,
            failure: r.failure.as_deref(),
            wall_time_ms: r.wall_time_ms,
        }
    }
}

/// One human-readable line.
pub fn text_line(r: &RunReport) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let fid = r
        .fidelity
        .map(|f| format!("{f:.12}"))
        .unwrap_or_else(|| "-".into());
    let mut line = format!(
        "{verdict} {} mode={} errors=[{}] fidelity={fid}",
        r.label, r.mode, r.errors
    );
    if let Some(c) = &r.report {
        line.push_str(&format!(
            " phi_f={} p_f={} sign={} flips={:0width$b}",
            c.phi_f,
            bits(&c.p_f),
            c.restored_sign.as_char(),
            c.relative_flip_pattern,
            width = r.label.n()
        ));
    }
    if let Some(f) = &r.failure {
        line.push_str(&format!(" ({f})"));
    }
    if let Some(t) = r.wall_time_ms {
        line.push_str(&format!(" {t:.3}ms"));
    }
    line
}
