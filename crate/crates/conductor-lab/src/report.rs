//! Machine-readable reports. Field order is fixed by the struct declarations
//! and every number is an exact rational string, so a report is byte-identical
//! across runs and thread counts. Wall-clock timing goes to stderr, never into
//! the report payload.

use std::io::Write;
use std::path::Path;

use conductor_core::plfun::PLFun;
use conductor_core::ramify::{CheckResult, CheckStatus, NearbyCyclesLedger};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub status: ReportStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub characters: Vec<CharacterReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<PLFun>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub zero_cases: Vec<ZeroCase>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterReport {
    pub index: usize,
    pub sw_fun: PLFun,
    /// (radius, phi) samples, one per piece midpoint.
    pub phi_vals: Vec<(String, String)>,
    pub convex: bool,
    pub integer_slopes: bool,
    pub checks: Vec<CheckResult>,
    pub ledger: NearbyCyclesLedger,
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceReport {
    pub interval: (String, String),
    pub delta_f: u64,
    pub components: Vec<(u64, i64)>,
    pub sigma: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroCase {
    pub label: String,
    pub interval: (String, String),
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

impl Report {
    pub fn new(scenario: &str, command: &str) -> Self {
        Report {
            scenario: scenario.to_string(),
            command: command.to_string(),
            status: ReportStatus::Pass,
            characters: Vec::new(),
            discriminant: None,
            pieces: Vec::new(),
            zero_cases: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn record_failures(&mut self) {
        let char_fail = self
            .characters
            .iter()
            .any(|c| c.checks.iter().any(|k| k.status == CheckStatus::Fail) || !c.convex || !c.integer_slopes);
        let check_fail = self.checks.iter().any(|k| k.status == CheckStatus::Fail);
        let zero_fail = self.zero_cases.iter().any(|z| !z.ok);
        if char_fail || check_fail || zero_fail {
            self.status = ReportStatus::Fail;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Writes a JUnit-style XML summary for a corpus run.
pub fn write_junit(path: &Path, results: &[(String, bool, String)]) -> std::io::Result<()> {
    let failures = results.iter().filter(|(_, ok, _)| !ok).count();
    let mut f = std::fs::File::create(path)?;
    writeln!(f, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        f,
        r#"<testsuite name="conductor-lab corpus" tests="{}" failures="{}">"#,
        results.len(),
        failures
    )?;
    for (id, ok, detail) in results {
        if *ok {
            writeln!(f, r#"  <testcase name="{}"/>"#, xml_escape(id))?;
        } else {
            writeln!(f, r#"  <testcase name="{}">"#, xml_escape(id))?;
            writeln!(
                f,
                r#"    <failure message="{}"/>"#,
                xml_escape(detail)
            )?;
            writeln!(f, r#"  </testcase>"#)?;
        }
    }
    writeln!(f, "</testsuite>")?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
