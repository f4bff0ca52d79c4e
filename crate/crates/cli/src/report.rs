//! Report and verdict types, and the byte-stable writers.

use bilinear_calculus::tolerances::Tolerances;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Every check a verdict may name, with the module that defines it.
pub const CHECKS: &[(&str, &str)] = &[
    ("seminorm_stabilization", "symbol-algebra"),
    ("identity_multiplication", "bilinear-operator"),
    ("apply_route_agreement", "bilinear-operator"),
    ("duality_residual", "transpose-calculus"),
    ("route_agreement", "transpose-calculus"),
    ("expansion_exact", "transpose-calculus"),
    ("transpose_class_invariance", "transpose-calculus"),
    ("remainder_order", "transpose-calculus"),
    ("borel_class", "asymptotic-sum"),
    ("borel_remainder", "asymptotic-sum"),
    ("schedule_independence", "asymptotic-sum"),
    ("expansion_criterion", "asymptotic-sum"),
    ("spurious_tail_detected", "asymptotic-sum"),
    ("kernel_exponent", "kernel-estimates"),
    ("kernel_log_blowup", "kernel-estimates"),
    ("kernel_refinement", "kernel-estimates"),
    ("norm_no_growth", "bounds-suite"),
    ("unbounded_trend_detected", "bounds-suite"),
    ("holder_bound", "bounds-suite"),
    ("sobolev_threshold", "bounds-suite"),
    ("l2_wsinf_no_growth", "bounds-suite"),
    ("l2_wsinf_identity", "bounds-suite"),
    ("leibniz_reconstruction", "bounds-suite"),
    ("leibniz_identity", "bounds-suite"),
    ("phi_partition", "bounds-suite"),
    ("leibniz_ratio_no_growth", "bounds-suite"),
];

pub fn module_of(check: &str) -> &'static str {
    CHECKS
        .iter()
        .find(|(c, _)| *c == check)
        .map(|(_, m)| *m)
        .unwrap_or_else(|| panic!("unregistered check `{check}`"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Indeterminate,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `measured <= expected + tolerance`.
    AtMost,
    /// `|measured - expected| <= tolerance`.
    Within,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub module: String,
    pub subject: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    fn judged(
        check: &str,
        subject: &str,
        measured: f64,
        expected: f64,
        tolerance: f64,
        relation: Relation,
    ) -> Self {
        let ok = match relation {
            Relation::AtMost => measured <= expected + tolerance,
            Relation::Within => (measured - expected).abs() <= tolerance,
        };
        Verdict {
            check: check.to_string(),
            module: module_of(check).to_string(),
            subject: subject.to_string(),
            status: if measured.is_nan() {
                Status::Indeterminate
            } else if ok {
                Status::Pass
            } else {
                Status::Fail
            },
            measured: measured.is_finite().then_some(measured),
            expected,
            tolerance,
            relation,
            note: None,
        }
    }

    pub fn at_most(check: &str, subject: &str, measured: f64, bound: f64) -> Self {
        Self::judged(check, subject, measured, 0.0, bound, Relation::AtMost)
    }

    pub fn below(check: &str, subject: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::judged(
            check,
            subject,
            measured,
            expected,
            tolerance,
            Relation::AtMost,
        )
    }

    pub fn within(
        check: &str,
        subject: &str,
        measured: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        Self::judged(
            check,
            subject,
            measured,
            expected,
            tolerance,
            Relation::Within,
        )
    }

    /// A yes/no check recorded as `measured = 1` (yes) against `expected = 1`.
    pub fn holds(check: &str, subject: &str, holds: bool) -> Self {
        Self::judged(
            check,
            subject,
            if holds { 1.0 } else { 0.0 },
            1.0,
            0.0,
            Relation::Within,
        )
    }

    pub fn indeterminate(
        check: &str,
        subject: &str,
        expected: f64,
        tolerance: f64,
        note: String,
    ) -> Self {
        let mut v = Self::judged(
            check,
            subject,
            f64::NAN,
            expected,
            tolerance,
            Relation::AtMost,
        );
        v.note = Some(note);
        v
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A CSV curve file: header plus rows, written with RFC-4180 quoting.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, T>(&mut self, row: I)
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        self.rows
            .push(row.into_iter().map(|c| c.to_string()).collect());
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub tolerances: Tolerances,
    pub results: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub status: Status,
    pub csv_files: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<CsvTable>,
}

impl Report {
    pub fn new(
        command: &str,
        seed: u64,
        config: serde_json::Value,
        tolerances: Tolerances,
    ) -> Self {
        Report {
            tool: "bsym".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            tolerances,
            results: serde_json::Value::Object(Default::default()),
            verdicts: Vec::new(),
            status: Status::Pass,
            csv_files: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("results serialize");
        if let serde_json::Value::Object(map) = &mut self.results {
            map.insert(key.to_string(), v);
        }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn table(&mut self, t: CsvTable) {
        self.tables.push(t);
    }

    /// Overall status: any failure fails, otherwise any indeterminate is indeterminate.
    pub fn finish(&mut self) {
        self.status = self
            .verdicts
            .iter()
            .map(|v| v.status)
            .max()
            .unwrap_or(Status::Pass);
        self.csv_files = self.tables.iter().map(|t| t.name.clone()).collect();
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Indeterminate => 2,
            Status::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Write `report.json` and every CSV table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::new();
        let path = dir.join("report.json");
        fs::write(&path, self.to_json()).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
        for t in &self.tables {
            let path = dir.join(&t.name);
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::io(&path, e.into()))?;
            w.write_record(&t.header)
                .map_err(|e| CliError::io(&path, e.into()))?;
            for row in &t.rows {
                w.write_record(row)
                    .map_err(|e| CliError::io(&path, e.into()))?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_are_unique() {
        let mut names: Vec<&str> = CHECKS.iter().map(|(c, _)| *c).collect();
        names.sort_unstable();
        let n = names.len();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn verdict_relations() {
        assert_eq!(
            Verdict::at_most("duality_residual", "s", 1e-12, 1e-10).status,
            Status::Pass
        );
        assert_eq!(
            Verdict::at_most("duality_residual", "s", 1e-9, 1e-10).status,
            Status::Fail
        );
        assert_eq!(
            Verdict::within("kernel_exponent", "s", -2.3, -2.0, 0.4).status,
            Status::Pass
        );
        assert_eq!(
            Verdict::within("kernel_exponent", "s", -1.5, -2.0, 0.4).status,
            Status::Fail
        );
        assert_eq!(
            Verdict::holds("borel_class", "s", false).status,
            Status::Fail
        );
        let v = Verdict::indeterminate("remainder_order", "s", -1.0, 0.35, "too few shells".into());
        assert_eq!(v.status, Status::Indeterminate);
        assert_eq!(v.measured, None);
    }

    #[test]
    fn status_aggregation() {
        let mut r = Report::new("x", 0, serde_json::json!({}), Tolerances::default());
        r.verdict(Verdict::holds("borel_class", "a", true));
        r.finish();
        assert_eq!(r.exit_code(), 0);
        r.verdict(Verdict::indeterminate(
            "remainder_order",
            "a",
            0.0,
            0.0,
            String::new(),
        ));
        r.finish();
        assert_eq!(r.exit_code(), 2);
        r.verdict(Verdict::holds("borel_class", "b", false));
        r.finish();
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn csv_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("x", 0, serde_json::json!({}), Tolerances::default());
        let mut t = CsvTable::new("t.csv", &["a", "b"]);
        t.push(["1", "has,comma"]);
        t.push(["say \"hi\"", "2"]);
        r.table(t);
        r.finish();
        r.write(dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "a,b\n1,\"has,comma\"\n\"say \"\"hi\"\"\",2\n");
    }
}
