//! Coarse/fine tables produced by the demo pipelines, with CSV and JSON writers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: f64,
    pub exact: f64,
    pub computed: f64,
    pub abs_error: f64,
}

impl ReportRow {
    pub fn new(t: f64, exact: f64, computed: f64) -> Self {
        Self {
            t,
            exact,
            computed,
            abs_error: (computed - exact).abs(),
        }
    }
}

/// What the `exact` column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactKind {
    ClosedForm,
    /// A higher-resolution run of the same pipeline.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub pipeline: String,
    pub exact_kind: ExactKind,
    /// Pipeline-specific extras (iteration counts, discrepancies, ...).
    pub metadata: Map<String, Value>,
    pub coarse: Vec<ReportRow>,
    pub fine: Vec<ReportRow>,
    pub max_coarse_error: f64,
    pub max_fine_error: f64,
}

fn max_error(rows: &[ReportRow]) -> f64 {
    rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
}

impl SolveReport {
    pub fn new(pipeline: impl Into<String>, exact_kind: ExactKind, coarse: Vec<ReportRow>, fine: Vec<ReportRow>) -> Self {
        Self {
            pipeline: pipeline.into(),
            exact_kind,
            metadata: Map::new(),
            max_coarse_error: max_error(&coarse),
            max_fine_error: max_error(&fine),
            coarse,
            fine,
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata
            .insert(key.to_string(), serde_json::to_value(value).expect("metadata is serializable"));
        self
    }

    pub fn computed(&self) -> Vec<f64> {
        self.coarse.iter().map(|r| r.computed).collect()
    }

    /// Everything except the tables, as one JSON object.
    pub fn header(&self) -> Value {
        let mut m = self.metadata.clone();
        m.insert("pipeline".into(), Value::String(self.pipeline.clone()));
        m.insert("exact_column".into(), serde_json::to_value(self.exact_kind).expect("enum"));
        m.insert("max_coarse_error".into(), self.max_coarse_error.into());
        m.insert("max_fine_error".into(), self.max_fine_error.into());
        Value::Object(m)
    }

    /// `# metadata: {...}` followed by the `# coarse` and `# fine` tables.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# metadata: {}\n", self.header());
        for (name, rows) in [("coarse", &self.coarse), ("fine", &self.fine)] {
            out.push_str("# ");
            out.push_str(name);
            out.push_str("\nt,exact,computed,abs_error\n");
            for r in rows {
                writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.exact, r.computed, r.abs_error)
                    .expect("writing to a String");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        v["metadata"] = self.header();
        let mut s = serde_json::to_string_pretty(&v).expect("report is serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SolveReport {
        let coarse = vec![ReportRow::new(0.0, 1.0, 1.25), ReportRow::new(1.0, 2.0, 2.0)];
        let fine = vec![ReportRow::new(0.5, 1.5, 1.0)];
        SolveReport::new("demo", ExactKind::ClosedForm, coarse, fine).with("n", 2)
    }

    #[test]
    fn maxima_follow_rows() {
        let r = sample();
        assert_eq!(r.max_coarse_error, 0.25);
        assert_eq!(r.max_fine_error, 0.5);
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# metadata: {"));
        assert_eq!(lines[1], "# coarse");
        assert_eq!(lines[2], "t,exact,computed,abs_error");
        assert_eq!(lines[3], "0.0000000000000000e0,1.0000000000000000e0,1.2500000000000000e0,2.5000000000000000e-1");
        assert_eq!(lines[5], "# fine");
        assert_eq!(lines.len(), 8);
        let meta: Value = serde_json::from_str(lines[0].trim_start_matches("# metadata: ")).unwrap();
        assert_eq!(meta["n"], 2);
        assert_eq!(meta["exact_column"], "closed_form");
    }

    #[test]
    fn json_round_trips_floats() {
        let r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["coarse"][0]["computed"].as_f64(), Some(1.25));
        assert_eq!(v["metadata"]["pipeline"], "demo");
    }
}
