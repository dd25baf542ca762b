//! Deterministic JSON report rendering.
//!
//! The report body must be byte-identical across runs with the same
//! scenario and seed, so the emitter is hand-rolled: fixed key order,
//! fixed float formatting (17 significant digits), records sorted by
//! `(check, sample index, label)`, and the wall-time measurement kept on
//! its own line so consumers can exclude it from comparisons.

use std::fmt::Write as _;

/// One measured quantity at one sample.
#[derive(Clone, Debug)]
pub struct Record {
    pub check: String,
    pub index: usize,
    /// Sample point in chart coordinates (or `[t]` for `t`-sweep checks).
    pub point: Vec<f64>,
    pub label: String,
    /// Raw measured values backing the residual.
    pub values: Vec<f64>,
    pub residual: f64,
    /// Whether this record is consistent with the check's expectation.
    pub pass: bool,
}

/// Aggregated result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub expect: String,
    pub verdict: String,
    pub passed: bool,
    pub records: Vec<Record>,
}

/// Whole-run summary plus sorted records.
pub struct Report {
    pub scenario: String,
    pub outcomes: Vec<CheckOutcome>,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.outcomes
            .iter()
            .flat_map(|o| &o.records)
            .map(|r| r.residual)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }

    /// Render the versioned JSON document.
    pub fn to_json(&self) -> String {
        let mut records: Vec<&Record> = self.outcomes.iter().flat_map(|o| &o.records).collect();
        records.sort_by(|a, b| {
            (&a.check, a.index, &a.label).cmp(&(&b.check, b.index, &b.label))
        });

        let mut s = String::new();
        s.push_str("{\n");
        s.push_str("  \"schema_version\": 1,\n");
        let _ = writeln!(s, "  \"scenario\": {},", json_string(&self.scenario));
        s.push_str("  \"summary\": {\n");
        let _ = writeln!(s, "    \"checks_run\": {},", self.outcomes.len());
        let _ = writeln!(s, "    \"records\": {},", records.len());
        let _ = writeln!(s, "    \"max_residual\": {},", json_float(self.max_residual()));
        let _ = writeln!(
            s,
            "    \"verdict\": {},",
            json_string(if self.passed() { "pass" } else { "fail" })
        );
        let _ = writeln!(s, "    \"wall_time_ms\": {}", self.wall_time_ms);
        s.push_str("  },\n");
        s.push_str("  \"checks\": [\n");
        for (i, o) in self.outcomes.iter().enumerate() {
            let _ = write!(
                s,
                "    {{\"name\": {}, \"expect\": {}, \"verdict\": {}, \"passed\": {}}}",
                json_string(&o.name),
                json_string(&o.expect),
                json_string(&o.verdict),
                o.passed
            );
            s.push_str(if i + 1 < self.outcomes.len() { ",\n" } else { "\n" });
        }
        s.push_str("  ],\n");
        s.push_str("  \"records\": [\n");
        for (i, r) in records.iter().enumerate() {
            s.push_str("    ");
            render_record(&mut s, r);
            s.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
        }
        s.push_str("  ]\n");
        s.push_str("}\n");
        s
    }
}

fn render_record(s: &mut String, r: &Record) {
    let _ = write!(
        s,
        "{{\"check\": {}, \"index\": {}, \"point\": ",
        json_string(&r.check),
        r.index
    );
    render_floats(s, &r.point);
    let _ = write!(s, ", \"label\": {}, \"values\": ", json_string(&r.label));
    render_floats(s, &r.values);
    let _ = write!(
        s,
        ", \"residual\": {}, \"pass\": {}}}",
        json_float(r.residual),
        r.pass
    );
}

fn render_floats(s: &mut String, vals: &[f64]) {
    s.push('[');
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&json_float(*v));
    }
    s.push(']');
}

/// 17 significant digits; non-finite values become `null` to keep the
/// document valid JSON.
pub fn json_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

pub fn json_string(v: &str) -> String {
    let mut out = String::with_capacity(v.len() + 2);
    out.push('"');
    for ch in v.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            ch if (ch as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", ch as u32);
            }
            ch => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// Report body with the wall-time line removed — the unit of
/// byte-for-byte reproducibility.
pub fn strip_wall_time(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.contains("\"wall_time_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}
