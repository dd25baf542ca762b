//! Subcommand drivers. Exit codes: 0 all checks matched their
//! expectations, 2 at least one check failed, 1 the configuration was
//! unusable (unknown names, malformed expressions, degenerate metrics,
//! I/O problems).

use std::time::Instant;

use crate::checks::{first_failing_t, run_check, CheckContext};
use crate::presets;
use crate::report::Report;
use crate::scenario::{
    self, default_t_range, generators_from_exprs, parse_scenario, CliOverrides, ConfigError,
    GeneratorExprs,
};

use tgverify::gnatural::GeneratorSet;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

fn fail_config(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_CONFIG
}

/// `verify --scenario <name-or-path>`: run every check in the scenario
/// and emit the JSON report (stdout, or `--report <path>`).
pub fn run_verify(
    scenario_arg: &str,
    report_path: Option<&str>,
    over: &CliOverrides,
) -> i32 {
    let (label, text) = match load_scenario(scenario_arg) {
        Ok(pair) => pair,
        Err(e) => return fail_config(e),
    };
    let doc = match parse_scenario(&text) {
        Ok(d) => d,
        Err(e) => return fail_config(e),
    };
    let resolved = match scenario::resolve(&doc, over) {
        Ok(r) => r,
        Err(e) => return fail_config(e),
    };

    let ctx = CheckContext {
        m: &resolved.manifold,
        u: &*resolved.field,
        gens: &resolved.gens,
        sample: &resolved.sample,
        tol_analytic: resolved.tol_analytic,
        tol_oracle: resolved.tol_oracle,
        t_range: resolved.t_range,
    };

    let started = Instant::now();
    let mut outcomes = Vec::with_capacity(resolved.checks.len());
    for check in &resolved.checks {
        match run_check(check, &ctx) {
            Ok(outcome) => outcomes.push(outcome),
            Err(e) => return fail_config(e),
        }
    }
    let report = Report {
        scenario: label,
        outcomes,
        wall_time_ms: started.elapsed().as_millis(),
    };

    for o in &report.outcomes {
        eprintln!(
            "{} {:32} expect {:24} verdict {:24} ({} records)",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.expect,
            o.verdict,
            o.records.len()
        );
    }
    eprintln!(
        "{}: {} checks, max residual {:.3e}, {} ms",
        if report.passed() { "pass" } else { "FAIL" },
        report.outcomes.len(),
        report.max_residual(),
        report.wall_time_ms
    );

    let json = report.to_json();
    match report_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return fail_config(format!("cannot write report to {path}: {e}"));
            }
        }
        None => println!("{json}"),
    }
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

/// The scenario argument is an embedded preset name, else a file path.
fn load_scenario(arg: &str) -> Result<(String, String), ConfigError> {
    if let Some(p) = presets::find(arg) {
        return Ok((p.name.to_owned(), p.json.to_owned()));
    }
    match std::fs::read_to_string(arg) {
        Ok(text) => Ok((arg.to_owned(), text)),
        Err(e) => Err(ConfigError(format!(
            "`{arg}` is neither an embedded preset nor a readable file ({e}); \
             run `tgverify presets` for the list"
        ))),
    }
}

pub fn run_presets() -> i32 {
    print!("{}", presets::listing());
    EXIT_PASS
}

/// `check-metric --spec <name|file|inline> --tmax <t>`: sweep the weight
/// nondegeneracy functions and report the extrema.
pub fn run_check_metric(spec: &str, tmax: f64) -> i32 {
    let gens = match load_generators(spec) {
        Ok(g) => g,
        Err(e) => return fail_config(e),
    };
    if !tmax.is_finite() || tmax <= gens.t_lower {
        return fail_config(format!(
            "tmax {tmax} does not leave an admissible interval (t must exceed {})",
            gens.t_lower
        ));
    }
    let (lo, _) = default_t_range(&gens);
    if lo >= tmax {
        return fail_config(format!(
            "tmax {tmax} must exceed the sweep start {lo} implied by the metric's domain"
        ));
    }
    let range = (lo, tmax);
    let steps = 1000;
    let rep = match gens.check_nondegenerate(range, steps, false) {
        Ok(r) => r,
        Err(e) => return fail_config(e),
    };
    println!("metric `{}` on t in [{}, {}]:", gens.name, range.0, range.1);
    println!(
        "  min |a(t)| = {:.6e} at t = {:.4}",
        rep.min_abs_a, rep.t_at_min_a
    );
    println!(
        "  min |F(t)| = {:.6e} at t = {:.4}",
        rep.min_abs_f, rep.t_at_min_f
    );
    println!("  threshold  = {:.1e}", rep.threshold);
    if rep.ok {
        println!("verdict: nondegenerate");
        EXIT_PASS
    } else {
        match first_failing_t(&gens, range, steps, false) {
            Some(t) => println!("verdict: DEGENERATE, first failing t = {t:.6}"),
            None => println!("verdict: DEGENERATE"),
        }
        EXIT_CHECK_FAILED
    }
}

/// A metric spec is a named preset, a JSON file holding generator
/// expressions, or an inline `a1=...,a2=...` string.
fn load_generators(spec: &str) -> Result<GeneratorSet, ConfigError> {
    if let Ok(set) = GeneratorSet::preset(spec) {
        return Ok(set);
    }
    if std::path::Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| ConfigError(format!("cannot read {spec}: {e}")))?;
        let exprs: GeneratorExprs = serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("{spec} is not a generator document: {e}")))?;
        return generators_from_exprs(&exprs);
    }
    if spec.contains('=') {
        return generators_from_inline(spec);
    }
    Err(ConfigError(format!(
        "`{spec}` is not a metric preset (sasaki, cheeger_gromoll), a JSON file, or an \
         inline `a1=...,b1=...` assignment list"
    )))
}

/// Parse `a1=1+t, a2=0.3, ...`. Commas inside an expression are not
/// supported, so segments lacking `=` are glued back onto the previous
/// assignment (covers things like `pow(t, 2)` never arising today but
/// keeping the splitter honest).
fn generators_from_inline(spec: &str) -> Result<GeneratorSet, ConfigError> {
    let mut assignments: Vec<String> = Vec::new();
    for segment in spec.split(',') {
        if segment.contains('=') {
            assignments.push(segment.trim().to_owned());
        } else if let Some(last) = assignments.last_mut() {
            last.push(',');
            last.push_str(segment);
        } else {
            return Err(ConfigError(format!(
                "inline metric must start with an assignment, got `{segment}`"
            )));
        }
    }
    let mut exprs = GeneratorExprs {
        name: Some("inline".into()),
        a1: String::new(),
        a2: None,
        a3: None,
        b1: None,
        b2: None,
        b3: None,
        t_lower: None,
    };
    for a in &assignments {
        let (key, value) = a.split_once('=').expect("assignment filtered above");
        let key = key.trim();
        let value = value.trim().to_owned();
        match key {
            "a1" => exprs.a1 = value,
            "a2" => exprs.a2 = Some(value),
            "a3" => exprs.a3 = Some(value),
            "b1" => exprs.b1 = Some(value),
            "b2" => exprs.b2 = Some(value),
            "b3" => exprs.b3 = Some(value),
            "t_lower" => {
                exprs.t_lower = Some(value.parse().map_err(|e| {
                    ConfigError(format!("t_lower must be a number: {e}"))
                })?)
            }
            other => {
                return Err(ConfigError(format!(
                    "unknown weight `{other}` (a1, a2, a3, b1, b2, b3, t_lower)"
                )))
            }
        }
    }
    if exprs.a1.is_empty() {
        return Err(ConfigError("inline metric needs at least a1".into()));
    }
    generators_from_exprs(&exprs)
}
