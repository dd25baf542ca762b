//! The check registry: each named check consumes the resolved scenario,
//! measures, and reports records plus a verdict. A check never aborts the
//! run on a measurement failure — those become failing records — while
//! misconfiguration (unknown names, missing parameters) is a
//! configuration error that stops everything before a report is written.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use tgverify::gnatural::GeneratorSet;
use tgverify::manifold::{
    classify_field, covariant_derivative, inner, metric_at, riemann_at, sample_points,
    second_covariant, ChartManifold, ConstantField, CurvatureConvention, FieldClass,
    SampleConfig, VectorField,
};
use tgverify::submanifold::{
    constant_length_converse, default_convention, oracle_pairing_field, projected_normal_field,
    totally_geodesic_test, tw_tv_concircular, tw_tv_general, tw_tv_recurrent, VerificationConfig,
};

use crate::expr::{ExprField, ExprScalar};
use crate::report::{CheckOutcome, Record};
use crate::scenario::{generators_from_exprs, ConfigError, GeneratorExprs, ResolvedCheck};

/// Everything a check may draw on.
pub struct CheckContext<'a> {
    pub m: &'a ChartManifold,
    pub u: &'a dyn VectorField,
    pub gens: &'a GeneratorSet,
    pub sample: &'a SampleConfig,
    pub tol_analytic: f64,
    pub tol_oracle: f64,
    pub t_range: (f64, f64),
}

pub fn run_check(check: &ResolvedCheck, ctx: &CheckContext) -> Result<CheckOutcome, ConfigError> {
    let expect = check.expect.as_deref();
    match check.name.as_str() {
        "totally_geodesic" => geodesic_check(expect, &check.params, ctx),
        "oracle_equivalence" => oracle_check(expect, &check.params, ctx),
        "normal_ledger" => ledger_check(expect, &check.params, ctx),
        "nondegeneracy" => nondegeneracy_check(expect, &check.params, ctx),
        "classify_field" => classify_check(expect, &check.params, ctx),
        "tw_tv_reduction" => reduction_check(expect, &check.params, ctx),
        "constant_length_converse" => converse_check(expect, &check.params, ctx),
        "recurrent_ode_residual" => ode_check(expect, &check.params, ctx),
        other => Err(ConfigError(format!(
            "unknown check `{other}` (known: totally_geodesic, oracle_equivalence, \
             normal_ledger, nondegeneracy, classify_field, tw_tv_reduction, \
             constant_length_converse, recurrent_ode_residual)"
        ))),
    }
}

fn params<'de, T: Deserialize<'de> + Default>(
    check: &str,
    value: &'de serde_json::Value,
) -> Result<T, ConfigError> {
    if value.is_null() {
        return Ok(T::default());
    }
    T::deserialize(value)
        .map_err(|e| ConfigError(format!("bad params for `{check}`: {e}")))
}

fn expect_one_of(
    check: &str,
    expect: Option<&str>,
    allowed: &[&str],
    default: &str,
) -> Result<String, ConfigError> {
    let v = expect.unwrap_or(default);
    if allowed.contains(&v) {
        Ok(v.to_owned())
    } else {
        Err(ConfigError(format!(
            "check `{check}`: expect must be one of {allowed:?}, got `{v}`"
        )))
    }
}

fn error_record(check: &str, index: usize, point: &[f64], label: &str, err: impl ToString) -> Record {
    Record {
        check: check.into(),
        index,
        point: point.to_vec(),
        label: format!("{label} error: {}", err.to_string()),
        values: vec![],
        residual: f64::INFINITY,
        pass: false,
    }
}

fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    diff / (1.0 + euclid_norm(b))
}

/// Coordinate directions normalized to unit `g`-length at `p`.
fn unit_coordinate_directions(g: &[f64], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut x = vec![0.0; n];
            x[i] = 1.0 / g[i * n + i].sqrt();
            x
        })
        .collect()
}

// ---------------------------------------------------------------------
// totally_geodesic / oracle_equivalence
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeodesicParams {
    tolerance: Option<f64>,
    oracle_tolerance: Option<f64>,
    compare_oracle: Option<bool>,
}

fn geodesic_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "totally_geodesic";
    let p: GeodesicParams = params(name, raw)?;
    let expect = expect_one_of(
        name,
        expect,
        &["totally_geodesic", "not_totally_geodesic"],
        "totally_geodesic",
    )?;
    let tolerance = p.tolerance.unwrap_or(ctx.tol_analytic);
    let cfg = VerificationConfig {
        sample: ctx.sample.clone(),
        tolerance,
        oracle_tolerance: p.oracle_tolerance.unwrap_or(ctx.tol_oracle),
        compare_oracle: p.compare_oracle.unwrap_or(true),
    };
    let rep = totally_geodesic_test(ctx.m, ctx.gens, ctx.u, &cfg)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;

    let expecting_geodesic = expect == "totally_geodesic";
    let mut records = Vec::with_capacity(rep.samples.len() + rep.skipped.len() + 1);
    for (i, s) in rep.samples.iter().enumerate() {
        let oracle_ok = !cfg.compare_oracle || s.pairing_residual < cfg.oracle_tolerance;
        let (residual, pass) = if expecting_geodesic {
            // the verdict basis is the second fundamental form; criterion
            // vector norms ride along in `values` for inspection
            (s.ii_norm, s.ii_norm < tolerance && oracle_ok)
        } else {
            // a big form norm is the expected outcome; only the
            // closed-form/oracle agreement is judged per sample
            (s.pairing_residual, oracle_ok)
        };
        records.push(Record {
            check: name.into(),
            index: i,
            point: s.p.clone(),
            label: "indicators".into(),
            values: vec![s.ii_norm, s.tw_norm, s.tv_norm, s.pairing_residual],
            residual,
            pass,
        });
    }
    for (i, (pt, why)) in rep.skipped.iter().enumerate() {
        records.push(Record {
            check: name.into(),
            index: rep.samples.len() + i,
            point: pt.clone(),
            label: format!("skipped: {why}"),
            values: vec![],
            residual: 0.0,
            pass: true,
        });
    }
    let verdict = if rep.totally_geodesic {
        "totally_geodesic"
    } else {
        "not_totally_geodesic"
    };
    let passed = verdict == expect && rep.oracle_consistent;
    records.push(Record {
        check: name.into(),
        index: records.len(),
        point: vec![],
        label: "verdict".into(),
        values: vec![
            rep.max_ii_norm,
            rep.max_tw_norm,
            rep.max_tv_norm,
            rep.max_pairing_residual,
        ],
        residual: rep.max_ii_norm,
        pass: passed,
    });
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: verdict.into(),
        passed,
        records,
    })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleParams {
    oracle_tolerance: Option<f64>,
}

fn oracle_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "oracle_equivalence";
    let p: OracleParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["consistent"], "consistent")?;
    let cfg = VerificationConfig {
        sample: ctx.sample.clone(),
        tolerance: ctx.tol_analytic,
        oracle_tolerance: p.oracle_tolerance.unwrap_or(ctx.tol_oracle),
        compare_oracle: true,
    };
    let rep = totally_geodesic_test(ctx.m, ctx.gens, ctx.u, &cfg)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;

    let mut records = Vec::with_capacity(rep.samples.len());
    for (i, s) in rep.samples.iter().enumerate() {
        let mut values = s.closed_pairings.clone();
        values.extend_from_slice(&s.oracle_pairings);
        records.push(Record {
            check: name.into(),
            index: i,
            point: s.p.clone(),
            label: "pairings".into(),
            values,
            residual: s.pairing_residual,
            pass: s.pairing_residual < cfg.oracle_tolerance,
        });
    }
    for (i, (pt, why)) in rep.skipped.iter().enumerate() {
        records.push(Record {
            check: name.into(),
            index: rep.samples.len() + i,
            point: pt.clone(),
            label: format!("skipped: {why}"),
            values: vec![],
            residual: 0.0,
            pass: true,
        });
    }
    let passed = rep.oracle_consistent;
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if passed { "consistent" } else { "inconsistent" }.into(),
        passed,
        records,
    })
}

// ---------------------------------------------------------------------
// normal_ledger
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerParams {
    tolerance: Option<f64>,
}

/// At each sampled point, project a random constant section onto the
/// normal bundle, transport it along a random direction, and confirm
/// that the criterion pairing `g(W,T_W) + g(V,T_V)` cancels the
/// derivative pairing measured by the transported oracle.
fn ledger_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "normal_ledger";
    let p: LedgerParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["pass"], "pass")?;
    let tol = p.tolerance.unwrap_or(ctx.tol_oracle);
    let n = ctx.m.dim();
    let points = sample_points(ctx.m, ctx.sample)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.sample.seed ^ 0x6ED6E5);

    let mut records = Vec::with_capacity(points.len());
    for (i, pt) in points.iter().enumerate() {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        while x.iter().map(|v| v * v).sum::<f64>() < 0.1 {
            x = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        }
        let w0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();

        let outcome = (|| -> tgverify::Result<Record> {
            let field = projected_normal_field(ctx.m, ctx.gens, ctx.u, w0, v0);
            let eta = field(pt)?;
            let pairing = oracle_pairing_field(ctx.m, ctx.gens, ctx.u, pt, &x, &field)?;
            let (tw, tv) = tw_tv_general(ctx.m, ctx.gens, ctx.u, &ConstantField(x.clone()), pt)?;
            let g = metric_at(ctx.m, pt)?;
            let criteria = inner(&g, &eta.hor, &tw, n) + inner(&g, &eta.ver, &tv, n);
            let residual = (criteria + pairing).abs() / (1.0 + pairing.abs());
            Ok(Record {
                check: name.into(),
                index: i,
                point: pt.clone(),
                label: "ledger".into(),
                values: vec![criteria, pairing],
                residual,
                pass: residual < tol,
            })
        })();
        records.push(outcome.unwrap_or_else(|e| error_record(name, i, pt, "ledger", e)));
    }
    let passed = records.iter().all(|r| r.pass);
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if passed { "pass" } else { "fail" }.into(),
        passed,
        records,
    })
}

// ---------------------------------------------------------------------
// nondegeneracy
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraGenerators {
    #[serde(default)]
    label: Option<String>,
    /// Either a named preset...
    #[serde(default)]
    preset: Option<String>,
    /// ...or inline weight expressions of `t`.
    #[serde(default)]
    a1: Option<String>,
    #[serde(default)]
    a2: Option<String>,
    #[serde(default)]
    a3: Option<String>,
    #[serde(default)]
    b1: Option<String>,
    #[serde(default)]
    b2: Option<String>,
    #[serde(default)]
    b3: Option<String>,
    #[serde(default)]
    t_lower: Option<f64>,
    /// "pass" or "fail".
    expect: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NondegParams {
    t_range: Option<(f64, f64)>,
    steps: Option<usize>,
    /// Additional generator sets to sweep alongside the scenario's own
    /// metric — the place to keep degenerate counterexamples, which could
    /// never be a scenario metric (the pre-check would reject them).
    extra: Option<Vec<ExtraGenerators>>,
}

/// First `t` in the sweep grid where the nondegeneracy functions drop to
/// the threshold, if any.
pub fn first_failing_t(
    gens: &GeneratorSet,
    t_range: (f64, f64),
    steps: usize,
    dim1: bool,
) -> Option<f64> {
    let threshold = tgverify::tol::NONDEGENERACY;
    for i in 0..=steps {
        let t = t_range.0 + (t_range.1 - t_range.0) * (i as f64) / (steps as f64);
        let Ok(d) = gens.derived_at(t) else { continue };
        if d.a.abs() <= threshold || (!dim1 && d.f.abs() <= threshold) {
            return Some(t);
        }
    }
    None
}

fn sweep_range_for(gens: &GeneratorSet, requested: (f64, f64)) -> (f64, f64) {
    let mut lo = requested.0;
    if gens.t_lower.is_finite() && gens.t_lower >= lo {
        lo = gens.t_lower + (gens.t_lower.abs() * 0.01).max(1e-3);
    }
    (lo, requested.1.max(lo + 1e-3))
}

fn nondegeneracy_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "nondegeneracy";
    let p: NondegParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["pass", "fail"], "pass")?;
    let range = p.t_range.unwrap_or(ctx.t_range);
    let steps = p.steps.unwrap_or(400);
    let dim1 = ctx.m.dim() == 1;

    let mut entries: Vec<(GeneratorSet, bool)> = vec![(ctx.gens.clone(), expect == "pass")];
    for (k, e) in p.extra.iter().flatten().enumerate() {
        let set = match (&e.preset, &e.a1) {
            (Some(preset), None) => GeneratorSet::preset(preset)
                .map_err(|err| ConfigError(format!("{name}: extra[{k}]: {err}")))?,
            (None, Some(a1)) => {
                let exprs = GeneratorExprs {
                    name: e.label.clone(),
                    a1: a1.clone(),
                    a2: e.a2.clone(),
                    a3: e.a3.clone(),
                    b1: e.b1.clone(),
                    b2: e.b2.clone(),
                    b3: e.b3.clone(),
                    t_lower: e.t_lower,
                };
                generators_from_exprs(&exprs)
                    .map_err(|err| ConfigError(format!("{name}: extra[{k}]: {err}")))?
            }
            _ => {
                return Err(ConfigError(format!(
                    "{name}: extra[{k}] needs either `preset` or `a1..b3` expressions"
                )))
            }
        };
        let want_ok = match e.expect.as_str() {
            "pass" => true,
            "fail" => false,
            other => {
                return Err(ConfigError(format!(
                    "{name}: extra[{k}].expect must be pass|fail, got `{other}`"
                )))
            }
        };
        entries.push((set, want_ok));
    }

    let mut records = Vec::new();
    let mut all_ok = true;
    for (idx, (set, want_ok)) in entries.iter().enumerate() {
        let sweep = sweep_range_for(set, range);
        let rep = set
            .check_nondegenerate(sweep, steps, dim1)
            .map_err(|e| ConfigError(format!("{name}: `{}`: {e}", set.name)))?;
        let matches = rep.ok == *want_ok;
        all_ok &= matches;
        records.push(Record {
            check: name.into(),
            index: idx,
            point: vec![sweep.0, sweep.1],
            label: format!(
                "{} (expect {})",
                set.name,
                if *want_ok { "pass" } else { "fail" }
            ),
            values: vec![rep.min_abs_a, rep.t_at_min_a, rep.min_abs_f, rep.t_at_min_f],
            residual: if matches { 0.0 } else { 1.0 },
            pass: matches,
        });
        if !rep.ok {
            if let Some(t) = first_failing_t(set, sweep, steps, dim1) {
                records.push(Record {
                    check: name.into(),
                    index: idx,
                    point: vec![sweep.0, sweep.1],
                    label: format!("{}: first failing t", set.name),
                    values: vec![t],
                    residual: 0.0,
                    pass: matches,
                });
            }
        }
    }
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if all_ok { "pass" } else { "fail" }.into(),
        passed: all_ok,
        records,
    })
}

// ---------------------------------------------------------------------
// classify_field
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyParams {
    tolerance: Option<f64>,
}

fn class_name(c: FieldClass) -> &'static str {
    match c {
        FieldClass::Parallel => "parallel",
        FieldClass::Concircular => "concircular",
        FieldClass::Recurrent => "recurrent",
        FieldClass::TorseForming => "torse_forming",
        FieldClass::Generic => "generic",
    }
}

fn classify_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "classify_field";
    let p: ClassifyParams = params(name, raw)?;
    let expect = expect_one_of(
        name,
        expect,
        &["parallel", "concircular", "recurrent", "torse_forming", "generic"],
        "torse_forming",
    )?;
    let tol = p.tolerance.unwrap_or(ctx.tol_analytic);
    let n = ctx.m.dim();
    let points = sample_points(ctx.m, ctx.sample)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;

    // basis directions plus the diagonal, per point
    let mut samples = Vec::with_capacity(points.len() * (n + 1));
    for pt in &points {
        for i in 0..n {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            samples.push((pt.clone(), d));
        }
        samples.push((pt.clone(), vec![1.0 / (n as f64).sqrt(); n]));
    }
    let cls = classify_field(ctx.m, ctx.u, &samples, tol)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;

    let verdict = class_name(cls.class).to_owned();
    let passed = verdict == expect;
    let mut records = Vec::with_capacity(cls.fits.len() + 1);
    for (i, fit) in cls.fits.iter().enumerate() {
        let mut values = vec![fit.residual, fit.alpha];
        values.extend_from_slice(&fit.rho);
        records.push(Record {
            check: name.into(),
            index: i,
            point: fit.x.clone(),
            label: "fit".into(),
            values,
            residual: fit.residual,
            pass: true, // informational; the verdict record judges
        });
    }
    records.push(Record {
        check: name.into(),
        index: records.len(),
        point: vec![],
        label: format!("class: {verdict}"),
        values: vec![
            cls.max_residual,
            cls.alpha_range.0,
            cls.alpha_range.1,
            cls.rho_max,
        ],
        residual: cls.max_residual,
        pass: passed,
    });
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict,
        passed,
        records,
    })
}

// ---------------------------------------------------------------------
// tw_tv_reduction
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReductionParams {
    model: String,
    alpha: Option<String>,
    rho: Option<Vec<String>>,
    /// Reference for the horizontal criterion vector:
    /// `zero` or `alpha_curvature` (`alpha * R(u, X)X`).
    tw_target: Option<String>,
    /// Reference for the vertical criterion vector:
    /// `zero`, `second_covariant`, or `alpha_gradient` (`X(alpha) X`).
    tv_target: Option<String>,
    tw_tolerance: Option<f64>,
    tv_tolerance: Option<f64>,
    /// Also measure the gap against the model-free criterion vectors
    /// (meaningful with coordinate-constant extensions on flat charts).
    compare_general: Option<bool>,
}

fn reduction_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "tw_tv_reduction";
    let p: ReductionParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["pass"], "pass")?;
    let n = ctx.m.dim();

    enum Model {
        Concircular(ExprScalar),
        Recurrent(ExprField),
    }
    let model = match p.model.as_str() {
        "concircular" => {
            let src = p.alpha.as_deref().ok_or_else(|| {
                ConfigError(format!("{name}: concircular model needs params.alpha"))
            })?;
            Model::Concircular(
                ExprScalar::new(src, n)
                    .map_err(|e| ConfigError(format!("{name}: alpha: {e}")))?,
            )
        }
        "recurrent" => {
            let srcs = p.rho.as_ref().ok_or_else(|| {
                ConfigError(format!("{name}: recurrent model needs params.rho"))
            })?;
            if srcs.len() != n {
                return Err(ConfigError(format!(
                    "{name}: rho needs {n} covector components"
                )));
            }
            Model::Recurrent(
                ExprField::new(srcs, n)
                    .map_err(|e| ConfigError(format!("{name}: rho: {e}")))?,
            )
        }
        other => {
            return Err(ConfigError(format!(
                "{name}: model must be concircular|recurrent, got `{other}`"
            )))
        }
    };
    for (which, target) in [("tw_target", &p.tw_target), ("tv_target", &p.tv_target)] {
        if let Some(t) = target {
            let allowed = ["zero", "alpha_curvature", "second_covariant", "alpha_gradient"];
            if !allowed.contains(&t.as_str()) {
                return Err(ConfigError(format!(
                    "{name}: {which} must be one of {allowed:?}, got `{t}`"
                )));
            }
        }
    }
    let tw_tol = p.tw_tolerance.unwrap_or(ctx.tol_analytic);
    let tv_tol = p.tv_tolerance.unwrap_or(ctx.tol_analytic);
    let compare_general = p.compare_general.unwrap_or(false);

    let points = sample_points(ctx.m, ctx.sample)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;
    let mut records = Vec::new();

    for (pi, pt) in points.iter().enumerate() {
        let g = match metric_at(ctx.m, pt) {
            Ok(g) => g,
            Err(e) => {
                records.push(error_record(name, pi * n, pt, "metric", e));
                continue;
            }
        };
        let mut u0 = vec![0.0; n];
        ctx.u.eval(pt, &mut u0);

        for (di, x) in unit_coordinate_directions(&g, n).into_iter().enumerate() {
            let index = pi * n + di;
            let reduced = match &model {
                Model::Concircular(alpha) => {
                    tw_tv_concircular(ctx.m, ctx.gens, ctx.u, alpha, pt, &x)
                }
                Model::Recurrent(rho) => {
                    tw_tv_recurrent(ctx.m, ctx.gens, ctx.u, rho, pt, &x)
                }
            };
            let (tw, tv) = match reduced {
                Ok(pair) => pair,
                Err(e) => {
                    records.push(error_record(name, index, pt, "model", e));
                    continue;
                }
            };

            if compare_general {
                match tw_tv_general(ctx.m, ctx.gens, ctx.u, &ConstantField(x.clone()), pt) {
                    Ok((gw, gv)) => {
                        let residual = gap(&gw, &tw).max(gap(&gv, &tv));
                        let mut values = gw;
                        values.extend(gv);
                        records.push(Record {
                            check: name.into(),
                            index,
                            point: pt.clone(),
                            label: format!("dir{di}: general_gap"),
                            values,
                            residual,
                            pass: residual < ctx.tol_analytic,
                        });
                    }
                    Err(e) => records.push(error_record(name, index, pt, "general", e)),
                }
            }

            if let Some(target) = &p.tw_target {
                let reference: Result<Vec<f64>, tgverify::Error> = match target.as_str() {
                    "zero" => Ok(vec![0.0; n]),
                    "alpha_curvature" => {
                        let Model::Concircular(alpha) = &model else {
                            return Err(ConfigError(format!(
                                "{name}: tw_target alpha_curvature needs the concircular model"
                            )));
                        };
                        riemann_at(ctx.m, pt).map(|r| {
                            let r = if default_convention() == CurvatureConvention::Flipped {
                                r.flipped()
                            } else {
                                r
                            };
                            let a = tgverify::manifold::ScalarField::eval(alpha, pt.as_slice());
                            r.apply(&u0, &x, &x).iter().map(|c| a * c).collect()
                        })
                    }
                    other => {
                        return Err(ConfigError(format!(
                            "{name}: tw_target `{other}` is not defined for T_W"
                        )))
                    }
                };
                match reference {
                    Ok(reference) => {
                        let residual = gap(&tw, &reference);
                        let mut values = tw.clone();
                        values.extend(reference);
                        records.push(Record {
                            check: name.into(),
                            index,
                            point: pt.clone(),
                            label: format!("dir{di}: tw_target:{target}"),
                            values,
                            residual,
                            pass: residual < tw_tol,
                        });
                    }
                    Err(e) => records.push(error_record(name, index, pt, "tw_target", e)),
                }
            }

            if let Some(target) = &p.tv_target {
                let reference: Result<Vec<f64>, tgverify::Error> = match target.as_str() {
                    "zero" => Ok(vec![0.0; n]),
                    "second_covariant" => {
                        second_covariant(ctx.m, ctx.u, &ConstantField(x.clone()), pt)
                    }
                    "alpha_gradient" => {
                        let Model::Concircular(alpha) = &model else {
                            return Err(ConfigError(format!(
                                "{name}: tv_target alpha_gradient needs the concircular model"
                            )));
                        };
                        let xa = alpha.directional(pt, &x);
                        Ok(x.iter().map(|c| xa * c).collect())
                    }
                    other => {
                        return Err(ConfigError(format!(
                            "{name}: tv_target `{other}` is not defined for T_V"
                        )))
                    }
                };
                match reference {
                    Ok(reference) => {
                        let residual = gap(&tv, &reference);
                        let mut values = tv.clone();
                        values.extend(reference);
                        records.push(Record {
                            check: name.into(),
                            index,
                            point: pt.clone(),
                            label: format!("dir{di}: tv_target:{target}"),
                            values,
                            residual,
                            pass: residual < tv_tol,
                        });
                    }
                    Err(e) => records.push(error_record(name, index, pt, "tv_target", e)),
                }
            }
        }
    }
    if records.is_empty() {
        return Err(ConfigError(format!(
            "{name}: nothing to measure — set tw_target, tv_target or compare_general"
        )));
    }
    let passed = records.iter().all(|r| r.pass);
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if passed { "pass" } else { "fail" }.into(),
        passed,
        records,
    })
}

// ---------------------------------------------------------------------
// constant_length_converse
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConverseParams {
    tolerance: Option<f64>,
    /// The converse value must exceed this somewhere for the check to
    /// certify non-geodesy.
    positivity_floor: Option<f64>,
    /// `derivative_norm` compares against `g(∇_X u, ∇_X u)` (the diagonal
    /// lift reduction); `none` records values only. Default: automatic
    /// (`derivative_norm` when the scenario metric is `sasaki`).
    reference: Option<String>,
}

fn converse_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "constant_length_converse";
    let p: ConverseParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["pass"], "pass")?;
    let tol = p.tolerance.unwrap_or(ctx.tol_analytic);
    let floor = p.positivity_floor.unwrap_or(1e-12);
    let compare = match p.reference.as_deref() {
        Some("derivative_norm") => true,
        Some("none") => false,
        None => ctx.gens.name == "sasaki",
        Some(other) => {
            return Err(ConfigError(format!(
                "{name}: reference must be derivative_norm|none, got `{other}`"
            )))
        }
    };
    let n = ctx.m.dim();
    let points = sample_points(ctx.m, ctx.sample)
        .map_err(|e| ConfigError(format!("{name}: {e}")))?;

    let mut records = Vec::new();
    let mut max_value = f64::NEG_INFINITY;
    for (pi, pt) in points.iter().enumerate() {
        let g = match metric_at(ctx.m, pt) {
            Ok(g) => g,
            Err(e) => {
                records.push(error_record(name, pi * n, pt, "metric", e));
                continue;
            }
        };
        for (di, x) in unit_coordinate_directions(&g, n).into_iter().enumerate() {
            let index = pi * n + di;
            let value = match constant_length_converse(ctx.m, ctx.gens, ctx.u, pt, &x) {
                Ok(v) => v,
                Err(e) => {
                    records.push(error_record(name, index, pt, "converse", e));
                    continue;
                }
            };
            max_value = max_value.max(value);
            if compare {
                match covariant_derivative(ctx.m, ctx.u, &x, pt) {
                    Ok(du) => {
                        let reference = inner(&g, &du, &du, n);
                        let residual = (value - reference).abs() / (1.0 + reference.abs());
                        records.push(Record {
                            check: name.into(),
                            index,
                            point: pt.clone(),
                            label: format!("dir{di}: value_vs_derivative_norm"),
                            values: vec![value, reference],
                            residual,
                            pass: residual < tol,
                        });
                    }
                    Err(e) => records.push(error_record(name, index, pt, "reference", e)),
                }
            } else {
                records.push(Record {
                    check: name.into(),
                    index,
                    point: pt.clone(),
                    label: format!("dir{di}: value"),
                    values: vec![value],
                    residual: 0.0,
                    pass: true,
                });
            }
        }
    }
    let positive = max_value > floor;
    records.push(Record {
        check: name.into(),
        index: points.len() * n,
        point: vec![],
        label: "positivity".into(),
        values: vec![max_value, floor],
        residual: (floor - max_value).max(0.0),
        pass: positive,
    });
    let passed = records.iter().all(|r| r.pass);
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if passed { "pass" } else { "fail" }.into(),
        passed,
        records,
    })
}

// ---------------------------------------------------------------------
// recurrent_ode_residual
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeParams {
    tolerance: Option<f64>,
    steps: Option<usize>,
}

/// Sweep the defining generator relation of the rescaling-stable
/// recurrent family, `a1 + t a1' + t (2 b1 + t b1') = 0`, over the `t`
/// interval.
fn ode_check(
    expect: Option<&str>,
    raw: &serde_json::Value,
    ctx: &CheckContext,
) -> Result<CheckOutcome, ConfigError> {
    let name = "recurrent_ode_residual";
    let p: OdeParams = params(name, raw)?;
    let expect = expect_one_of(name, expect, &["pass"], "pass")?;
    let tol = p.tolerance.unwrap_or(1e-8);
    let steps = p.steps.unwrap_or(60).max(1);
    let (lo, hi) = sweep_range_for(ctx.gens, ctx.t_range);

    let mut records = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = lo + (hi - lo) * (i as f64) / (steps as f64);
        match ctx.gens.recurrent_ode_residual(t) {
            Ok(r) => records.push(Record {
                check: name.into(),
                index: i,
                point: vec![t],
                label: "ode_residual".into(),
                values: vec![r],
                residual: r.abs(),
                pass: r.abs() <= tol,
            }),
            Err(e) => records.push(error_record(name, i, &[t], "ode", e)),
        }
    }
    let passed = records.iter().all(|r| r.pass);
    Ok(CheckOutcome {
        name: name.into(),
        expect,
        verdict: if passed { "pass" } else { "fail" }.into(),
        passed,
        records,
    })
}
