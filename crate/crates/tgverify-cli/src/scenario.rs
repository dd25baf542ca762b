//! Scenario file schema and its resolution into runtime objects.
//!
//! A scenario is UTF-8 JSON with exactly the top-level keys
//! `{manifold, field, metric, sampling, checks, tolerances}`; unknown
//! keys are rejected so typos fail loudly instead of silently running a
//! different experiment than the one written down.

use std::sync::Arc;

use serde::Deserialize;

use tgverify::gnatural::GeneratorSet;
use tgverify::manifold::{
    ChartManifold, DiffMode, GenericPolyField, PositionField, RotationField, SampleConfig,
    SphereConcircularField, UnitWaveField, VectorField,
};

use crate::expr::{generator_c1fn, ExprField, ExprMetric};

/// Raw deserialized scenario document.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub manifold: ManifoldSpec,
    pub field: FieldSpec,
    pub metric: MetricSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ManifoldSpec {
    /// A built-in chart by name.
    Name(String),
    /// An inline metric given by coordinate expressions.
    Inline(InlineManifold),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineManifold {
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    /// Row-major metric entries, one expression per component.
    pub g: Vec<Vec<String>>,
    /// Sampling box, one `[lo, hi]` pair per coordinate.
    #[serde(default, rename = "box")]
    pub sample_box: Option<Vec<(f64, f64)>>,
    /// `"dual"` (default) or `"central"`.
    #[serde(default)]
    pub diff: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    /// A built-in field by name.
    Name(String),
    /// Inline component expressions over `x1..xn`.
    Components(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    /// A named generator preset (`sasaki`, `cheeger_gromoll`).
    Name(String),
    /// Generator weights as expressions of `t`; derivatives are produced
    /// symbolically.
    Generators(GeneratorExprs),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorExprs {
    #[serde(default)]
    pub name: Option<String>,
    pub a1: String,
    #[serde(default)]
    pub a2: Option<String>,
    #[serde(default)]
    pub a3: Option<String>,
    #[serde(default)]
    pub b1: Option<String>,
    #[serde(default)]
    pub b2: Option<String>,
    #[serde(default)]
    pub b3: Option<String>,
    /// Exclusive lower bound on admissible `t`.
    #[serde(default)]
    pub t_lower: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default)]
    pub n_points: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Keep only sample points whose `t = g(u,u)` lands in this range;
    /// also the sweep interval for `t`-domain checks.
    #[serde(default)]
    pub t_range: Option<(f64, f64)>,
    /// Fraction of each box interval trimmed off both ends.
    #[serde(default)]
    pub boundary_margin: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CheckSpec {
    /// Bare check name with default expectations.
    Name(String),
    Full(CheckFull),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckFull {
    pub name: String,
    /// Expected verdict; a run "passes" when the outcome matches this.
    #[serde(default)]
    pub expect: Option<String>,
    /// Check-specific knobs (see each check's parameter struct).
    #[serde(default)]
    pub params: Option<serde_json::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Threshold for analytic identities and verdict indicators.
    #[serde(default)]
    pub analytic: Option<f64>,
    /// Threshold for closed-form vs oracle agreement.
    #[serde(default)]
    pub oracle: Option<f64>,
}

/// A check with its name resolved and parameters kept as raw JSON for
/// the registry to interpret.
#[derive(Debug, Clone)]
pub struct ResolvedCheck {
    pub name: String,
    pub expect: Option<String>,
    pub params: serde_json::Value,
}

/// Fully constructed runtime scenario.
pub struct Resolved {
    pub manifold: ChartManifold,
    pub field: Arc<dyn VectorField>,
    pub gens: GeneratorSet,
    pub sample: SampleConfig,
    pub checks: Vec<ResolvedCheck>,
    pub tol_analytic: f64,
    pub tol_oracle: f64,
    /// Sweep interval for `t`-domain checks and the non-degeneracy
    /// pre-check.
    pub t_range: (f64, f64),
}

impl std::fmt::Debug for Resolved {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resolved")
            .field("manifold", &self.manifold)
            .field("gens", &self.gens.name)
            .field("checks", &self.checks)
            .field("t_range", &self.t_range)
            .finish()
    }
}

/// Configuration-stage failure (exit code 1 territory).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError(format!("scenario does not parse: {e}")))
}

fn build_manifold(spec: &ManifoldSpec) -> Result<ChartManifold, ConfigError> {
    match spec {
        ManifoldSpec::Name(name) => match name.as_str() {
            "euclidean2" => Ok(ChartManifold::euclidean(2)),
            "euclidean3" => Ok(ChartManifold::euclidean(3)),
            "euclidean4" => Ok(ChartManifold::euclidean(4)),
            "sphere2" => Ok(ChartManifold::sphere2()),
            "poincare_half_plane" => Ok(ChartManifold::poincare_half_plane()),
            "flat_torus2" => Ok(ChartManifold::flat_torus2()),
            "perturbed2" => Ok(ChartManifold::perturbed2()),
            "sphere_cylinder3" => Ok(ChartManifold::sphere_cylinder3()),
            other => cfg_err(format!(
                "unknown manifold `{other}` (try euclidean2/euclidean3/euclidean4, sphere2, \
                 poincare_half_plane, flat_torus2, perturbed2, sphere_cylinder3, or an inline metric)"
            )),
        },
        ManifoldSpec::Inline(inline) => {
            let n = inline.dim;
            if n == 0 {
                return cfg_err("inline manifold needs dim >= 1");
            }
            if inline.g.len() != n || inline.g.iter().any(|row| row.len() != n) {
                return cfg_err(format!(
                    "inline metric must be a {n}x{n} matrix of expressions"
                ));
            }
            let metric = ExprMetric::new(&inline.g, n)
                .map_err(|e| ConfigError(format!("metric entry: {e}")))?;
            let sample_box = match &inline.sample_box {
                Some(b) => {
                    if b.len() != n || b.iter().any(|(lo, hi)| !(lo < hi)) {
                        return cfg_err("`box` needs one increasing [lo, hi] per coordinate");
                    }
                    b.clone()
                }
                None => vec![(-2.0, 2.0); n],
            };
            let mode = match inline.diff.as_deref() {
                None | Some("dual") => DiffMode::ForwardDual,
                Some("central") => DiffMode::central(),
                Some(other) => {
                    return cfg_err(format!("unknown diff mode `{other}` (dual|central)"))
                }
            };
            let name = inline.name.clone().unwrap_or_else(|| "inline".into());
            Ok(ChartManifold::new(name, Arc::new(metric), sample_box, mode))
        }
    }
}

fn build_field(spec: &FieldSpec, n: usize) -> Result<Arc<dyn VectorField>, ConfigError> {
    match spec {
        FieldSpec::Name(name) => match name.as_str() {
            "generic_poly" => Ok(Arc::new(GenericPolyField(n))),
            "position" => Ok(Arc::new(PositionField(n))),
            "rotation" if n == 2 => Ok(Arc::new(RotationField)),
            "unit_wave" if n == 2 => Ok(Arc::new(UnitWaveField)),
            "sphere_concircular" if n == 2 => Ok(Arc::new(SphereConcircularField)),
            other => cfg_err(format!(
                "unknown field `{other}` for dimension {n} (try generic_poly, position, \
                 rotation, unit_wave, sphere_concircular, or inline component expressions)"
            )),
        },
        FieldSpec::Components(sources) => {
            if sources.len() != n {
                return cfg_err(format!(
                    "field needs {n} component expressions, got {}",
                    sources.len()
                ));
            }
            let f = ExprField::new(sources, n)
                .map_err(|e| ConfigError(format!("field component: {e}")))?;
            Ok(Arc::new(f))
        }
    }
}

pub fn build_generators(spec: &MetricSpec) -> Result<GeneratorSet, ConfigError> {
    match spec {
        MetricSpec::Name(name) => GeneratorSet::preset(name)
            .map_err(|e| ConfigError(format!("metric preset: {e}"))),
        MetricSpec::Generators(exprs) => generators_from_exprs(exprs),
    }
}

pub fn generators_from_exprs(exprs: &GeneratorExprs) -> Result<GeneratorSet, ConfigError> {
    let parse = |label: &str, src: Option<&String>| {
        let Some(src) = src else {
            return Ok(tgverify::diff::C1Fn::zero());
        };
        generator_c1fn(src).map_err(|e| ConfigError(format!("generator {label}: {e}")))
    };
    let a1 = generator_c1fn(&exprs.a1)
        .map_err(|e| ConfigError(format!("generator a1: {e}")))?;
    let a2 = parse("a2", exprs.a2.as_ref())?;
    let a3 = parse("a3", exprs.a3.as_ref())?;
    let b1 = parse("b1", exprs.b1.as_ref())?;
    let b2 = parse("b2", exprs.b2.as_ref())?;
    let b3 = parse("b3", exprs.b3.as_ref())?;
    let name = exprs.name.clone().unwrap_or_else(|| "custom".into());
    let mut set = GeneratorSet::new(name, a1, a2, a3, b1, b2, b3);
    if let Some(tl) = exprs.t_lower {
        set = set.with_t_lower(tl);
    }
    Ok(set)
}

/// Default `t` sweep interval for a generator set: from just above its
/// lower domain bound (or 0) up to 10.
pub fn default_t_range(gens: &GeneratorSet) -> (f64, f64) {
    let lo = if gens.t_lower.is_finite() && gens.t_lower >= 0.0 {
        gens.t_lower + (gens.t_lower * 0.01).max(1e-3)
    } else {
        0.0
    };
    (lo, 10.0)
}

/// Overrides coming from the command line; they beat the scenario file.
#[derive(Debug, Default, Clone, Copy)]
pub struct CliOverrides {
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

pub fn resolve(doc: &ScenarioDoc, over: &CliOverrides) -> Result<Resolved, ConfigError> {
    let manifold = build_manifold(&doc.manifold)?;
    let n = manifold.dim();
    let field = build_field(&doc.field, n)?;
    let gens = build_generators(&doc.metric)?;

    let t_range = match doc.sampling.t_range {
        Some((lo, hi)) => {
            if !(lo < hi) {
                return cfg_err("sampling.t_range must be increasing");
            }
            (lo, hi)
        }
        None => default_t_range(&gens),
    };

    // Contract: generator expressions must pass the non-degeneracy sweep
    // on the `t` interval before any check runs.
    let sweep = gens
        .check_nondegenerate(t_range, 400, n == 1)
        .map_err(|e| ConfigError(format!("degenerate metric: {e}")))?;
    if !sweep.ok {
        return cfg_err(format!(
            "degenerate metric `{}` on t in [{}, {}]: |a| >= {:.3e} at t = {:.4}, |F| >= {:.3e} at t = {:.4} (threshold {:.1e})",
            gens.name, t_range.0, t_range.1, sweep.min_abs_a, sweep.t_at_min_a,
            sweep.min_abs_f, sweep.t_at_min_f, sweep.threshold
        ));
    }

    let mut sample = SampleConfig::new(
        over.samples
            .or(doc.sampling.n_points)
            .unwrap_or(SampleConfig::default().n_points),
        over.seed
            .or(doc.sampling.seed)
            .unwrap_or(SampleConfig::default().seed),
    );
    if let Some(m) = doc.sampling.boundary_margin {
        if !(0.0..0.5).contains(&m) {
            return cfg_err("sampling.boundary_margin must lie in [0, 0.5)");
        }
        sample.margin = m;
    }
    if let Some((lo, hi)) = doc.sampling.t_range {
        let fm = manifold.clone();
        let fu = Arc::clone(&field);
        sample = sample.with_filter(move |p: &[f64]| {
            let n = fm.dim();
            let mut g = vec![0.0; n * n];
            fm.metric.eval(p, &mut g);
            let mut u0 = vec![0.0; n];
            fu.eval(p, &mut u0);
            let mut t = 0.0;
            for i in 0..n {
                for j in 0..n {
                    t += g[i * n + j] * u0[i] * u0[j];
                }
            }
            t >= lo && t <= hi
        });
    }

    if doc.checks.is_empty() {
        return cfg_err("scenario lists no checks");
    }
    let checks = doc
        .checks
        .iter()
        .map(|c| match c {
            CheckSpec::Name(name) => ResolvedCheck {
                name: name.clone(),
                expect: None,
                params: serde_json::Value::Null,
            },
            CheckSpec::Full(full) => ResolvedCheck {
                name: full.name.clone(),
                expect: full.expect.clone(),
                params: full.params.clone().unwrap_or(serde_json::Value::Null),
            },
        })
        .collect();

    Ok(Resolved {
        manifold,
        field,
        gens,
        sample,
        checks,
        tol_analytic: over
            .tol
            .or(doc.tolerances.analytic)
            .unwrap_or(tgverify::tol::ANALYTIC),
        tol_oracle: doc.tolerances.oracle.unwrap_or(tgverify::tol::ORACLE),
        t_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"{{
                "manifold": "euclidean2",
                "field": ["0.5", "0.25"],
                "metric": "sasaki",
                "checks": ["totally_geodesic"]{extra}
            }}"#
        )
    }

    #[test]
    fn minimal_scenario_resolves() {
        let doc = parse_scenario(&minimal("")).unwrap();
        let r = resolve(&doc, &CliOverrides::default()).unwrap();
        assert_eq!(r.manifold.dim(), 2);
        assert_eq!(r.gens.name, "sasaki");
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.sample.n_points, 20);
        assert_eq!(r.t_range, (0.0, 10.0));
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        let text = minimal(r#", "extra_key": 1"#);
        let e = parse_scenario(&text).unwrap_err();
        assert!(e.0.contains("does not parse"), "{}", e.0);
    }

    #[test]
    fn unknown_names_are_config_errors() {
        let cases = [
            (
                r#"{"manifold": "moebius", "field": ["0.5", "0.25"],
                    "metric": "sasaki", "checks": ["totally_geodesic"]}"#,
                "unknown manifold",
            ),
            (
                r#"{"manifold": "euclidean2", "field": "nonsense",
                    "metric": "sasaki", "checks": ["totally_geodesic"]}"#,
                "unknown field",
            ),
            (
                r#"{"manifold": "euclidean2", "field": ["0.5", "0.25"],
                    "metric": "fancy", "checks": ["totally_geodesic"]}"#,
                "metric preset",
            ),
        ];
        for (text, needle) in cases {
            let doc = parse_scenario(text).unwrap();
            let e = resolve(&doc, &CliOverrides::default()).unwrap_err();
            assert!(e.0.contains(needle), "{} should mention {needle}", e.0);
        }
    }

    #[test]
    fn degenerate_expression_metric_is_a_config_error() {
        let text = r#"{
            "manifold": "euclidean2",
            "field": ["0.5", "0.25"],
            "metric": {"a1": "1", "a2": "1", "a3": "0"},
            "checks": ["totally_geodesic"]
        }"#;
        let doc = parse_scenario(text).unwrap();
        let e = resolve(&doc, &CliOverrides::default()).unwrap_err();
        assert!(e.0.contains("degenerate metric"), "{}", e.0);
    }

    #[test]
    fn malformed_generator_expression_reports_location() {
        let text = r#"{
            "manifold": "euclidean2",
            "field": ["0.5", "0.25"],
            "metric": {"a1": "1 + * t"},
            "checks": ["totally_geodesic"]
        }"#;
        let doc = parse_scenario(text).unwrap();
        let e = resolve(&doc, &CliOverrides::default()).unwrap_err();
        assert!(e.0.contains("generator a1"), "{}", e.0);
        assert!(e.0.contains("parse error at byte"), "{}", e.0);
    }

    #[test]
    fn t_range_filter_constrains_samples() {
        let text = r#"{
            "manifold": "euclidean2",
            "field": ["exp(0.3*x1)*0.8", "exp(0.3*x1)*(-0.5)"],
            "metric": "sasaki",
            "sampling": {"n_points": 15, "seed": 7, "t_range": [0.5, 2.0]},
            "checks": ["totally_geodesic"]
        }"#;
        let doc = parse_scenario(text).unwrap();
        let r = resolve(&doc, &CliOverrides::default()).unwrap();
        let pts = tgverify::manifold::sample_points(&r.manifold, &r.sample).unwrap();
        assert_eq!(pts.len(), 15);
        for p in &pts {
            let t = (0.64 + 0.25) * (0.6 * p[0]).exp();
            assert!((0.5..=2.0).contains(&t), "t = {t} escaped the filter");
        }
    }

    #[test]
    fn cli_overrides_beat_scenario() {
        let text = minimal(r#", "sampling": {"n_points": 5, "seed": 1}"#);
        let doc = parse_scenario(&text).unwrap();
        let over = CliOverrides {
            tol: Some(1e-3),
            samples: Some(9),
            seed: Some(42),
        };
        let r = resolve(&doc, &over).unwrap();
        assert_eq!(r.sample.n_points, 9);
        assert_eq!(r.sample.seed, 42);
        assert_eq!(r.tol_analytic, 1e-3);
    }

    #[test]
    fn inline_manifold_round_trips() {
        let text = r#"{
            "manifold": {"dim": 2, "g": [["1", "0"], ["0", "sin(x1)^2"]],
                         "box": [[0.6, 2.5], [-2.0, 2.0]], "name": "inline_sphere"},
            "field": "generic_poly",
            "metric": "cheeger_gromoll",
            "checks": [{"name": "oracle_equivalence"}]
        }"#;
        let doc = parse_scenario(text).unwrap();
        let r = resolve(&doc, &CliOverrides::default()).unwrap();
        assert_eq!(r.manifold.name, "inline_sphere");
        let g = tgverify::manifold::metric_at(&r.manifold, &[1.0, 0.3]).unwrap();
        assert!((g[3] - 1.0f64.sin().powi(2)).abs() < 1e-15);
    }
}
