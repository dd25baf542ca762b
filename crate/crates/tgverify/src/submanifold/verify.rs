//! Sampling driver: decide whether the graph of `u` is totally geodesic
//! by measuring the second fundamental form at sampled points, and keep
//! the closed-form expansion honest against the transported oracle at
//! every sample.

use crate::error::{Error, Result};
use crate::gnatural::GeneratorSet;
use crate::manifold::{
    inner, metric_at, sample_points, ChartManifold, ConstantField, SampleConfig, VectorField,
};
use crate::submanifold::closed_form::lifted_derivative_form;
use crate::submanifold::criteria::tw_tv_general;
use crate::submanifold::oracle::{g_norm, oracle_pairing, sff_oracle};
use crate::submanifold::{graph_point, GraphPointFrame};
use crate::tol;

/// Knobs for [`totally_geodesic_test`].
#[derive(Clone, Debug)]
pub struct VerificationConfig {
    pub sample: SampleConfig,
    /// Verdict threshold on the second-fundamental-form norm and the
    /// criterion vector norms.
    pub tolerance: f64,
    /// Agreement threshold between the closed-form pairings and the
    /// transported oracle.
    pub oracle_tolerance: f64,
    /// Skip the per-sample oracle comparison (halves the cost; the
    /// verdict still uses the finite-difference second fundamental form).
    pub compare_oracle: bool,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            sample: SampleConfig::default(),
            tolerance: tol::ANALYTIC,
            oracle_tolerance: tol::ORACLE,
            compare_oracle: true,
        }
    }
}

/// Measurements at one sample point and direction.
#[derive(Clone, Debug)]
pub struct SffSample {
    pub p: Vec<f64>,
    pub xdir: Vec<f64>,
    /// Bundle-metric norm of the normal component of the transported
    /// second derivative — the second fundamental form at `(p, X)`.
    pub ii_norm: f64,
    /// Closed-form derivative pairings against each normal basis vector.
    pub closed_pairings: Vec<f64>,
    /// The same pairings from the transported oracle.
    pub oracle_pairings: Vec<f64>,
    /// Worst relative disagreement between the two pairing columns.
    pub pairing_residual: f64,
    /// Base-metric norms of the criterion vectors at `(p, X)`.
    pub tw_norm: f64,
    pub tv_norm: f64,
}

/// Outcome of a verification run.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub manifold: String,
    pub generators: String,
    pub samples: Vec<SffSample>,
    /// Points that could not be evaluated, with the reason.
    pub skipped: Vec<(Vec<f64>, String)>,
    pub max_ii_norm: f64,
    pub max_pairing_residual: f64,
    pub max_tw_norm: f64,
    pub max_tv_norm: f64,
    pub tolerance: f64,
    pub oracle_tolerance: f64,
    /// True when the second fundamental form stays below `tolerance` at
    /// every sample (the criterion vector norms are reported alongside
    /// but do not enter the verdict; see `totally_geodesic_test`).
    pub totally_geodesic: bool,
    /// True when the closed form and the oracle agreed at every sample
    /// (vacuously true when the comparison is disabled).
    pub oracle_consistent: bool,
}

/// Measure the graph of `u` over sampled points and the normalized
/// coordinate directions at each, and aggregate into a verdict.
pub fn totally_geodesic_test(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    cfg: &VerificationConfig,
) -> Result<VerificationReport> {
    let points = sample_points(m, &cfg.sample)?;

    let mut samples = Vec::new();
    let mut skipped = Vec::new();

    for p in &points {
        match measure_point(m, gens, u, p, cfg) {
            Ok(mut point_samples) => samples.append(&mut point_samples),
            Err(e) => skipped.push((p.clone(), e.to_string())),
        }
    }

    if samples.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: 1,
            got: 0,
        });
    }

    let max_ii_norm = samples.iter().map(|s| s.ii_norm).fold(0.0, f64::max);
    let max_pairing_residual = samples
        .iter()
        .map(|s| s.pairing_residual)
        .fold(0.0, f64::max);
    let max_tw_norm = samples.iter().map(|s| s.tw_norm).fold(0.0, f64::max);
    let max_tv_norm = samples.iter().map(|s| s.tv_norm).fold(0.0, f64::max);

    Ok(VerificationReport {
        manifold: m.name.clone(),
        generators: gens.name.clone(),
        samples,
        skipped,
        max_ii_norm,
        max_pairing_residual,
        max_tw_norm,
        max_tv_norm,
        tolerance: cfg.tolerance,
        oracle_tolerance: cfg.oracle_tolerance,
        // The verdict is the second fundamental form alone. The criterion
        // vectors T_W, T_V are reported but deliberately kept out of it:
        // their joint vanishing is sufficient, not necessary — only the
        // components pairing nontrivially with admissible normal sections
        // obstruct geodesy (a normal space with no horizontal part leaves
        // T_W unconstrained).
        totally_geodesic: max_ii_norm < cfg.tolerance,
        oracle_consistent: max_pairing_residual < cfg.oracle_tolerance,
    })
}

fn measure_point(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    cfg: &VerificationConfig,
) -> Result<Vec<SffSample>> {
    let n = m.dim();
    let g = metric_at(m, p)?;
    let z = graph_point(u, p);
    let frame = GraphPointFrame::build(m, gens, u, p)?;

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // coordinate direction normalized to unit base length, so the
        // Ii-norm threshold means the same thing at every point
        let mut x = vec![0.0; n];
        x[i] = 1.0 / g[i * n + i].sqrt();

        let xfield = ConstantField(x.clone());
        let ii = sff_oracle(m, gens, u, p, &x, &xfield)?;
        let ii_norm = g_norm(m, gens, &z, &ii)?;

        let (t_w, t_v) = tw_tv_general(m, gens, u, &xfield, p)?;
        let tw_norm = inner(&g, &t_w, &t_w, n).abs().sqrt();
        let tv_norm = inner(&g, &t_v, &t_v, n).abs().sqrt();

        let mut closed_pairings = Vec::with_capacity(n);
        let mut oracle_pairings = Vec::with_capacity(n);
        let mut pairing_residual = 0.0f64;
        for normal in &frame.normal_basis {
            let w = ConstantField(normal.hor.clone());
            let v = ConstantField(normal.ver.clone());
            let closed = lifted_derivative_form(m, gens, u, p, &x, &w, &v)?;
            closed_pairings.push(closed);
            if cfg.compare_oracle {
                let reference = oracle_pairing(m, gens, u, p, &x, &w, &v)?;
                pairing_residual =
                    pairing_residual.max((closed - reference).abs() / (1.0 + reference.abs()));
                oracle_pairings.push(reference);
            }
        }

        out.push(SffSample {
            p: p.to_vec(),
            xdir: x,
            ii_norm,
            closed_pairings,
            oracle_pairings,
            pairing_residual,
            tw_norm,
            tv_norm,
        });
    }
    Ok(out)
}
