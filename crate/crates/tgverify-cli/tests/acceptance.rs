//! Acceptance sweep: every guarantee the tool ships is measured here,
//! one line per criterion. A criterion line reads PASS only when the
//! quantity it names was actually computed and landed under its bound;
//! the test fails if any line reads FAIL.
//!
//! Criteria 1-9 recompute geometry through the library so the numbers
//! in each line are fresh measurements, not cached verdicts. Criteria
//! 10-11 drive the installed binary because they are contracts about
//! its exit codes and report bytes.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tgverify::diff::C1Fn;
use tgverify::gnatural::GeneratorSet;
use tgverify::manifold::{
    covariant_derivative, inner, metric_at, riemann_at, sample_points, second_covariant,
    ChartManifold, ConstantField, ConstantScalar, CurvatureConvention, ExpRecurrentField,
    GenericPolyField, PositionField, SampleConfig, ScalarField, SphereConcircularAlpha,
    SphereConcircularField, UnitWaveField, VectorField,
};
use tgverify::submanifold::{
    constant_length_converse, default_convention, oracle_pairing_field, projected_normal_field,
    totally_geodesic_test, tw_tv_concircular, tw_tv_general, tw_tv_recurrent, VerificationConfig,
};

// ---------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tgverify"))
}

fn euclid_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Relative gap between a measured vector and its reference.
fn gap(measured: &[f64], reference: &[f64]) -> f64 {
    let diff: f64 = measured
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / (1.0 + euclid_norm(reference))
}

/// One direction per coordinate, normalized to unit metric length.
fn unit_dirs(g: &[f64], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut x = vec![0.0; n];
            x[i] = 1.0 / g[i * n + i].sqrt();
            x
        })
        .collect()
}

/// Dense polynomial weight family: every generator nonzero and
/// `t`-dependent, so no structural zero can hide a bookkeeping error.
fn poly_generators() -> GeneratorSet {
    GeneratorSet::new(
        "dense_polynomial",
        C1Fn::new(|t| 2.0 + t, |_| 1.0),
        C1Fn::new(|t| 0.25 * t, |_| 0.25),
        C1Fn::constant(1.0),
        C1Fn::new(|t| 0.5 + 0.1 * t, |_| 0.1),
        C1Fn::new(|t| 0.3 - 0.05 * t, |_| -0.05),
        C1Fn::new(|t| 0.2 * t, |_| 0.2),
    )
}

fn recurrent_field() -> ExpRecurrentField {
    ExpRecurrentField {
        lambda: 0.3,
        v: vec![0.8, -0.5],
    }
}

type Outcome = (bool, String);

fn fail(detail: impl Into<String>) -> Outcome {
    (false, detail.into())
}

// ---------------------------------------------------------------------
// criterion 1: closed form vs transported oracle across the full grid
// ---------------------------------------------------------------------

fn criterion_oracle_grid() -> Outcome {
    let started = Instant::now();
    let manifolds = [
        ChartManifold::euclidean(2),
        ChartManifold::euclidean(3),
        ChartManifold::sphere2(),
        ChartManifold::poincare_half_plane(),
    ];
    let concircular = match GeneratorSet::concircular_constructed(
        1.0,
        C1Fn::new(|t| 1.0 + 0.5 * t, |_| 0.5),
        1.0,
    ) {
        Ok(g) => g,
        Err(e) => return fail(format!("constructed family rejected: {e}")),
    };
    let gen_sets = [
        GeneratorSet::sasaki(),
        GeneratorSet::cheeger_gromoll(),
        concircular,
        poly_generators(),
    ];

    let mut cells = 0usize;
    let mut samples = 0usize;
    let mut max_residual = 0.0f64;
    for (mi, m) in manifolds.iter().enumerate() {
        for (gi, gens) in gen_sets.iter().enumerate() {
            let u = GenericPolyField(m.dim());
            let cfg = VerificationConfig {
                sample: SampleConfig::new(20, 0xA11CE + (mi * 7 + gi) as u64),
                compare_oracle: true,
                ..Default::default()
            };
            let report = match totally_geodesic_test(m, gens, &u, &cfg) {
                Ok(r) => r,
                Err(e) => return fail(format!("{} / {}: {e}", m.name, gens.name)),
            };
            if !report.skipped.is_empty() {
                return fail(format!(
                    "{} / {}: {} skipped points",
                    m.name,
                    gens.name,
                    report.skipped.len()
                ));
            }
            max_residual = max_residual.max(report.max_pairing_residual);
            cells += 1;
            samples += report.samples.len();
        }
    }
    let elapsed = started.elapsed();
    let ok = cells == 16 && max_residual <= 1e-5 && elapsed < Duration::from_secs(60);
    (
        ok,
        format!(
            "16 cells, {samples} samples, max pairing residual {max_residual:.3e} (<= 1e-5), {:.2}s (< 60s)",
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 2: sasaki lift of parallel fields has vanishing second form
// ---------------------------------------------------------------------

fn criterion_parallel_sasaki() -> Outcome {
    let cases: [(ChartManifold, Vec<f64>); 2] = [
        (ChartManifold::flat_torus2(), vec![0.8, -0.4]),
        (ChartManifold::euclidean(3), vec![0.8, -0.4, 0.5]),
    ];
    let mut details = Vec::new();
    for (i, (m, comps)) in cases.iter().enumerate() {
        let u = ConstantField(comps.clone());
        let cfg = VerificationConfig {
            sample: SampleConfig::new(20, 0xACC2 + i as u64),
            tolerance: 1e-7,
            ..Default::default()
        };
        let report = match totally_geodesic_test(m, &GeneratorSet::sasaki(), &u, &cfg) {
            Ok(r) => r,
            Err(e) => return fail(format!("{}: {e}", m.name)),
        };
        if !(report.max_ii_norm < 1e-7 && report.totally_geodesic && report.oracle_consistent) {
            return fail(format!(
                "{}: max |II| = {:.3e}, verdict {}, oracle consistent {}",
                m.name, report.max_ii_norm, report.totally_geodesic, report.oracle_consistent
            ));
        }
        details.push(format!("{} max |II| {:.2e}", m.name, report.max_ii_norm));
    }
    (true, format!("{} (both < 1e-7)", details.join(", ")))
}

// ---------------------------------------------------------------------
// criterion 3: converse functional equals |grad u|^2 and is positive
// ---------------------------------------------------------------------

fn criterion_converse() -> Outcome {
    let m = ChartManifold::euclidean(2);
    let u = UnitWaveField;
    let gens = GeneratorSet::sasaki();
    let points = match sample_points(&m, &SampleConfig::new(20, 0xACC3)) {
        Ok(p) => p,
        Err(e) => return fail(format!("sampling: {e}")),
    };
    let n = m.dim();
    let mut max_gap = 0.0f64;
    let mut max_value = f64::NEG_INFINITY;
    let mut count = 0usize;
    for pt in &points {
        let g = match metric_at(&m, pt) {
            Ok(g) => g,
            Err(e) => return fail(format!("metric: {e}")),
        };
        for x in unit_dirs(&g, n) {
            let value = match constant_length_converse(&m, &gens, &u, pt, &x) {
                Ok(v) => v,
                Err(e) => return fail(format!("converse: {e}")),
            };
            let du = match covariant_derivative(&m, &u, &x, pt) {
                Ok(d) => d,
                Err(e) => return fail(format!("derivative: {e}")),
            };
            let reference = inner(&g, &du, &du, n);
            max_gap = max_gap.max((value - reference).abs() / (1.0 + reference.abs()));
            max_value = max_value.max(value);
            count += 1;
        }
    }
    let ok = max_gap <= 1e-6 && max_value > 1e-12;
    (
        ok,
        format!(
            "{count} samples, max |value - |grad u|^2| {max_gap:.3e} (<= 1e-6), max value {max_value:.3e} (> 1e-12)"
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 4: weight family with constant sum keeps parallel graphs
// geodesic, on a curved base and on a flat base with a2 != 0
// ---------------------------------------------------------------------

fn criterion_parallel_weight_family() -> Outcome {
    let curved = GeneratorSet::new(
        "deformed_parallel_family",
        C1Fn::new(|t| 1.0 + t, |_| 1.0),
        C1Fn::zero(),
        C1Fn::new(|t| 2.0 - t, |_| -1.0),
        C1Fn::constant(0.1),
        C1Fn::zero(),
        C1Fn::constant(-0.1),
    );
    let m1 = ChartManifold::sphere_cylinder3();
    let u1 = ConstantField(vec![0.0, 0.0, 1.0]);
    let cfg1 = VerificationConfig {
        sample: SampleConfig::new(20, 0xACC4),
        ..Default::default()
    };
    let r1 = match totally_geodesic_test(&m1, &curved, &u1, &cfg1) {
        Ok(r) => r,
        Err(e) => return fail(format!("curved base: {e}")),
    };

    let flat_a2 = GeneratorSet::new(
        "flat_a2_family",
        C1Fn::new(|t| 1.0 + t, |_| 1.0),
        C1Fn::constant(0.3),
        C1Fn::new(|t| 2.0 - t, |_| -1.0),
        C1Fn::zero(),
        C1Fn::constant(0.2),
        C1Fn::zero(),
    );
    let m2 = ChartManifold::euclidean(2);
    let u2 = ConstantField(vec![1.0, 0.0]);
    let cfg2 = VerificationConfig {
        sample: SampleConfig::new(20, 0xACC5),
        ..Default::default()
    };
    let r2 = match totally_geodesic_test(&m2, &flat_a2, &u2, &cfg2) {
        Ok(r) => r,
        Err(e) => return fail(format!("flat base: {e}")),
    };

    let ok = r1.max_ii_norm < 1e-6
        && r1.totally_geodesic
        && r1.oracle_consistent
        && r2.max_ii_norm < 1e-6
        && r2.totally_geodesic
        && r2.oracle_consistent;
    (
        ok,
        format!(
            "curved base max |II| {:.2e}, flat a2 != 0 max |II| {:.2e} (both < 1e-6)",
            r1.max_ii_norm, r2.max_ii_norm
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 5: concircular reduction — flat criteria vanish, curved T_W
// tracks alpha R(u, X)X, and the geodesic verdicts split accordingly
// ---------------------------------------------------------------------

fn criterion_concircular_reduction() -> Outcome {
    let gens = GeneratorSet::sasaki();

    // Flat chart: u(x) = x is concircular with constant factor 1; both
    // criterion vectors must vanish.
    let mf = ChartManifold::euclidean(2);
    let uf = PositionField(2);
    let alpha_f = ConstantScalar(1.0);
    let points = match sample_points(&mf, &SampleConfig::new(15, 0xACC6)) {
        Ok(p) => p,
        Err(e) => return fail(format!("flat sampling: {e}")),
    };
    let mut flat_max = 0.0f64;
    for pt in &points {
        let g = match metric_at(&mf, pt) {
            Ok(g) => g,
            Err(e) => return fail(format!("flat metric: {e}")),
        };
        for x in unit_dirs(&g, mf.dim()) {
            match tw_tv_concircular(&mf, &gens, &uf, &alpha_f, pt, &x) {
                Ok((tw, tv)) => {
                    flat_max = flat_max.max(euclid_norm(&tw)).max(euclid_norm(&tv));
                }
                Err(e) => return fail(format!("flat reduction: {e}")),
            }
        }
    }

    // Sphere chart: the gradient of the height function is concircular
    // with factor alpha = -cos x1; T_W must equal alpha R(u, X)X.
    let mc = ChartManifold::sphere2();
    let uc = SphereConcircularField;
    let alpha_c = SphereConcircularAlpha;
    let points = match sample_points(&mc, &SampleConfig::new(15, 0xACC7)) {
        Ok(p) => p,
        Err(e) => return fail(format!("curved sampling: {e}")),
    };
    let n = mc.dim();
    let mut curved_gap = 0.0f64;
    let mut curved_tw_max = 0.0f64;
    for pt in &points {
        let g = match metric_at(&mc, pt) {
            Ok(g) => g,
            Err(e) => return fail(format!("curved metric: {e}")),
        };
        let mut u0 = vec![0.0; n];
        uc.eval(pt, &mut u0);
        let r = match riemann_at(&mc, pt) {
            Ok(r) => r,
            Err(e) => return fail(format!("curvature: {e}")),
        };
        let r = if default_convention() == CurvatureConvention::Flipped {
            r.flipped()
        } else {
            r
        };
        let a = ScalarField::eval(&alpha_c, pt.as_slice());
        for x in unit_dirs(&g, n) {
            let (tw, _tv) = match tw_tv_concircular(&mc, &gens, &uc, &alpha_c, pt, &x) {
                Ok(pair) => pair,
                Err(e) => return fail(format!("curved reduction: {e}")),
            };
            let reference: Vec<f64> = r.apply(&u0, &x, &x).iter().map(|c| a * c).collect();
            curved_gap = curved_gap.max(gap(&tw, &reference));
            curved_tw_max = curved_tw_max.max(euclid_norm(&tw));
        }
    }

    // Verdicts: the flat graph is geodesic, the curved one is not. Both
    // runs keep the transported-oracle comparison on; the reduction and
    // its reference above share the curvature routine, so agreement with
    // the independent oracle is what keeps this criterion non-circular.
    let cfg = VerificationConfig {
        sample: SampleConfig::new(15, 0xACC8),
        ..Default::default()
    };
    let flat_verdict = match totally_geodesic_test(&mf, &gens, &uf, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(format!("flat verdict: {e}")),
    };
    let curved_verdict = match totally_geodesic_test(&mc, &gens, &uc, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(format!("curved verdict: {e}")),
    };

    let ok = flat_max <= 1e-8
        && curved_gap <= 1e-6
        && curved_tw_max > 1e-3
        && flat_verdict.totally_geodesic
        && flat_verdict.oracle_consistent
        && !curved_verdict.totally_geodesic
        && curved_verdict.oracle_consistent;
    (
        ok,
        format!(
            "flat max |T_W|,|T_V| {flat_max:.3e} (<= 1e-8), curved T_W vs alpha R(u,X)X gap {curved_gap:.3e} (<= 1e-6), verdicts geodesic={} / {}",
            flat_verdict.totally_geodesic, curved_verdict.totally_geodesic
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 6: constructed weight family turns the position-field graph
// geodesic while staying nondegenerate across t in [0, 10]
// ---------------------------------------------------------------------

fn criterion_constructed_family() -> Outcome {
    let gens = match GeneratorSet::concircular_constructed(
        1.0,
        C1Fn::new(|t| 1.0 + 0.5 * t, |_| 0.5),
        1.0,
    ) {
        Ok(g) => g,
        Err(e) => return fail(format!("construction rejected: {e}")),
    };
    let m = ChartManifold::euclidean(2);
    let u = PositionField(2);
    let cfg = VerificationConfig {
        sample: SampleConfig::new(20, 0xACC9),
        ..Default::default()
    };
    let report = match totally_geodesic_test(&m, &gens, &u, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(format!("verification: {e}")),
    };
    let sweep = match gens.check_nondegenerate((0.0, 10.0), 400, false) {
        Ok(s) => s,
        Err(e) => return fail(format!("sweep: {e}")),
    };
    let ok = report.max_ii_norm < 1e-6
        && report.totally_geodesic
        && report.oracle_consistent
        && sweep.ok;
    (
        ok,
        format!(
            "max |II| {:.2e} (< 1e-6), min |a| {:.2e} and min |F| {:.2e} on t in [0,10]",
            report.max_ii_norm, sweep.min_abs_a, sweep.min_abs_f
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 7: recurrent reduction — T_W vanishes, T_V matches the
// second covariant derivative
// ---------------------------------------------------------------------

fn criterion_recurrent_reduction() -> Outcome {
    let m = ChartManifold::euclidean(2);
    let u = recurrent_field();
    let rho = ConstantField(vec![0.3, 0.0]);
    let gens = GeneratorSet::sasaki();
    let points = match sample_points(&m, &SampleConfig::new(15, 0xACCA)) {
        Ok(p) => p,
        Err(e) => return fail(format!("sampling: {e}")),
    };
    let n = m.dim();
    let mut tw_max = 0.0f64;
    let mut tv_gap = 0.0f64;
    let mut count = 0usize;
    for pt in &points {
        let g = match metric_at(&m, pt) {
            Ok(g) => g,
            Err(e) => return fail(format!("metric: {e}")),
        };
        for x in unit_dirs(&g, n) {
            let (tw, tv) = match tw_tv_recurrent(&m, &gens, &u, &rho, pt, &x) {
                Ok(pair) => pair,
                Err(e) => return fail(format!("reduction: {e}")),
            };
            let reference = match second_covariant(&m, &u, &ConstantField(x.clone()), pt) {
                Ok(r) => r,
                Err(e) => return fail(format!("second derivative: {e}")),
            };
            tw_max = tw_max.max(euclid_norm(&tw));
            tv_gap = tv_gap.max(gap(&tv, &reference));
            count += 1;
        }
    }
    let ok = tw_max <= 1e-8 && tv_gap <= 1e-6;
    (
        ok,
        format!(
            "{count} samples, max |T_W| {tw_max:.3e} (<= 1e-8), T_V vs iterated derivative gap {tv_gap:.3e} (<= 1e-6)"
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 8: the rescaling-stable recurrent weight family is geodesic
// on t in [0.5, 10] and satisfies its defining generator relation
// ---------------------------------------------------------------------

fn criterion_recurrent_family() -> Outcome {
    let gens = match GeneratorSet::recurrent_family(2.0, C1Fn::constant(1.0), 0.25) {
        Ok(g) => g,
        Err(e) => return fail(format!("family rejected: {e}")),
    };
    let m = ChartManifold::euclidean(2);
    let u = recurrent_field();
    let filter_u = recurrent_field();
    let sample = SampleConfig::new(20, 0xACCB).with_filter(move |p: &[f64]| {
        let mut u0 = vec![0.0; 2];
        filter_u.eval(p, &mut u0);
        let t = u0[0] * u0[0] + u0[1] * u0[1];
        (0.5..=10.0).contains(&t)
    });
    let cfg = VerificationConfig {
        sample,
        tolerance: 1e-5,
        ..Default::default()
    };
    let report = match totally_geodesic_test(&m, &gens, &u, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(format!("verification: {e}")),
    };
    if !report.skipped.is_empty() {
        return fail(format!("{} skipped points", report.skipped.len()));
    }

    let steps = 200usize;
    let (lo, hi) = (0.5, 10.0);
    let mut ode_max = 0.0f64;
    for i in 0..=steps {
        let t = lo + (hi - lo) * i as f64 / steps as f64;
        match gens.recurrent_ode_residual(t) {
            Ok(r) => ode_max = ode_max.max(r.abs()),
            Err(e) => return fail(format!("relation at t = {t}: {e}")),
        }
    }
    let ok = report.max_ii_norm < 1e-5
        && report.totally_geodesic
        && report.oracle_consistent
        && ode_max <= 1e-8;
    (
        ok,
        format!(
            "max |II| {:.2e} (< 1e-5) over {} samples with t in [0.5,10], generator relation residual {:.2e} (<= 1e-8)",
            report.max_ii_norm,
            report.samples.len(),
            ode_max
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 9: the normal-pairing ledger closes on random configurations
// ---------------------------------------------------------------------

fn criterion_normal_ledger() -> Outcome {
    let m = ChartManifold::poincare_half_plane();
    let u = GenericPolyField(2);
    let gens = poly_generators();
    let n = m.dim();
    let points = match sample_points(&m, &SampleConfig::new(50, 0xACCC)) {
        Ok(p) => p,
        Err(e) => return fail(format!("sampling: {e}")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCC ^ 0x6ED6E5);
    let mut max_residual = 0.0f64;
    let mut count = 0usize;
    for pt in &points {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        while x.iter().map(|v| v * v).sum::<f64>() < 0.1 {
            x = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        }
        let w0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();

        let residual = (|| -> tgverify::Result<f64> {
            let field = projected_normal_field(&m, &gens, &u, w0, v0);
            let eta = field(pt)?;
            let pairing = oracle_pairing_field(&m, &gens, &u, pt, &x, &field)?;
            let (tw, tv) = tw_tv_general(&m, &gens, &u, &ConstantField(x.clone()), pt)?;
            let g = metric_at(&m, pt)?;
            let criteria = inner(&g, &eta.hor, &tw, n) + inner(&g, &eta.ver, &tv, n);
            Ok((criteria + pairing).abs() / (1.0 + pairing.abs()))
        })();
        match residual {
            Ok(r) => max_residual = max_residual.max(r),
            Err(e) => return fail(format!("configuration {count}: {e}")),
        }
        count += 1;
    }
    let ok = count == 50 && max_residual <= 1e-5;
    (
        ok,
        format!("{count} random configurations, max ledger residual {max_residual:.3e} (<= 1e-5)"),
    )
}

// ---------------------------------------------------------------------
// criterion 10: nondegeneracy verdicts through the binary and library
// ---------------------------------------------------------------------

fn criterion_nondegeneracy() -> Outcome {
    for (gens, want_ok) in [
        (GeneratorSet::sasaki(), true),
        (GeneratorSet::cheeger_gromoll(), true),
        (
            GeneratorSet::new(
                "degenerate_a",
                C1Fn::constant(1.0),
                C1Fn::constant(1.0),
                C1Fn::zero(),
                C1Fn::zero(),
                C1Fn::zero(),
                C1Fn::zero(),
            ),
            false,
        ),
    ] {
        match gens.check_nondegenerate((0.0, 10.0), 400, false) {
            Ok(s) => {
                if s.ok != want_ok {
                    return fail(format!(
                        "{}: sweep ok = {}, expected {}",
                        gens.name, s.ok, want_ok
                    ));
                }
            }
            Err(e) => return fail(format!("{}: {e}", gens.name)),
        }
    }

    let mut codes = Vec::new();
    for (spec, want) in [
        ("sasaki", 0),
        ("cheeger_gromoll", 0),
        ("a1 = 1, a2 = 1, a3 = 0", 2),
    ] {
        let out = match bin().args(["check-metric", "--spec", spec]).output() {
            Ok(o) => o,
            Err(e) => return fail(format!("spawn: {e}")),
        };
        let code = out.status.code();
        if code != Some(want) {
            return fail(format!("check-metric --spec {spec:?}: exit {code:?}, expected {want}"));
        }
        codes.push(want);
    }
    (
        true,
        format!(
            "library sweeps pass/pass/fail as expected; check-metric exit codes {:?}",
            codes
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 11: report bodies are byte-identical across reruns
// ---------------------------------------------------------------------

fn criterion_determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return fail(format!("tempdir: {e}")),
    };
    let mut bodies = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("report_{i}.json"));
        let out = match bin()
            .args([
                "verify",
                "--scenario",
                "recurrent_example11",
                "--report",
                path.to_str().unwrap(),
            ])
            .output()
        {
            Ok(o) => o,
            Err(e) => return fail(format!("spawn: {e}")),
        };
        if out.status.code() != Some(0) {
            return fail(format!("run {i}: exit {:?}", out.status.code()));
        }
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => return fail(format!("read report {i}: {e}")),
        };
        if !text.contains("\"wall_time_ms\"") {
            return fail(format!("run {i}: report has no wall_time_ms line"));
        }
        let body: String = text
            .lines()
            .filter(|l| !l.contains("\"wall_time_ms\""))
            .collect::<Vec<_>>()
            .join("\n");
        bodies.push((body, text.len()));
    }
    if bodies[0].0 != bodies[1].0 {
        return fail("stripped report bodies differ between reruns");
    }
    (
        true,
        format!(
            "two runs of the same preset agree byte-for-byte outside the timing line ({} bytes)",
            bodies[0].1
        ),
    )
}

// ---------------------------------------------------------------------
// the sweep
// ---------------------------------------------------------------------

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        (
            "closed-form pairings match the transported oracle on 4 bases x 4 weight families",
            criterion_oracle_grid,
        ),
        (
            "sasaki-lifted parallel fields are totally geodesic",
            criterion_parallel_sasaki,
        ),
        (
            "converse functional equals the squared derivative length and is positive somewhere",
            criterion_converse,
        ),
        (
            "constant-sum weight family keeps parallel graphs geodesic (curved base, flat a2 != 0)",
            criterion_parallel_weight_family,
        ),
        (
            "concircular reduction vanishes flat, tracks alpha R(u,X)X curved, and splits verdicts",
            criterion_concircular_reduction,
        ),
        (
            "constructed weight family is geodesic for the position field and stays nondegenerate",
            criterion_constructed_family,
        ),
        (
            "recurrent reduction kills T_W and matches T_V to the iterated derivative",
            criterion_recurrent_reduction,
        ),
        (
            "rescaling-stable recurrent family is geodesic on t in [0.5, 10] with relation residual <= 1e-8",
            criterion_recurrent_family,
        ),
        (
            "normal-pairing ledger closes on 50 random configurations",
            criterion_normal_ledger,
        ),
        (
            "nondegeneracy verdicts: sasaki pass, cheeger_gromoll pass, a1=1,a2=1,a3=0 fail",
            criterion_nondegeneracy,
        ),
        (
            "report bodies are byte-identical across reruns with the same seed",
            criterion_determinism,
        ),
    ];

    let mut failures = Vec::new();
    println!("acceptance: {} criteria", criteria.len());
    for (i, (title, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} {:>2}. {title} — {detail}", i + 1);
        if !ok {
            failures.push(format!("{:>2}. {title} — {detail}", i + 1));
        }
    }
    assert!(
        failures.is_empty(),
        "{} of {} acceptance criteria failed:\n{}",
        failures.len(),
        criteria.len(),
        failures.join("\n")
    );
}
