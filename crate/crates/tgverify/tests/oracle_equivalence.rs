//! Grid sweep: at every sampled point, pair the derivative of constant
//! normal sections against the tangent pushforward two ways — the
//! closed-form expansion in base data, and transport through the
//! finite-difference bundle connection — and require agreement.

use std::time::{Duration, Instant};

use tgverify::diff::C1Fn;
use tgverify::gnatural::GeneratorSet;
use tgverify::manifold::{ChartManifold, GenericPolyField, SampleConfig};
use tgverify::submanifold::{totally_geodesic_test, VerificationConfig};

fn manifolds() -> Vec<ChartManifold> {
    vec![
        ChartManifold::euclidean(2),
        ChartManifold::euclidean(3),
        ChartManifold::sphere2(),
        ChartManifold::poincare_half_plane(),
    ]
}

fn generator_sets() -> Vec<GeneratorSet> {
    let concircular = GeneratorSet::concircular_constructed(
        1.0,
        C1Fn::new(|t| 1.0 + 0.5 * t, |_| 0.5),
        1.0,
    )
    .expect("constructed family must be nondegenerate");
    let poly = GeneratorSet::new(
        "poly",
        C1Fn::new(|t| 2.0 + t, |_| 1.0),
        C1Fn::new(|t| 0.25 * t, |_| 0.25),
        C1Fn::constant(1.0),
        C1Fn::new(|t| 0.5 + 0.1 * t, |_| 0.1),
        C1Fn::new(|t| 0.3 - 0.05 * t, |_| -0.05),
        C1Fn::new(|t| 0.2 * t, |_| 0.2),
    );
    vec![
        GeneratorSet::sasaki(),
        GeneratorSet::cheeger_gromoll(),
        concircular,
        poly,
    ]
}

#[test]
fn closed_form_matches_transported_oracle_across_the_grid() {
    let started = Instant::now();
    let mut cells = 0usize;
    let mut samples = 0usize;

    for (mi, m) in manifolds().iter().enumerate() {
        for (gi, gens) in generator_sets().iter().enumerate() {
            let u = GenericPolyField(m.dim());
            let cfg = VerificationConfig {
                sample: SampleConfig::new(20, 0xA11CE + (mi * 7 + gi) as u64),
                compare_oracle: true,
                ..Default::default()
            };
            let report = totally_geodesic_test(m, gens, &u, &cfg)
                .unwrap_or_else(|e| panic!("{} / {}: {e}", m.name, gens.name));
            assert!(
                report.skipped.is_empty(),
                "{} / {}: unexpected skips {:?}",
                m.name,
                gens.name,
                report.skipped
            );
            assert!(
                report.max_pairing_residual <= 1e-5,
                "{} / {}: residual {}",
                m.name,
                gens.name,
                report.max_pairing_residual
            );
            cells += 1;
            samples += report.samples.len();
        }
    }

    assert_eq!(cells, 16);
    // 20 points per cell, one record per coordinate direction
    assert_eq!(samples, 20 * (2 + 3 + 2 + 2) * 4);
    assert!(
        started.elapsed() < Duration::from_secs(60),
        "sweep took {:?}",
        started.elapsed()
    );
}
