//! Deterministic rejection sampling of chart points and directions.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::manifold::ChartManifold;

/// How to draw points from a manifold's sampling box.
#[derive(Clone)]
pub struct SampleConfig {
    pub n_points: usize,
    pub seed: u64,
    /// Fraction of each box interval trimmed off both ends before
    /// sampling, keeping stencils away from the domain boundary.
    pub margin: f64,
    /// Extra rejection predicate on top of the manifold's own domain.
    pub filter: Option<Arc<dyn Fn(&[f64]) -> bool + Send + Sync>>,
}

impl std::fmt::Debug for SampleConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampleConfig")
            .field("n_points", &self.n_points)
            .field("seed", &self.seed)
            .field("margin", &self.margin)
            .field("filter", &self.filter.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl SampleConfig {
    pub fn new(n_points: usize, seed: u64) -> Self {
        SampleConfig {
            n_points,
            seed,
            margin: 0.1,
            filter: None,
        }
    }

    pub fn with_filter(mut self, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.filter = Some(Arc::new(f));
        self
    }
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig::new(20, 0x5EED)
    }
}

/// Draw `cfg.n_points` points uniformly from the margin-trimmed sampling
/// box, rejecting anything outside the manifold's domain or the extra
/// filter. Deterministic in `cfg.seed`.
pub fn sample_points(m: &ChartManifold, cfg: &SampleConfig) -> Result<Vec<Vec<f64>>> {
    let n = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trimmed: Vec<(f64, f64)> = m
        .sample_box
        .iter()
        .map(|&(lo, hi)| {
            let pad = cfg.margin * (hi - lo);
            (lo + pad, hi - pad)
        })
        .collect();

    let max_tries = 500 * cfg.n_points + 1000;
    let mut out = Vec::with_capacity(cfg.n_points);
    let mut tries = 0usize;
    while out.len() < cfg.n_points && tries < max_tries {
        tries += 1;
        let x: Vec<f64> = trimmed
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..hi))
            .collect();
        debug_assert_eq!(x.len(), n);
        if !m.in_domain(&x) {
            continue;
        }
        if let Some(f) = &cfg.filter {
            if !f(&x) {
                continue;
            }
        }
        out.push(x);
    }
    if out.len() < cfg.n_points {
        return Err(Error::SamplingExhausted {
            wanted: cfg.n_points,
            got: out.len(),
            tries,
        });
    }
    Ok(out)
}

/// `count` direction vectors with components uniform in `[-1, 1]`,
/// rejecting near-zero draws. Deterministic in `seed`.
pub fn sample_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E3779B97F4A7C15);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.3 {
            out.push(v);
        }
    }
    out
}
