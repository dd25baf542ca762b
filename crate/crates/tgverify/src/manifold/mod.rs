//! Chart-level Riemannian geometry: metrics, connections, curvature,
//! covariant derivatives and vector-field classification.

pub mod classify;
mod engine;
pub mod fields;
mod ops;
mod sample;

use std::sync::Arc;

pub use classify::{classify_field, Classification, FieldClass};
pub(crate) use engine::christoffel_from_partials;
pub use engine::{
    cov_derivative_oneform, cov_derivative_vec, inner, sq_norm, CentralOps, DualOps, EvalAt,
    GeomOps,
};
pub use fields::{
    ClosureField, ConstantField, ConstantOneForm, ConstantScalar, EuclideanMetric,
    ExpRecurrentField, GenericPolyField, MetricField, PerturbedMetric2, PoincareHalfPlaneMetric,
    PositionField, RotationField, ScalarField, Sphere2Metric, SphereConcircularAlpha,
    SphereConcircularField, SphereCylinderMetric, UnitWaveField, VectorField,
};
pub use ops::{
    christoffel_at, covariant_derivative, metric_at, riemann_at, second_covariant, Christoffel,
    CurvatureAtPoint, CurvatureConvention,
};
pub use sample::{sample_directions, sample_points, SampleConfig};

use crate::diff::DEFAULT_CENTRAL_STEP;

/// Which differentiation engine a manifold uses for chart derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiffMode {
    /// Forward-mode dual numbers (nested once for second derivatives).
    ForwardDual,
    /// Central differences with relative step `rel` (per-coordinate step
    /// `rel * max(1, |x_i|)`). Independent of the dual engine.
    CentralDifference { rel: f64 },
}

impl DiffMode {
    pub fn central() -> Self {
        DiffMode::CentralDifference {
            rel: DEFAULT_CENTRAL_STEP,
        }
    }
}

impl Default for DiffMode {
    fn default() -> Self {
        DiffMode::ForwardDual
    }
}

/// A Riemannian manifold presented in a single chart: a metric map, a
/// domain predicate with a sampling box, and a differentiation mode.
#[derive(Clone)]
pub struct ChartManifold {
    pub name: String,
    dim: usize,
    pub metric: Arc<dyn MetricField>,
    /// Coordinate box the samplers draw from.
    pub sample_box: Vec<(f64, f64)>,
    /// Extra admissibility predicate inside the box (`None` = whole box).
    pub domain_pred: Option<Arc<dyn Fn(&[f64]) -> bool + Send + Sync>>,
    pub diff_mode: DiffMode,
}

impl ChartManifold {
    pub fn new(
        name: impl Into<String>,
        metric: Arc<dyn MetricField>,
        sample_box: Vec<(f64, f64)>,
        diff_mode: DiffMode,
    ) -> Self {
        let dim = metric.dim();
        assert_eq!(
            sample_box.len(),
            dim,
            "sample box must have one interval per coordinate"
        );
        ChartManifold {
            name: name.into(),
            dim,
            metric,
            sample_box,
            domain_pred: None,
            diff_mode,
        }
    }

    pub fn with_domain(mut self, pred: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain_pred = Some(Arc::new(pred));
        self
    }

    pub fn with_diff_mode(mut self, mode: DiffMode) -> Self {
        self.diff_mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let in_box = x
            .iter()
            .zip(self.sample_box.iter())
            .all(|(v, (lo, hi))| v > lo && v < hi);
        in_box && self.domain_pred.as_ref().map_or(true, |p| p(x))
    }

    // ----- built-in library -------------------------------------------

    /// Flat `R^n` on the box `(-5, 5)^n`.
    pub fn euclidean(n: usize) -> Self {
        ChartManifold::new(
            format!("euclidean{n}"),
            Arc::new(EuclideanMetric(n)),
            vec![(-5.0, 5.0); n],
            DiffMode::ForwardDual,
        )
    }

    /// Unit sphere chart `g = diag(1, sin^2 theta)`, with the polar
    /// coordinate kept inside `(0.2, pi - 0.2)` to stay clear of the
    /// coordinate singularities.
    pub fn sphere2() -> Self {
        ChartManifold::new(
            "sphere2",
            Arc::new(Sphere2Metric),
            vec![(0.2, std::f64::consts::PI - 0.2), (-3.0, 3.0)],
            DiffMode::ForwardDual,
        )
    }

    /// Poincare half-plane, sampled inside `y in (0.5, 4)`.
    pub fn poincare_half_plane() -> Self {
        ChartManifold::new(
            "poincare_half_plane",
            Arc::new(PoincareHalfPlaneMetric),
            vec![(-3.0, 3.0), (0.5, 4.0)],
            DiffMode::ForwardDual,
        )
        .with_domain(|x| x[1] > 0.0)
    }

    /// Flat torus fundamental chart `(0, 2 pi)^2` with the Euclidean
    /// metric.
    pub fn flat_torus2() -> Self {
        ChartManifold::new(
            "flat_torus2",
            Arc::new(EuclideanMetric(2)),
            vec![(0.0, 2.0 * std::f64::consts::PI); 2],
            DiffMode::ForwardDual,
        )
    }

    /// Polynomially perturbed plane metric (generic curvature, no
    /// symmetry), positive definite on the unit box.
    pub fn perturbed2() -> Self {
        ChartManifold::new(
            "perturbed2",
            Arc::new(PerturbedMetric2 { eps: 0.1 }),
            vec![(-1.0, 1.0), (-1.0, 1.0)],
            DiffMode::ForwardDual,
        )
    }

    /// Product of the unit sphere with a line: curved, but carrying the
    /// parallel field `(0, 0, 1)`.
    pub fn sphere_cylinder3() -> Self {
        ChartManifold::new(
            "sphere_cylinder3",
            Arc::new(SphereCylinderMetric),
            vec![
                (0.2, std::f64::consts::PI - 0.2),
                (-3.0, 3.0),
                (-2.0, 2.0),
            ],
            DiffMode::ForwardDual,
        )
    }

    /// Copy of `self` with the other differentiation engine.
    pub fn with_mode(&self, mode: DiffMode) -> Self {
        let mut c = self.clone();
        c.diff_mode = mode;
        c
    }
}

impl std::fmt::Debug for ChartManifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartManifold")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("diff_mode", &self.diff_mode)
            .finish()
    }
}
