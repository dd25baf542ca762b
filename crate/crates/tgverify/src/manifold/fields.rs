//! Metric, vector-field and scalar-field traits plus the built-in library.
//!
//! Each trait exposes the same map at three scalar levels (`f64`, first-
//! order duals, nested duals) so both differentiation engines can drive
//! it. Implementors write one generic method and forward with
//! [`forward_field_impls`].

use crate::diff::{Scalar, D1, D2};

/// Chart presentation of a metric: row-major `n x n` components at `x`.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
    fn eval_d1(&self, x: &[D1], out: &mut [D1]);
    fn eval_d2(&self, x: &[D2], out: &mut [D2]);
}

/// A vector field (or 1-form, by components) on the chart.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
    fn eval_d1(&self, x: &[D1], out: &mut [D1]);
    fn eval_d2(&self, x: &[D2], out: &mut [D2]);
}

/// A scalar field on the chart.
pub trait ScalarField: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
    fn eval_d1(&self, x: &[D1]) -> D1;
    fn eval_d2(&self, x: &[D2]) -> D2;
}

/// Forward the three trait methods to a generic `components` method.
#[macro_export]
macro_rules! forward_field_impls {
    (components) => {
        fn eval(&self, x: &[f64], out: &mut [f64]) {
            self.components(x, out)
        }
        fn eval_d1(&self, x: &[$crate::diff::D1], out: &mut [$crate::diff::D1]) {
            self.components(x, out)
        }
        fn eval_d2(&self, x: &[$crate::diff::D2], out: &mut [$crate::diff::D2]) {
            self.components(x, out)
        }
    };
    (scalar) => {
        fn eval(&self, x: &[f64]) -> f64 {
            self.value(x)
        }
        fn eval_d1(&self, x: &[$crate::diff::D1]) -> $crate::diff::D1 {
            self.value(x)
        }
        fn eval_d2(&self, x: &[$crate::diff::D2]) -> $crate::diff::D2 {
            self.value(x)
        }
    };
}

// ---------------------------------------------------------------------
// Built-in metrics
// ---------------------------------------------------------------------

/// Flat metric `delta_ij` in any dimension (also the flat-torus chart).
pub struct EuclideanMetric(pub usize);

impl EuclideanMetric {
    fn components<S: Scalar>(&self, _x: &[S], out: &mut [S]) {
        let n = self.0;
        for v in out.iter_mut() {
            *v = S::zero();
        }
        for i in 0..n {
            out[i * n + i] = S::one();
        }
    }
}

impl MetricField for EuclideanMetric {
    fn dim(&self) -> usize {
        self.0
    }
    forward_field_impls!(components);
}

/// Unit round sphere in spherical coordinates `(theta, phi)`:
/// `g = diag(1, sin^2 theta)`.
pub struct Sphere2Metric;

impl Sphere2Metric {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let s = x[0].sin();
        out[0] = S::one();
        out[1] = S::zero();
        out[2] = S::zero();
        out[3] = s * s;
    }
}

impl MetricField for Sphere2Metric {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// Poincare half-plane `g = diag(1/y^2, 1/y^2)` on `y > 0`.
pub struct PoincareHalfPlaneMetric;

impl PoincareHalfPlaneMetric {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let w = S::one() / (x[1] * x[1]);
        out[0] = w;
        out[1] = S::zero();
        out[2] = S::zero();
        out[3] = w;
    }
}

impl MetricField for PoincareHalfPlaneMetric {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// Generic curved test metric on the plane: every component of the
/// identity is perturbed by `eps * x1 * x2`.
pub struct PerturbedMetric2 {
    pub eps: f64,
}

impl PerturbedMetric2 {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let p = S::from_f64(self.eps) * x[0] * x[1];
        out[0] = S::one() + p;
        out[1] = p;
        out[2] = p;
        out[3] = S::one() + p;
    }
}

impl MetricField for PerturbedMetric2 {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// Product of the unit sphere with a flat line: `diag(1, sin^2 x1, 1)`.
/// Curved, yet carries the parallel field `(0, 0, 1)`.
pub struct SphereCylinderMetric;

impl SphereCylinderMetric {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        for v in out.iter_mut() {
            *v = S::zero();
        }
        let s = x[0].sin();
        out[0] = S::one();
        out[4] = s * s;
        out[8] = S::one();
    }
}

impl MetricField for SphereCylinderMetric {
    fn dim(&self) -> usize {
        3
    }
    forward_field_impls!(components);
}

// ---------------------------------------------------------------------
// Built-in vector fields
// ---------------------------------------------------------------------

/// Constant-coefficient field in the chart.
pub struct ConstantField(pub Vec<f64>);

impl ConstantField {
    fn components<S: Scalar>(&self, _x: &[S], out: &mut [S]) {
        for (o, v) in out.iter_mut().zip(self.0.iter()) {
            *o = S::from_f64(*v);
        }
    }
}

impl VectorField for ConstantField {
    fn dim(&self) -> usize {
        self.0.len()
    }
    forward_field_impls!(components);
}

/// The position field `u(x) = x` (concircular with `alpha = 1` on flat
/// charts).
pub struct PositionField(pub usize);

impl PositionField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        out.copy_from_slice(x);
    }
}

impl VectorField for PositionField {
    fn dim(&self) -> usize {
        self.0
    }
    forward_field_impls!(components);
}

/// Planar rotation field `u = (-x2, x1)`; has constant length along
/// circles centred at the origin.
pub struct RotationField;

impl RotationField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        out[0] = -x[1];
        out[1] = x[0];
    }
}

impl VectorField for RotationField {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// Recurrent field `u = exp(lambda * x1) v` with constant `v`; satisfies
/// `∇_X u = lambda X^1 u` on flat charts.
pub struct ExpRecurrentField {
    pub lambda: f64,
    pub v: Vec<f64>,
}

impl ExpRecurrentField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let e = (S::from_f64(self.lambda) * x[0]).exp();
        for (o, c) in out.iter_mut().zip(self.v.iter()) {
            *o = e * S::from_f64(*c);
        }
    }
}

impl VectorField for ExpRecurrentField {
    fn dim(&self) -> usize {
        self.v.len()
    }
    forward_field_impls!(components);
}

/// Gradient of `cos theta` on the unit-sphere chart: `u = (-sin x1, 0)`.
/// Concircular with position-dependent factor `alpha = -cos x1`.
pub struct SphereConcircularField;

impl SphereConcircularField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        out[0] = -x[0].sin();
        out[1] = S::zero();
    }
}

impl VectorField for SphereConcircularField {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// The concircular factor of [`SphereConcircularField`]: `-cos x1`.
pub struct SphereConcircularAlpha;

impl SphereConcircularAlpha {
    fn value<S: Scalar>(&self, x: &[S]) -> S {
        -x[0].cos()
    }
}

impl ScalarField for SphereConcircularAlpha {
    forward_field_impls!(scalar);
}

/// Unit-length but non-parallel field `(cos x1, sin x1)` on flat charts.
pub struct UnitWaveField;

impl UnitWaveField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        out[0] = x[0].cos();
        out[1] = x[0].sin();
    }
}

impl VectorField for UnitWaveField {
    fn dim(&self) -> usize {
        2
    }
    forward_field_impls!(components);
}

/// Smooth polynomial field with no special structure, for generic-case
/// sweeps. Components are low-degree polynomials bounded on the unit box.
pub struct GenericPolyField(pub usize);

impl GenericPolyField {
    fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let n = self.0;
        let half = S::from_f64(0.5);
        let fifth = S::from_f64(0.2);
        for i in 0..n {
            let xi = x[i];
            let xj = x[(i + 1) % n];
            // 0.4 + 0.5 x_i - 0.2 x_j^2 + 0.2 x_i x_j, staggered per row
            out[i] = S::from_f64(0.4 + 0.1 * i as f64) + half * xi - fifth * xj * xj
                + fifth * xi * xj;
        }
    }
}

impl VectorField for GenericPolyField {
    fn dim(&self) -> usize {
        self.0
    }
    forward_field_impls!(components);
}

/// Constant scalar field.
pub struct ConstantScalar(pub f64);

impl ConstantScalar {
    fn value<S: Scalar>(&self, _x: &[S]) -> S {
        S::from_f64(self.0)
    }
}

impl ScalarField for ConstantScalar {
    forward_field_impls!(scalar);
}

/// Constant 1-form `rho = sum_i c_i dx^i` given by its coefficients.
pub struct ConstantOneForm(pub Vec<f64>);

impl ConstantOneForm {
    fn components<S: Scalar>(&self, _x: &[S], out: &mut [S]) {
        for (o, v) in out.iter_mut().zip(self.0.iter()) {
            *o = S::from_f64(*v);
        }
    }
}

impl VectorField for ConstantOneForm {
    fn dim(&self) -> usize {
        self.0.len()
    }
    forward_field_impls!(components);
}

/// Vector field backed by an `f64`-only closure. Dual evaluation is
/// unavailable, so manifolds driving such a field must run in
/// [`DiffMode::CentralDifference`](crate::manifold::DiffMode).
pub struct ClosureField<'a> {
    n: usize,
    f: Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync + 'a>,
}

impl<'a> ClosureField<'a> {
    pub fn new(n: usize, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'a) -> Self {
        ClosureField { n, f: Box::new(f) }
    }
}

impl VectorField for ClosureField<'_> {
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
    fn eval_d1(&self, _x: &[D1], _out: &mut [D1]) {
        panic!("closure fields evaluate at f64 only; run the manifold with central differences")
    }
    fn eval_d2(&self, _x: &[D2], _out: &mut [D2]) {
        panic!("closure fields evaluate at f64 only; run the manifold with central differences")
    }
}
