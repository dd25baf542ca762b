//! The two differentiation engines behind every chart-level derivative.
//!
//! [`DualOps`] lifts coordinates to dual numbers (nested once when a
//! derivative of a derivative is needed); [`CentralOps`] uses central
//! differences of plain `f64` evaluations and shares no derivative code
//! with the dual path. Generic geometry helpers are written once against
//! the [`GeomOps`] trait and instantiated with either engine.

use crate::diff::{central_step, invert_matrix, Dual, Scalar};
use crate::error::{Error, Result};
use crate::manifold::fields::{MetricField, ScalarField, VectorField};

/// Scalar levels an engine can evaluate fields at. Ties each level to the
/// right trait method.
pub trait EvalAt: Scalar {
    fn metric(m: &dyn MetricField, x: &[Self], out: &mut [Self]);
    fn field(f: &dyn VectorField, x: &[Self], out: &mut [Self]);
    fn scalar(s: &dyn ScalarField, x: &[Self]) -> Self;
}

impl EvalAt for f64 {
    fn metric(m: &dyn MetricField, x: &[Self], out: &mut [Self]) {
        m.eval(x, out)
    }
    fn field(f: &dyn VectorField, x: &[Self], out: &mut [Self]) {
        f.eval(x, out)
    }
    fn scalar(s: &dyn ScalarField, x: &[Self]) -> Self {
        s.eval(x)
    }
}

impl EvalAt for crate::diff::D1 {
    fn metric(m: &dyn MetricField, x: &[Self], out: &mut [Self]) {
        m.eval_d1(x, out)
    }
    fn field(f: &dyn VectorField, x: &[Self], out: &mut [Self]) {
        f.eval_d1(x, out)
    }
    fn scalar(s: &dyn ScalarField, x: &[Self]) -> Self {
        s.eval_d1(x)
    }
}

impl EvalAt for crate::diff::D2 {
    fn metric(m: &dyn MetricField, x: &[Self], out: &mut [Self]) {
        m.eval_d2(x, out)
    }
    fn field(f: &dyn VectorField, x: &[Self], out: &mut [Self]) {
        f.eval_d2(x, out)
    }
    fn scalar(s: &dyn ScalarField, x: &[Self]) -> Self {
        s.eval_d2(x)
    }
}

/// Chart-derivative operations at one scalar level.
pub trait GeomOps<S: EvalAt> {
    fn n(&self) -> usize;

    /// Metric components, row-major `n x n`.
    fn metric(&self, x: &[S]) -> Vec<S>;

    /// Christoffel symbols of the second kind, layout `[k][i][j]`
    /// (`k * n * n + i * n + j`), symmetric in `(i, j)`.
    fn christoffel(&self, x: &[S]) -> Result<Vec<S>>;

    /// Jacobian of a vector field, layout `[i][j] = partial_j f^i`.
    fn jacobian(&self, f: &dyn VectorField, x: &[S]) -> Vec<S>;

    /// Gradient (coordinate partials) of a scalar field.
    fn grad_scalar(&self, f: &dyn ScalarField, x: &[S]) -> Vec<S>;

    fn field(&self, f: &dyn VectorField, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n()];
        S::field(f, x, &mut out);
        out
    }

    fn scalar(&self, f: &dyn ScalarField, x: &[S]) -> S {
        S::scalar(f, x)
    }
}

/// Christoffel symbols from the metric and its coordinate partials:
/// `Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)`.
pub(crate) fn christoffel_from_partials<S: Scalar>(
    n: usize,
    g: &[S],
    dg: &[Vec<S>], // dg[l] = partial_l g
    where_: &str,
) -> Result<Vec<S>> {
    let ginv = invert_matrix(g, n).ok_or_else(|| Error::SingularMetric {
        where_: where_.to_string(),
        cond: f64::INFINITY,
    })?;
    let mut gamma = vec![S::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..=i {
                let mut acc = S::zero();
                for l in 0..n {
                    let term = dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j];
                    acc = acc + ginv[k * n + l] * term;
                }
                let half = S::from_f64(0.5) * acc;
                gamma[k * n * n + i * n + j] = half;
                gamma[k * n * n + j * n + i] = half;
            }
        }
    }
    Ok(gamma)
}

/// Dual-number engine. Implemented at `f64` and `D1`; the nested level
/// needed for its internals exists because `Dual<S>` is again a scalar.
pub struct DualOps<'a> {
    pub metric: &'a dyn MetricField,
}

impl<'a> DualOps<'a> {
    pub fn new(metric: &'a dyn MetricField) -> Self {
        DualOps { metric }
    }
}

impl<'a, S> GeomOps<S> for DualOps<'a>
where
    S: EvalAt,
    Dual<S>: EvalAt,
{
    fn n(&self) -> usize {
        self.metric.dim()
    }

    fn metric(&self, x: &[S]) -> Vec<S> {
        let n = self.n();
        let mut out = vec![S::zero(); n * n];
        S::metric(self.metric, x, &mut out);
        out
    }

    fn christoffel(&self, x: &[S]) -> Result<Vec<S>> {
        let n = self.n();
        let g = GeomOps::<S>::metric(self, x);
        // partial_l g via one dual sweep per coordinate
        let mut dg: Vec<Vec<S>> = Vec::with_capacity(n);
        for l in 0..n {
            let lifted: Vec<Dual<S>> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == l {
                        Dual::seeded(v, S::one())
                    } else {
                        Dual::constant(v)
                    }
                })
                .collect();
            let mut gl = vec![Dual::constant(S::zero()); n * n];
            <Dual<S>>::metric(self.metric, &lifted, &mut gl);
            dg.push(gl.into_iter().map(|d| d.du).collect());
        }
        christoffel_from_partials(n, &g, &dg, "dual christoffel")
    }

    fn jacobian(&self, f: &dyn VectorField, x: &[S]) -> Vec<S> {
        let n = self.n();
        let mut jac = vec![S::zero(); n * n];
        for j in 0..n {
            let lifted: Vec<Dual<S>> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == j {
                        Dual::seeded(v, S::one())
                    } else {
                        Dual::constant(v)
                    }
                })
                .collect();
            let mut out = vec![Dual::constant(S::zero()); n];
            <Dual<S>>::field(f, &lifted, &mut out);
            for i in 0..n {
                jac[i * n + j] = out[i].du;
            }
        }
        jac
    }

    fn grad_scalar(&self, f: &dyn ScalarField, x: &[S]) -> Vec<S> {
        let n = self.n();
        let mut grad = vec![S::zero(); n];
        for j in 0..n {
            let lifted: Vec<Dual<S>> = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if i == j {
                        Dual::seeded(v, S::one())
                    } else {
                        Dual::constant(v)
                    }
                })
                .collect();
            grad[j] = <Dual<S>>::scalar(f, &lifted).du;
        }
        grad
    }
}

/// Central-difference engine (`f64` only). Every derivative here comes
/// from symmetric differences; no dual numbers are involved anywhere.
pub struct CentralOps<'a> {
    pub metric: &'a dyn MetricField,
    pub rel: f64,
}

impl<'a> CentralOps<'a> {
    pub fn new(metric: &'a dyn MetricField, rel: f64) -> Self {
        CentralOps { metric, rel }
    }

    fn shifted(&self, x: &[f64], coord: usize, delta: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y[coord] += delta;
        y
    }

    /// Central difference of an arbitrary slice-valued closure.
    pub fn partial<F>(&self, f: F, x: &[f64], coord: usize, out_len: usize) -> Vec<f64>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let h = central_step(self.rel, x[coord]);
        let mut fp = vec![0.0; out_len];
        let mut fm = vec![0.0; out_len];
        f(&self.shifted(x, coord, h), &mut fp);
        f(&self.shifted(x, coord, -h), &mut fm);
        fp.iter()
            .zip(fm.iter())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect()
    }
}

impl<'a> GeomOps<f64> for CentralOps<'a> {
    fn n(&self) -> usize {
        self.metric.dim()
    }

    fn metric(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        self.metric.eval(x, &mut out);
        out
    }

    fn christoffel(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let g = GeomOps::<f64>::metric(self, x);
        let mut dg: Vec<Vec<f64>> = Vec::with_capacity(n);
        for l in 0..n {
            dg.push(self.partial(|y, out| self.metric.eval(y, out), x, l, n * n));
        }
        christoffel_from_partials(n, &g, &dg, "central christoffel")
    }

    fn jacobian(&self, f: &dyn VectorField, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut jac = vec![0.0; n * n];
        for j in 0..n {
            let col = self.partial(|y, out| f.eval(y, out), x, j, n);
            for i in 0..n {
                jac[i * n + j] = col[i];
            }
        }
        jac
    }

    fn grad_scalar(&self, f: &dyn ScalarField, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| {
                let h = central_step(self.rel, x[j]);
                let xp = self.shifted(x, j, h);
                let xm = self.shifted(x, j, -h);
                (f.eval(&xp) - f.eval(&xm)) / (2.0 * h)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------
// Engine-generic geometry helpers
// ---------------------------------------------------------------------

/// `(∇_X Z)^k = X^i d_i Z^k + Gamma^k_ij X^i Z^j` for a fixed direction
/// vector `X` (constant components at scalar level `S`).
pub fn cov_derivative_vec<S: EvalAt, E: GeomOps<S>>(
    eng: &E,
    z: &dyn VectorField,
    xdir: &[S],
    x: &[S],
) -> Result<Vec<S>> {
    let n = eng.n();
    let gamma = eng.christoffel(x)?;
    let jac = eng.jacobian(z, x);
    let zv = eng.field(z, x);
    let mut out = vec![S::zero(); n];
    for k in 0..n {
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc + xdir[i] * jac[k * n + i];
            for j in 0..n {
                acc = acc + gamma[k * n * n + i * n + j] * xdir[i] * zv[j];
            }
        }
        out[k] = acc;
    }
    Ok(out)
}

/// Covariant derivative of a 1-form along a fixed direction:
/// `(∇_X rho)_j = X^i d_i rho_j - Gamma^k_ij X^i rho_k`.
pub fn cov_derivative_oneform<S: EvalAt, E: GeomOps<S>>(
    eng: &E,
    rho: &dyn VectorField,
    xdir: &[S],
    x: &[S],
) -> Result<Vec<S>> {
    let n = eng.n();
    let gamma = eng.christoffel(x)?;
    let jac = eng.jacobian(rho, x);
    let rv = eng.field(rho, x);
    let mut out = vec![S::zero(); n];
    for j in 0..n {
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc + xdir[i] * jac[j * n + i];
            for k in 0..n {
                acc = acc - gamma[k * n * n + i * n + j] * xdir[i] * rv[k];
            }
        }
        out[j] = acc;
    }
    Ok(out)
}

/// `g(a, b)` with a row-major metric.
pub fn inner<S: Scalar>(g: &[S], a: &[S], b: &[S], n: usize) -> S {
    let mut acc = S::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + g[i * n + j] * a[i] * b[j];
        }
    }
    acc
}

/// Squared-length shorthand `t = g(u, u)`.
pub fn sq_norm<S: Scalar>(g: &[S], u: &[S], n: usize) -> S {
    inner(g, u, u, n)
}
