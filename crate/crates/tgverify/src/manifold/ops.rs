//! Public chart-geometry operations with mode dispatch.

use nalgebra::DMatrix;

use crate::diff::{directional_central, directional_d1, D1};
use crate::error::{Error, Result};
use crate::manifold::engine::{cov_derivative_vec, CentralOps, DualOps, GeomOps};
use crate::manifold::fields::VectorField;
use crate::manifold::{ChartManifold, DiffMode};
use crate::tol;

/// Christoffel symbols of the second kind at a point, layout `[k][i][j]`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        Christoffel { n, data }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[k * self.n * self.n + i * self.n + j]
    }

    pub fn raw(&self) -> &[f64] {
        &self.data
    }
}

/// Sign convention for the curvature tensor. `Standard` is
/// `R(X,Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z` with the lowered tensor
/// `R(X,Y,Z,W) = g(R(X,Y)Z, W)`; `Flipped` negates every component. Which
/// one reproduces the closed-form bundle expansion is settled empirically
/// by the test suite (see `submanifold::calibrate_curvature_convention`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureConvention {
    Standard,
    Flipped,
}

/// Riemann tensor at a point.
#[derive(Clone, Debug)]
pub struct CurvatureAtPoint {
    pub n: usize,
    pub convention: CurvatureConvention,
    /// `R^l_{ijk}` with `R(e_i, e_j) e_k = R^l_{ijk} e_l`, layout
    /// `[i][j][k][l]`.
    up: Vec<f64>,
    /// Lowered `R_{ijkl} = g(R(e_i, e_j) e_k, e_l)`, same layout.
    low: Vec<f64>,
}

impl CurvatureAtPoint {
    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    /// `R(e_i, e_j) e_k`, `l`-th component.
    #[inline]
    pub fn up(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.up[self.idx(i, j, k, l)]
    }

    /// Lowered tensor `R(e_i, e_j, e_k, e_l)`.
    #[inline]
    pub fn low(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.low[self.idx(i, j, k, l)]
    }

    /// The vector `R(a, b) c`.
    pub fn apply(&self, a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for l in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        acc += self.up(i, j, k, l) * a[i] * b[j] * c[k];
                    }
                }
            }
            out[l] = acc;
        }
        out
    }

    /// Fully lowered scalar `R(a, b, c, d) = g(R(a,b)c, d)`.
    pub fn pair(&self, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        acc += self.low(i, j, k, l) * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        acc
    }

    /// Copy with every component negated (the opposite convention).
    pub fn flipped(&self) -> CurvatureAtPoint {
        CurvatureAtPoint {
            n: self.n,
            convention: match self.convention {
                CurvatureConvention::Standard => CurvatureConvention::Flipped,
                CurvatureConvention::Flipped => CurvatureConvention::Standard,
            },
            up: self.up.iter().map(|v| -v).collect(),
            low: self.low.iter().map(|v| -v).collect(),
        }
    }
}

/// Metric components at a point (row-major `n x n`), checked against the
/// condition-number ceiling.
pub fn metric_at(m: &ChartManifold, x: &[f64]) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut g = vec![0.0; n * n];
    m.metric.eval(x, &mut g);
    let mat = DMatrix::from_row_slice(n, n, &g);
    let svd = mat.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if !cond.is_finite() || cond > tol::MAX_CONDITION {
        return Err(Error::SingularMetric {
            where_: format!("{} at {:?}", m.name, x),
            cond,
        });
    }
    Ok(g)
}

/// Christoffel symbols of the second kind at `x`, using the manifold's
/// differentiation mode.
pub fn christoffel_at(m: &ChartManifold, x: &[f64]) -> Result<Christoffel> {
    metric_at(m, x)?; // condition check
    let n = m.dim();
    let data = match m.diff_mode {
        DiffMode::ForwardDual => GeomOps::<f64>::christoffel(&DualOps::new(&*m.metric), x)?,
        DiffMode::CentralDifference { rel } => {
            GeomOps::<f64>::christoffel(&CentralOps::new(&*m.metric, rel), x)?
        }
    };
    Ok(Christoffel::from_raw(n, data))
}

/// Riemann curvature at `x` in the `Standard` convention:
/// `R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
///            + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}`.
pub fn riemann_at(m: &ChartManifold, x: &[f64]) -> Result<CurvatureAtPoint> {
    let g = metric_at(m, x)?;
    let n = m.dim();

    // Gamma and its coordinate partials d_i Gamma, each via the active
    // engine. dgamma[i] holds d_i Gamma in the [k][a][b] layout.
    let (gamma, dgamma): (Vec<f64>, Vec<Vec<f64>>) = match m.diff_mode {
        DiffMode::ForwardDual => {
            let eng = DualOps::new(&*m.metric);
            let gamma = GeomOps::<f64>::christoffel(&eng, x)?;
            let mut dgamma = Vec::with_capacity(n);
            for i in 0..n {
                let lifted: Vec<D1> = x
                    .iter()
                    .enumerate()
                    .map(|(c, &v)| if c == i { D1::new(v, 1.0) } else { D1::constant(v) })
                    .collect();
                let gd = GeomOps::<D1>::christoffel(&eng, &lifted)?;
                dgamma.push(gd.into_iter().map(|d| d.du).collect());
            }
            (gamma, dgamma)
        }
        DiffMode::CentralDifference { rel } => {
            let eng = CentralOps::new(&*m.metric, rel);
            let gamma = GeomOps::<f64>::christoffel(&eng, x)?;
            let mut dgamma = Vec::with_capacity(n);
            for i in 0..n {
                // central difference of the (already central-difference)
                // Christoffel map: fully independent of the dual engine
                let col = eng.partial(
                    |y, out| {
                        let gm = GeomOps::<f64>::christoffel(&eng, y)
                            .expect("christoffel inside curvature stencil");
                        out.copy_from_slice(&gm);
                    },
                    x,
                    i,
                    n * n * n,
                );
                dgamma.push(col);
            }
            (gamma, dgamma)
        }
    };

    let gm = |k: usize, i: usize, j: usize| gamma[k * n * n + i * n + j];
    let dg = |c: usize, k: usize, i: usize, j: usize| dgamma[c][k * n * n + i * n + j];

    let mut up = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dg(i, l, j, k) - dg(j, l, i, k);
                    for mm in 0..n {
                        v += gm(l, i, mm) * gm(mm, j, k) - gm(l, j, mm) * gm(mm, i, k);
                    }
                    up[((i * n + j) * n + k) * n + l] = v;
                }
            }
        }
    }
    let mut low = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for mm in 0..n {
                        v += g[l * n + mm] * up[((i * n + j) * n + k) * n + mm];
                    }
                    low[((i * n + j) * n + k) * n + l] = v;
                }
            }
        }
    }

    Ok(CurvatureAtPoint {
        n,
        convention: CurvatureConvention::Standard,
        up,
        low,
    })
}

/// `∇_X Z` at `x` for a fixed vector `X`.
pub fn covariant_derivative(
    m: &ChartManifold,
    z: &dyn VectorField,
    xdir: &[f64],
    x: &[f64],
) -> Result<Vec<f64>> {
    metric_at(m, x)?;
    match m.diff_mode {
        DiffMode::ForwardDual => cov_derivative_vec(&DualOps::new(&*m.metric), z, xdir, x),
        DiffMode::CentralDifference { rel } => {
            cov_derivative_vec(&CentralOps::new(&*m.metric, rel), z, xdir, x)
        }
    }
}

/// Second covariant derivative `∇_X (∇_X Z)` at `x`, with the direction
/// field `X` differentiated as given (the inner `∇_X Z` is treated as a
/// vector field of the base point).
pub fn second_covariant(
    m: &ChartManifold,
    z: &dyn VectorField,
    xfield: &dyn VectorField,
    x: &[f64],
) -> Result<Vec<f64>> {
    let n = m.dim();
    metric_at(m, x)?;

    // inner field W(y) = ∇_{X(y)} Z (y); outer ∇_X W = directional + Gamma
    let (partial_part, w0, x0) = match m.diff_mode {
        DiffMode::ForwardDual => {
            let eng = DualOps::new(&*m.metric);
            let inner = |y: &[D1], out: &mut [D1]| {
                let xv = {
                    let mut v = vec![D1::constant(0.0); n];
                    crate::manifold::engine::EvalAt::field(xfield, y, &mut v[..]);
                    v
                };
                let w = cov_derivative_vec(&eng, z, &xv, y).expect("inner covariant derivative");
                out.copy_from_slice(&w);
            };
            let x0 = {
                let mut v = vec![0.0; n];
                xfield.eval(x, &mut v);
                v
            };
            let part = directional_d1(inner, x, &x0, n);
            let eng0 = DualOps::new(&*m.metric);
            let w0 = cov_derivative_vec(&eng0, z, &x0, x)?;
            (part, w0, x0)
        }
        DiffMode::CentralDifference { rel } => {
            let eng = CentralOps::new(&*m.metric, rel);
            let inner = |y: &[f64], out: &mut [f64]| {
                let mut xv = vec![0.0; n];
                xfield.eval(y, &mut xv);
                let w = cov_derivative_vec(&eng, z, &xv, y).expect("inner covariant derivative");
                out.copy_from_slice(&w);
            };
            let x0 = {
                let mut v = vec![0.0; n];
                xfield.eval(x, &mut v);
                v
            };
            let part = directional_central(inner, x, &x0, rel, n);
            let w0 = cov_derivative_vec(&eng, z, &x0, x)?;
            (part, w0, x0)
        }
    };

    let gamma = christoffel_at(m, x)?;
    let mut out = partial_part;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[k] += gamma.get(k, i, j) * x0[i] * w0[j];
            }
        }
    }
    Ok(out)
}
