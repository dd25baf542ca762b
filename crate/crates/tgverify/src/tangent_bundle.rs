//! Geometry of the tangent bundle TM: lifts, the horizontal/vertical
//! splitting, the bundle metric assembled from a [`GeneratorSet`], and its
//! numerically derived Levi-Civita connection.
//!
//! The connection here is produced by brute force — central differences of
//! the coordinate metric matrix on TM — and never consults any closed-form
//! expression for covariant derivatives upstairs. That independence is the
//! point: closed-form results are certified against this oracle.

use nalgebra::DMatrix;

use crate::diff::central_step;
use crate::error::{Error, Result};
use crate::gnatural::GeneratorSet;
use crate::manifold::{
    christoffel_at, christoffel_from_partials, inner, metric_at, ChartManifold, Christoffel,
};
use crate::tol;

/// A point of TM in induced coordinates: base point `x` and fiber vector
/// `u`, both of the base dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Self {
        assert_eq!(x.len(), u.len(), "base and fiber dimensions differ");
        TangentPoint { x, u }
    }

    /// Flat 2n coordinate vector `(x, u)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.x.clone();
        c.extend_from_slice(&self.u);
        c
    }

    pub fn from_coords(c: &[f64]) -> Self {
        let n = c.len() / 2;
        TangentPoint::new(c[..n].to_vec(), c[n..].to_vec())
    }
}

/// A tangent vector of TM expressed in the horizontal/vertical splitting:
/// `hor` is the projection image under dπ, `ver` the connection-map image.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleVector {
    pub hor: Vec<f64>,
    pub ver: Vec<f64>,
}

impl BundleVector {
    pub fn new(hor: Vec<f64>, ver: Vec<f64>) -> Self {
        assert_eq!(hor.len(), ver.len());
        BundleVector { hor, ver }
    }

    pub fn horizontal(x: &[f64]) -> Self {
        BundleVector::new(x.to_vec(), vec![0.0; x.len()])
    }

    pub fn vertical(v: &[f64]) -> Self {
        BundleVector::new(vec![0.0; v.len()], v.to_vec())
    }
}

/// Coordinate components on TM of the horizontal lift of `xvec` at `z`:
/// `(X^j ; -Gamma^j_rs u^r X^s)`.
pub fn horizontal_lift(m: &ChartManifold, xvec: &[f64], z: &TangentPoint) -> Result<Vec<f64>> {
    let n = m.dim();
    let gamma = christoffel_at(m, &z.x)?;
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(xvec);
    for j in 0..n {
        let mut corr = 0.0;
        for r in 0..n {
            for s in 0..n {
                corr -= gamma.get(j, r, s) * z.u[r] * xvec[s];
            }
        }
        out[n + j] = corr;
    }
    Ok(out)
}

/// Coordinate components of the vertical lift of `v`: `(0 ; v)`.
pub fn vertical_lift(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * v.len()];
    out[v.len()..].copy_from_slice(v);
    out
}

/// Split a TM coordinate vector `w = (xi ; eta)` at `z` into its
/// horizontal and vertical parts: `hor = xi`,
/// `ver^r = eta^r + Gamma^r_st u^s xi^t`.
pub fn split(m: &ChartManifold, w: &[f64], z: &TangentPoint) -> Result<BundleVector> {
    let n = m.dim();
    assert_eq!(w.len(), 2 * n, "expected 2n coordinate components");
    let gamma = christoffel_at(m, &z.x)?;
    let hor = w[..n].to_vec();
    let mut ver = w[n..].to_vec();
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                ver[r] += gamma.get(r, s, t) * z.u[s] * w[t];
            }
        }
    }
    Ok(BundleVector::new(hor, ver))
}

/// Inverse of [`split`]: coordinate components of a bundle vector.
pub fn assemble(m: &ChartManifold, bv: &BundleVector, z: &TangentPoint) -> Result<Vec<f64>> {
    let n = m.dim();
    let gamma = christoffel_at(m, &z.x)?;
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(&bv.hor);
    for r in 0..n {
        let mut eta = bv.ver[r];
        for s in 0..n {
            for t in 0..n {
                eta -= gamma.get(r, s, t) * z.u[s] * bv.hor[t];
            }
        }
        out[n + r] = eta;
    }
    Ok(out)
}

/// The bundle metric `G` at `z` on two split vectors, assembled from the
/// three block formulas
///
/// ```text
/// G(Xh, Yh) = A g(X,Y) + B g(X,u) g(Y,u)
/// G(Xh, Yv) = a2 g(X,Y) + b2 g(X,u) g(Y,u)
/// G(Xv, Yv) = a1 g(X,Y) + b1 g(X,u) g(Y,u)
/// ```
///
/// with every weight evaluated at `t = g(u,u)`. On a one-dimensional base
/// the `b` weights are redundant and dropped.
pub fn bundle_metric(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
    p: &BundleVector,
    q: &BundleVector,
) -> Result<f64> {
    let n = m.dim();
    let g = metric_at(m, &z.x)?;
    let t = inner(&g, &z.u, &z.u, n);
    let d = gens.derived_at(t)?;
    let (b1, b2, big_b) = if n == 1 {
        (0.0, 0.0, 0.0)
    } else {
        (d.b1, d.b2, d.big_b)
    };

    let gu = |v: &[f64]| inner(&g, v, &z.u, n);
    let hh = d.big_a * inner(&g, &p.hor, &q.hor, n) + big_b * gu(&p.hor) * gu(&q.hor);
    let hv = d.a2 * (inner(&g, &p.hor, &q.ver, n) + inner(&g, &p.ver, &q.hor, n))
        + b2 * (gu(&p.hor) * gu(&q.ver) + gu(&p.ver) * gu(&q.hor));
    let vv = d.a1 * inner(&g, &p.ver, &q.ver, n) + b1 * gu(&p.ver) * gu(&q.ver);
    Ok(hh + hv + vv)
}

/// `G` as a symmetric `2n x 2n` matrix in the induced TM coordinates,
/// via the splitting of the coordinate basis: `∂_i` splits into
/// `(e_i ; Gamma^r_si u^s)`, the fiber direction `∂_{n+r}` into `(0 ; e_r)`.
pub fn bundle_metric_matrix(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
) -> Result<Vec<f64>> {
    let n = m.dim();
    let gamma = christoffel_at(m, &z.x)?;
    let mut basis = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut hor = vec![0.0; n];
        hor[i] = 1.0;
        let mut ver = vec![0.0; n];
        for r in 0..n {
            for s in 0..n {
                ver[r] += gamma.get(r, s, i) * z.u[s];
            }
        }
        basis.push(BundleVector::new(hor, ver));
    }
    for r in 0..n {
        let mut ver = vec![0.0; n];
        ver[r] = 1.0;
        basis.push(BundleVector::new(vec![0.0; n], ver));
    }

    let dim = 2 * n;
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let v = bundle_metric(m, gens, z, &basis[i], &basis[j])?;
            out[i * dim + j] = v;
            out[j * dim + i] = v;
        }
    }
    Ok(out)
}

/// Levi-Civita Christoffel symbols of `G` on the `2n` TM coordinates, by
/// central differences of [`bundle_metric_matrix`] in every coordinate
/// (step `1e-5 * max(1, |coordinate|)` per direction).
pub fn bundle_christoffel(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
) -> Result<Christoffel> {
    let n = m.dim();
    let dim = 2 * n;
    let g = bundle_metric_matrix(m, gens, z)?;

    let mat = DMatrix::from_row_slice(dim, dim, &g);
    let svd = mat.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if !cond.is_finite() || cond > tol::MAX_CONDITION {
        return Err(Error::SingularMetric {
            where_: format!("bundle metric at {:?}", z),
            cond,
        });
    }

    let coords = z.coords();
    let mut dg: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for l in 0..dim {
        let h = central_step(crate::diff::DEFAULT_CENTRAL_STEP, coords[l]);
        let mut cp = coords.clone();
        let mut cm = coords.clone();
        cp[l] += h;
        cm[l] -= h;
        let gp = bundle_metric_matrix(m, gens, &TangentPoint::from_coords(&cp))?;
        let gm = bundle_metric_matrix(m, gens, &TangentPoint::from_coords(&cm))?;
        dg.push(
            gp.iter()
                .zip(gm.iter())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    let data = christoffel_from_partials(dim, &g, &dg, "bundle christoffel")?;
    Ok(Christoffel::from_raw(dim, data))
}

/// Covariant derivative `DV/ds` of a coordinate vector field `V(s)` along
/// a TM curve `c(s)`, at parameter `s`:
/// `(DV/ds)^a = dV^a/ds + Gamma^a_bc c'^b V^c`.
///
/// Both `dV/ds` and `c'` are central differences in `s`.
pub fn covariant_derivative_along(
    m: &ChartManifold,
    gens: &GeneratorSet,
    curve: &dyn Fn(f64) -> TangentPoint,
    v: &dyn Fn(f64) -> Vec<f64>,
    s: f64,
) -> Result<Vec<f64>> {
    let n = m.dim();
    let dim = 2 * n;
    let h = central_step(crate::diff::DEFAULT_CENTRAL_STEP, s);

    let z = curve(s);
    let gamma = bundle_christoffel(m, gens, &z)?;

    let (cp, cm) = (curve(s + h).coords(), curve(s - h).coords());
    let cdot: Vec<f64> = cp
        .iter()
        .zip(cm.iter())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    let (vp, vm) = (v(s + h), v(s - h));
    let dv: Vec<f64> = vp
        .iter()
        .zip(vm.iter())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    let v0 = v(s);

    let mut out = dv;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                out[a] += gamma.get(a, b, c) * cdot[b] * v0[c];
            }
        }
    }
    Ok(out)
}
