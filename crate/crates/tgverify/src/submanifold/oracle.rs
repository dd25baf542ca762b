//! Brute-force second fundamental form of the graph `u(M)`.
//!
//! Every quantity here reaches the bundle connection only through
//! [`covariant_derivative_along`] — central differences of the coordinate
//! metric on TM — so it shares no formula with the closed-form expansion
//! it certifies.

use crate::error::Result;
use crate::gnatural::GeneratorSet;
use crate::manifold::fields::VectorField;
use crate::manifold::{CentralOps, ChartManifold, DualOps, GeomOps};
use crate::submanifold::{graph_point, project_normal, pushforward, GraphPointFrame};
use crate::tangent_bundle::{
    assemble, bundle_metric, covariant_derivative_along, split, BundleVector, TangentPoint,
};
use crate::manifold::DiffMode;

/// The base curve `s -> p + s X` lifted to the graph:
/// `c(s) = (p + sX, u(p + sX))`.
fn graph_curve<'a>(
    u: &'a dyn VectorField,
    p: &'a [f64],
    xvec: &'a [f64],
) -> impl Fn(f64) -> TangentPoint + 'a {
    move |s: f64| {
        let y: Vec<f64> = p.iter().zip(xvec.iter()).map(|(pi, xi)| pi + s * xi).collect();
        graph_point(u, &y)
    }
}

/// TM coordinate components of `u_*(Y)` at base point `y`: `(Y ; J_u Y)`
/// with the plain Jacobian of `u` (the Christoffel corrections of the
/// horizontal and vertical contributions cancel).
fn graph_tangent_coords(
    m: &ChartManifold,
    u: &dyn VectorField,
    yfield: &dyn VectorField,
    y: &[f64],
) -> Vec<f64> {
    let n = m.dim();
    let (jac, yv) = match m.diff_mode {
        DiffMode::ForwardDual => {
            let eng = DualOps::new(&*m.metric);
            (eng.jacobian(u, y), eng.field(yfield, y))
        }
        DiffMode::CentralDifference { rel } => {
            let eng = CentralOps::new(&*m.metric, rel);
            (eng.jacobian(u, y), eng.field(yfield, y))
        }
    };
    let mut out = vec![0.0; 2 * n];
    out[..n].copy_from_slice(&yv);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += jac[i * n + j] * yv[j];
        }
        out[n + i] = acc;
    }
    out
}

/// `G(∇̃_{u_*(X)} (W^h + V^v), u_*(X))` computed by brute force: the
/// fields `W`, `V` are carried along the graph curve through `p` with
/// velocity `X` and differentiated by the numerically derived bundle
/// connection.
pub fn oracle_pairing(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
    w: &dyn VectorField,
    v: &dyn VectorField,
) -> Result<f64> {
    let n = m.dim();
    let curve = graph_curve(u, p, xvec);
    let eta = |s: f64| -> Vec<f64> {
        let z = curve(s);
        let mut wv = vec![0.0; n];
        let mut vv = vec![0.0; n];
        w.eval(&z.x, &mut wv);
        v.eval(&z.x, &mut vv);
        assemble(m, &BundleVector::new(wv, vv), &z).expect("assemble along graph curve")
    };
    let deta = covariant_derivative_along(m, gens, &curve, &eta, 0.0)?;

    let z0 = curve(0.0);
    let deta_split = split(m, &deta, &z0)?;
    let tangent = pushforward(m, u, xvec, p)?;
    bundle_metric(m, gens, &z0, &deta_split, &tangent)
}

/// Same pairing for an arbitrary split-vector field along the graph,
/// given as a closure of the base point.
pub fn oracle_pairing_field(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
    eta_field: &dyn Fn(&[f64]) -> Result<BundleVector>,
) -> Result<f64> {
    let curve = graph_curve(u, p, xvec);
    let eta = |s: f64| -> Vec<f64> {
        let z = curve(s);
        let bv = eta_field(&z.x).expect("normal field along graph curve");
        assemble(m, &bv, &z).expect("assemble along graph curve")
    };
    let deta = covariant_derivative_along(m, gens, &curve, &eta, 0.0)?;
    let z0 = curve(0.0);
    let deta_split = split(m, &deta, &z0)?;
    let tangent = pushforward(m, u, xvec, p)?;
    bundle_metric(m, gens, &z0, &deta_split, &tangent)
}

/// Normal component of `∇̃_{u_*(X)} (u_*(Y))` at `p` — the second
/// fundamental form `II(X, Y)` evaluated by brute force.
pub fn sff_oracle(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
    yfield: &dyn VectorField,
) -> Result<BundleVector> {
    let curve = graph_curve(u, p, xvec);
    let vfield = |s: f64| -> Vec<f64> {
        let z = curve(s);
        graph_tangent_coords(m, u, yfield, &z.x)
    };
    let dv = covariant_derivative_along(m, gens, &curve, &vfield, 0.0)?;
    let z0 = curve(0.0);
    let dv_split = split(m, &dv, &z0)?;
    let frame = GraphPointFrame::build(m, gens, u, p)?;
    project_normal(m, gens, &frame, &dv_split)
}

/// `sqrt(|G(v, v)|)` at `z` — the `G`-norm used for SFF magnitudes.
pub fn g_norm(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
    v: &BundleVector,
) -> Result<f64> {
    Ok(bundle_metric(m, gens, z, v, v)?.abs().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::fields::{ConstantField, PositionField, UnitWaveField};
    use crate::manifold::{sample_points, SampleConfig};

    #[test]
    fn parallel_field_graph_is_totally_geodesic_under_sasaki() {
        // flat and curved bases alike
        for (m, u) in [
            (
                ChartManifold::euclidean(2),
                ConstantField(vec![0.8, -0.4]),
            ),
            (
                ChartManifold::flat_torus2(),
                ConstantField(vec![1.0, 0.0]),
            ),
        ] {
            let gens = GeneratorSet::sasaki();
            for p in sample_points(&m, &SampleConfig::new(5, 17)).unwrap() {
                for xvec in [[1.0, 0.0], [0.0, 1.0], [0.7, -0.4]] {
                    let yfield = ConstantField(xvec.to_vec());
                    let ii = sff_oracle(&m, &gens, &u, &p, &xvec, &yfield).unwrap();
                    let z = graph_point(&u, &p);
                    let norm = g_norm(&m, &gens, &z, &ii).unwrap();
                    assert!(norm < 1e-6, "|II| = {norm} at {p:?}, X = {xvec:?}");
                }
            }
        }
    }

    #[test]
    fn position_field_graph_is_totally_geodesic_on_flat_base() {
        let m = ChartManifold::euclidean(2);
        let gens = GeneratorSet::sasaki();
        let u = PositionField(2);
        for p in sample_points(&m, &SampleConfig::new(5, 19)).unwrap() {
            let xvec = [0.6, 0.8];
            let yfield = ConstantField(xvec.to_vec());
            let ii = sff_oracle(&m, &gens, &u, &p, &xvec, &yfield).unwrap();
            let z = graph_point(&u, &p);
            let norm = g_norm(&m, &gens, &z, &ii).unwrap();
            assert!(norm < 1e-6, "|II| = {norm} at {p:?}");
        }
    }

    #[test]
    fn generic_field_on_sphere_is_not_totally_geodesic() {
        let m = ChartManifold::sphere2();
        let gens = GeneratorSet::sasaki();
        let u = UnitWaveField;
        let p = [1.0, 0.5];
        let xvec = [1.0, 0.4];
        let yfield = ConstantField(xvec.to_vec());
        let ii = sff_oracle(&m, &gens, &u, &p, &xvec, &yfield).unwrap();
        let z = graph_point(&u, &p);
        let norm = g_norm(&m, &gens, &z, &ii).unwrap();
        assert!(norm > 1e-3, "expected visible SFF, got {norm}");
    }

    #[test]
    fn sff_scalar_is_symmetric_in_its_arguments() {
        // II(X, Y) = II(Y, X): check the G-pairing against each normal
        let m = ChartManifold::sphere2();
        let gens = GeneratorSet::cheeger_gromoll();
        let u = UnitWaveField;
        let p = [1.2, -0.3];
        let frame = GraphPointFrame::build(&m, &gens, &u, &p).unwrap();
        let xv = [0.9, 0.2];
        let yv = [-0.3, 1.1];
        let ii_xy = sff_oracle(&m, &gens, &u, &p, &xv, &ConstantField(yv.to_vec())).unwrap();
        let ii_yx = sff_oracle(&m, &gens, &u, &p, &yv, &ConstantField(xv.to_vec())).unwrap();
        for eta in &frame.normal_basis {
            let a = bundle_metric(&m, &gens, &frame.z, &ii_xy, eta).unwrap();
            let b = bundle_metric(&m, &gens, &frame.z, &ii_yx, eta).unwrap();
            assert!((a - b).abs() < 1e-5, "II asymmetry: {a} vs {b}");
        }
    }

    #[test]
    fn sff_is_tensorial_in_the_one_jet() {
        // (1) rescaling: II(cX, cY) = c^2 II(X, Y); (2) replacing Y by a
        // different extension with the same value at p leaves the normal
        // component unchanged (the derivative part of ∇̃(u_* Y) is
        // tangential by the Gauss split)
        use crate::diff::Scalar;

        struct AffineProbe {
            base: Vec<f64>,
            p0: Vec<f64>,
        }
        impl AffineProbe {
            fn components<S: Scalar>(&self, x: &[S], out: &mut [S]) {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut v = S::from_f64(self.base[i]);
                    for (j, &p0j) in self.p0.iter().enumerate() {
                        let w = 0.4 + 0.3 * (i as f64) - 0.2 * (j as f64);
                        v = v + (x[j] - S::from_f64(p0j)) * S::from_f64(w);
                    }
                    *o = v;
                }
            }
        }
        impl VectorField for AffineProbe {
            fn dim(&self) -> usize {
                self.base.len()
            }
            crate::forward_field_impls!(components);
        }

        let m = ChartManifold::sphere2();
        let gens = GeneratorSet::sasaki();
        let u = UnitWaveField;
        let p = [1.3, 0.2];
        let xvec = [0.5, -0.7];

        let y1 = ConstantField(vec![0.5, -0.7]);
        let ii1 = sff_oracle(&m, &gens, &u, &p, &xvec, &y1).unwrap();

        let c = 2.0;
        let xs: Vec<f64> = xvec.iter().map(|v| v * c).collect();
        let y2 = ConstantField(xs.clone());
        let ii2 = sff_oracle(&m, &gens, &u, &p, &xs, &y2).unwrap();
        for i in 0..2 {
            assert!(
                (ii2.hor[i] - c * c * ii1.hor[i]).abs() < 1e-6 * (1.0 + ii1.hor[i].abs()),
                "hor tensoriality"
            );
            assert!(
                (ii2.ver[i] - c * c * ii1.ver[i]).abs() < 1e-6 * (1.0 + ii1.ver[i].abs()),
                "ver tensoriality"
            );
        }

        let y3 = AffineProbe {
            base: vec![0.5, -0.7],
            p0: p.to_vec(),
        };
        let ii3 = sff_oracle(&m, &gens, &u, &p, &xvec, &y3).unwrap();
        for i in 0..2 {
            assert!(
                (ii3.hor[i] - ii1.hor[i]).abs() < 1e-5,
                "extension dependence in hor: {} vs {}",
                ii3.hor[i],
                ii1.hor[i]
            );
            assert!(
                (ii3.ver[i] - ii1.ver[i]).abs() < 1e-5,
                "extension dependence in ver: {} vs {}",
                ii3.ver[i],
                ii1.ver[i]
            );
        }
    }

    #[test]
    fn oracle_pairing_vanishes_for_zero_fields() {
        let m = ChartManifold::sphere2();
        let gens = GeneratorSet::cheeger_gromoll();
        let u = PositionField(2);
        let zero = ConstantField(vec![0.0, 0.0]);
        let got = oracle_pairing(&m, &gens, &u, &[1.0, 0.3], &[0.8, 0.1], &zero, &zero).unwrap();
        assert!(got.abs() < 1e-9, "got {got}");
    }
}
