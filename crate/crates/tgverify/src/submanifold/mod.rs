//! The graph submanifold `u(M)` inside `(TM, G)`: tangent and normal
//! frames, the second fundamental form computed two independent ways, the
//! `T_W`/`T_V` vanishing criteria with their specializations, and the
//! aggregate totally-geodesic verdict.

mod closed_form;
mod criteria;
mod oracle;
mod verify;

pub use closed_form::{
    calibrate_curvature_convention, default_convention, lifted_derivative_form,
    lifted_derivative_form_with,
};
pub use criteria::{
    constant_length_converse, tau_pairing_identity, torse_forming_normality, tw_tv_concircular,
    tw_tv_general, tw_tv_recurrent,
};
pub use oracle::{g_norm, oracle_pairing, oracle_pairing_field, sff_oracle};
pub use verify::{totally_geodesic_test, SffSample, VerificationConfig, VerificationReport};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gnatural::GeneratorSet;
use crate::manifold::fields::VectorField;
use crate::manifold::{covariant_derivative, ChartManifold};
use crate::tangent_bundle::{bundle_metric, BundleVector, TangentPoint};

/// `u_*(X) = X^h + (∇_X u)^v` at `p`, in split components.
pub fn pushforward(
    m: &ChartManifold,
    u: &dyn VectorField,
    xvec: &[f64],
    p: &[f64],
) -> Result<BundleVector> {
    let du = covariant_derivative(m, u, xvec, p)?;
    Ok(BundleVector::new(xvec.to_vec(), du))
}

/// The graph point `z = (p, u(p))`.
pub fn graph_point(u: &dyn VectorField, p: &[f64]) -> TangentPoint {
    let mut uv = vec![0.0; p.len()];
    u.eval(p, &mut uv);
    TangentPoint::new(p.to_vec(), uv)
}

/// Tangent and normal frames of `u(M)` at one base point.
#[derive(Clone, Debug)]
pub struct GraphPointFrame {
    pub p: Vec<f64>,
    pub z: TangentPoint,
    /// `u_*(e_i)` for the coordinate basis.
    pub tangent_basis: Vec<BundleVector>,
    /// A basis of `{eta : G(eta, u_*(e_i)) = 0 for all i}`.
    pub normal_basis: Vec<BundleVector>,
}

impl GraphPointFrame {
    pub fn build(
        m: &ChartManifold,
        gens: &GeneratorSet,
        u: &dyn VectorField,
        p: &[f64],
    ) -> Result<Self> {
        let n = m.dim();
        let z = graph_point(u, p);

        let mut tangent_basis = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            tangent_basis.push(pushforward(m, u, &e, p)?);
        }
        let normal_basis = normal_basis(m, gens, &z, &tangent_basis)?;
        Ok(GraphPointFrame {
            p: p.to_vec(),
            z,
            tangent_basis,
            normal_basis,
        })
    }

    /// Worst `|G(normal_j, tangent_i)|` — the frame orthogonality defect.
    pub fn orthogonality_defect(&self, m: &ChartManifold, gens: &GeneratorSet) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for eta in &self.normal_basis {
            for tb in &self.tangent_basis {
                worst = worst.max(bundle_metric(m, gens, &self.z, eta, tb)?.abs());
            }
        }
        Ok(worst)
    }
}

/// Basis of the `G`-orthogonal complement of `span(tangent_basis)` at `z`,
/// in split components, via the spectrum of `M^T M` where
/// `M[i][.] = G(., u_*(e_i))` over the `2n` split coordinate directions.
pub fn normal_basis(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
    tangent_basis: &[BundleVector],
) -> Result<Vec<BundleVector>> {
    let n = m.dim();
    let dim = 2 * n;

    // split-basis vectors: first n horizontal unit directions, then n
    // vertical ones
    let unit = |j: usize| -> BundleVector {
        let mut hor = vec![0.0; n];
        let mut ver = vec![0.0; n];
        if j < n {
            hor[j] = 1.0;
        } else {
            ver[j - n] = 1.0;
        }
        BundleVector::new(hor, ver)
    };

    let mut mat = DMatrix::<f64>::zeros(n, dim);
    for (i, tb) in tangent_basis.iter().enumerate() {
        for j in 0..dim {
            mat[(i, j)] = bundle_metric(m, gens, z, &unit(j), tb)?;
        }
    }

    // kernel of mat = eigenvectors of mat^T mat with vanishing eigenvalue
    let mtm = mat.transpose() * &mat;
    let eig = mtm.symmetric_eigen();
    let max_eig = eig.eigenvalues.amax().max(1e-300);
    let mut kernel: Vec<(f64, DVector<f64>)> = Vec::new();
    for (idx, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() < 1e-10 * max_eig {
            kernel.push((ev.abs(), eig.eigenvectors.column(idx).into_owned()));
        }
    }
    if kernel.len() != n {
        return Err(Error::RankDeficiency {
            what: format!("normal space at {:?}", z),
            expected: n,
            got: kernel.len(),
        });
    }
    // deterministic order: cleanest kernel directions first
    kernel.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    Ok(kernel
        .into_iter()
        .map(|(_, col)| {
            BundleVector::new(col.as_slice()[..n].to_vec(), col.as_slice()[n..].to_vec())
        })
        .collect())
}

/// `G`-orthogonal projection of `v` onto the span of `basis` at `z`, via
/// the Gram system of the basis.
pub fn project_onto(
    m: &ChartManifold,
    gens: &GeneratorSet,
    z: &TangentPoint,
    basis: &[BundleVector],
    v: &BundleVector,
) -> Result<BundleVector> {
    let k = basis.len();
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for i in 0..k {
        for j in 0..=i {
            let gij = bundle_metric(m, gens, z, &basis[i], &basis[j])?;
            gram[(i, j)] = gij;
            gram[(j, i)] = gij;
        }
        rhs[i] = bundle_metric(m, gens, z, v, &basis[i])?;
    }
    let coeffs = gram.lu().solve(&rhs).ok_or_else(|| Error::RankDeficiency {
        what: format!("Gram system of a {k}-frame at {:?}", z),
        expected: k,
        got: 0,
    })?;
    let n = v.hor.len();
    let mut hor = vec![0.0; n];
    let mut ver = vec![0.0; n];
    for (c, b) in coeffs.iter().zip(basis.iter()) {
        for i in 0..n {
            hor[i] += c * b.hor[i];
            ver[i] += c * b.ver[i];
        }
    }
    Ok(BundleVector::new(hor, ver))
}

/// Normal component of `v` at the frame's point.
pub fn project_normal(
    m: &ChartManifold,
    gens: &GeneratorSet,
    frame: &GraphPointFrame,
    v: &BundleVector,
) -> Result<BundleVector> {
    project_onto(m, gens, &frame.z, &frame.normal_basis, v)
}

/// Smooth normal-field constructor: at any base point `q`, the
/// `G`-orthogonal projection of the constant split coefficients
/// `(w0, v0)` onto the normal space of `u(M)` at `(q, u(q))`. The
/// projection is independent of the kernel basis chosen pointwise, so the
/// result is a well-defined smooth field along `u(M)`.
pub fn projected_normal_field<'a>(
    m: &'a ChartManifold,
    gens: &'a GeneratorSet,
    u: &'a dyn VectorField,
    w0: Vec<f64>,
    v0: Vec<f64>,
) -> impl Fn(&[f64]) -> Result<BundleVector> + 'a {
    move |q: &[f64]| {
        let frame = GraphPointFrame::build(m, gens, u, q)?;
        project_normal(m, gens, &frame, &BundleVector::new(w0.clone(), v0.clone()))
    }
}
