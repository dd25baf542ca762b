//! Pointwise criterion vectors for the graph of a vector field.
//!
//! For a normal section `W^h + V^v` along the graph, the derivative
//! pairing of [`super::closed_form`] collapses (after moving derivatives
//! off `W` and `V` with the normality relation) to
//! `-(g(W, T_W) + g(V, T_V))` with `T_W`, `T_V` depending on `u`, `X` and
//! the generator weights only. The graph is totally geodesic exactly when
//! both vanish for every `X`. This module computes the general forms and
//! the reductions available for concircular, recurrent and torse-forming
//! fields, plus the constant-length criterion along the distinguished
//! normal direction.

use crate::diff::{directional_central, directional_d1, D1};
use crate::error::{Error, Result};
use crate::gnatural::{DerivedScalars, GeneratorSet};
use crate::manifold::{
    christoffel_at, cov_derivative_oneform, cov_derivative_vec, covariant_derivative, inner,
    metric_at, riemann_at, CentralOps, ChartManifold, CurvatureAtPoint, CurvatureConvention,
    DiffMode, DualOps, EvalAt, GeomOps, ScalarField, VectorField,
};
use crate::submanifold::closed_form::default_convention;
use crate::submanifold::graph_point;
use crate::tangent_bundle::{bundle_metric, BundleVector};
use crate::tol;

/// Riemann curvature at `p` in the convention matching the transported
/// oracle (see [`super::closed_form::calibrate_curvature_convention`]).
fn calibrated_riemann(m: &ChartManifold, p: &[f64]) -> Result<CurvatureAtPoint> {
    let riem = riemann_at(m, p)?;
    Ok(match default_convention() {
        CurvatureConvention::Standard => riem,
        CurvatureConvention::Flipped => riem.flipped(),
    })
}

/// One-dimensional bases carry no b-weights; zero them and refresh the
/// derived combinations so point formulas stay consistent with the
/// bundle metric construction.
fn drop_b_weights(d: &mut DerivedScalars) {
    d.b1 = 0.0;
    d.b2 = 0.0;
    d.b3 = 0.0;
    d.b1d = 0.0;
    d.b2d = 0.0;
    d.b3d = 0.0;
    d.big_b = 0.0;
    d.big_bd = 0.0;
    d.f1 = d.a1;
    d.f2 = d.a2;
    d.f3 = d.a3;
    d.a = d.a1 * d.big_a - d.a2 * d.a2;
    d.f = d.f1 * (d.f1 + d.f3) - d.f2 * d.f2;
}

fn derived_for(m: &ChartManifold, gens: &GeneratorSet, t: f64) -> Result<DerivedScalars> {
    let mut d = gens.derived_at(t)?;
    if m.dim() == 1 {
        drop_b_weights(&mut d);
    }
    Ok(d)
}

#[derive(Clone, Copy)]
enum Side {
    Hor,
    Ver,
}

/// The field inside the outer `∇_X` of the criterion:
/// hor side `A X + a2 ∇_X u + B g(u,X) u + b2 g(u,∇_X u) u`,
/// ver side the same with weights `(a2, a1, b2, b1)`.
struct JetComposite<'a> {
    gens: &'a GeneratorSet,
    u: &'a dyn VectorField,
    xfield: &'a dyn VectorField,
    side: Side,
    drop_b: bool,
}

impl JetComposite<'_> {
    fn eval<S: EvalAt, E: GeomOps<S>>(&self, eng: &E, y: &[S], out: &mut [S]) {
        let n = eng.n();
        let g = eng.metric(y);
        let uy = eng.field(self.u, y);
        let xy = eng.field(self.xfield, y);
        let du = cov_derivative_vec(eng, self.u, &xy, y)
            .expect("covariant derivative inside criterion composite");
        let t = inner(&g, &uy, &uy, n);
        let w = self.gens.weights_at(t);
        let (cx, cdu, mut cgux, mut cgudu) = match self.side {
            Side::Hor => (w.big_a, w.a2, w.big_b, w.b2),
            Side::Ver => (w.a2, w.a1, w.b2, w.b1),
        };
        if self.drop_b {
            cgux = S::from_f64(0.0);
            cgudu = S::from_f64(0.0);
        }
        let gux = inner(&g, &uy, &xy, n);
        let gudu = inner(&g, &uy, &du, n);
        for k in 0..n {
            out[k] = cx * xy[k] + cdu * du[k] + (cgux * gux + cgudu * gudu) * uy[k];
        }
    }
}

/// `∇_X E` at `p` for the composite `E` of one side, including the
/// Christoffel correction at `p`.
fn composite_cov(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    xfield: &dyn VectorField,
    side: Side,
    p: &[f64],
) -> Result<Vec<f64>> {
    let n = m.dim();
    let comp = JetComposite {
        gens,
        u,
        xfield,
        side,
        drop_b: n == 1,
    };
    let mut x0 = vec![0.0; n];
    xfield.eval(p, &mut x0);

    let (partial, e0) = match m.diff_mode {
        DiffMode::ForwardDual => {
            let eng = DualOps::new(&*m.metric);
            let f = |y: &[D1], out: &mut [D1]| comp.eval(&eng, y, out);
            let partial = directional_d1(f, p, &x0, n);
            let mut e0 = vec![0.0; n];
            comp.eval(&eng, p, &mut e0);
            (partial, e0)
        }
        DiffMode::CentralDifference { rel } => {
            let eng = CentralOps::new(&*m.metric, rel);
            let f = |y: &[f64], out: &mut [f64]| comp.eval(&eng, y, out);
            let partial = directional_central(f, p, &x0, rel, n);
            let mut e0 = vec![0.0; n];
            comp.eval(&eng, p, &mut e0);
            (partial, e0)
        }
    };

    let gamma = christoffel_at(m, p)?;
    let mut out = partial;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[k] += gamma.get(k, i, j) * x0[i] * e0[j];
            }
        }
    }
    Ok(out)
}

/// Criterion vectors for an arbitrary field `u` and direction field `X`:
///
/// `T_W = ∇_X(A X + a2 ∇_X u + B g(u,X) u + b2 g(u,∇_X u) u)
///        + a1 R(u,∇_X u)X + a2 R(u,X)X`
///
/// `T_V = ∇_X(a2 X + a1 ∇_X u + b2 g(u,X) u + b1 g(u,∇_X u) u)
///        - (B g(u,X) + b2 g(u,∇_X u)) X
///        - (b1 g(u,∇_X u) + b2 g(u,X)) ∇_X u
///        - (A' g(X,X) + B' g(u,X)^2 + a1' g(∇_X u,∇_X u)
///           + 2 a2' g(X,∇_X u) + b1' g(u,∇_X u)^2
///           + 2 b2' g(u,X) g(u,∇_X u)) u`
///
/// Both vanish for every `X` exactly when the graph is totally geodesic.
pub fn tw_tv_general(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    xfield: &dyn VectorField,
    p: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let mut x0 = vec![0.0; n];
    xfield.eval(p, &mut x0);
    let du = covariant_derivative(m, u, &x0, p)?;

    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;

    let mut t_w = composite_cov(m, gens, u, xfield, Side::Hor, p)?;
    let riem = calibrated_riemann(m, p)?;
    let r1 = riem.apply(&u0, &du, &x0);
    let r2 = riem.apply(&u0, &x0, &x0);
    for k in 0..n {
        t_w[k] += d.a1 * r1[k] + d.a2 * r2[k];
    }

    let mut t_v = composite_cov(m, gens, u, xfield, Side::Ver, p)?;
    let g_ux = inner(&g, &u0, &x0, n);
    let g_udu = inner(&g, &u0, &du, n);
    let g_xx = inner(&g, &x0, &x0, n);
    let g_xdu = inner(&g, &x0, &du, n);
    let g_dudu = inner(&g, &du, &du, n);
    let cx = d.big_b * g_ux + d.b2 * g_udu;
    let cdu = d.b1 * g_udu + d.b2 * g_ux;
    let cu = d.big_ad * g_xx
        + d.big_bd * g_ux * g_ux
        + d.a1d * g_dudu
        + 2.0 * d.a2d * g_xdu
        + d.b1d * g_udu * g_udu
        + 2.0 * d.b2d * g_ux * g_udu;
    for k in 0..n {
        t_v[k] -= cx * x0[k] + cdu * du[k] + cu * u0[k];
    }
    Ok((t_w, t_v))
}

/// Residual of the one-jet model `∇_{e_i} u = rho_i u + alpha e_i` over
/// the coordinate basis at `p`, relative to the derivative scale.
fn jet_model_residual(
    m: &ChartManifold,
    u: &dyn VectorField,
    rho: Option<&dyn VectorField>,
    alpha: Option<&dyn ScalarField>,
    p: &[f64],
) -> Result<f64> {
    let n = m.dim();
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let rv = rho.map(|r| {
        let mut v = vec![0.0; n];
        r.eval(p, &mut v);
        v
    });
    let av = alpha.map(|a| a.eval(p));

    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let cd = covariant_derivative(m, u, &e, p)?;
        for k in 0..n {
            let mut expect = 0.0;
            if let Some(r) = &rv {
                expect += r[i] * u0[k];
            }
            if let Some(a) = av {
                if k == i {
                    expect += a;
                }
            }
            worst = worst.max((cd[k] - expect).abs());
            scale = scale.max(cd[k].abs());
        }
    }
    Ok(worst / scale)
}

/// Directional derivative `X(alpha)` through the manifold's engine.
fn scalar_derivative(
    m: &ChartManifold,
    alpha: &dyn ScalarField,
    p: &[f64],
    xvec: &[f64],
) -> Vec<f64> {
    match m.diff_mode {
        DiffMode::ForwardDual => {
            let eng = DualOps::new(&*m.metric);
            let gr: Vec<f64> = GeomOps::<f64>::grad_scalar(&eng, alpha, p);
            vec![gr.iter().zip(xvec).map(|(a, b)| a * b).sum()]
        }
        DiffMode::CentralDifference { rel } => {
            let eng = CentralOps::new(&*m.metric, rel);
            let gr: Vec<f64> = GeomOps::<f64>::grad_scalar(&eng, alpha, p);
            vec![gr.iter().zip(xvec).map(|(a, b)| a * b).sum()]
        }
    }
}

/// Criterion vectors reduced for a concircular field (`∇_Y u = alpha Y`).
/// The terms in `∇_X X` are dropped: they reproduce exactly the normality
/// pairing with `∇_X X` in place of `X`, so they carry no extra
/// information about the graph.
pub fn tw_tv_concircular(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    alpha: &dyn ScalarField,
    p: &[f64],
    xvec: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let residual = jet_model_residual(m, u, None, Some(alpha), p)?;
    if residual > tol::ANALYTIC {
        return Err(Error::NotConcircular { residual });
    }

    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;
    let al = alpha.eval(p);
    let dal = scalar_derivative(m, alpha, p, xvec)[0];

    let g_ux = inner(&g, &u0, xvec, n);
    let g_xx = inner(&g, xvec, xvec, n);
    let xt = 2.0 * al * g_ux; // X(t) for a concircular field

    let x_a_aa2 = (d.big_ad + al * d.a2d) * xt + dal * d.a2;
    let x_b_ab2 = (d.big_bd + al * d.b2d) * xt + dal * d.b2;
    let x_a2_aa1 = (d.a2d + al * d.a1d) * xt + dal * d.a1;
    let x_b1 = d.b1d * xt;

    let riem = calibrated_riemann(m, p)?;
    let r2 = riem.apply(&u0, xvec, xvec);

    let cw_x = x_a_aa2 + al * (d.big_b + al * d.b2) * g_ux;
    let cw_u = x_b_ab2 * g_ux + al * (d.big_b + al * d.b2) * g_xx;
    let cr = d.a2 + al * d.a1;

    let cv_x = x_a2_aa1 - (d.big_b + al * d.b2) * g_ux;
    let cv_u = (d.b1 * dal + 0.5 * al * x_b1) * g_ux + al * (d.b2 + al * d.b1) * g_xx
        - d.big_bd * g_ux * g_ux
        - (d.big_ad + al * (d.a1d * al + 2.0 * d.a2d)) * g_xx;

    let mut t_w = vec![0.0; n];
    let mut t_v = vec![0.0; n];
    for k in 0..n {
        t_w[k] = cw_x * xvec[k] + cr * r2[k] + cw_u * u0[k];
        t_v[k] = cv_x * xvec[k] + cv_u * u0[k];
    }
    Ok((t_w, t_v))
}

/// Criterion vectors reduced for a recurrent field (`∇_Y u = rho(Y) u`,
/// `rho` a 1-form given by coordinate components). As in the concircular
/// case the `∇_X X` terms are dropped.
pub fn tw_tv_recurrent(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    rho: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let residual = jet_model_residual(m, u, Some(rho), None, p)?;
    if residual > tol::ANALYTIC {
        return Err(Error::NotRecurrent { residual });
    }

    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;

    let mut rv = vec![0.0; n];
    rho.eval(p, &mut rv);
    let rx: f64 = rv.iter().zip(xvec).map(|(a, b)| a * b).sum();

    // (∇_X rho)(X) through the manifold's engine
    let drho = match m.diff_mode {
        DiffMode::ForwardDual => {
            cov_derivative_oneform(&DualOps::new(&*m.metric), rho, xvec, p)?
        }
        DiffMode::CentralDifference { rel } => {
            cov_derivative_oneform(&CentralOps::new(&*m.metric, rel), rho, xvec, p)?
        }
    };
    let drx: f64 = drho.iter().zip(xvec).map(|(a, b)| a * b).sum();

    let g_ux = inner(&g, &u0, xvec, n);
    let g_xx = inner(&g, xvec, xvec, n);

    let riem = calibrated_riemann(m, p)?;
    let r2 = riem.apply(&u0, xvec, xvec);

    let jet = drx + rx * rx; // (∇_X rho)(X) + rho(X)^2

    let cw_x = 2.0 * d.big_ad * rx * t;
    let cw_u = d.f2 * jet
        + 2.0 * rx * (d.big_b + d.big_bd * t) * g_ux
        + 2.0 * rx * rx * t * (d.a2d + d.b2 + d.b2d * t);

    let cv_x = (2.0 * d.a2d - d.b2) * rx * t - d.big_b * g_ux;
    let cv_u = d.f1 * jet + (d.b1 + d.a1d + d.b1d * t) * rx * rx * t
        - ((2.0 * d.a2d - d.b2) * rx * g_ux + d.big_ad * g_xx + d.big_bd * g_ux * g_ux);

    let mut t_w = vec![0.0; n];
    let mut t_v = vec![0.0; n];
    for k in 0..n {
        t_w[k] = cw_x * xvec[k] + d.a2 * r2[k] + cw_u * u0[k];
        t_v[k] = cv_x * xvec[k] + cv_u * u0[k];
    }
    Ok((t_w, t_v))
}

/// Normality pairing for a torse-forming field
/// (`∇_Y u = rho(Y) u + alpha Y`): the value of
///
/// `g(W, (A + alpha a2) X + (B + alpha b2) g(u,X) u + rho(X) F2 u)
///  + g(V, (a2 + alpha a1) X + (b2 + alpha b1) g(u,X) u + rho(X) F1 u)`
///
/// which vanishes for all `X` exactly when `W^h + V^v` is normal to the
/// graph at `p`.
#[allow(clippy::too_many_arguments)]
pub fn torse_forming_normality(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    rho: &dyn VectorField,
    alpha: &dyn ScalarField,
    p: &[f64],
    xvec: &[f64],
    w: &[f64],
    v: &[f64],
) -> Result<f64> {
    let residual = jet_model_residual(m, u, Some(rho), Some(alpha), p)?;
    if residual > tol::ANALYTIC {
        return Err(Error::NotTorseForming { residual });
    }

    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;
    let al = alpha.eval(p);
    let mut rv = vec![0.0; n];
    rho.eval(p, &mut rv);
    let rx: f64 = rv.iter().zip(xvec).map(|(a, b)| a * b).sum();
    let g_ux = inner(&g, &u0, xvec, n);

    let mut w_pair = vec![0.0; n];
    let mut v_pair = vec![0.0; n];
    for k in 0..n {
        w_pair[k] = (d.big_a + al * d.a2) * xvec[k]
            + ((d.big_b + al * d.b2) * g_ux + rx * d.f2) * u0[k];
        v_pair[k] = (d.a2 + al * d.a1) * xvec[k]
            + ((d.b2 + al * d.b1) * g_ux + rx * d.f1) * u0[k];
    }
    Ok(inner(&g, w, &w_pair, n) + inner(&g, v, &v_pair, n))
}

/// Constant-length criterion: the derivative pairing along the
/// distinguished normal `tau = (F1 + F3) u^v - F2 u^h`, expanded in base
/// data. Requires `g(u, ∇_Y u) = 0` over the basis at `p` (constant
/// length); the graph cannot be totally geodesic unless this value
/// vanishes for every `X`. For the canonical weights it reduces to
/// `g(∇_X u, ∇_X u)`, which forces `u` parallel.
pub fn constant_length_converse(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
) -> Result<f64> {
    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);

    // precondition: t = g(u,u) critical at p in every direction
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let cd = covariant_derivative(m, u, &e, p)?;
        let v = inner(&g, &u0, &cd, n);
        if v.abs() > worst.abs() {
            worst = v;
        }
    }
    if worst.abs() > tol::ANALYTIC {
        return Err(Error::NotConstantLength { value: worst });
    }

    let du = covariant_derivative(m, u, xvec, p)?;
    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;

    let g_xx = inner(&g, xvec, xvec, n);
    let g_ux = inner(&g, &u0, xvec, n);
    let g_xdu = inner(&g, xvec, &du, n);
    let g_dudu = inner(&g, &du, &du, n);

    let riem = calibrated_riemann(m, p)?;
    let r_udu_ux = riem.pair(&u0, &du, &u0, xvec);
    let r_ux_ux = riem.pair(&u0, xvec, &u0, xvec);

    let f13 = d.f1 + d.f3;
    let value = ((d.a1 + d.a1d * t) * f13 - d.a2 * d.f2) * g_dudu
        - d.f2 * (d.a1 * r_udu_ux + d.a2 * r_ux_ux + d.big_a * g_xdu)
        + f13
            * ((d.big_b + d.big_bd * t) * g_ux * g_ux
                + (d.a2 + 2.0 * d.a2d * t) * g_xdu
                + d.big_ad * t * g_xx);
    Ok(value)
}

/// Both sides of the identity `G(u_*X, tau) = F g(u, ∇_X u)` for the
/// distinguished normal candidate `tau = (F1 + F3) u^v - F2 u^h`: `tau`
/// is genuinely normal at points where the field length is critical, and
/// the defect is proportional to `g(u, ∇_X u)` with factor `F`.
pub fn tau_pairing_identity(
    m: &ChartManifold,
    gens: &GeneratorSet,
    u: &dyn VectorField,
    p: &[f64],
    xvec: &[f64],
) -> Result<(f64, f64)> {
    let n = m.dim();
    let g = metric_at(m, p)?;
    let mut u0 = vec![0.0; n];
    u.eval(p, &mut u0);
    let t = inner(&g, &u0, &u0, n);
    let d = derived_for(m, gens, t)?;

    let z = graph_point(u, p);
    let push = super::pushforward(m, u, xvec, p)?;
    let tau = BundleVector::new(
        u0.iter().map(|c| -d.f2 * c).collect(),
        u0.iter().map(|c| (d.f1 + d.f3) * c).collect(),
    );
    let lhs = bundle_metric(m, gens, &z, &push, &tau)?;

    let du = covariant_derivative(m, u, xvec, p)?;
    let rhs = d.f * inner(&g, &u0, &du, n);
    Ok((lhs, rhs))
}
