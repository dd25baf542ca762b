//! Least-squares classification of a vector field against the model
//! `∇_X u = rho(X) u + alpha X` (pointwise covector `rho`, scalar
//! `alpha`): parallel, concircular, recurrent, torse-forming, or generic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::manifold::fields::VectorField;
use crate::manifold::ops::covariant_derivative;
use crate::manifold::ChartManifold;

/// Fitted model at one sample point.
#[derive(Clone, Debug)]
pub struct PointFit {
    pub x: Vec<f64>,
    /// Components of the fitted covector `rho` in the coordinate basis.
    pub rho: Vec<f64>,
    pub alpha: f64,
    /// Worst relative equation residual of the fit at this point.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldClass {
    /// `∇u = 0`.
    Parallel,
    /// `∇_X u = alpha X` with `alpha` a function of the point.
    Concircular,
    /// `∇_X u = rho(X) u` with `rho` a 1-form.
    Recurrent,
    /// Both parts present.
    TorseForming,
    /// The model does not fit within tolerance.
    Generic,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: FieldClass,
    pub fits: Vec<PointFit>,
    /// Worst relative fit residual over all points (meaningful for every
    /// class except `Generic`, where it is what disqualified the model).
    pub max_residual: f64,
    /// Range of fitted `alpha` across points.
    pub alpha_range: (f64, f64),
    /// Largest `|rho_j|` seen at any point.
    pub rho_max: f64,
    /// Set when `u` nearly vanished at some sample point, making the
    /// split between the `u` and `X` directions unreliable there.
    pub ambiguous: bool,
}

/// Classify `u` from covariant-derivative samples `(x, X)`. Directions
/// sharing a base point are fitted jointly; the per-point fits are then
/// aggregated into a single verdict with `tol` deciding which fitted
/// coefficients count as zero.
pub fn classify_field(
    m: &ChartManifold,
    u: &dyn VectorField,
    samples: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
) -> Result<Classification> {
    let n = m.dim();
    let needed = n * (n + 1);
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }

    // Group directions by base point, preserving first-seen order.
    let mut groups: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::new();
    for (x, xdir) in samples {
        match groups.iter_mut().find(|(p, _)| p == x) {
            Some((_, dirs)) => dirs.push(xdir.clone()),
            None => groups.push((x.clone(), vec![xdir.clone()])),
        }
    }

    let mut fits = Vec::with_capacity(groups.len());
    let mut ambiguous = false;
    let mut max_residual: f64 = 0.0;
    let mut rho_max: f64 = 0.0;
    let mut alpha_min = f64::INFINITY;
    let mut alpha_max = f64::NEG_INFINITY;

    for (x, dirs) in &groups {
        if dirs.len() * n < n + 1 {
            return Err(Error::InsufficientSamples {
                needed: n + 1,
                got: dirs.len() * n,
            });
        }
        let mut uval = vec![0.0; n];
        u.eval(x, &mut uval);
        let unorm: f64 = uval.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u_vanishes = unorm < 1e-8;
        ambiguous |= u_vanishes;

        // Unknowns: rho_1..rho_n then alpha; one equation per (direction,
        // component). When u vanishes the rho columns are zero, so the
        // solve is restricted to alpha alone.
        let rows = dirs.len() * n;
        let cols = if u_vanishes { 1 } else { n + 1 };
        let mut a = DMatrix::<f64>::zeros(rows, cols);
        let mut b = DVector::<f64>::zeros(rows);
        let mut scale: f64 = 1.0;
        for (s, xdir) in dirs.iter().enumerate() {
            let d = covariant_derivative(m, u, xdir, x)?;
            for k in 0..n {
                let r = s * n + k;
                if u_vanishes {
                    a[(r, 0)] = xdir[k];
                } else {
                    for j in 0..n {
                        a[(r, j)] = xdir[j] * uval[k];
                    }
                    a[(r, n)] = xdir[k];
                }
                b[r] = d[k];
                scale = scale.max(d[k].abs());
            }
        }

        let svd = a.clone().svd(true, true);
        let z = svd
            .solve(&b, 1e-13)
            .map_err(|e| Error::RankDeficiency {
                what: format!("classification fit at {x:?}: {e}"),
                expected: cols,
                got: 0,
            })?;
        let resid_vec = &a * &z - &b;
        let residual = resid_vec.amax() / scale;

        let (rho, alpha) = if u_vanishes {
            (vec![0.0; n], z[0])
        } else {
            (z.as_slice()[..n].to_vec(), z[n])
        };
        for r in &rho {
            rho_max = rho_max.max(r.abs());
        }
        alpha_min = alpha_min.min(alpha);
        alpha_max = alpha_max.max(alpha);
        max_residual = max_residual.max(residual);
        fits.push(PointFit {
            x: x.clone(),
            rho,
            alpha,
            residual,
        });
    }

    let alpha_abs = alpha_min.abs().max(alpha_max.abs());
    let class = if max_residual > tol {
        FieldClass::Generic
    } else if rho_max <= tol && alpha_abs <= tol {
        FieldClass::Parallel
    } else if rho_max <= tol {
        FieldClass::Concircular
    } else if alpha_abs <= tol {
        FieldClass::Recurrent
    } else {
        FieldClass::TorseForming
    };

    Ok(Classification {
        class,
        fits,
        max_residual,
        alpha_range: (alpha_min, alpha_max),
        rho_max,
        ambiguous,
    })
}

/// Convenience wrapper: classify using the coordinate basis directions at
/// each of the given points.
pub fn classify_on_grid(
    m: &ChartManifold,
    u: &dyn VectorField,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<Classification> {
    let n = m.dim();
    let mut samples = Vec::with_capacity(points.len() * n);
    for x in points {
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            samples.push((x.clone(), e));
        }
    }
    classify_field(m, u, &samples, tol)
}
