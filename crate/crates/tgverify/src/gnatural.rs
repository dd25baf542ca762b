//! Generator weights of a g-natural bundle metric.
//!
//! A metric on the tangent bundle is specified here by six scalar weight
//! functions `a1, a2, a3, b1, b2, b3` of `t = g(u, u)`. The combinations
//! that appear throughout are
//!
//! ```text
//! A = a1 + a3          B = b1 + b3          F_j = a_j + t b_j
//! a = a1 A - a2^2      F = F1 (F1 + F3) - F2^2
//! ```
//!
//! with the metric non-degenerate exactly when `a != 0` and (for base
//! dimension >= 2) `F != 0`.

use crate::diff::{C1Fn, Scalar};
use crate::error::{Error, Result};
use crate::tol;

/// Six weight functions of `t` plus a validity domain.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub name: String,
    pub a1: C1Fn,
    pub a2: C1Fn,
    pub a3: C1Fn,
    pub b1: C1Fn,
    pub b2: C1Fn,
    pub b3: C1Fn,
    /// Exclusive lower bound on admissible `t` (some constructed families
    /// blow up as `t -> 0`).
    pub t_lower: f64,
}

/// Weight values at one scalar level; `t` may carry dual parts, in which
/// case each weight carries the matching first-order chain-rule term.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorWeights<S> {
    pub a1: S,
    pub a2: S,
    pub a3: S,
    pub b1: S,
    pub b2: S,
    pub b3: S,
    pub big_a: S,
    pub big_b: S,
}

/// Plain `f64` values of the weights, their `t`-derivatives, and every
/// derived combination used by point formulas.
#[derive(Clone, Copy, Debug)]
pub struct DerivedScalars {
    pub t: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub a1d: f64,
    pub a2d: f64,
    pub a3d: f64,
    pub b1d: f64,
    pub b2d: f64,
    pub b3d: f64,
    /// `A = a1 + a3`, `B = b1 + b3` and their derivatives.
    pub big_a: f64,
    pub big_b: f64,
    pub big_ad: f64,
    pub big_bd: f64,
    /// `F_j = a_j + t b_j`.
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    /// `a = a1 A - a2^2`.
    pub a: f64,
    /// `F = F1 (F1 + F3) - F2^2`.
    pub f: f64,
}

/// Result of a non-degeneracy sweep over a `t` interval.
#[derive(Clone, Debug)]
pub struct NondegeneracyReport {
    pub ok: bool,
    pub min_abs_a: f64,
    pub t_at_min_a: f64,
    pub min_abs_f: f64,
    pub t_at_min_f: f64,
    pub threshold: f64,
    /// When true only `a` was required (one-dimensional base).
    pub dim1: bool,
}

impl GeneratorSet {
    pub fn new(
        name: impl Into<String>,
        a1: C1Fn,
        a2: C1Fn,
        a3: C1Fn,
        b1: C1Fn,
        b2: C1Fn,
        b3: C1Fn,
    ) -> Self {
        GeneratorSet {
            name: name.into(),
            a1,
            a2,
            a3,
            b1,
            b2,
            b3,
            t_lower: f64::NEG_INFINITY,
        }
    }

    pub fn with_t_lower(mut self, t_lower: f64) -> Self {
        self.t_lower = t_lower;
        self
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t > self.t_lower) {
            return Err(Error::OutOfDomain {
                t,
                t_min: self.t_lower,
            });
        }
        Ok(())
    }

    /// Weight values at scalar level `S` (chain rule through `t` when `S`
    /// carries a dual part).
    pub fn weights_at<S: Scalar>(&self, t: S) -> GeneratorWeights<S> {
        let a1 = t.apply_c1(&self.a1);
        let a2 = t.apply_c1(&self.a2);
        let a3 = t.apply_c1(&self.a3);
        let b1 = t.apply_c1(&self.b1);
        let b2 = t.apply_c1(&self.b2);
        let b3 = t.apply_c1(&self.b3);
        GeneratorWeights {
            a1,
            a2,
            a3,
            b1,
            b2,
            b3,
            big_a: a1 + a3,
            big_b: b1 + b3,
        }
    }

    /// Every weight, derivative and derived combination at `t`.
    pub fn derived_at(&self, t: f64) -> Result<DerivedScalars> {
        self.check_domain(t)?;
        let (a1, a2, a3) = (self.a1.eval(t), self.a2.eval(t), self.a3.eval(t));
        let (b1, b2, b3) = (self.b1.eval(t), self.b2.eval(t), self.b3.eval(t));
        let (a1d, a2d, a3d) = (self.a1.deriv(t), self.a2.deriv(t), self.a3.deriv(t));
        let (b1d, b2d, b3d) = (self.b1.deriv(t), self.b2.deriv(t), self.b3.deriv(t));
        let big_a = a1 + a3;
        let big_b = b1 + b3;
        let f1 = a1 + t * b1;
        let f2 = a2 + t * b2;
        let f3 = a3 + t * b3;
        Ok(DerivedScalars {
            t,
            a1,
            a2,
            a3,
            b1,
            b2,
            b3,
            a1d,
            a2d,
            a3d,
            b1d,
            b2d,
            b3d,
            big_a,
            big_b,
            big_ad: a1d + a3d,
            big_bd: b1d + b3d,
            f1,
            f2,
            f3,
            a: a1 * big_a - a2 * a2,
            f: f1 * (f1 + f3) - f2 * f2,
        })
    }

    /// Sweep `[t_range.0, t_range.1]` on `steps + 1` equispaced values and
    /// report the worst `|a|` and `|F|` against the degeneracy threshold.
    pub fn check_nondegenerate(
        &self,
        t_range: (f64, f64),
        steps: usize,
        dim1: bool,
    ) -> Result<NondegeneracyReport> {
        assert!(steps >= 1, "nondegeneracy sweep needs at least one step");
        let (lo, hi) = t_range;
        let mut min_abs_a = f64::INFINITY;
        let mut t_at_min_a = lo;
        let mut min_abs_f = f64::INFINITY;
        let mut t_at_min_f = lo;
        for i in 0..=steps {
            let t = lo + (hi - lo) * (i as f64) / (steps as f64);
            let d = self.derived_at(t)?;
            if d.a.abs() < min_abs_a {
                min_abs_a = d.a.abs();
                t_at_min_a = t;
            }
            if d.f.abs() < min_abs_f {
                min_abs_f = d.f.abs();
                t_at_min_f = t;
            }
        }
        let threshold = tol::NONDEGENERACY;
        let ok = min_abs_a > threshold && (dim1 || min_abs_f > threshold);
        Ok(NondegeneracyReport {
            ok,
            min_abs_a,
            t_at_min_a,
            min_abs_f,
            t_at_min_f,
            threshold,
            dim1,
        })
    }

    /// Residual of `a1 + t a1' + t (2 b1 + t b1')` — equivalently
    /// `d/dt [t F1]` — which vanishes identically for the rescaling-stable
    /// recurrent family.
    pub fn recurrent_ode_residual(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let a1 = self.a1.eval(t);
        let a1d = self.a1.deriv(t);
        let b1 = self.b1.eval(t);
        let b1d = self.b1.deriv(t);
        Ok(a1 + t * a1d + t * (2.0 * b1 + t * b1d))
    }

    // ----- named presets ------------------------------------------------

    /// `a1 = 1`, everything else zero: the diagonal lift metric.
    pub fn sasaki() -> Self {
        GeneratorSet::new(
            "sasaki",
            C1Fn::constant(1.0),
            C1Fn::zero(),
            C1Fn::zero(),
            C1Fn::zero(),
            C1Fn::zero(),
            C1Fn::zero(),
        )
    }

    /// `a1 = b1 = 1/(1+t)`, `a3 = b3 = t/(1+t)` (so `A = B = 1`),
    /// `a2 = b2 = 0`.
    pub fn cheeger_gromoll() -> Self {
        let inv = C1Fn::new(|t| 1.0 / (1.0 + t), |t| -1.0 / ((1.0 + t) * (1.0 + t)));
        let compl = C1Fn::new(|t| t / (1.0 + t), |t| 1.0 / ((1.0 + t) * (1.0 + t)));
        GeneratorSet::new(
            "cheeger_gromoll",
            inv.clone(),
            C1Fn::zero(),
            compl.clone(),
            inv,
            C1Fn::zero(),
            compl,
        )
        .with_t_lower(-1.0)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "sasaki" => Ok(GeneratorSet::sasaki()),
            "cheeger_gromoll" => Ok(GeneratorSet::cheeger_gromoll()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    // ----- constructed families -----------------------------------------

    /// Family adapted to a concircular field with constant factor `alpha`:
    /// `a2 = -alpha a1`, `A = alpha^2 a1 + c` (so `a3 = A - a1`), all `b`
    /// weights zero. Then `a = c a1`.
    pub fn concircular_constructed(alpha: f64, a1: C1Fn, c: f64) -> Result<Self> {
        if c == 0.0 {
            return Err(Error::DegenerateConstruction(
                "concircular construction needs c != 0".into(),
            ));
        }
        let a2 = a1.scale(-alpha);
        let a3 = a1.scale(alpha * alpha - 1.0).add_fn(&C1Fn::constant(c));
        let set = GeneratorSet::new(
            format!("concircular_constructed(alpha={alpha}, c={c})"),
            a1,
            a2,
            a3,
            C1Fn::zero(),
            C1Fn::zero(),
            C1Fn::zero(),
        );
        set.ensure_nondegenerate_on((0.0, 10.0), 200, false)?;
        Ok(set)
    }

    /// Flat-base variant with the extra shift `c1` in `a2`:
    /// `a2 = -alpha a1 + c1`, `A = alpha^2 a1 + c1 alpha + c`. Requires
    /// `c a1 + c1 != 0` along the sweep (which `ensure_nondegenerate_on`
    /// subsumes by checking `a` directly).
    pub fn concircular_constructed_flat(alpha: f64, a1: C1Fn, c1: f64, c: f64) -> Result<Self> {
        if c == 0.0 && c1 == 0.0 {
            return Err(Error::DegenerateConstruction(
                "flat concircular construction needs (c, c1) != (0, 0)".into(),
            ));
        }
        let a2 = a1.scale(-alpha).add_fn(&C1Fn::constant(c1));
        let a3 = a1
            .scale(alpha * alpha - 1.0)
            .add_fn(&C1Fn::constant(c1 * alpha + c));
        let set = GeneratorSet::new(
            format!("concircular_constructed_flat(alpha={alpha}, c1={c1}, c={c})"),
            a1,
            a2,
            a3,
            C1Fn::zero(),
            C1Fn::zero(),
            C1Fn::zero(),
        );
        set.ensure_nondegenerate_on((0.0, 10.0), 200, false)?;
        Ok(set)
    }

    /// Family adapted to recurrent fields: `b1` chosen so `t F1 = k` is
    /// constant, `A = k` and `B = 0` (`a3 = k - a1`, `b3 = -b1`), all
    /// off-diagonal weights zero. Only valid for `t > t_lower > 0`.
    pub fn recurrent_family(k: f64, a1: C1Fn, t_lower: f64) -> Result<Self> {
        if k == 0.0 {
            return Err(Error::DegenerateConstruction(
                "recurrent family needs k != 0".into(),
            ));
        }
        if !(t_lower > 0.0) {
            return Err(Error::DegenerateConstruction(
                "recurrent family needs a positive lower t bound".into(),
            ));
        }
        let (af, ad) = (a1.clone(), a1.clone());
        let b1 = C1Fn::new(
            move |t| k / (t * t) - af.eval(t) / t,
            move |t| -2.0 * k / (t * t * t) - ad.deriv(t) / t + ad.eval(t) / (t * t),
        );
        let a3 = a1.scale(-1.0).add_fn(&C1Fn::constant(k));
        let b3 = b1.scale(-1.0);
        let set = GeneratorSet::new(
            format!("recurrent_family(k={k})"),
            a1,
            C1Fn::zero(),
            a3,
            b1,
            C1Fn::zero(),
            b3,
        )
        .with_t_lower(t_lower);
        set.ensure_nondegenerate_on((t_lower * 1.01, 10.0), 200, false)?;
        Ok(set)
    }

    fn ensure_nondegenerate_on(
        &self,
        t_range: (f64, f64),
        steps: usize,
        dim1: bool,
    ) -> Result<()> {
        let rep = self.check_nondegenerate(t_range, steps, dim1)?;
        if !rep.ok {
            return Err(Error::DegenerateConstruction(format!(
                "{}: |a| >= {:.3e} at t = {:.3}, |F| >= {:.3e} at t = {:.3} (threshold {:.1e})",
                self.name, rep.min_abs_a, rep.t_at_min_a, rep.min_abs_f, rep.t_at_min_f,
                rep.threshold
            )));
        }
        Ok(())
    }
}
