//! Forward-mode dual numbers and finite-difference helpers.
//!
//! All geometry in this crate needs first and second derivatives of
//! user-supplied closures (metric components, vector fields, scalar
//! weights). Two independent engines are provided:
//!
//! * dual numbers ([`Dual`]), nested once for second derivatives, and
//! * central differences with a relative step (see [`central_step`]).
//!
//! Keeping both lets the test suite cross-check one engine against the
//! other instead of trusting a single differentiation path.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

/// Relative step used by the central-difference engine.
pub const DEFAULT_CENTRAL_STEP: f64 = 1e-5;

/// Per-coordinate step: `rel * max(1, |x|)`.
#[inline]
pub fn central_step(rel: f64, x: f64) -> f64 {
    rel * x.abs().max(1.0)
}

/// Scalar types our generic geometry code can run on: `f64`, first-order
/// duals and second-order (nested) duals.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    /// Underlying primal value (used for pivoting and domain checks).
    fn re_f64(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, k: i32) -> Self;
    fn powf_const(self, p: f64) -> Self;
    /// Apply a C^1 function given by value/derivative closures.
    ///
    /// Supported at order <= 1 (`f64` and `Dual<f64>`); second-order duals
    /// would require the function's second derivative, which a [`C1Fn`]
    /// does not carry, so that combination panics. The geometry code is
    /// arranged so generator weights are never differentiated twice.
    fn apply_c1(self, f: &C1Fn) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn re_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    #[inline]
    fn powf_const(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    #[inline]
    fn apply_c1(self, f: &C1Fn) -> Self {
        f.eval(self)
    }
}

/// A dual number `re + du * eps` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

/// First-order dual over `f64`.
pub type D1 = Dual<f64>;
/// Second-order (nested) dual.
pub type D2 = Dual<Dual<f64>>;

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, du: T) -> Self {
        Dual { re, du }
    }
    /// Constant lift (zero derivative part).
    #[inline]
    pub fn constant(re: T) -> Self {
        Dual { re, du: T::zero() }
    }
    /// Variable seeded with derivative `d`.
    #[inline]
    pub fn seeded(re: T, d: T) -> Self {
        Dual { re, du: d }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.du + o.du)
    }
}
impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.du - o.du)
    }
}
impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.du * o.re + self.re * o.du)
    }
}
impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Dual::new(q, (self.du - q * o.du) / o.re)
    }
}
impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.du)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    #[inline]
    fn re_f64(&self) -> f64 {
        self.re.re_f64()
    }
    #[inline]
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.du * self.re.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.du * self.re.sin()))
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }
    #[inline]
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / (T::from_f64(2.0) * s))
    }
    fn powi(self, k: i32) -> Self {
        Dual::new(
            self.re.powi(k),
            T::from_f64(f64::from(k)) * self.re.powi(k - 1) * self.du,
        )
    }
    fn powf_const(self, p: f64) -> Self {
        Dual::new(
            self.re.powf_const(p),
            T::from_f64(p) * self.re.powf_const(p - 1.0) * self.du,
        )
    }
    fn apply_c1(self, f: &C1Fn) -> Self {
        Dual::new(self.re.apply_c1(f), self.du * f.deriv_scalar::<T>(self.re))
    }
}

/// A scalar function of one variable carrying its analytic first
/// derivative. Used for the six generator weights of a bundle metric.
#[derive(Clone)]
pub struct C1Fn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for C1Fn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("C1Fn {..}")
    }
}

impl C1Fn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        C1Fn {
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    pub fn constant(c: f64) -> Self {
        C1Fn::new(move |_| c, |_| 0.0)
    }

    pub fn zero() -> Self {
        C1Fn::constant(0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    #[inline]
    pub fn deriv(&self, t: f64) -> f64 {
        (self.df)(t)
    }

    fn deriv_scalar<T: Scalar>(&self, t: T) -> T {
        // The derivative closure is only available as an f64 map; lifting
        // it to dual arguments would need the second derivative.
        if std::any::TypeId::of::<T>() == std::any::TypeId::of::<f64>() {
            T::from_f64(self.deriv(t.re_f64()))
        } else {
            panic!("C1Fn differentiated twice: second derivatives of generator weights are not available");
        }
    }

    /// Pointwise sum `self + other`.
    pub fn add_fn(&self, other: &C1Fn) -> C1Fn {
        let (f1, d1) = (self.f.clone(), self.df.clone());
        let (f2, d2) = (other.f.clone(), other.df.clone());
        C1Fn::new(move |t| f1(t) + f2(t), move |t| d1(t) + d2(t))
    }

    /// Pointwise scaling `c * self`.
    pub fn scale(&self, c: f64) -> C1Fn {
        let (f, d) = (self.f.clone(), self.df.clone());
        C1Fn::new(move |t| c * f(t), move |t| c * d(t))
    }
}

/// Directional derivative of an `out_len`-valued closure via a single
/// dual-number evaluation: returns `J(x) . dir`.
pub fn directional_d1<F>(f: F, x: &[f64], dir: &[f64], out_len: usize) -> Vec<f64>
where
    F: Fn(&[D1], &mut [D1]),
{
    let xs: Vec<D1> = x
        .iter()
        .zip(dir.iter())
        .map(|(&v, &d)| D1::new(v, d))
        .collect();
    let mut out = vec![D1::constant(0.0); out_len];
    f(&xs, &mut out);
    out.iter().map(|d| d.du).collect()
}

/// Central-difference counterpart of [`directional_d1`].
pub fn directional_central<F>(f: F, x: &[f64], dir: &[f64], rel: f64, out_len: usize) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    // One scalar step along the direction; scale by the largest coordinate
    // so the step stays meaningful on off-origin charts.
    let scale = x.iter().fold(1.0_f64, |m, &v| m.max(v.abs()));
    let h = rel * scale;
    let xp: Vec<f64> = x.iter().zip(dir).map(|(&v, &d)| v + h * d).collect();
    let xm: Vec<f64> = x.iter().zip(dir).map(|(&v, &d)| v - h * d).collect();
    let mut fp = vec![0.0; out_len];
    let mut fm = vec![0.0; out_len];
    f(&xp, &mut fp);
    f(&xm, &mut fm);
    fp.iter()
        .zip(fm.iter())
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Solve `A x = b` in-place by Gaussian elimination with partial pivoting
/// on the primal part. `a` is row-major `n x n`. Returns `None` when the
/// pivot vanishes (singular up to roundoff).
pub fn solve_linear<S: Scalar>(a: &mut [S], b: &mut [S], n: usize) -> Option<()> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].re_f64().abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].re_f64().abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / d;
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] = a[row * n + k] - factor * v;
            }
            let bv = b[col];
            b[row] = b[row] - factor * bv;
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc = acc - a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    Some(())
}

/// Invert a row-major `n x n` matrix of scalars. Returns `None` when a
/// pivot vanishes.
pub fn invert_matrix<S: Scalar>(a: &[S], n: usize) -> Option<Vec<S>> {
    let mut work = a.to_vec();
    let mut inv = vec![S::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = S::one();
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = work[col * n + col].re_f64().abs();
        for row in (col + 1)..n {
            let v = work[row * n + col].re_f64().abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                work.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let d = work[col * n + col];
        for k in 0..n {
            work[col * n + k] = work[col * n + k] / d;
            inv[col * n + k] = inv[col * n + k] / d;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row * n + col];
            if factor.re_f64() == 0.0 {
                continue;
            }
            for k in 0..n {
                let wv = work[col * n + k];
                let iv = inv[col * n + k];
                work[row * n + k] = work[row * n + k] - factor * wv;
                inv[row * n + k] = inv[row * n + k] - factor * iv;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly<S: Scalar>(x: S) -> S {
        // x^3 - 2x + 1
        x.powi(3) - S::from_f64(2.0) * x + S::one()
    }

    #[test]
    fn dual_first_derivative_matches_analytic() {
        let x = 0.7;
        let d = poly(D1::new(x, 1.0));
        assert_relative_eq!(d.re, x.powi(3) - 2.0 * x + 1.0);
        assert_relative_eq!(d.du, 3.0 * x * x - 2.0);
    }

    #[test]
    fn nested_dual_second_derivative() {
        // f(x) = sin(x) * exp(x); f'' = 2 cos(x) exp(x)
        let x = 0.3;
        let seed = D2::new(D1::new(x, 1.0), D1::new(1.0, 0.0));
        let y = seed.sin() * seed.exp();
        assert_relative_eq!(y.du.du, 2.0 * x.cos() * x.exp(), epsilon = 1e-12);
    }

    #[test]
    fn dual_division_and_sqrt() {
        let x = 2.0;
        let d = D1::new(x, 1.0);
        let y = D1::constant(1.0) / d.sqrt(); // x^{-1/2}
        assert_relative_eq!(y.du, -0.5 * x.powf(-1.5), epsilon = 1e-14);
    }

    #[test]
    fn c1fn_on_first_order_dual_uses_analytic_derivative() {
        let f = C1Fn::new(|t| 1.0 / (1.0 + t), |t| -1.0 / (1.0 + t).powi(2));
        let t = D1::new(3.0, 2.0); // dt = 2
        let y = t.apply_c1(&f);
        assert_relative_eq!(y.re, 0.25);
        assert_relative_eq!(y.du, 2.0 * (-1.0 / 16.0));
    }

    #[test]
    #[should_panic(expected = "differentiated twice")]
    fn c1fn_at_second_order_panics() {
        let f = C1Fn::constant(1.0);
        let t = D2::new(D1::new(1.0, 1.0), D1::new(1.0, 0.0));
        let _ = t.apply_c1(&f);
    }

    #[test]
    fn directional_matches_between_engines() {
        let f64_version = |x: &[f64], out: &mut [f64]| {
            out[0] = x[0].sin() * x[1] + x[1].powi(2);
            out[1] = (x[0] * x[1]).exp();
        };
        let d1_version = |x: &[D1], out: &mut [D1]| {
            out[0] = x[0].sin() * x[1] + x[1].powi(2);
            out[1] = (x[0] * x[1]).exp();
        };
        let x = [0.4, -0.8];
        let dir = [1.0, 0.5];
        let a = directional_d1(d1_version, &x, &dir, 2);
        let b = directional_central(f64_version, &x, &dir, DEFAULT_CENTRAL_STEP, 2);
        for k in 0..2 {
            assert_relative_eq!(a[k], b[k], epsilon = 1e-8);
        }
    }

    #[test]
    fn linear_solve_and_inverse() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.0, 2.0, 0.0, 5.0];
        let inv = invert_matrix(&a, 3).unwrap();
        // A * A^{-1} = I
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(s, want, epsilon = 1e-12);
            }
        }
        let mut m = a;
        let mut b = [1.0, 2.0, 3.0];
        solve_linear(&mut m, &mut b, 3).unwrap();
        // residual check
        let mut r = [0.0; 3];
        for i in 0..3 {
            for k in 0..3 {
                r[i] += a[i * 3 + k] * b[k];
            }
        }
        assert_relative_eq!(r[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(r[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(r[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(invert_matrix(&a, 2).is_none());
    }
}
