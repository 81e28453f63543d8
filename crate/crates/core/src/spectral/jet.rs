//! Truncated second-order Taylor arithmetic in a single variable `t`.
//!
//! A [`Jet2`] carries `a + b t + c t²`. Evaluating a smooth expression on jets
//! seeded with `t` yields its exact first and second derivatives at `t = 0`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar type accepted by the generic surface densities.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sqrt(self) -> Self;
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn value(self) -> f64 {
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Jet2 {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Jet2 { a, b, c }
    }

    /// The seed `t` itself.
    pub const fn var() -> Self {
        Jet2::new(0.0, 1.0, 0.0)
    }

    pub fn d1(self) -> f64 {
        self.b
    }

    /// Second derivative at `t = 0` (twice the `t²` coefficient).
    pub fn d2(self) -> f64 {
        2.0 * self.c
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.a;
        Jet2::new(r, -self.b * r * r, (self.b * self.b * r - self.c) * r * r)
    }
}

impl Scalar for Jet2 {
    fn cst(x: f64) -> Self {
        Jet2::new(x, 0.0, 0.0)
    }
    fn sqrt(self) -> Self {
        let r = self.a.sqrt();
        let b = self.b / (2.0 * r);
        let c = (self.c - b * b) / (2.0 * r);
        Jet2::new(r, b, c)
    }
    fn value(self) -> f64 {
        self.a
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.a * o.a,
            self.a * o.b + self.b * o.a,
            self.a * o.c + self.b * o.b + self.c * o.a,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.a, -self.b, -self.c)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, o: f64) -> Jet2 {
        Jet2::new(self.a + o, self.b, self.c)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, o: f64) -> Jet2 {
        Jet2::new(self.a - o, self.b, self.c)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, o: f64) -> Jet2 {
        Jet2::new(self.a * o, self.b * o, self.c * o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval<S: Scalar>(t: S) -> S {
        // (1 + t)^2 / sqrt(2 + 3 t)
        let one = S::cst(1.0);
        let n = (one + t) * (one + t);
        n / (S::cst(2.0) + t * 3.0).sqrt()
    }

    #[test]
    fn jet_matches_finite_differences() {
        let j = eval(Jet2::var());
        let h = 1e-4;
        let f = |t: f64| eval(t);
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        assert!((j.value() - f(0.0)).abs() < 1e-15);
        assert!((j.d1() - d1).abs() < 1e-7);
        assert!((j.d2() - d2).abs() < 1e-6);
    }

    #[test]
    fn reciprocal_of_reciprocal() {
        let x = Jet2::new(1.7, -0.3, 0.8);
        let y = x.recip().recip();
        assert!((x.a - y.a).abs() < 1e-14 && (x.b - y.b).abs() < 1e-14 && (x.c - y.c).abs() < 1e-14);
    }
}
