//! Forward-mode dual numbers `a + b·ε`, `ε² = 0`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }

    fn chain(self, f: T, df: T) -> Self {
        Dual { re: f, eps: df * self.eps }
    }

    pub fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }

    pub fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }

    pub fn ln(self) -> Self {
        self.chain(self.re.ln(), T::one() / self.re)
    }

    pub fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::half() / s)
    }

    pub fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }

    /// `self^c` for a constant exponent.
    pub fn powf(self, c: T) -> Self {
        if c == T::zero() {
            return Dual::constant(T::one());
        }
        let int = c.round() == c && c.abs() < T::c(1024.0);
        let (v, dv) = if int {
            let k = c.to_i32().unwrap_or(0);
            (self.re.powi(k), c * self.re.powi(k - 1))
        } else {
            (self.re.powf(c), c * self.re.powf(c - T::one()))
        };
        self.chain(v, dv)
    }

    /// `self^other` with a variable exponent (base must be positive).
    pub fn pow(self, other: Self) -> Self {
        if other.eps == T::zero() {
            return self.powf(other.re);
        }
        (other * self.ln()).exp()
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { re: self.re * o.re, eps: self.re * o.eps + self.eps * o.re }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        Dual { re: self.re * inv, eps: (self.eps * o.re - self.re * o.eps) * inv * inv }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::variable(2.0_f64);
        let y = x * x * x / (x + Dual::constant(1.0));
        // d/dx x^3/(x+1) = (3x^2(x+1) - x^3)/(x+1)^2 at 2 = (36-8)/9
        assert!((y.eps - 28.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn transcendental_derivatives() {
        let x = Dual::variable(0.3f64);
        assert!((x.sin().eps - 0.3f64.cos()).abs() < 1e-15);
        assert!((x.tanh().eps - (1.0 - 0.3f64.tanh().powi(2))).abs() < 1e-15);
        assert!((x.pow(Dual::constant(2.5)).eps - 2.5 * 0.3f64.powf(1.5)).abs() < 1e-14);
        assert!((Dual::variable(0.0f64).exp().eps - 1.0).abs() < 1e-15);
    }
}
