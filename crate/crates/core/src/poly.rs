//! Dense univariate polynomials with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::Complex;

/// Polynomial stored in ascending degree order. Trailing zero coefficients
/// are trimmed, so the last stored coefficient is the leading one; the empty
/// vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Complex>", into = "Vec<Complex>")]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl From<Vec<Complex>> for Polynomial {
    fn from(v: Vec<Complex>) -> Self {
        Polynomial::new(v)
    }
}

impl From<Polynomial> for Vec<Complex> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// Builds from coefficients listed highest degree first.
    pub fn from_descending(coeffs: &[Complex]) -> Self {
        Self::new(coeffs.iter().rev().copied().collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::new(vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)])
    }

    /// `lead * Π (z - r)`.
    pub fn from_roots(roots: &[Complex], lead: Complex) -> Self {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = &p * &Polynomial::new(vec![-r, Complex::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Evaluates the reversed polynomial `z^deg p(1/z)` at `w`.
    pub fn eval_reversed(&self, w: Complex) -> Complex {
        self.coeffs.iter().fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// `Σ |a_k| |z|^k`, the scale against which `|p(z)|` is judged.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn conj(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn pow(&self, n: usize) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Drops leading coefficients whose magnitude is at most `rel * max|a_k|`.
    pub fn trim_relative(&self, rel: f64) -> Polynomial {
        let cut = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// Keeps only the coefficients of degree `< len`.
    pub fn truncate(&self, len: usize) -> Polynomial {
        Polynomial::new(self.coeffs.iter().take(len).copied().collect())
    }

    /// Synthetic division by `(z - r)`: returns quotient and remainder `p(r)`.
    pub fn deflate(&self, r: Complex) -> (Polynomial, Complex) {
        if self.coeffs.is_empty() {
            return (Polynomial::zero(), Complex::new(0.0, 0.0));
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex::new(0.0, 0.0); n - 1];
        let mut acc = Complex::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Polynomial::new(q), acc)
    }

    /// Coefficients of `p(z + c)` (Taylor shift by repeated synthetic division).
    pub fn shift(&self, c: Complex) -> Polynomial {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let hi = a[k + 1];
                a[k] += c * hi;
            }
        }
        Polynomial::new(a)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn trims_and_reports_degree() {
        let p = Polynomial::new(vec![c(1.0), c(2.0), c(0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![c(0.0)]).is_zero());
    }

    #[test]
    fn horner_and_derivative() {
        // z^3 - z^2 - z - 2
        let p = Polynomial::from_real(&[-2.0, -1.0, -1.0, 1.0]);
        assert_eq!(p.eval(c(2.0)), c(0.0));
        let (v, d) = p.eval_with_derivative(c(2.0));
        assert_eq!(v, c(0.0));
        assert_eq!(d, c(3.0 * 4.0 - 2.0 * 2.0 - 1.0));
        assert_eq!(p.derivative(), Polynomial::from_real(&[-1.0, -2.0, 3.0]));
    }

    #[test]
    fn deflation_leaves_quadratic() {
        let p = Polynomial::from_real(&[-2.0, -1.0, -1.0, 1.0]);
        let (q, rem) = p.deflate(c(2.0));
        assert_eq!(rem, c(0.0));
        assert_eq!(q, Polynomial::from_real(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn taylor_shift() {
        // (z+1)^2 - 3 = z^2 + 2z - 2
        let p = Polynomial::from_real(&[-3.0, 0.0, 1.0]);
        assert_eq!(p.shift(c(1.0)), Polynomial::from_real(&[-2.0, 2.0, 1.0]));
        let z0 = Complex::new(0.3, -0.7);
        let s = p.shift(Complex::new(1.5, 0.25));
        assert!((s.eval(z0) - p.eval(z0 + Complex::new(1.5, 0.25))).norm() < 1e-14);
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(&[c(1.0), c(-1.0)], c(1.0));
        assert_eq!(p, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
    }
}
