//! Functions meromorphic in the plane, evaluated in homogeneous form.
//!
//! Every function `f = A/B` reports `(A, B, A', B')` up to a common factor.
//! Value, derivative and spherical derivative are ratios that do not see the
//! factor, so implementations may rescale freely to stay inside the exponent
//! range, and poles need no separate chart.

use crate::{Complex, ExtendedComplex, Mobius};

/// `f = num / den` and the derivatives of both parts at one point.
#[derive(Debug, Clone, Copy)]
pub struct Homogeneous {
    pub num: Complex,
    pub den: Complex,
    pub dnum: Complex,
    pub dden: Complex,
}

impl Homogeneous {
    fn rescaled(self) -> Homogeneous {
        let s = self.num.norm().max(self.den.norm());
        if s > 0.0 && s.is_finite() && !(1e-100..=1e100).contains(&s) {
            let k = 1.0 / s;
            Homogeneous { num: self.num * k, den: self.den * k, dnum: self.dnum * k, dden: self.dden * k }
        } else {
            self
        }
    }

    pub fn value(&self) -> ExtendedComplex {
        let zero = Complex::new(0.0, 0.0);
        if self.den == zero {
            if self.num == zero {
                return if self.dden == zero {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(self.dnum / self.dden)
                };
            }
            return ExtendedComplex::Infinity;
        }
        ExtendedComplex::from_complex(self.num / self.den)
    }

    /// `|A'B - AB'| / (|A|² + |B|²)`; `None` at a common zero of `A` and `B`.
    pub fn spherical_derivative(&self) -> Option<f64> {
        let h = self.rescaled();
        let denom = h.num.norm_sqr() + h.den.norm_sqr();
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        Some((h.dnum * h.den - h.num * h.dden).norm() / denom)
    }

    /// Post-composition with a Möbius map.
    pub fn apply_mobius(&self, m: &Mobius) -> Homogeneous {
        let [a, b, c, d] = m.coefficients();
        Homogeneous {
            num: a * self.num + b * self.den,
            den: c * self.num + d * self.den,
            dnum: a * self.dnum + b * self.dden,
            dden: c * self.dnum + d * self.dden,
        }
    }
}

/// A function meromorphic in the plane.
pub trait Meromorphic {
    fn homogeneous(&self, z: Complex) -> Homogeneous;

    fn value(&self, z: Complex) -> ExtendedComplex {
        self.homogeneous(z).value()
    }
}

impl<T: Meromorphic + ?Sized> Meromorphic for &T {
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        (**self).homogeneous(z)
    }
}

impl Meromorphic for crate::RationalMap {
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        let (num, dnum) = self.num().eval_with_derivative(z);
        let (den, dden) = self.den().eval_with_derivative(z);
        Homogeneous { num, den, dnum, dden }
    }

    fn value(&self, z: Complex) -> ExtendedComplex {
        self.eval_finite(z)
    }
}

/// `outer ∘ inner` for a Möbius `outer`.
#[derive(Debug, Clone)]
pub struct MobiusAfter<F> {
    pub outer: Mobius,
    pub inner: F,
}

impl<F: Meromorphic> Meromorphic for MobiusAfter<F> {
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        self.inner.homogeneous(z).apply_mobius(&self.outer)
    }
}

/// Adapter for closures returning a homogeneous tuple.
pub struct FromFn<G>(pub G);

impl<G: Fn(Complex) -> Homogeneous> Meromorphic for FromFn<G> {
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        (self.0)(z)
    }
}
