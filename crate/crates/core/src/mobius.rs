//! Fractional-linear transformations `z ↦ (az + b) / (cz + d)`.

use serde::{Deserialize, Serialize};

use crate::{Complex, Error, ExtendedComplex, Polynomial, RationalMap, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MobiusRepr", into = "MobiusRepr")]
pub struct Mobius {
    a: Complex,
    b: Complex,
    c: Complex,
    d: Complex,
}

#[derive(Serialize, Deserialize)]
struct MobiusRepr {
    a: Complex,
    b: Complex,
    c: Complex,
    d: Complex,
}

impl TryFrom<MobiusRepr> for Mobius {
    type Error = Error;
    fn try_from(r: MobiusRepr) -> Result<Self> {
        Mobius::new(r.a, r.b, r.c, r.d)
    }
}

impl From<Mobius> for MobiusRepr {
    fn from(m: Mobius) -> Self {
        MobiusRepr { a: m.a, b: m.b, c: m.c, d: m.d }
    }
}

impl Mobius {
    /// Normalises the largest entry to unit magnitude and rejects
    /// `|ad - bc| <= 1e-12`.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let s = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::SingularMobius { det: 0.0 });
        }
        let (a, b, c, d) = (a / s, b / s, c / s, d / s);
        let det = a * d - b * c;
        if det.norm() <= 1e-12 {
            return Err(Error::SingularMobius { det: det.norm() });
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Mobius { a: one, b: zero, c: zero, d: one }
    }

    /// `z ↦ scale * z + shift`.
    pub fn affine(scale: Complex, shift: Complex) -> Result<Self> {
        Self::new(scale, shift, Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    /// Rotation of the Riemann sphere about the real axis by angle `t`:
    /// `z ↦ (z cos(t/2) - sin(t/2)) / (z sin(t/2) + cos(t/2))`.
    pub fn sphere_rotation(t: f64) -> Self {
        let (s, c) = (0.5 * t).sin_cos();
        Mobius {
            a: Complex::new(c, 0.0),
            b: Complex::new(-s, 0.0),
            c: Complex::new(s, 0.0),
            d: Complex::new(c, 0.0),
        }
    }

    pub fn coefficients(&self) -> [Complex; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn is_identity(&self) -> bool {
        let zero = Complex::new(0.0, 0.0);
        self.b == zero && self.c == zero && self.a == self.d
    }

    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => {
                if self.c == Complex::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let (num, den) = if z.norm() > 1.0 {
                    let w = z.inv();
                    (self.a + self.b * w, self.c + self.d * w)
                } else {
                    (self.a * z + self.b, self.c * z + self.d)
                };
                if den == Complex::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(num / den)
                }
            }
        }
    }

    /// Derivative `det / (cz + d)^2` at a finite point.
    pub fn derivative_at(&self, z: Complex) -> Complex {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a).expect("inverse of an invertible map")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
        .expect("product of invertible maps")
    }

    pub fn as_rational(&self) -> RationalMap {
        RationalMap::from_parts_unchecked(
            Polynomial::new(vec![self.b, self.a]),
            Polynomial::new(vec![self.d, self.c]),
        )
    }

    /// Affine map sending `[a, b]` onto `[-2, 2]`.
    pub fn interval_to_standard(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
        }
        let s = 4.0 / (b - a);
        Self::affine(Complex::new(s, 0.0), Complex::new(-s * 0.5 * (a + b), 0.0))
    }
}
