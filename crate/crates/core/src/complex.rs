//! Points of the extended complex plane and the chordal metric.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use num_complex::Complex64 as Complex;

/// A point of the Riemann sphere: a finite complex number or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex),
    Infinity,
}

impl ExtendedComplex {
    pub const ZERO: ExtendedComplex = ExtendedComplex::Finite(Complex::new(0.0, 0.0));

    /// Wraps `z`, sending non-finite values (overflow, NaN) to `∞`.
    pub fn from_complex(z: Complex) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtendedComplex::Finite(z)
        } else {
            ExtendedComplex::Infinity
        }
    }

    pub fn real(x: f64) -> Self {
        Self::from_complex(Complex::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex> {
        match *self {
            ExtendedComplex::Finite(z) => Some(z),
            ExtendedComplex::Infinity => None,
        }
    }

    /// `1/z` on the sphere.
    pub fn recip(&self) -> Self {
        match *self {
            ExtendedComplex::Infinity => Self::ZERO,
            ExtendedComplex::Finite(z) if z == Complex::new(0.0, 0.0) => ExtendedComplex::Infinity,
            ExtendedComplex::Finite(z) => Self::from_complex(z.inv()),
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(z.conj()),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        }
    }

    /// Chordal distance to `other`, see [`chordal_distance`].
    pub fn chordal(&self, other: &ExtendedComplex) -> f64 {
        chordal_distance(*self, *other)
    }
}

impl From<Complex> for ExtendedComplex {
    fn from(z: Complex) -> Self {
        Self::from_complex(z)
    }
}

impl std::fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedComplex::Finite(z) => write!(f, "{z}"),
            ExtendedComplex::Infinity => write!(f, "inf"),
        }
    }
}

/// Euclidean distance between the stereographic images on the unit sphere,
/// `2|z-w| / (sqrt(1+|z|²) sqrt(1+|w|²))`. Bounded by 2; `∞` is an ordinary point.
pub fn chordal_distance(a: ExtendedComplex, b: ExtendedComplex) -> f64 {
    use ExtendedComplex::*;
    match (a, b) {
        (Infinity, Infinity) => 0.0,
        (Finite(z), Infinity) | (Infinity, Finite(z)) => 2.0 / 1f64.hypot(z.norm()),
        (Finite(z), Finite(w)) => {
            let d = (z - w).norm();
            if !d.is_finite() {
                // both huge: compare the reciprocals instead
                return chordal_distance(a.recip(), b.recip());
            }
            2.0 * (d / 1f64.hypot(z.norm())) / 1f64.hypot(w.norm())
        }
    }
}

/// `e^w - 1` without cancellation for small `|w|`.
pub fn cexpm1(w: Complex) -> Complex {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    let em1 = w.re.exp_m1();
    Complex::new(em1 * c - 2.0 * half * half, w.re.exp() * s)
}

/// Reduces the real part of `theta` into `[-π, π]`; `e^{iθ}` is unchanged.
pub fn reduce_phase(theta: Complex) -> Complex {
    let tau = std::f64::consts::TAU;
    Complex::new(theta.re - tau * (theta.re / tau).round(), theta.im)
}

impl Serialize for ExtendedComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedComplex::Finite(z) => [z.re, z.im].serialize(s),
            ExtendedComplex::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Token(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(ExtendedComplex::Finite(Complex::new(re, im))),
            Repr::Token(t) if t == "inf" => Ok(ExtendedComplex::Infinity),
            Repr::Token(t) => Err(serde::de::Error::custom(format!("expected [re, im] or \"inf\", got {t:?}"))),
        }
    }
}
