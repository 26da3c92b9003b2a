//! The two-exponential family
//! `f(z) = L((1 - e^{i(c1 z - b1)}) / (1 - e^{i(c2 z - b2)}))`
//! and the exponential-sum equations describing its preimages.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::complex::{cexpm1, reduce_phase};
use crate::contour::{locate_zeros_rect, Rect, ZeroReport};
use crate::expsum::{ExpSum, Term};
use crate::meromorphic::{Homogeneous, Meromorphic};
use crate::{Complex, Error, ExtendedComplex, Mobius, Result};

const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct ExceptionalParams {
    l: Mobius,
    c1: f64,
    b1: f64,
    c2: f64,
    b2: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(rename = "L")]
    l: Mobius,
    c1: f64,
    b1: f64,
    c2: f64,
    b2: f64,
}

impl TryFrom<ParamsRepr> for ExceptionalParams {
    type Error = Error;
    fn try_from(r: ParamsRepr) -> Result<Self> {
        ExceptionalParams::new(r.l, r.c1, r.b1, r.c2, r.b2)
    }
}

impl From<ExceptionalParams> for ParamsRepr {
    fn from(p: ExceptionalParams) -> Self {
        ParamsRepr { l: p.l, c1: p.c1, b1: p.b1, c2: p.c2, b2: p.b2 }
    }
}

/// `|θ mod 2π|` measured to the nearest multiple.
fn phase_distance(theta: f64) -> f64 {
    reduce_phase(Complex::new(theta, 0.0)).re.abs()
}

impl ExceptionalParams {
    /// Rejects parameter sets for which `f` is constant: both frequencies
    /// zero, a factor vanishing identically, or equal factors.
    pub fn new(l: Mobius, c1: f64, b1: f64, c2: f64, b2: f64) -> Result<Self> {
        if ![c1, b1, c2, b2].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        if c1.abs() <= PARAM_TOL && c2.abs() <= PARAM_TOL {
            return Err(Error::InvalidInput("c1 and c2 both vanish; f is constant".into()));
        }
        if c2.abs() <= PARAM_TOL && phase_distance(b2) <= PARAM_TOL {
            return Err(Error::InvalidInput("denominator vanishes identically".into()));
        }
        if c1.abs() <= PARAM_TOL && phase_distance(b1) <= PARAM_TOL {
            return Err(Error::InvalidInput("numerator vanishes identically; f is constant".into()));
        }
        if (c1 - c2).abs() <= PARAM_TOL && phase_distance(b1 - b2) <= PARAM_TOL {
            return Err(Error::InvalidInput("numerator equals denominator; f is constant".into()));
        }
        Ok(ExceptionalParams { l, c1, b1, c2, b2 })
    }

    /// The normalised member `(1 - e^{iz}) / (1 - e^{i(cz + b)})` with `L = id`.
    pub fn canonical(c: f64, b: f64) -> Result<Self> {
        Self::new(Mobius::identity(), 1.0, 0.0, c, -b)
    }

    pub fn mobius(&self) -> &Mobius {
        &self.l
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// `(c, b)` after the substitution `ζ = c1 z - b1`, which turns the
    /// ratio into `(1 - e^{iζ}) / (1 - e^{i(cζ + b)})`. `None` when `c1 = 0`.
    pub fn canonical_parameters(&self) -> Option<(f64, f64)> {
        if self.c1.abs() <= PARAM_TOL {
            return None;
        }
        let c = self.c2 / self.c1;
        Some((c, c * self.b1 - self.b2))
    }

    /// `1 - e^{i(cz - b)}` and its derivative, both scaled by `e^{-s}`.
    fn factor(c: f64, b: f64, z: Complex, s: f64) -> (Complex, Complex) {
        // i(cz - b) with the phase reduced into [-π, π]
        let w = Complex::new(-c * z.im, reduce_phase(Complex::new(c * z.re - b, 0.0)).re);
        let e = (w - s).exp();
        let value = if s > 1.0 {
            Complex::new((-s).exp(), 0.0) - e
        } else {
            -cexpm1(w) * (-s).exp()
        };
        (value, Complex::new(0.0, -c) * e)
    }

    fn bare_homogeneous(&self, z: Complex) -> Homogeneous {
        let s = 0f64.max(-self.c1 * z.im).max(-self.c2 * z.im);
        let (num, dnum) = Self::factor(self.c1, self.b1, z, s);
        let (den, dden) = Self::factor(self.c2, self.b2, z, s);
        Homogeneous { num, den, dnum, dden }
    }

    /// The ratio without `L`.
    pub fn bare_ratio(&self, z: Complex) -> ExtendedComplex {
        self.bare_homogeneous(z).value()
    }

    /// `f(z)`, refusing arguments beyond the exponential overflow guard.
    pub fn eval(&self, z: Complex) -> Result<ExtendedComplex> {
        let x = z.im.abs() * self.c1.abs().max(self.c2.abs());
        if x >= crate::expsum::OVERFLOW_GUARD {
            return Err(Error::Overflow(x));
        }
        Ok(self.value(z))
    }

    /// Exponential sum whose zeros are the solutions of `f(z) = a`:
    /// numerator minus `α` times denominator with `α = L^{-1}(a)`, or the
    /// denominator alone when `α = ∞`. Common zeros of numerator and
    /// denominator (removable points) are zeros of this sum as well.
    pub fn preimage_equation(&self, a: ExtendedComplex) -> Result<ExpSum> {
        let e1 = Complex::from_polar(1.0, -self.b1);
        let e2 = Complex::from_polar(1.0, -self.b2);
        let one = Complex::new(1.0, 0.0);
        let terms = match self.l.inverse().apply(a) {
            ExtendedComplex::Infinity => vec![Term::new(one, 0.0), Term::new(-e2, self.c2)],
            ExtendedComplex::Finite(alpha) => vec![
                Term::new(one - alpha, 0.0),
                Term::new(-e1, self.c1),
                Term::new(alpha * e2, self.c2),
            ],
        };
        let g = ExpSum::new(terms)?;
        if g.terms().iter().all(|t| t.freq == 0.0) {
            return Err(Error::DegenerateSum(format!("{a} is omitted")));
        }
        Ok(g)
    }
}

impl Meromorphic for ExceptionalParams {
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        self.bare_homogeneous(z).apply_mobius(&self.l)
    }
}

/// Why a canonical member maps the real line into a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleReason {
    /// `c ∈ {0, 1}`, so `f = L(e^{iz})`.
    DegenerateFrequency,
    /// `a = -1, c = -1, e^{ib} = 1`, so `f = -e^{iz}`.
    ReflectionCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CaseVerdict {
    MapsRealLineToCircle { reason: CircleReason },
    /// The equation `1 - a - e^{iz} + a e^{i(cz+b)} = 0` must have non-real zeros.
    GenericNonReal,
}

/// Case analysis for `f(z) = (1 - e^{iz}) / (1 - e^{i(cz + b)})` and a
/// fourth value `a ∉ {0, 1, ∞}` whose preimage is assumed real. Matching
/// the exponents of the real-entire quotient leaves only `c ∈ {0, 1}` or
/// `a = -1, c = -1, e^{ib} = 1`.
pub fn corollary_case_classifier(c: f64, b: f64, a: Complex) -> Result<CaseVerdict> {
    if ![c, b, a.re, a.im].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("non-finite classifier input".into()));
    }
    if a.norm() <= PARAM_TOL || (a - 1.0).norm() <= PARAM_TOL {
        return Err(Error::InvalidInput(format!("a = {a} is one of the three values 0, 1, ∞")));
    }
    if c.abs() <= PARAM_TOL || (c - 1.0).abs() <= PARAM_TOL {
        return Ok(CaseVerdict::MapsRealLineToCircle { reason: CircleReason::DegenerateFrequency });
    }
    if (a + 1.0).norm() <= PARAM_TOL && (c + 1.0).abs() <= PARAM_TOL && phase_distance(b) <= PARAM_TOL {
        return Ok(CaseVerdict::MapsRealLineToCircle { reason: CircleReason::ReflectionCase });
    }
    Ok(CaseVerdict::GenericNonReal)
}

/// Lower edge of the default non-reality search strip.
pub const STRIP_IM_MIN: f64 = 0.05;
/// Upper edge of the default non-reality search strip.
pub const STRIP_IM_MAX: f64 = 5.0;

/// Zeros of `g` in the strips `[re_min, re_max] × ±[0.05, 5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripSearch {
    pub upper: ZeroReport,
    pub lower: ZeroReport,
}

impl StripSearch {
    pub fn nonreal_count(&self) -> usize {
        self.upper.count + self.lower.count
    }
}

pub fn nonreal_zero_search(g: &ExpSum, re_min: f64, re_max: f64) -> Result<StripSearch> {
    let upper = Rect::new(re_min, re_max, STRIP_IM_MIN, STRIP_IM_MAX)?;
    let lower = Rect::new(re_min, re_max, -STRIP_IM_MAX, -STRIP_IM_MIN)?;
    let (u, l) = rayon::join(|| locate_zeros_rect(g, &upper), || locate_zeros_rect(g, &lower));
    Ok(StripSearch { upper: u?, lower: l? })
}

/// Roots of `e^{i(c z - b)} = 1` in `[x0, x1]`: `z = (b + 2πk) / c`.
pub fn factor_zeros(c: f64, b: f64, x0: f64, x1: f64) -> Vec<f64> {
    if c == 0.0 {
        return Vec::new();
    }
    let (lo, hi) = {
        let (p, q) = ((c * x0 - b) / TAU, (c * x1 - b) / TAU);
        (p.min(q).ceil() as i64, p.max(q).floor() as i64)
    };
    (lo..=hi).map(|k| (b + TAU * k as f64) / c).collect()
}
