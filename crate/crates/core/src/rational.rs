//! Rational self-maps of the Riemann sphere.

use serde::{Deserialize, Serialize};

use crate::roots::{cluster_roots, poly_roots};
use crate::{Complex, Error, ExtendedComplex, Mobius, Polynomial, Result};

/// Default cap on `deg f * deg g` in [`RationalMap::compose`].
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// Relative size under which a computed leading coefficient is treated as
/// cancellation noise.
const TRIM_REL: f64 = 1e-14;

/// `num / den`, stored with a monic denominator so that equal maps have
/// equal coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalRepr", into = "RationalRepr")]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: Polynomial,
    den: Polynomial,
}

impl TryFrom<RationalRepr> for RationalMap {
    type Error = Error;
    fn try_from(r: RationalRepr) -> Result<Self> {
        RationalMap::new(r.num, r.den)
    }
}

impl From<RationalMap> for RationalRepr {
    fn from(f: RationalMap) -> Self {
        RationalRepr { num: f.num, den: f.den }
    }
}

/// A fixed point together with its multiplier (computed in the chart
/// `w = 1/z` at infinity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub point: ExtendedComplex,
    pub multiplier: Complex,
}

impl RationalMap {
    /// Validates `den ≠ 0` and that `num`, `den` share no root (roots closer
    /// than `1e-9 * max(1, |r|)` count as shared).
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.coeffs().iter().chain(den.coeffs()).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        if num.degree() >= 1 && den.degree() >= 1 {
            let nr = poly_roots(&num)?;
            let dr = poly_roots(&den)?;
            for &a in &dr {
                for &b in &nr {
                    if (a - b).norm() <= 1e-9 * a.norm().max(1.0) {
                        return Err(Error::CommonRoot { root: a });
                    }
                }
            }
        }
        Ok(Self::from_parts_unchecked(num, den))
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::from_parts_unchecked(p, Polynomial::one())
    }

    /// Normalises without the common-root check; for internal results that
    /// are reduced by construction.
    pub(crate) fn from_parts_unchecked(num: Polynomial, den: Polynomial) -> Self {
        let lead = den.leading();
        let div = |p: &Polynomial| {
            Polynomial::new(
                p.coeffs()
                    .iter()
                    .map(|&c| if lead.im == 0.0 { c / lead.re } else { c / lead })
                    .collect(),
            )
        };
        RationalMap { num: div(&num), den: div(&den) }
    }

    pub fn identity() -> Self {
        Self::polynomial(Polynomial::z())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    pub fn eval(&self, z: ExtendedComplex) -> ExtendedComplex {
        let (dn, dd) = (self.num.degree(), self.den.degree());
        let z = match z {
            ExtendedComplex::Infinity => {
                if self.num.is_zero() {
                    return ExtendedComplex::ZERO;
                }
                return match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => ExtendedComplex::Infinity,
                    std::cmp::Ordering::Less => ExtendedComplex::ZERO,
                    std::cmp::Ordering::Equal => {
                        ExtendedComplex::from_complex(self.num.leading() / self.den.leading())
                    }
                };
            }
            ExtendedComplex::Finite(z) => z,
        };
        let (p, q) = if z.norm() > 1.0 {
            // work with the reversed polynomials in w = 1/z
            let w = z.inv();
            (self.num.eval_reversed(w), self.den.eval_reversed(w))
        } else {
            (self.num.eval(z), self.den.eval(z))
        };
        let zero = Complex::new(0.0, 0.0);
        if q == zero {
            if p == zero && !self.num.is_zero() {
                // 0/0 is excluded by the invariant; resolve it by one L'Hôpital step
                let (dp, dq) = (self.num.derivative().eval(z), self.den.derivative().eval(z));
                return if dq == zero { ExtendedComplex::Infinity } else { ExtendedComplex::from_complex(dp / dq) };
            }
            return if p == zero { ExtendedComplex::ZERO } else { ExtendedComplex::Infinity };
        }
        let mut v = p / q;
        if z.norm() > 1.0 {
            let shift = dn as i32 - dd as i32;
            v *= z.powi(shift);
        }
        ExtendedComplex::from_complex(v)
    }

    pub fn eval_finite(&self, z: Complex) -> ExtendedComplex {
        self.eval(ExtendedComplex::Finite(z))
    }

    /// `f'(z)` at a finite non-pole point.
    pub fn derivative_at(&self, z: Complex) -> Complex {
        let (p, dp) = self.num.eval_with_derivative(z);
        let (q, dq) = self.den.eval_with_derivative(z);
        (dp * q - p * dq) / (q * q)
    }

    /// Numerator of `f'` before reduction: `num' den - num den'`, with the
    /// identically cancelling top coefficient removed.
    fn derivative_numerator(&self) -> Polynomial {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = self.degree();
        if d == 0 {
            return Polynomial::zero();
        }
        n.truncate(2 * d - 1).trim_relative(TRIM_REL)
    }

    /// `f'` as a reduced rational map.
    pub fn derivative(&self) -> RationalMap {
        let mut num = self.derivative_numerator();
        if self.den.degree() == 0 {
            let q = self.den.leading();
            return RationalMap::from_parts_unchecked(num, Polynomial::constant(q * q));
        }
        // A pole of order m leaves a factor (z - r)^(m-1) common to num' den - num den'
        // and den^2; cancel it root by root.
        let roots = poly_roots(&self.den).expect("denominator roots");
        let mut den = Polynomial::constant(self.den.leading() * self.den.leading());
        for (r, m) in cluster_roots(&roots, 1e-7) {
            for _ in 0..(m - 1) {
                num = num.deflate(r).0;
            }
            for _ in 0..(m + 1) {
                den = &den * &Polynomial::new(vec![-r, Complex::new(1.0, 0.0)]);
            }
        }
        RationalMap::from_parts_unchecked(num, den)
    }

    /// `self ∘ g` with the default degree cap.
    pub fn compose(&self, g: &RationalMap) -> Result<RationalMap> {
        self.compose_with_cap(g, DEFAULT_DEGREE_CAP)
    }

    /// Exact composition through the homogenised form
    /// `Σ p_k A^k B^(d-k) / Σ q_k A^k B^(d-k)` with `g = A/B`, `d = deg self`.
    pub fn compose_with_cap(&self, g: &RationalMap, cap: usize) -> Result<RationalMap> {
        let d = self.degree();
        let degree = d * g.degree();
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut a_pow = vec![Polynomial::one()];
        let mut b_pow = vec![Polynomial::one()];
        for k in 1..=d {
            a_pow.push(&a_pow[k - 1] * &g.num);
            b_pow.push(&b_pow[k - 1] * &g.den);
        }
        let mut num = Polynomial::zero();
        let mut den = Polynomial::zero();
        for k in 0..=d {
            let term = &a_pow[k] * &b_pow[d - k];
            num = &num + &term.scale(self.num.coeff(k));
            den = &den + &term.scale(self.den.coeff(k));
        }
        let scale = num.max_abs_coeff().max(den.max_abs_coeff());
        let trim = |p: Polynomial| {
            let cut = TRIM_REL * scale;
            let mut c = p.coeffs().to_vec();
            while c.last().is_some_and(|x| x.norm() <= cut) {
                c.pop();
            }
            Polynomial::new(c)
        };
        Ok(RationalMap::from_parts_unchecked(trim(num), trim(den)))
    }

    /// `n`-th iterate.
    pub fn iterate(&self, n: usize) -> Result<RationalMap> {
        let mut acc = RationalMap::identity();
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// `M ∘ f ∘ M⁻¹`.
    pub fn conjugate(&self, m: &Mobius) -> Result<RationalMap> {
        m.as_rational().compose(self)?.compose(&m.inverse().as_rational())
    }

    /// All solutions of `f(z) = w` with multiplicity; the total is `deg f`.
    pub fn preimages(&self, w: ExtendedComplex) -> Result<Vec<ExtendedComplex>> {
        let d = self.degree();
        let eq = match w {
            ExtendedComplex::Infinity => self.den.clone(),
            ExtendedComplex::Finite(w) => (&self.num - &self.den.scale(w)).trim_relative(TRIM_REL),
        };
        if eq.is_zero() {
            return Err(Error::InvalidInput("f is constant and equal to the target".into()));
        }
        let mut out: Vec<ExtendedComplex> = if eq.degree() >= 1 {
            poly_roots(&eq)?.into_iter().map(ExtendedComplex::Finite).collect()
        } else {
            Vec::new()
        };
        out.extend(std::iter::repeat_n(ExtendedComplex::Infinity, d.saturating_sub(eq.degree())));
        Ok(out)
    }

    /// Fixed points with multiplicity (`deg f + 1` in total) and multipliers.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        let d = self.degree();
        if d < 1 {
            return Err(Error::DegreeTooLow { degree: d, min: 1 });
        }
        let eq = (&self.num - &(&Polynomial::z() * &self.den)).trim_relative(TRIM_REL);
        let mut out = Vec::with_capacity(d + 1);
        if eq.degree() >= 1 {
            let roots = poly_roots(&eq)?;
            for &z in &roots {
                // a multiple fixed point is parabolic with multiplier exactly 1
                let repeated = roots.iter().filter(|&&w| w == z).count() > 1;
                let multiplier = if repeated { Complex::new(1.0, 0.0) } else { self.derivative_at(z) };
                out.push(FixedPoint { point: ExtendedComplex::Finite(z), multiplier });
            }
        }
        let at_infinity = (d + 1).saturating_sub(if eq.is_zero() { 0 } else { eq.degree() });
        if at_infinity > 0 {
            let (dn, dd) = (self.num.degree(), self.den.degree());
            let multiplier = if dn >= dd + 2 {
                Complex::new(0.0, 0.0)
            } else {
                // g(w) = 1/f(1/w) ~ (lead den / lead num) w near 0
                self.den.leading() / self.num.leading()
            };
            for _ in 0..at_infinity {
                out.push(FixedPoint { point: ExtendedComplex::Infinity, multiplier });
            }
        }
        Ok(out)
    }

    /// Critical points with multiplicity (`2 deg f - 2` in total).
    pub fn critical_points(&self) -> Result<Vec<ExtendedComplex>> {
        let d = self.degree();
        if d < 1 {
            return Err(Error::DegreeTooLow { degree: d, min: 1 });
        }
        let n = self.derivative_numerator();
        let mut out: Vec<ExtendedComplex> = if n.degree() >= 1 {
            poly_roots(&n)?.into_iter().map(ExtendedComplex::Finite).collect()
        } else {
            Vec::new()
        };
        let total = 2 * d - 2;
        out.extend(std::iter::repeat_n(ExtendedComplex::Infinity, total.saturating_sub(out.len())));
        Ok(out)
    }

    /// `z ↦ conj(f(conj z))`: every coefficient conjugated.
    pub fn schwarz_reflect(&self) -> RationalMap {
        RationalMap { num: self.num.conj(), den: self.den.conj() }
    }

    /// Whether `schwarz_reflect(f) = f` to within `tol` relative to the
    /// coefficient scale. With the monic denominator this is the same as
    /// agreement up to a common scalar.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        let r = self.schwarz_reflect();
        let scale = self.num.max_abs_coeff().max(self.den.max_abs_coeff()).max(1.0);
        let diff = |a: &Polynomial, b: &Polynomial| {
            (0..a.coeffs().len().max(b.coeffs().len()))
                .map(|k| (a.coeff(k) - b.coeff(k)).norm())
                .fold(0.0, f64::max)
        };
        diff(&self.num, &r.num).max(diff(&self.den, &r.den)) <= tol * scale
    }

    /// Largest coefficient difference after normalisation.
    pub fn coeff_distance(&self, other: &RationalMap) -> f64 {
        let diff = |a: &Polynomial, b: &Polynomial| {
            (0..a.coeffs().len().max(b.coeffs().len()))
                .map(|k| (a.coeff(k) - b.coeff(k)).norm())
                .fold(0.0, f64::max)
        };
        diff(&self.num, &other.num).max(diff(&self.den, &other.den))
    }
}
