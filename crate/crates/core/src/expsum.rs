//! Finite exponential sums `g(z) = Σ a_k e^{i μ_k z}` with real frequencies.

use serde::{Deserialize, Serialize};

use crate::meromorphic::{Homogeneous, Meromorphic};
use crate::{Complex, Error, Result};

/// Evaluation is refused once `|Im z| * max|μ|` reaches this bound.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// Frequencies closer than this (relative to `max(1, |μ|)`) are merged.
const FREQ_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Complex,
    pub freq: f64,
}

impl Term {
    pub fn new(coeff: Complex, freq: f64) -> Self {
        Term { coeff, freq }
    }
}

/// Terms are kept sorted by frequency, with distinct frequencies and
/// nonzero coefficients. The derivative of a constant is the only way to
/// obtain an empty sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExpSumRepr", into = "ExpSumRepr")]
pub struct ExpSum {
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct ExpSumRepr {
    terms: Vec<Term>,
}

impl TryFrom<ExpSumRepr> for ExpSum {
    type Error = Error;
    fn try_from(r: ExpSumRepr) -> Result<Self> {
        ExpSum::new(r.terms)
    }
}

impl From<ExpSum> for ExpSumRepr {
    fn from(g: ExpSum) -> Self {
        ExpSumRepr { terms: g.terms }
    }
}

impl ExpSum {
    /// Merges equal frequencies and drops zero coefficients; an all-zero
    /// result is rejected.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.iter().any(|t| !t.freq.is_finite() || !t.coeff.re.is_finite() || !t.coeff.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite term".into()));
        }
        let g = Self::merged(terms);
        if g.terms.is_empty() {
            return Err(Error::DegenerateSum("all coefficients vanish".into()));
        }
        Ok(g)
    }

    /// Convenience constructor from `(coeff, freq)` pairs.
    pub fn from_pairs(pairs: &[(Complex, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(c, f)| Term::new(c, f)).collect())
    }

    fn merged(mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| a.freq.total_cmp(&b.freq));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if (last.freq - t.freq).abs() <= FREQ_MERGE_TOL * last.freq.abs().max(1.0) => {
                    last.coeff += t.coeff;
                }
                _ => out.push(t),
            }
        }
        let scale = out.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        out.retain(|t| t.coeff.norm() > 1e-15 * scale && t.coeff != Complex::new(0.0, 0.0));
        ExpSum { terms: out }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// A single zero-frequency term.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].freq == 0.0
    }

    pub fn max_abs_freq(&self) -> f64 {
        self.terms.iter().map(|t| t.freq.abs()).fold(0.0, f64::max)
    }

    fn guard(&self, z: Complex) -> Result<()> {
        let x = z.im.abs() * self.max_abs_freq();
        if x < OVERFLOW_GUARD {
            Ok(())
        } else {
            Err(Error::Overflow(x))
        }
    }

    /// Direct summation, subject to the overflow guard.
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        self.guard(z)?;
        Ok(self.terms.iter().map(|t| t.coeff * (Complex::i() * t.freq * z).exp()).sum())
    }

    /// `(g(z), g'(z))` sharing one exponential per term.
    pub fn eval_with_derivative(&self, z: Complex) -> Result<(Complex, Complex)> {
        self.guard(z)?;
        let mut g = Complex::new(0.0, 0.0);
        let mut dg = Complex::new(0.0, 0.0);
        for t in &self.terms {
            let e = t.coeff * (Complex::i() * t.freq * z).exp();
            g += e;
            dg += e * Complex::new(0.0, t.freq);
        }
        Ok((g, dg))
    }

    /// Termwise derivative; zero-frequency terms disappear, so the result
    /// may be empty.
    pub fn derivative(&self) -> ExpSum {
        Self::merged(
            self.terms
                .iter()
                .filter(|t| t.freq != 0.0)
                .map(|t| Term::new(t.coeff * Complex::new(0.0, t.freq), t.freq))
                .collect(),
        )
    }

    /// `z ↦ conj(g(conj z))`: coefficients conjugated, frequencies negated.
    pub fn reflect(&self) -> ExpSum {
        Self::merged(self.terms.iter().map(|t| Term::new(t.coeff.conj(), -t.freq)).collect())
    }

    pub fn scale(&self, s: Complex) -> ExpSum {
        Self::merged(self.terms.iter().map(|t| Term::new(t.coeff * s, t.freq)).collect())
    }
}

impl Meromorphic for ExpSum {
    /// Entire, so `B = 1`; every part is scaled by `e^{-s}` with
    /// `s = max(0, max_k Re(i μ_k z))`, which keeps all magnitudes ≤ 1.
    fn homogeneous(&self, z: Complex) -> Homogeneous {
        let shift = self.terms.iter().map(|t| -t.freq * z.im).fold(0.0, f64::max);
        let mut g = Complex::new(0.0, 0.0);
        let mut dg = Complex::new(0.0, 0.0);
        for t in &self.terms {
            let e = t.coeff * (Complex::i() * t.freq * z - shift).exp();
            g += e;
            dg += e * Complex::new(0.0, t.freq);
        }
        Homogeneous { num: g, den: Complex::new((-shift).exp(), 0.0), dnum: dg, dden: Complex::new(0.0, 0.0) }
    }
}
