//! Iteration of rational maps: Julia sampling, Poincaré functions and Koenigs
//! coordinates at a repelling fixed point, and interval criteria for real
//! polynomials.

mod criteria;
mod julia;
mod koenigs;
mod render;

pub use criteria::{
    blaschke_halfplane_check, chebyshev_conjugacy_check, chebyshev_polynomial, interval_criterion, ChebyshevReport,
    HalfPlaneVerdict, IntervalCriterionReport,
};
pub use julia::{julia_sample, BranchRule, JuliaSample, JuliaSampleConfig};
pub use koenigs::{koenigs_coordinate, line_invariance_check, poincare_eval, KoenigsChart, LineCheck};
pub use render::{escape_radius, escape_time_image, render_pgm, RenderWindow};

use crate::rational::FixedPoint;
use crate::{Error, RationalMap, Result};

/// Multipliers above `1 + REPELLING_MARGIN` count as repelling.
pub const REPELLING_MARGIN: f64 = 1e-9;

pub(crate) fn require_degree(f: &RationalMap, min: usize) -> Result<()> {
    if f.degree() < min {
        return Err(Error::DegreeTooLow { degree: f.degree(), min });
    }
    Ok(())
}

/// The repelling fixed point with the largest multiplier. Finite points are
/// preferred over `∞`; near-ties (relative `1e-12`) go to the
/// lexicographically smallest `(re, im)`.
pub fn repelling_fixed_point(f: &RationalMap) -> Result<FixedPoint> {
    require_degree(f, 2)?;
    let mut best: Option<FixedPoint> = None;
    for fp in f.fixed_points()? {
        if fp.multiplier.norm() <= 1.0 + REPELLING_MARGIN {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => match (fp.point.finite(), b.point.finite()) {
                (Some(_), None) => true,
                (None, _) => false,
                (Some(z), Some(w)) => {
                    let (m, mb) = (fp.multiplier.norm(), b.multiplier.norm());
                    if (m - mb).abs() > 1e-12 * mb {
                        m > mb
                    } else {
                        z.re.total_cmp(&w.re).then(z.im.total_cmp(&w.im)).is_lt()
                    }
                }
            },
        };
        if better {
            best = Some(fp);
        }
    }
    best.ok_or(Error::NoRepellingFixedPoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Complex, ExtendedComplex, Polynomial};

    fn poly(desc: &[f64]) -> RationalMap {
        let c: Vec<Complex> = desc.iter().map(|&x| Complex::new(x, 0.0)).collect();
        RationalMap::polynomial(Polynomial::from_descending(&c))
    }

    fn check(f: &RationalMap, p: f64, lambda: f64) {
        let fp = repelling_fixed_point(f).unwrap();
        assert!(fp.point.chordal(&ExtendedComplex::real(p)) < 1e-12, "{:?}", fp);
        assert!((fp.multiplier - Complex::new(lambda, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn examples() {
        check(&poly(&[1.0, 0.0, 0.0]), 1.0, 2.0);
        check(&poly(&[1.0, 0.0, -2.0]), 2.0, 4.0);
        check(&poly(&[1.0, -1.0, 0.0]), 2.0, 3.0);
    }

    #[test]
    fn rejects_low_degree_and_attracting_only() {
        assert!(matches!(repelling_fixed_point(&poly(&[2.0, 0.0])), Err(Error::DegreeTooLow { .. })));
        // z^2 + 1/4: parabolic point 1/2 and superattracting ∞
        assert_eq!(repelling_fixed_point(&poly(&[1.0, 0.0, 0.25])), Err(Error::NoRepellingFixedPoint));
    }
}
