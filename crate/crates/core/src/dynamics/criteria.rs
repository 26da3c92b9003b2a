use serde::{Deserialize, Serialize};

use super::require_degree;
use crate::{Complex, Error, ExtendedComplex, Mobius, Polynomial, RationalMap, Result};

const FLAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalCriterionReport {
    pub a: f64,
    pub b: f64,
    pub is_real_map: bool,
    pub endpoints_invariant: bool,
    pub critical_points_inside: bool,
    pub critical_values_outside: bool,
    pub verdict: bool,
    pub critical_points: Vec<Complex>,
    pub critical_values: Vec<Complex>,
}

fn require_polynomial(f: &RationalMap) -> Result<()> {
    if !f.is_polynomial() {
        return Err(Error::InvalidInput("a polynomial map is required".into()));
    }
    Ok(())
}

fn finite_critical(f: &RationalMap) -> Result<(Vec<Complex>, Vec<Complex>)> {
    let points: Vec<Complex> = f.critical_points()?.iter().filter_map(|c| c.finite()).collect();
    let values = points.iter().filter_map(|&c| f.eval_finite(c).finite()).collect();
    Ok((points, values))
}

fn is_real(z: Complex) -> bool {
    z.im.abs() <= FLAG_TOL * z.norm().max(1.0)
}

/// For a real polynomial `f` with `f({a, b}) ⊂ {a, b}`, critical points in
/// `[a, b]` and critical values outside `(a, b)`, the Julia set lies in `[a, b]`.
pub fn interval_criterion(f: &RationalMap, a: f64, b: f64) -> Result<IntervalCriterionReport> {
    require_polynomial(f)?;
    require_degree(f, 2)?;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("need a < b, got [{a}, {b}]")));
    }
    let is_real_map = f.is_real_symmetric(1e-12);
    let near_endpoint = |w: ExtendedComplex| {
        w.finite()
            .is_some_and(|w| (w - Complex::new(a, 0.0)).norm() <= FLAG_TOL || (w - Complex::new(b, 0.0)).norm() <= FLAG_TOL)
    };
    let endpoints_invariant = near_endpoint(f.eval(ExtendedComplex::real(a))) && near_endpoint(f.eval(ExtendedComplex::real(b)));
    let (critical_points, critical_values) = finite_critical(f)?;
    let critical_points_inside = critical_points
        .iter()
        .all(|c| is_real(*c) && c.re >= a - FLAG_TOL && c.re <= b + FLAG_TOL);
    let critical_values_outside = critical_values
        .iter()
        .all(|v| !is_real(*v) || v.re <= a + FLAG_TOL || v.re >= b - FLAG_TOL);
    Ok(IntervalCriterionReport {
        a,
        b,
        is_real_map,
        endpoints_invariant,
        critical_points_inside,
        critical_values_outside,
        verdict: is_real_map && endpoints_invariant && critical_points_inside && critical_values_outside,
        critical_points,
        critical_values,
    })
}

/// `p_d` with `p_d(2 cos θ) = 2 cos(dθ)`: `p_0 = 2`, `p_1 = z`,
/// `p_{k+1} = z p_k - p_{k-1}`.
pub fn chebyshev_polynomial(d: usize) -> Polynomial {
    let mut prev = Polynomial::from_real(&[2.0]);
    if d == 0 {
        return prev;
    }
    let mut cur = Polynomial::z();
    for _ in 1..d {
        let next = &(&Polynomial::z() * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevReport {
    /// Every finite critical value lies within `1e-9` of `a` or `b`.
    pub critical_values_at_endpoints: bool,
    /// `+1` or `-1` when the conjugate by `[a, b] → [-2, 2]` equals `±p_d`.
    pub sign: Option<i8>,
    /// Relative coefficient distance to the nearer of `±p_d`.
    pub coefficient_distance: f64,
    pub verdict: bool,
}

/// Whether `f` is affinely conjugate to `±p_d`, decided by the critical
/// values and confirmed by comparing coefficients after conjugation.
pub fn chebyshev_conjugacy_check(f: &RationalMap, a: f64, b: f64) -> Result<ChebyshevReport> {
    let report = interval_criterion(f, a, b)?;
    if !report.verdict {
        return Err(Error::InvalidInput("interval criterion does not hold".into()));
    }
    let at_endpoint = |v: &Complex| {
        (v - Complex::new(a, 0.0)).norm() <= FLAG_TOL * a.abs().max(1.0)
            || (v - Complex::new(b, 0.0)).norm() <= FLAG_TOL * b.abs().max(1.0)
    };
    let critical_values_at_endpoints = report.critical_values.iter().all(at_endpoint);

    let g = f.conjugate(&Mobius::interval_to_standard(a, b)?)?;
    let p = RationalMap::polynomial(chebyshev_polynomial(f.degree()));
    let minus = RationalMap::polynomial(-&chebyshev_polynomial(f.degree()));
    let scale = p.num().max_abs_coeff();
    let (dp, dm) = (g.coeff_distance(&p) / scale, g.coeff_distance(&minus) / scale);
    let coefficient_distance = dp.min(dm);
    let sign = if coefficient_distance < 1e-8 { Some(if dp <= dm { 1 } else { -1 }) } else { None };
    Ok(ChebyshevReport {
        critical_values_at_endpoints,
        sign,
        coefficient_distance,
        verdict: critical_values_at_endpoints && sign.is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlaneVerdict {
    Preserves,
    Swaps,
    Neither,
}

/// Samples `f` on a `density × density` grid covering the upper half-plane
/// through `x = tan s`, `y = tan t`. A falsifier: `Preserves` and `Swaps`
/// only say that no sample contradicted them.
pub fn blaschke_halfplane_check(f: &RationalMap, grid_density: usize) -> Result<HalfPlaneVerdict> {
    require_degree(f, 1)?;
    if grid_density == 0 {
        return Err(Error::InvalidInput("grid density must be positive".into()));
    }
    if !f.is_real_symmetric(1e-12) {
        return Err(Error::InvalidInput("map is not real-symmetric".into()));
    }
    let n = grid_density as f64;
    let (mut up, mut down) = (true, true);
    for i in 0..grid_density {
        let x = (std::f64::consts::PI * ((i as f64 + 0.5) / n - 0.5)).tan();
        for j in 0..grid_density {
            let y = (std::f64::consts::FRAC_PI_2 * (j as f64 + 0.5) / n).tan();
            let Some(w) = f.eval_finite(Complex::new(x, y)).finite() else { continue };
            let slack = 1e-12 * w.norm().max(1.0);
            up &= w.im > -slack;
            down &= w.im < slack;
        }
    }
    Ok(match (up, down) {
        (true, false) => HalfPlaneVerdict::Preserves,
        (false, true) => HalfPlaneVerdict::Swaps,
        _ => HalfPlaneVerdict::Neither,
    })
}
