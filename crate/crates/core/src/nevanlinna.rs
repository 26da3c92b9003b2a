//! Ahlfors–Shimizu characteristic and order of growth.
//!
//! With `ρ = |f'| / (1 + |f|²)` and `S(s) = ∫_0^{2π} ρ(s e^{iθ})² dθ`,
//!
//! ```text
//! T(r) = ∫_0^r A(t)/t dt,   A(t) = (1/π) ∬_{|z|<t} ρ² dArea
//!      = (1/π) ∫_0^r s S(s) log(r/s) ds.
//! ```
//!
//! The last form is integrated once for all requested radii.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::meromorphic::Meromorphic;
use crate::quadrature::{gl16, gl8};
use crate::{Complex, Error, Result};

/// `|f'(z)| / (1 + |f(z)|²)`, evaluated homogeneously so that poles and
/// huge values need no chart swap. At a removable `0/0` point the value is
/// taken from a point `1e-7` away.
pub fn spherical_derivative<F: Meromorphic + ?Sized>(f: &F, z: Complex) -> f64 {
    match f.homogeneous(z).spherical_derivative() {
        Some(v) => v,
        None => {
            let h = 1e-7 * z.norm().max(1.0);
            f.homogeneous(z + h).spherical_derivative().unwrap_or(0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Multiplies the starting angular resolution of 256 nodes.
    pub density: usize,
    /// Per-panel relative tolerance of the radial integral.
    pub radial_tol: f64,
    /// Relative agreement required between successive angular doublings.
    pub angular_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { density: 1, radial_tol: 1e-6, angular_tol: 1e-9 }
    }
}

const MAX_ANGULAR: usize = 1 << 22;
const MAX_PANEL_DEPTH: usize = 40;
const GRADING_STEPS: i32 = 24;
/// Reported characteristic error above this fraction of the value is fatal.
const MAX_REL_ERROR: f64 = 0.02;

/// `S(s)` by the periodic trapezoid rule. Its error decays geometrically
/// in the node count, so once a doubling changes the estimate by `δ` the
/// refined value is off by roughly `δ²`: the loop stops at
/// `δ ≤ sqrt(angular_tol)`, or when the differences stop shrinking
/// (rounding noise, e.g. near a removable `0/0`).
fn angular_integral<F: Meromorphic + ?Sized>(f: &F, s: f64, cfg: &QuadratureConfig) -> f64 {
    let rho2 = |theta: f64| spherical_derivative(f, Complex::from_polar(s, theta)).powi(2);
    let start = 256 * cfg.density.max(1);
    let mut n = start;
    let mut sum: f64 = (0..n).map(|k| rho2(TAU * k as f64 / n as f64)).sum();
    let mut est = TAU * sum / n as f64;
    let mut last_diff = f64::INFINITY;
    while n < MAX_ANGULAR {
        let odd: f64 = (0..n).map(|k| rho2(TAU * (2 * k + 1) as f64 / (2 * n) as f64)).sum();
        sum += odd;
        n *= 2;
        let next = TAU * sum / n as f64;
        let diff = (next - est).abs();
        let done = diff <= cfg.angular_tol.sqrt() * next.abs() || next == 0.0;
        let stalled = n >= 16 * start && diff > 0.5 * last_diff;
        est = next;
        if done || stalled {
            break;
        }
        last_diff = diff;
    }
    est
}

struct Radial<'a> {
    radii: &'a [f64],
    values: Vec<f64>,
    errors: Vec<f64>,
}

impl Radial<'_> {
    /// Integrates `s S(s) log(r_j / s)` over `[a, b]` for every `r_j >= b`.
    fn panel<F: Meromorphic + Sync + ?Sized>(&mut self, f: &F, a: f64, b: f64, cfg: &QuadratureConfig) {
        let first = self.radii.partition_point(|&r| r < b * (1.0 - 1e-15));
        let mut stack = vec![(a, b, 0usize)];
        while let Some((a, b, depth)) = stack.pop() {
            let nodes: Vec<(f64, f64, bool)> = gl16()
                .on(a, b)
                .map(|(x, w)| (x, w, true))
                .chain(gl8().on(a, b).map(|(x, w)| (x, w, false)))
                .collect();
            let sv: Vec<f64> = nodes.par_iter().map(|&(x, _, _)| x * angular_integral(f, x, cfg)).collect();
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            let mut hi = vec![0.0; self.radii.len()];
            for j in first..self.radii.len() {
                let r = self.radii[j];
                let (mut i16, mut i8) = (0.0, 0.0);
                for (&(x, w, is16), &v) in nodes.iter().zip(&sv) {
                    let term = w * v * (r / x).ln();
                    if is16 {
                        i16 += term;
                    } else {
                        i8 += term;
                    }
                }
                hi[j] = i16;
                worst = worst.max((i16 - i8).abs());
                scale = scale.max(i16.abs());
            }
            if worst <= cfg.radial_tol * scale || worst <= 1e-300 || depth >= MAX_PANEL_DEPTH {
                for j in first..self.radii.len() {
                    self.values[j] += hi[j];
                    if depth >= MAX_PANEL_DEPTH {
                        self.errors[j] += worst;
                    } else {
                        // an accepted panel still carries its estimate
                        self.errors[j] += worst.min(cfg.radial_tol * hi[j].abs());
                    }
                }
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
            }
        }
    }
}

/// `T(r)` at every radius, with error estimates.
pub fn ahlfors_shimizu_profile<F: Meromorphic + Sync + ?Sized>(
    f: &F,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidInput("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radii must be strictly increasing".into()));
    }
    let mut rad = Radial { radii, values: vec![0.0; radii.len()], errors: vec![0.0; radii.len()] };
    // the innermost disc with S frozen at its rim: ∫_0^h s log(r/s) ds = h²/2 (log(r/h) + 1/2)
    let r0 = radii[0];
    let h = r0 * 2f64.powi(-GRADING_STEPS);
    let (s_h, s_2h) = (angular_integral(f, h, cfg), angular_integral(f, 2.0 * h, cfg));
    for (j, r) in radii.iter().enumerate() {
        let w = 0.5 * h * h * ((r / h).ln() + 0.5);
        rad.values[j] += s_h * w;
        rad.errors[j] += (s_2h - s_h).abs() * w;
    }
    // geometric grading toward the origin, then panels at most 4 wide between radii
    let mut lo = h;
    for k in (1..GRADING_STEPS).rev() {
        let hi = r0 * 2f64.powi(-k);
        rad.panel(f, lo, hi, cfg);
        lo = hi;
    }
    let mut breaks = vec![lo];
    for &r in radii {
        let prev = *breaks.last().expect("nonempty");
        let pieces = ((r - prev) / 4.0).ceil().max(1.0) as usize;
        breaks.extend((1..=pieces).map(|k| prev + (r - prev) * k as f64 / pieces as f64));
        *breaks.last_mut().expect("nonempty") = r;
    }
    for w in breaks.windows(2) {
        rad.panel(f, w[0], w[1], cfg);
    }
    let values: Vec<f64> = rad.values.iter().map(|v| v / PI).collect();
    let errors: Vec<f64> = rad.errors.iter().map(|e| e / PI).collect();
    for (v, e) in values.iter().zip(&errors) {
        if *e > MAX_REL_ERROR * v.abs() && *e > 1e-12 {
            return Err(Error::Quadrature(format!("characteristic error {e:e} exceeds 2% of {v:e}")));
        }
    }
    Ok((values, errors))
}

/// `T(r)` at a single radius.
pub fn ahlfors_shimizu_t<F: Meromorphic + Sync + ?Sized>(f: &F, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ahlfors_shimizu_profile(f, &[r], cfg)?.0[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub radii: Vec<f64>,
    #[serde(rename = "T_values")]
    pub t_values: Vec<f64>,
    pub t_errors: Vec<f64>,
    /// Least-squares slope of `log⁺ T` against `log r`; `None` when `T`
    /// vanishes to working precision.
    pub order_estimate: Option<f64>,
    /// Standard error of the slope.
    pub order_ci: Option<f64>,
    /// `[r_max / 10, r_max]`, the window the slope is fitted on.
    pub fit_window: [f64; 2],
}

/// `T` below this everywhere means the order is undefined.
const NEGLIGIBLE_T: f64 = 1e-12;

/// Growth profile over `radii` (at least four, spanning a decade) and the
/// order fitted over the largest decade.
pub fn order_estimate<F: Meromorphic + Sync + ?Sized>(
    f: &F,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<GrowthProfile> {
    if radii.len() < 4 {
        return Err(Error::InvalidInput(format!("{} radii, need at least 4", radii.len())));
    }
    let (r_min, r_max) = (radii[0], radii[radii.len() - 1]);
    if r_max < 10.0 * r_min * (1.0 - 1e-12) {
        return Err(Error::InvalidInput("radii must span at least one decade".into()));
    }
    let (t_values, t_errors) = ahlfors_shimizu_profile(f, radii, cfg)?;
    let fit_window = [r_max / 10.0 * (1.0 - 1e-12), r_max];
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&t_values)
        .filter(|(r, _)| **r >= fit_window[0])
        .map(|(r, t)| (r.ln(), t.max(1.0).ln()))
        .collect();
    let (order_estimate, order_ci) = if t_values.iter().all(|t| t.abs() < NEGLIGIBLE_T) {
        (None, None)
    } else {
        let (slope, se) = least_squares_slope(&pts);
        (Some(slope), Some(se))
    };
    Ok(GrowthProfile { radii: radii.to_vec(), t_values, t_errors, order_estimate, order_ci, fit_window: [r_max / 10.0, r_max] })
}

/// Slope and its standard error.
fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if pts.len() <= 2 {
        return (slope, 0.0);
    }
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// `n` radii spaced geometrically from `r_min` to `r_max`.
pub fn geometric_radii(r_min: f64, r_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && n >= 2 && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!("cannot space {n} radii over [{r_min}, {r_max}]")));
    }
    let q = (r_max / r_min).ln() / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|k| r_min * (q * k as f64).exp()).collect();
    v[n - 1] = r_max;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::ExpSum;
    use crate::{Polynomial, RationalMap};

    fn exp_iz() -> ExpSum {
        ExpSum::from_pairs(&[(Complex::new(1.0, 0.0), 1.0)]).unwrap()
    }

    #[test]
    fn spherical_derivative_examples() {
        let id = RationalMap::identity();
        assert_eq!(spherical_derivative(&id, Complex::new(0.0, 0.0)), 1.0);
        assert!((spherical_derivative(&exp_iz(), Complex::new(0.0, 0.0)) - 0.5).abs() < 1e-15);
        let sq = RationalMap::polynomial(Polynomial::from_real(&[0.0, 0.0, 1.0]));
        assert!((spherical_derivative(&sq, Complex::new(1.0, 0.0)) - 1.0).abs() < 1e-15);
        // at the pole of 1/z the value is |−1/z²| / (1 + 1/|z|²) → 1
        let inv = RationalMap::new(Polynomial::from_real(&[1.0]), Polynomial::from_real(&[0.0, 1.0])).unwrap();
        assert!((spherical_derivative(&inv, Complex::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn characteristic_of_power_is_closed_form() {
        // T(r) = ½ log(1 + r^{2d}) for z^d
        let sq = RationalMap::polynomial(Polynomial::from_real(&[0.0, 0.0, 1.0]));
        let (t, _) = ahlfors_shimizu_profile(&sq, &[0.5, 3.0, 100.0], &QuadratureConfig::default()).unwrap();
        for (r, v) in [0.5f64, 3.0, 100.0].iter().zip(&t) {
            assert!((v - 0.5 * (1.0 + r.powi(4)).ln()).abs() < 1e-6 * v.max(1.0), "{r}: {v}");
        }
        assert!((1.8..=2.2).contains(&(t[2] / 100f64.ln())));
    }

    #[test]
    fn exponential_matches_oracle() {
        let t = ahlfors_shimizu_t(&exp_iz(), 20.0, &QuadratureConfig::default()).unwrap();
        assert!((t - 6.026174).abs() < 1e-4, "{t}");
    }

    #[test]
    fn constant_has_zero_characteristic_and_undefined_order() {
        let one = ExpSum::from_pairs(&[(Complex::new(1.0, 0.0), 0.0)]).unwrap();
        assert_eq!(ahlfors_shimizu_t(&one, 10.0, &QuadratureConfig::default()).unwrap(), 0.0);
        let g = order_estimate(&one, &[1.0, 3.0, 6.0, 10.0], &QuadratureConfig::default()).unwrap();
        assert_eq!(g.order_estimate, None);
    }

    #[test]
    fn rejects_bad_radii() {
        let cfg = QuadratureConfig::default();
        assert!(order_estimate(&exp_iz(), &[1.0, 2.0, 3.0], &cfg).is_err());
        assert!(order_estimate(&exp_iz(), &[1.0, 2.0, 3.0, 4.0], &cfg).is_err());
        assert!(ahlfors_shimizu_profile(&exp_iz(), &[2.0, 1.0], &cfg).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 0.5 * k as f64 + 1.0)).collect();
        let (s, se) = least_squares_slope(&pts);
        assert!((s - 0.5).abs() < 1e-14 && se < 1e-14);
    }
}
