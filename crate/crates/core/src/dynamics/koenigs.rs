use serde::{Serialize, Serializer};

use super::{repelling_fixed_point, require_degree, REPELLING_MARGIN};
use crate::sphere::PointCloud;
use crate::{Complex, Error, ExtendedComplex, Polynomial, RationalMap, Result};

/// Local chart at a finite repelling fixed point `p` with multiplier `λ`.
///
/// Internally the map is kept in deviation coordinates
/// `f̃(w) = f(p + w) - p`, whose constant term is exactly zero, so that
/// iterates of tiny `w` keep full relative precision.
#[derive(Debug, Clone)]
pub struct KoenigsChart {
    map: RationalMap,
    shifted: RationalMap,
    p: Complex,
    lambda: Complex,
    validity_radius: f64,
    max_depth: usize,
}

impl Serialize for KoenigsChart {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            map: &'a RationalMap,
            p: Complex,
            lambda: Complex,
            validity_radius: f64,
            max_depth: usize,
        }
        Repr {
            map: &self.map,
            p: self.p,
            lambda: self.lambda,
            validity_radius: self.validity_radius,
            max_depth: self.max_depth,
        }
        .serialize(s)
    }
}

/// Default number of Poincaré iterations.
pub const DEFAULT_DEPTH: usize = 40;

fn shifted_map(f: &RationalMap, p: Complex) -> RationalMap {
    let num = f.num().shift(p);
    let den = f.den().shift(p);
    let mut top = (&num - &den.scale(p)).coeffs().to_vec();
    if let Some(c0) = top.first_mut() {
        *c0 = Complex::new(0.0, 0.0);
    }
    RationalMap::from_parts_unchecked(Polynomial::new(top), den)
}

impl KoenigsChart {
    /// Chart at the preferred repelling fixed point with the default validity
    /// radius and depth.
    pub fn new(f: &RationalMap) -> Result<Self> {
        require_degree(f, 2)?;
        let fp = repelling_fixed_point(f)?;
        let p = fp
            .point
            .finite()
            .ok_or_else(|| Error::OutsideChart("the preferred repelling fixed point is ∞".into()))?;
        Self::at(f, p, fp.multiplier)
    }

    /// Chart at a given fixed point; checks `f(p) = p`, `λ = f'(p)` and `|λ| > 1`.
    pub fn at(f: &RationalMap, p: Complex, lambda: Complex) -> Result<Self> {
        require_degree(f, 2)?;
        let fp = ExtendedComplex::Finite(p);
        if f.eval(fp).chordal(&fp) >= 1e-9 {
            return Err(Error::InvalidInput(format!("{p} is not a fixed point")));
        }
        if (f.derivative_at(p) - lambda).norm() >= 1e-8 * lambda.norm().max(1.0) {
            return Err(Error::InvalidInput(format!("{lambda} is not the multiplier at {p}")));
        }
        if lambda.norm() <= 1.0 + REPELLING_MARGIN {
            return Err(Error::NoRepellingFixedPoint);
        }
        let validity_radius = default_validity_radius(f, p)?;
        Ok(KoenigsChart {
            map: f.clone(),
            shifted: shifted_map(f, p),
            p,
            lambda,
            validity_radius,
            max_depth: DEFAULT_DEPTH,
        })
    }

    pub fn with_validity_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("validity radius {r}")));
        }
        self.validity_radius = r;
        Ok(self)
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    pub fn p(&self) -> Complex {
        self.p
    }

    pub fn lambda(&self) -> Complex {
        self.lambda
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `f̃^n(w)`.
    fn iterate_shifted(&self, w: Complex, n: usize) -> ExtendedComplex {
        let mut v = ExtendedComplex::Finite(w);
        for _ in 0..n {
            v = self.shifted.eval(v);
        }
        v
    }

    fn back_to_plane(&self, w: ExtendedComplex) -> ExtendedComplex {
        match w {
            ExtendedComplex::Finite(w) => ExtendedComplex::from_complex(self.p + w),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        }
    }
}

/// `0.1 ·` distance from `p` to the nearest other finite fixed or critical point.
fn default_validity_radius(f: &RationalMap, p: Complex) -> Result<f64> {
    let mut nearest = f64::INFINITY;
    let fixed = f.fixed_points()?.into_iter().map(|fp| fp.point);
    for q in fixed.chain(f.critical_points()?) {
        if let Some(q) = q.finite() {
            let d = (q - p).norm();
            if d > 1e-9 {
                nearest = nearest.min(d);
            }
        }
    }
    Ok(if nearest.is_finite() { 0.1 * nearest } else { 1.0 })
}

/// `F_n(z) = p + f̃^n(z λ^{-n})` and the chordal gap to `F_{n-1}(z)`
/// (zero for `n = 0`, where `F_0(z) = p + z`).
pub fn poincare_eval(chart: &KoenigsChart, z: Complex, n: usize) -> Result<(ExtendedComplex, f64)> {
    if n > chart.max_depth {
        return Err(Error::InvalidInput(format!("depth {n} exceeds the chart maximum {}", chart.max_depth)));
    }
    let start = |k: usize| z / chart.lambda.powi(k as i32);
    if n > 0 && start(n).norm() >= chart.validity_radius {
        return Err(Error::OutsideChart(format!(
            "|z / λ^{n}| = {} exceeds the validity radius {}",
            start(n).norm(),
            chart.validity_radius
        )));
    }
    let value = chart.back_to_plane(chart.iterate_shifted(start(n), n));
    if n == 0 {
        return Ok((value, 0.0));
    }
    let prev = chart.back_to_plane(chart.iterate_shifted(start(n - 1), n - 1));
    Ok((value, value.chordal(&prev)))
}

const KOENIGS_TARGET: f64 = 1e-10;
const KOENIGS_MAX_STEPS: usize = 4000;

/// Solves `f̃(v) = u` for the root nearest 0, polished by Newton steps on
/// `f̃(v) - u` for relative accuracy.
fn inverse_branch(chart: &KoenigsChart, u: Complex) -> Result<Complex> {
    let pre = chart.shifted.preimages(ExtendedComplex::Finite(u))?;
    let mut v = pre
        .into_iter()
        .filter_map(|w| w.finite())
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or_else(|| Error::OutsideChart("no finite preimage".into()))?;
    let mut res = match chart.shifted.eval_finite(v) {
        ExtendedComplex::Finite(w) => (w - u).norm(),
        ExtendedComplex::Infinity => f64::INFINITY,
    };
    for _ in 0..4 {
        let ExtendedComplex::Finite(fv) = chart.shifted.eval_finite(v) else { break };
        let d = chart.shifted.derivative_at(v);
        if d == Complex::new(0.0, 0.0) {
            break;
        }
        let next = v - (fv - u) / d;
        let nres = match chart.shifted.eval_finite(next) {
            ExtendedComplex::Finite(w) => (w - u).norm(),
            ExtendedComplex::Infinity => f64::INFINITY,
        };
        if !(nres < res) {
            break;
        }
        v = next;
        res = nres;
    }
    Ok(v)
}

/// `φ(z) = lim λ^n (g^n(z) - p)` for the inverse branch `g` fixing `p`.
pub fn koenigs_coordinate(chart: &KoenigsChart, z: Complex) -> Result<Complex> {
    let mut u = z - chart.p;
    if u.norm() >= chart.validity_radius {
        return Err(Error::OutsideChart(format!(
            "|z - p| = {} exceeds the validity radius {}",
            u.norm(),
            chart.validity_radius
        )));
    }
    let mut scale = Complex::new(1.0, 0.0);
    for _ in 0..KOENIGS_MAX_STEPS {
        if u.norm() < KOENIGS_TARGET {
            return Ok(u * scale);
        }
        let next = inverse_branch(chart, u)?;
        if !(next.norm() < u.norm()) {
            return Err(Error::OutsideChart(format!("inverse branch stopped contracting at {}", chart.p + u)));
        }
        u = next;
        scale *= chart.lambda;
    }
    Err(Error::OutsideChart("Koenigs iteration did not reach the target".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineCheck {
    pub is_line: bool,
    /// Unit direction of the best line through 0 in the Koenigs plane.
    pub direction: Complex,
    pub max_deviation: f64,
    /// Largest `|φ|` among the samples used.
    pub scale: f64,
    pub n_used: usize,
    pub lambda_is_real: bool,
}

/// Fits a line through 0 to the Koenigs images of the cloud points lying
/// within the validity radius of `p`.
pub fn line_invariance_check(chart: &KoenigsChart, cloud: &PointCloud) -> Result<LineCheck> {
    let near: Vec<Complex> = cloud
        .points()
        .iter()
        .filter_map(|p| p.finite())
        .filter(|z| (z - chart.p).norm() < chart.validity_radius)
        .collect();
    if near.len() < 10 {
        return Err(Error::InvalidInput(format!(
            "{} samples within the validity radius, need at least 10",
            near.len()
        )));
    }
    let phis = near.iter().map(|&z| koenigs_coordinate(chart, z)).collect::<Result<Vec<_>>>()?;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for w in &phis {
        sxx += w.re * w.re;
        sxy += w.re * w.im;
        syy += w.im * w.im;
    }
    let mut theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if theta <= -std::f64::consts::FRAC_PI_2 + 1e-12 {
        theta += std::f64::consts::PI;
    }
    let direction = Complex::from_polar(1.0, theta);
    let max_deviation = phis.iter().map(|w| (w * direction.conj()).im.abs()).fold(0.0, f64::max);
    let scale = phis.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let lambda_is_real = chart.lambda.im.abs() < 1e-8 * chart.lambda.norm();
    Ok(LineCheck {
        is_line: max_deviation < 1e-5 * scale && lambda_is_real,
        direction,
        max_deviation,
        scale,
        n_used: phis.len(),
        lambda_is_real,
    })
}
