//! Stereographic projection, circlines as plane sections of the unit sphere,
//! and least-squares circline fitting.
//!
//! Convention: `z = x + iy ↦ (2x, 2y, |z|² - 1) / (|z|² + 1)`, so `0` is the
//! south pole, `∞` the north pole and the unit circle the equator.

use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::meromorphic::Meromorphic;
use crate::{Complex, Error, ExtendedComplex, Result};

type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: &Vec3) -> f64 {
    a[0].hypot(a[1]).hypot(a[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Accepts vectors of unit length within `1e-12`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = norm(&[x, y, z]);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("({x}, {y}, {z}) is not on the unit sphere")));
        }
        Ok(SpherePoint { x, y, z })
    }

    pub fn as_array(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// Euclidean distance in space, which equals the chordal distance.
    pub fn distance(&self, o: &SpherePoint) -> f64 {
        norm(&sub(&self.as_array(), &o.as_array()))
    }
}

pub fn to_sphere(p: ExtendedComplex) -> SpherePoint {
    match p {
        ExtendedComplex::Infinity => SpherePoint { x: 0.0, y: 0.0, z: 1.0 },
        ExtendedComplex::Finite(z) if z.norm() <= 1.0 => {
            let r2 = z.norm_sqr();
            let d = 1.0 + r2;
            SpherePoint { x: 2.0 * z.re / d, y: 2.0 * z.im / d, z: (r2 - 1.0) / d }
        }
        ExtendedComplex::Finite(z) => {
            let w = z.inv();
            let r2 = w.norm_sqr();
            let d = 1.0 + r2;
            SpherePoint { x: 2.0 * w.re / d, y: -2.0 * w.im / d, z: (1.0 - r2) / d }
        }
    }
}

pub fn from_sphere(s: SpherePoint) -> ExtendedComplex {
    if s.z > 0.0 {
        let den = Complex::new(s.x, -s.y);
        if den == Complex::new(0.0, 0.0) {
            return ExtendedComplex::Infinity;
        }
        ExtendedComplex::from_complex(Complex::new(1.0 + s.z, 0.0) / den)
    } else {
        ExtendedComplex::from_complex(Complex::new(s.x, s.y) / (1.0 - s.z))
    }
}

/// The section `{s : n·s = offset}` of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circline {
    pub normal: Vec3,
    pub offset: f64,
}

impl Circline {
    /// Normalises `normal`; the section must be a genuine circle (`|offset| < 1`).
    pub fn new(normal: Vec3, offset: f64) -> Result<Self> {
        let c = Self::from_plane(normal, offset)?;
        if !(c.offset.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("plane at distance {} misses the sphere", c.offset.abs())));
        }
        Ok(c)
    }

    fn from_plane(normal: Vec3, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidInput("circline normal must be nonzero and finite".into()));
        }
        Ok(Self::canonical([normal[0] / n, normal[1] / n, normal[2] / n], offset / n))
    }

    /// Flips `(n, h)` so the first component with `|n_i| > 1e-9` is positive.
    fn canonical(n: Vec3, h: f64) -> Self {
        let sign = n.iter().find(|c| c.abs() > 1e-9).map_or(1.0, |c| c.signum());
        Circline { normal: [sign * n[0], sign * n[1], sign * n[2]], offset: sign * h }
    }

    /// The unit circle.
    pub fn equator() -> Self {
        Circline { normal: [0.0, 0.0, 1.0], offset: 0.0 }
    }

    /// The extended real line.
    pub fn real_line() -> Self {
        Circline { normal: [0.0, 1.0, 0.0], offset: 0.0 }
    }

    /// Plane distance `|n·s - h|`.
    pub fn residual(&self, p: ExtendedComplex) -> f64 {
        (dot(&self.normal, &to_sphere(p).as_array()) - self.offset).abs()
    }

    /// Whether the circline passes through `∞`, i.e. is a straight line.
    pub fn is_line(&self) -> bool {
        (self.normal[2] - self.offset).abs() < 1e-12
    }

    /// Distance between the `(n, h)` representatives.
    pub fn distance(&self, o: &Circline) -> f64 {
        norm(&sub(&self.normal, &o.normal)).hypot(self.offset - o.offset)
    }
}

/// Points of the extended plane with optional positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<ExtendedComplex>,
    weights: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<ExtendedComplex>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::DegenerateCloud("empty cloud".into()));
        }
        Ok(PointCloud { points, weights: None })
    }

    pub fn with_weights(points: Vec<ExtendedComplex>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.len() {
            return Err(Error::InvalidInput(format!("{} weights for {} points", weights.len(), points.len())));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput("weights must be positive and finite".into()));
        }
        let mut c = Self::new(points)?;
        c.weights = Some(weights);
        Ok(c)
    }

    pub fn points(&self) -> &[ExtendedComplex] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    /// Parses lines `re,im[,weight]` or `inf[,weight]`; blank lines and
    /// lines starting with `#` are skipped. Weights must be given for all
    /// points or none.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: cannot parse {line:?}", no + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
            let (p, w) = match fields.as_slice() {
                ["inf"] => (ExtendedComplex::Infinity, None),
                ["inf", w] => (ExtendedComplex::Infinity, Some(num(w).ok_or_else(bad)?)),
                [re, im] => (ExtendedComplex::Finite(Complex::new(num(re).ok_or_else(bad)?, num(im).ok_or_else(bad)?)), None),
                [re, im, w] => (
                    ExtendedComplex::Finite(Complex::new(num(re).ok_or_else(bad)?, num(im).ok_or_else(bad)?)),
                    Some(num(w).ok_or_else(bad)?),
                ),
                _ => return Err(bad()),
            };
            points.push(p);
            weights.extend(w);
        }
        match weights.len() {
            0 => Self::new(points),
            n if n == points.len() => Self::with_weights(points, weights),
            _ => Err(Error::Parse("weights given for some points only".into())),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (i, p) in self.points.iter().enumerate() {
            match p {
                ExtendedComplex::Infinity => s.push_str("inf"),
                ExtendedComplex::Finite(z) => {
                    let _ = write!(s, "{:.16e},{:.16e}", z.re, z.im);
                }
            }
            if let Some(w) = &self.weights {
                let _ = write!(s, ",{:.16e}", w[i]);
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub circline: Circline,
    pub rms_residual: f64,
    pub max_residual: f64,
    /// Second smallest minus smallest covariance eigenvalue.
    pub eigengap: f64,
    /// Covariance eigenvalues, ascending.
    pub eigenvalues: [f64; 3],
    /// Eigengap below `1e-9`.
    pub ill_conditioned: bool,
    /// `|offset| >= 1`: the cloud is concentrated near one point.
    pub near_point: bool,
    pub n_points: usize,
}

const CHUNK: usize = 1024;

/// Weighted sums over fixed-size chunks, combined pairwise in index order so
/// the result does not depend on the thread count.
fn chunked_sum<const N: usize, F>(cloud: &PointCloud, sph: &[Vec3], f: F) -> [f64; N]
where
    F: Fn(&Vec3, f64) -> [f64; N] + Sync,
{
    let parts: Vec<[f64; N]> = sph
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = [0.0; N];
            for (k, s) in chunk.iter().enumerate() {
                let v = f(s, cloud.weight(c * CHUNK + k));
                for j in 0..N {
                    acc[j] += v[j];
                }
            }
            acc
        })
        .collect();
    pairwise(&parts)
}

fn pairwise<const N: usize>(parts: &[[f64; N]]) -> [f64; N] {
    match parts.len() {
        0 => [0.0; N],
        1 => parts[0],
        n => {
            let (a, b) = (pairwise(&parts[..n / 2]), pairwise(&parts[n / 2..]));
            std::array::from_fn(|j| a[j] + b[j])
        }
    }
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending, via the trigonometric
/// solution of the characteristic cubic and one Newton step each.
fn sym_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut e = [m[0][0], m[1][1], m[2][2]];
        e.sort_by(f64::total_cmp);
        return e;
    }
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p));
    let det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (0.5 * det_b).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let big = q + 2.0 * p * phi.cos();
    let small = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - big - small;
    let mut e = [small, mid, big].map(|l| newton_eigen(m, l));
    e.sort_by(f64::total_cmp);
    e
}

fn char_poly(m: &[[f64; 3]; 3], l: f64) -> (f64, f64) {
    // det(M - lI) = -l^3 + tr l^2 - c2 l + det
    let tr = m[0][0] + m[1][1] + m[2][2];
    let c2 = m[0][0] * m[1][1] + m[0][0] * m[2][2] + m[1][1] * m[2][2]
        - m[0][1] * m[1][0]
        - m[0][2] * m[2][0]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let v = ((-l + tr) * l - c2) * l + det;
    let dv = (-3.0 * l + 2.0 * tr) * l - c2;
    (v, dv)
}

fn newton_eigen(m: &[[f64; 3]; 3], l: f64) -> f64 {
    let (v, dv) = char_poly(m, l);
    if dv == 0.0 {
        return l;
    }
    let next = l - v / dv;
    if next.is_finite() && char_poly(m, next).0.abs() < v.abs() {
        next
    } else {
        l
    }
}

/// Unit null vector of `M - lI`.
fn eigenvector(m: &[[f64; 3]; 3], l: f64) -> Vec3 {
    let rows: [Vec3; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[i][j] - if i == j { l } else { 0.0 }));
    let candidates = [cross(&rows[0], &rows[1]), cross(&rows[0], &rows[2]), cross(&rows[1], &rows[2])];
    let best = candidates.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))).copied().unwrap_or([0.0; 3]);
    let scale = rows.iter().map(norm).fold(0.0, f64::max);
    if norm(&best) > 1e-12 * scale * scale && norm(&best) > 0.0 {
        let n = norm(&best);
        return [best[0] / n, best[1] / n, best[2] / n];
    }
    // rank <= 1: any vector orthogonal to the dominant row
    let r = *rows.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))).unwrap_or(&[0.0; 3]);
    if norm(&r) == 0.0 {
        return [0.0, 0.0, 1.0];
    }
    let axis = (0..3).min_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let v = cross(&r, &e);
    let n = norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Weighted least-squares plane section through the projected cloud.
pub fn fit_circline(cloud: &PointCloud) -> Result<FitReport> {
    if cloud.len() < 3 {
        return Err(Error::DegenerateCloud(format!("{} points, need at least 3", cloud.len())));
    }
    let sph: Vec<Vec3> = cloud.points.par_iter().map(|p| to_sphere(*p).as_array()).collect();
    let first = sph[0];
    if sph.iter().all(|s| norm(&sub(s, &first)) <= 1e-9) {
        return Err(Error::DegenerateCloud("all points coincide".into()));
    }
    let [w, sx, sy, sz] = chunked_sum(cloud, &sph, |s, w| [w, w * s[0], w * s[1], w * s[2]]);
    let mean = [sx / w, sy / w, sz / w];
    let cov = chunked_sum(cloud, &sph, |s, w| {
        let d = sub(s, &mean);
        [w * d[0] * d[0], w * d[0] * d[1], w * d[0] * d[2], w * d[1] * d[1], w * d[1] * d[2], w * d[2] * d[2]]
    });
    let c = cov.map(|v| v / w);
    let m = [[c[0], c[1], c[2]], [c[1], c[3], c[4]], [c[2], c[4], c[5]]];
    let eig = sym_eigenvalues(&m);
    let n = eigenvector(&m, eig[0]);
    let circline = Circline::canonical(n, dot(&n, &mean));

    let [sq, mx] = {
        let res: Vec<[f64; 2]> = sph
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(ci, chunk)| {
                let mut acc = [0.0, 0.0f64];
                for (k, s) in chunk.iter().enumerate() {
                    let r = (dot(&circline.normal, s) - circline.offset).abs();
                    acc[0] += cloud.weight(ci * CHUNK + k) * r * r;
                    acc[1] = acc[1].max(r);
                }
                acc
            })
            .collect();
        let sq = pairwise(&res.iter().map(|a| [a[0]]).collect::<Vec<_>>())[0];
        [sq, res.iter().map(|a| a[1]).fold(0.0, f64::max)]
    };
    let eigengap = eig[1] - eig[0];
    Ok(FitReport {
        circline,
        rms_residual: (sq / w).sqrt(),
        max_residual: mx,
        eigengap,
        eigenvalues: eig,
        ill_conditioned: eigengap < 1e-9,
        near_point: circline.offset.abs() >= 1.0,
        n_points: cloud.len(),
    })
}

/// Default containment tolerance in plane-distance units.
pub const DEFAULT_CONTAINMENT_TOL: f64 = 1e-6;

/// `max_residual <= tol`, with the fit attached.
pub fn is_contained_in_circline(cloud: &PointCloud, tol: f64) -> Result<(bool, FitReport)> {
    let fit = fit_circline(cloud)?;
    Ok((fit.max_residual <= tol, fit))
}

/// The circline through three distinct points.
pub fn circline_through(p1: ExtendedComplex, p2: ExtendedComplex, p3: ExtendedComplex) -> Result<Circline> {
    let [s1, s2, s3] = [p1, p2, p3].map(|p| to_sphere(p).as_array());
    for (a, b) in [(&s1, &s2), (&s1, &s3), (&s2, &s3)] {
        if norm(&sub(a, b)) <= 1e-9 {
            return Err(Error::DegenerateCloud("points are not distinct".into()));
        }
    }
    let n = cross(&sub(&s2, &s1), &sub(&s3, &s1));
    if norm(&n) <= 1e-18 {
        return Err(Error::DegenerateCloud("points nearly coincide".into()));
    }
    // average the offsets for symmetry in the three points
    let h = (dot(&n, &s1) + dot(&n, &s2) + dot(&n, &s3)) / 3.0;
    Circline::from_plane(n, h)
}

/// `{f(t)}` over the sample grid; poles become `∞`.
pub fn image_of_real_line<F: Meromorphic + Sync>(f: &F, t_samples: &[f64]) -> Result<PointCloud> {
    let pts: Vec<ExtendedComplex> = t_samples.par_iter().map(|&t| f.value(Complex::new(t, 0.0))).collect();
    PointCloud::new(pts)
}

/// 1024 uniform points on `[-50, 50]` and 1024 points `tan θ` with `θ`
/// uniform in `(-π/2, π/2)`, merged and sorted.
pub fn default_real_grid() -> Vec<f64> {
    let uniform = (0..1024).map(|k| -50.0 + 100.0 * k as f64 / 1023.0);
    let tan = (0..1024).map(|k| {
        let theta = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k as f64 + 0.5) / 1024.0;
        theta.tan()
    });
    let mut t: Vec<f64> = uniform.chain(tan).collect();
    t.sort_by(f64::total_cmp);
    t
}
