//! Argument-principle zero counting and location in axis-aligned rectangles.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::expsum::ExpSum;
use crate::quadrature::{gl16, gl32};
use crate::{Complex, Error, Result};

/// `[re_min, re_max, im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl From<[f64; 4]> for Rect {
    fn from(a: [f64; 4]) -> Self {
        Rect { re_min: a[0], re_max: a[1], im_min: a[2], im_max: a[3] }
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.re_min, r.re_max, r.im_min, r.im_max]
    }
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Rect { re_min, re_max, im_min, im_max };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_max > self.re_min
            && self.im_max > self.im_min;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("degenerate rectangle {self:?}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex {
        Complex::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: Complex) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    pub fn dilate(&self, d: f64) -> Rect {
        Rect {
            re_min: self.re_min - d,
            re_max: self.re_max + d,
            im_min: self.im_min - d,
            im_max: self.im_max + d,
        }
    }

    /// Corners in counter-clockwise order starting bottom left.
    fn corners(&self) -> [Complex; 4] {
        [
            Complex::new(self.re_min, self.im_min),
            Complex::new(self.re_max, self.im_min),
            Complex::new(self.re_max, self.im_max),
            Complex::new(self.re_min, self.im_max),
        ]
    }

    fn edges(&self) -> [(Complex, Complex); 4] {
        let c = self.corners();
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }
}

/// Zeros found in one rectangle, repeated according to multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    /// The rectangle actually integrated over (possibly dilated).
    pub rectangle: Rect,
    pub count: usize,
    pub zeros: Vec<Complex>,
    pub multiplicities: Vec<usize>,
    pub residuals: Vec<f64>,
    /// `false` where the polished residual missed `1e-8 · boundary_max`.
    pub converged: Vec<bool>,
    pub boundary_max: f64,
    /// Largest `|Im z|` over all located zeros.
    pub max_abs_im_of_real_candidates: f64,
    pub all_real: bool,
}

/// Whether `z` counts as real: `|Im z| < 1e-8 (1 + |Re z|)`.
pub fn is_real_zero(z: Complex) -> bool {
    z.im.abs() < 1e-8 * (1.0 + z.re.abs())
}

const BOUNDARY_RATIO: f64 = 1e-9;
const DILATION: f64 = 1e-4;
const MAX_DILATIONS: usize = 5;
const SEGMENT_TOL: f64 = 1e-11;
const SEGMENT_TOL_FLOOR: f64 = 0.01;
const TOTAL_TOL: f64 = 0.25;
const MAX_DEPTH: usize = 48;
const MAX_SEGMENTS: usize = 400_000;
const SINGLE_SPREAD: f64 = 1e-5;
const MIN_CELL: f64 = 1e-9;
const SPLIT_OFFSETS: [f64; 8] = [0.0137, -0.0219, 0.0331, -0.0457, 0.0613, -0.0797, 0.1009, -0.1249];

/// Winding moments `∮ g'/g · u^k dz` for `k = 0, 1, 2` with
/// `u = (z - center) / scale`.
#[derive(Debug, Clone, Copy)]
struct Moments {
    m: [Complex; 3],
    err: f64,
}

impl Moments {
    fn zero() -> Self {
        Moments { m: [Complex::new(0.0, 0.0); 3], err: 0.0 }
    }

    fn add(&mut self, o: &Moments) {
        for k in 0..3 {
            self.m[k] += o.m[k];
        }
        self.err += o.err;
    }

    /// Winding number as the nearest integer, with the distance to it.
    fn winding(&self) -> (i64, f64) {
        let w = self.m[0] / Complex::new(0.0, TAU);
        let n = w.re.round();
        (n as i64, (w - n).norm())
    }
}

fn gl_segment(g: &ExpSum, za: Complex, zb: Complex, center: Complex, scale: f64) -> Result<(Moments, Moments)> {
    let dz = zb - za;
    let mut out = [Moments::zero(), Moments::zero()];
    for (slot, rule) in out.iter_mut().zip([gl32(), gl16()]) {
        for (s, w) in rule.on(0.0, 1.0) {
            let z = za + dz * s;
            let (v, dv) = g.eval_with_derivative(z)?;
            if v == Complex::new(0.0, 0.0) {
                return Err(Error::BoundaryZero(0));
            }
            let f = dv / v * dz * w;
            let u = (z - center) / scale;
            slot.m[0] += f;
            slot.m[1] += f * u;
            slot.m[2] += f * u * u;
        }
    }
    Ok((out[0], out[1]))
}

fn integrate_edge(g: &ExpSum, za: Complex, zb: Complex, center: Complex, scale: f64) -> Result<Moments> {
    let len = (zb - za).norm();
    let pieces = ((len * g.max_abs_freq().max(1.0) / 4.0).ceil() as usize).clamp(1, 4096);
    let mut stack: Vec<(Complex, Complex, usize)> = (0..pieces)
        .rev()
        .map(|k| {
            let t0 = k as f64 / pieces as f64;
            let t1 = (k + 1) as f64 / pieces as f64;
            (za + (zb - za) * t0, za + (zb - za) * t1, 0)
        })
        .collect();
    let mut total = Moments::zero();
    let mut segments = 0usize;
    while let Some((a, b, depth)) = stack.pop() {
        segments += 1;
        if segments > MAX_SEGMENTS {
            return Err(Error::Quadrature("segment budget exhausted".into()));
        }
        let (hi, lo) = gl_segment(g, a, b, center, scale)?;
        let err = (0..3).map(|k| (hi.m[k] - lo.m[k]).norm()).fold(0.0, f64::max) / TAU;
        if err < SEGMENT_TOL {
            total.add(&Moments { m: hi.m, err });
        } else if depth >= MAX_DEPTH {
            if err < SEGMENT_TOL_FLOOR {
                total.add(&Moments { m: hi.m, err });
            } else {
                return Err(Error::Quadrature(format!("segment error {err:e} at maximum depth")));
            }
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b, depth + 1));
            stack.push((a, mid, depth + 1));
        }
    }
    Ok(total)
}

/// `(min, max)` of `|g|` over equispaced samples of a segment.
fn sample_segment(g: &ExpSum, za: Complex, zb: Complex) -> Result<(f64, f64)> {
    let len = (zb - za).norm();
    let n = ((8.0 * len * g.max_abs_freq().max(1.0)).ceil() as usize).clamp(64, 1 << 16);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for k in 0..=n {
        let v = g.eval(za + (zb - za) * (k as f64 / n as f64))?.norm();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

fn sample_boundary(g: &ExpSum, r: &Rect) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (a, b) in r.edges() {
        let (l, h) = sample_segment(g, a, b)?;
        lo = lo.min(l);
        hi = hi.max(h);
    }
    Ok((lo, hi))
}

fn rect_moments(g: &ExpSum, r: &Rect) -> Result<Moments> {
    let center = r.center();
    let scale = 0.5 * r.diameter();
    let mut total = Moments::zero();
    for (a, b) in r.edges() {
        total.add(&integrate_edge(g, a, b, center, scale)?);
    }
    Ok(total)
}

fn checked_count(mom: &Moments) -> Result<usize> {
    let (n, dist) = mom.winding();
    if mom.err >= TOTAL_TOL || dist >= TOTAL_TOL {
        return Err(Error::Quadrature(format!(
            "winding not near an integer (distance {dist:.3e}, error {:.3e})",
            mom.err
        )));
    }
    if n < 0 {
        return Err(Error::Quadrature(format!("negative winding {n} for an entire function")));
    }
    Ok(n as usize)
}

/// Dilates `rect` until no boundary sample is a near-zero of `g`.
fn admissible_rect(g: &ExpSum, rect: &Rect) -> Result<(Rect, f64)> {
    rect.validate()?;
    if g.is_empty() {
        return Err(Error::DegenerateSum("zero function".into()));
    }
    let mut r = *rect;
    for _ in 0..=MAX_DILATIONS {
        let (lo, hi) = sample_boundary(g, &r)?;
        if lo > BOUNDARY_RATIO * hi {
            return Ok((r, hi));
        }
        r = r.dilate(DILATION);
    }
    Err(Error::BoundaryZero(MAX_DILATIONS))
}

/// Number of zeros of `g` inside `rect`, counted with multiplicity.
pub fn count_zeros_rect(g: &ExpSum, rect: &Rect) -> Result<usize> {
    let (r, _) = admissible_rect(g, rect)?;
    checked_count(&rect_moments(g, &r)?)
}

struct Cluster {
    estimate: Complex,
    multiplicity: usize,
}

/// Candidate location and spread (relative to the cell) from the moments.
fn centroid(mom: &Moments, r: &Rect, n: usize) -> (Complex, f64) {
    let scale = 0.5 * r.diameter();
    let k = Complex::new(0.0, TAU) * n as f64;
    let mean = mom.m[1] / k;
    let var = mom.m[2] / k - mean * mean;
    (r.center() + mean * scale, var.norm().sqrt())
}

/// Halves of `r` split across its longer side, and the shared segment.
fn split(r: &Rect, frac: f64) -> (Rect, Rect, (Complex, Complex)) {
    if r.width() >= r.height() {
        let x = r.re_min + frac * r.width();
        let line = (Complex::new(x, r.im_min), Complex::new(x, r.im_max));
        (Rect { re_max: x, ..*r }, Rect { re_min: x, ..*r }, line)
    } else {
        let y = r.im_min + frac * r.height();
        let line = (Complex::new(r.re_min, y), Complex::new(r.re_max, y));
        (Rect { im_max: y, ..*r }, Rect { im_min: y, ..*r }, line)
    }
}

fn confirm_cluster(g: &ExpSum, z: Complex, n: usize, r: &Rect) -> bool {
    let half = (1e-6 * r.diameter()).max(1e-9);
    let Ok(small) = Rect::new(z.re - half, z.re + half, z.im - half, z.im + half) else {
        return false;
    };
    let Ok((small, _)) = admissible_rect(g, &small) else {
        return false;
    };
    matches!(rect_moments(g, &small).and_then(|m| checked_count(&m)), Ok(k) if k == n)
}

fn locate_cell(g: &ExpSum, r: Rect, mom: Moments, n: usize, bmax: f64) -> Result<Vec<Cluster>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let (z, spread) = centroid(&mom, &r, n);
    if n == 1 || (spread < SINGLE_SPREAD && confirm_cluster(g, z, n, &r)) {
        return Ok(vec![Cluster { estimate: z, multiplicity: n }]);
    }
    if r.diameter() < MIN_CELL {
        return Ok(vec![Cluster { estimate: z, multiplicity: n }]);
    }
    for off in SPLIT_OFFSETS {
        let (a, b, (za, zb)) = split(&r, 0.5 + off);
        if sample_segment(g, za, zb)?.0 <= BOUNDARY_RATIO * bmax {
            continue;
        }
        let (ma, mb) = rayon::join(|| rect_moments(g, &a), || rect_moments(g, &b));
        let (Ok(ma), Ok(mb)) = (ma, mb) else { continue };
        let (Ok(na), Ok(nb)) = (checked_count(&ma), checked_count(&mb)) else { continue };
        if na + nb != n {
            continue;
        }
        let (la, lb) = rayon::join(|| locate_cell(g, a, ma, na, bmax), || locate_cell(g, b, mb, nb, bmax));
        let mut out = la?;
        out.extend(lb?);
        return Ok(out);
    }
    Err(Error::Quadrature(format!("no admissible split for a cell holding {n} zeros")))
}

/// Modified Newton `z - m g/g'`, keeping a step only if `|g|` drops.
fn polish(g: &ExpSum, mut z: Complex, m: usize) -> Result<(Complex, f64)> {
    let mut v = g.eval(z)?.norm();
    for _ in 0..60 {
        if v == 0.0 {
            break;
        }
        let (gv, dv) = g.eval_with_derivative(z)?;
        if dv == Complex::new(0.0, 0.0) {
            break;
        }
        let next = z - gv / dv * m as f64;
        let nv = g.eval(next)?.norm();
        if !(nv < v) {
            break;
        }
        z = next;
        v = nv;
    }
    Ok((z, v))
}

/// Counts, isolates and polishes the zeros of `g` in `rect`.
pub fn locate_zeros_rect(g: &ExpSum, rect: &Rect) -> Result<ZeroReport> {
    let (r, bmax) = admissible_rect(g, rect)?;
    let mom = rect_moments(g, &r)?;
    let n = checked_count(&mom)?;
    let clusters = locate_cell(g, r, mom, n, bmax)?;

    let mut report = ZeroReport {
        rectangle: r,
        count: n,
        zeros: Vec::with_capacity(n),
        multiplicities: Vec::with_capacity(n),
        residuals: Vec::with_capacity(n),
        converged: Vec::with_capacity(n),
        boundary_max: bmax,
        max_abs_im_of_real_candidates: 0.0,
        all_real: true,
    };
    for c in clusters {
        let (z, res) = polish(g, c.estimate, c.multiplicity)?;
        for _ in 0..c.multiplicity {
            report.zeros.push(z);
            report.multiplicities.push(c.multiplicity);
            report.residuals.push(res);
            report.converged.push(res < 1e-8 * bmax);
        }
        report.max_abs_im_of_real_candidates = report.max_abs_im_of_real_candidates.max(z.im.abs());
        report.all_real &= is_real_zero(z);
    }
    let mut order: Vec<usize> = (0..report.zeros.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (report.zeros[i], report.zeros[j]);
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    report.zeros = order.iter().map(|&i| report.zeros[i]).collect();
    report.multiplicities = order.iter().map(|&i| report.multiplicities[i]).collect();
    report.residuals = order.iter().map(|&i| report.residuals[i]).collect();
    report.converged = order.iter().map(|&i| report.converged[i]).collect();
    Ok(report)
}
