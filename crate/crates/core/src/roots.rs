//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration) with
//! Newton polishing and multiplicity clustering.

use crate::{Complex, Error, Polynomial, Result};

/// Tunables for [`poly_roots_with`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Backward-error threshold `|p(r)| / Σ|a_k||r|^k` every root must meet.
    pub residual_tol: f64,
    /// Roots closer than `cluster_tol * max(1, |r|)` are merged into one
    /// multiple root.
    pub cluster_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { max_iter: 200, residual_tol: 1e-10, cluster_tol: 1e-7 }
    }
}

// Golden-ratio angle offset keeps the start circle off every symmetry axis.
const ANGLE_OFFSET: f64 = 0.618_033_988_749_894_9;

/// All `deg p` roots of `p`, repeated according to multiplicity.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex>> {
    poly_roots_with(p, &RootOptions::default())
}

pub fn poly_roots_with(p: &Polynomial, opts: &RootOptions) -> Result<Vec<Complex>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::InvalidInput("root finding needs degree >= 1".into()));
    }
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
    }
    // Exact roots at the origin.
    let zeros_at_origin = p.coeffs().iter().take_while(|c| **c == Complex::new(0.0, 0.0)).count();
    let reduced = Polynomial::new(p.coeffs()[zeros_at_origin..].to_vec());
    let lead = reduced.leading();
    let monic = reduced.scale(lead.inv());

    let mut roots = vec![Complex::new(0.0, 0.0); zeros_at_origin];
    match monic.degree() {
        0 => {}
        1 => roots.push(-monic.coeff(0)),
        _ => roots.extend(aberth(&monic, opts)?),
    }

    let worst = roots
        .iter()
        .map(|&r| backward_error(p, r))
        .fold(0.0, f64::max);
    if !(worst <= opts.residual_tol) {
        return Err(Error::RootNonConvergence { iterations: opts.max_iter, worst_residual: worst });
    }
    Ok(snap_clusters(&roots, opts.cluster_tol))
}

/// `|p(r)| / Σ|a_k||r|^k`.
pub fn backward_error(p: &Polynomial, r: Complex) -> f64 {
    let scale = p.abs_eval(r.norm());
    if scale == 0.0 {
        return 0.0;
    }
    p.eval(r).norm() / scale
}

fn start_radius(monic: &Polynomial) -> f64 {
    let n = monic.degree();
    let cauchy = 1.0 + (0..n).map(|k| monic.coeff(k).norm()).fold(0.0, f64::max);
    // Fujiwara's bound is far tighter for polynomials with large coefficients.
    let fujiwara = 2.0
        * (1..=n)
            .map(|k| {
                let a = monic.coeff(n - k).norm();
                if k == n {
                    (0.5 * a).powf(1.0 / k as f64)
                } else {
                    a.powf(1.0 / k as f64)
                }
            })
            .fold(0.0, f64::max);
    let r = cauchy.min(fujiwara);
    if r > 0.0 && r.is_finite() {
        r
    } else {
        1.0
    }
}

fn aberth(monic: &Polynomial, opts: &RootOptions) -> Result<Vec<Complex>> {
    let n = monic.degree();
    let radius = start_radius(monic);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + ANGLE_OFFSET;
            Complex::from_polar(radius, theta)
        })
        .collect();
    let dp = monic.derivative();

    let mut converged = vec![false; n];
    for _ in 0..opts.max_iter {
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let zk = z[k];
            let pv = monic.eval(zk);
            if pv == Complex::new(0.0, 0.0) {
                converged[k] = true;
                continue;
            }
            let dv = dp.eval(zk);
            let ratio = pv / dv;
            let sum: Complex = (0..n).filter(|&j| j != k).map(|j| (zk - z[j]).inv()).sum();
            let mut w = ratio / (Complex::new(1.0, 0.0) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // p'(z) vanished or two estimates collided: nudge off the spot
                w = Complex::from_polar(1e-3 * radius.max(1.0), k as f64 + ANGLE_OFFSET);
            }
            z[k] = zk - w;
            if w.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                converged[k] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    for zk in z.iter_mut() {
        *zk = newton_polish(monic, &dp, *zk, 4);
    }
    Ok(z)
}

/// A few Newton steps, each kept only if it does not increase `|p|`.
pub fn newton_polish(p: &Polynomial, dp: &Polynomial, mut z: Complex, steps: usize) -> Complex {
    let mut pv = p.eval(z);
    for _ in 0..steps {
        if pv == Complex::new(0.0, 0.0) {
            break;
        }
        let d = dp.eval(z);
        if d == Complex::new(0.0, 0.0) {
            break;
        }
        let next = z - pv / d;
        let nv = p.eval(next);
        if !(nv.norm() < pv.norm()) {
            break;
        }
        z = next;
        pv = nv;
    }
    z
}

/// Groups roots closer than `tol * max(1, |r|)` (single linkage).
pub fn cluster_roots(roots: &[Complex], tol: f64) -> Vec<(Complex, usize)> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= tol * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((root, roots[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, m)| (s / m as f64, m)).collect()
}

fn snap_clusters(roots: &[Complex], tol: f64) -> Vec<Complex> {
    cluster_roots(roots, tol)
        .into_iter()
        .flat_map(|(r, m)| std::iter::repeat_n(r, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn sorted(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_roots() {
        let r = sorted(poly_roots(&Polynomial::from_real(&[-1.0, 0.0, 1.0])).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
        let r = sorted(poly_roots(&Polynomial::from_real(&[1.0, 0.0, 1.0])).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn cubic_contains_two() {
        let p = Polynomial::from_real(&[-2.0, -1.0, -1.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 3);
        let two = r.iter().find(|z| (**z - c(2.0, 0.0)).norm() < 1e-9).expect("root 2");
        assert!(backward_error(&p, *two) < 1e-10);
        // the remaining pair solves z^2 + z + 1
        for z in r.iter().filter(|z| (**z - c(2.0, 0.0)).norm() > 1e-6) {
            assert!((z * z + z + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn double_root_is_clustered() {
        // (z - 1)^2 (z + 2)
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)], c(1.0, 0.0));
        let r = poly_roots(&p).unwrap();
        let cl = cluster_roots(&r, 1e-7);
        assert_eq!(cl.len(), 2);
        let one = cl.iter().find(|(z, _)| (z - c(1.0, 0.0)).norm() < 1e-7).unwrap();
        assert_eq!(one.1, 2);
    }

    #[test]
    fn zero_roots_are_exact() {
        let p = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(poly_roots(&p).unwrap(), vec![c(0.0, 0.0); 3]);
    }

    #[test]
    fn large_coefficient_chebyshev() {
        // p_16(z) = 2 cos(16 acos(z/2)), roots 2 cos((2k+1)π/32)
        let mut prev = Polynomial::from_real(&[2.0]);
        let mut cur = Polynomial::z();
        for _ in 1..16 {
            let next = &(&Polynomial::z() * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        let r = sorted(poly_roots(&cur).unwrap());
        for (k, z) in r.iter().rev().enumerate() {
            let expect = 2.0 * ((2 * k + 1) as f64 * std::f64::consts::PI / 32.0).cos();
            assert!((z - c(expect, 0.0)).norm() < 1e-10, "{z} vs {expect}");
        }
    }

    #[test]
    fn rejects_constants() {
        assert!(poly_roots(&Polynomial::from_real(&[3.0])).is_err());
    }
}
