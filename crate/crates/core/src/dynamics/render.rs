use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::require_degree;
use crate::{Complex, Error, Polynomial, RationalMap, Result};

/// Iteration cap of the escape-time renderer.
pub const MAX_ITER: usize = 500;

/// `[re_min, re_max, im_min, im_max]` and the pixel dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
}

impl RenderWindow {
    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidInput("resolution must be positive".into()));
        }
        let ok = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_max > self.re_min
            && self.im_max > self.im_min;
        if !ok {
            return Err(Error::InvalidInput("empty render window".into()));
        }
        Ok(())
    }

    /// Centre of pixel `(i, j)`, row 0 at the top.
    fn pixel(&self, i: usize, j: usize) -> Complex {
        let x = self.re_min + (i as f64 + 0.5) / self.width as f64 * (self.re_max - self.re_min);
        let y = self.im_max - (j as f64 + 0.5) / self.height as f64 * (self.im_max - self.im_min);
        Complex::new(x, y)
    }
}

/// `max(2, (2 + Σ_{k<d} |a_k|) / |a_d|)`: beyond it `|p(z)| > 2|z|`.
pub fn escape_radius(p: &Polynomial) -> f64 {
    let d = p.degree();
    let lower: f64 = (0..d).map(|k| p.coeff(k).norm()).sum();
    ((2.0 + lower) / p.leading().norm()).max(2.0)
}

fn polynomial_of(f: &RationalMap) -> Result<Polynomial> {
    if !f.is_polynomial() {
        return Err(Error::InvalidInput("escape-time rendering needs a polynomial".into()));
    }
    require_degree(f, 2)?;
    Ok(f.num().scale(f.den().leading().inv()))
}

/// Escape iteration per pixel (row-major), `None` for points that stay
/// bounded for [`MAX_ITER`] steps.
pub fn escape_time_image(f: &RationalMap, w: &RenderWindow) -> Result<Vec<Option<usize>>> {
    w.validate()?;
    let p = polynomial_of(f)?;
    let r = escape_radius(&p);
    Ok((0..w.height)
        .into_par_iter()
        .flat_map_iter(|j| {
            let p = &p;
            (0..w.width).map(move |i| {
                let mut z = w.pixel(i, j);
                for k in 0..MAX_ITER {
                    if z.norm() > r {
                        return Some(k);
                    }
                    z = p.eval(z);
                }
                None
            })
        })
        .collect())
}

/// Binary PGM (`P5`, maxval 255): bounded points are 255, escaping points
/// `255 k / MAX_ITER`.
pub fn render_pgm(f: &RationalMap, w: &RenderWindow) -> Result<Vec<u8>> {
    let counts = escape_time_image(f, w)?;
    let mut out = format!("P5\n{} {}\n255\n", w.width, w.height).into_bytes();
    out.extend(counts.iter().map(|c| match c {
        None => 255u8,
        Some(k) => (255 * k / MAX_ITER) as u8,
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(n: usize) -> RenderWindow {
        RenderWindow { re_min: -2.5, re_max: 2.5, im_min: -2.5, im_max: 2.5, width: n, height: n }
    }

    #[test]
    fn squaring_fills_the_disk() {
        let f = RationalMap::polynomial(Polynomial::from_real(&[0.0, 0.0, 1.0]));
        let img = escape_time_image(&f, &window(51)).unwrap();
        // centre pixel is 0, corner pixel escapes at once
        assert_eq!(img[25 * 51 + 25], None);
        assert!(img[0].is_some());
        let pgm = render_pgm(&f, &window(51)).unwrap();
        assert!(pgm.starts_with(b"P5\n51 51\n255\n"));
        assert_eq!(pgm.len(), 13 + 51 * 51);
    }

    #[test]
    fn chebyshev_set_is_the_interval() {
        let f = RationalMap::polynomial(Polynomial::from_real(&[-2.0, 0.0, 1.0]));
        let w = RenderWindow { height: 1, im_min: -1e-3, im_max: 1e-3, ..window(100) };
        let img = escape_time_image(&f, &w).unwrap();
        for (i, c) in img.iter().enumerate() {
            let x = w.pixel(i, 0).re;
            if x.abs() < 1.9 {
                assert!(c.is_none() || c.unwrap() > 5, "x = {x}");
            }
            if x.abs() > 2.1 {
                assert!(c.is_some());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = RationalMap::polynomial(Polynomial::from_real(&[0.0, 0.0, 1.0]));
        assert!(render_pgm(&f, &window(0)).is_err());
        let g = RationalMap::new(Polynomial::from_real(&[1.0]), Polynomial::from_real(&[0.0, 1.0])).unwrap();
        assert!(render_pgm(&g, &window(4)).is_err());
    }
}
