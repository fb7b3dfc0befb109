//! The reference function `κ_CP³` on complex projective space.

use nalgebra::{Complex, DMatrix, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// A unit vector of `ℂ⁴`, standing for its line `[x:y:z:w]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CP3Point {
    /// Real and imaginary parts, `(re x, im x, re y, im y, …)`.
    pub v: [f64; 8],
}

impl CP3Point {
    /// Normalizes a nonzero vector.
    pub fn new(z: [C64; 4]) -> Result<Self> {
        let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("zero vector has no projective class".into()));
        }
        let mut v = [0.0; 8];
        for (k, c) in z.iter().enumerate() {
            v[2 * k] = c.re / n;
            v[2 * k + 1] = c.im / n;
        }
        Ok(CP3Point { v })
    }

    pub fn coords(&self) -> [C64; 4] {
        std::array::from_fn(|k| C64::new(self.v[2 * k], self.v[2 * k + 1]))
    }

    pub fn norm(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Multiplication by `e^{iφ}`.
    pub fn rephase(&self, phi: f64) -> CP3Point {
        let u = C64::from_polar(1.0, phi);
        let z = self.coords().map(|c| c * u);
        CP3Point {
            v: std::array::from_fn(|k| if k % 2 == 0 { z[k / 2].re } else { z[k / 2].im }),
        }
    }
}

fn kappa_raw(v: &[f64; 8]) -> f64 {
    let mut sq = C64::new(0.0, 0.0);
    let mut n2 = 0.0;
    for k in 0..4 {
        let c = C64::new(v[2 * k], v[2 * k + 1]);
        sq += c * c;
        n2 += c.norm_sqr();
    }
    1.0 - 2.0 * sq.norm_sqr() / (n2 * n2)
}

/// `1 − 2|x²+y²+z²+w²|²/(|x|²+|y|²+|z|²+|w|²)²`.
pub fn kappa_cp3(p: &CP3Point) -> f64 {
    kappa_raw(&p.v)
}

/// Norm of the gradient of `κ_CP³`, by central differences on `S⁷`, with the
/// radial and phase directions projected out.
pub fn grad_norm_cp3(p: &CP3Point) -> f64 {
    let h = 1e-6;
    let mut g = [0.0; 8];
    for k in 0..8 {
        let mut a = p.v;
        let mut b = p.v;
        a[k] += h;
        b[k] -= h;
        g[k] = (kappa_raw(&a) - kappa_raw(&b)) / (2.0 * h);
    }
    let radial = p.v;
    let phase: [f64; 8] =
        std::array::from_fn(|k| if k % 2 == 0 { -p.v[k + 1] } else { p.v[k - 1] });
    for dir in [radial, phase] {
        let n2: f64 = dir.iter().map(|x| x * x).sum();
        let d: f64 = g.iter().zip(&dir).map(|(x, y)| x * y).sum();
        for k in 0..8 {
            g[k] -= d / n2 * dir[k];
        }
    }
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> CP3Point {
    loop {
        let z: [C64; 4] = std::array::from_fn(|_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if let Ok(p) = CP3Point::new(z) {
            return p;
        }
    }
}

/// A real point (minimum locus, `κ = −1`).
pub fn random_real_point<R: Rng + ?Sized>(rng: &mut R) -> CP3Point {
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    loop {
        let z: [C64; 4] = std::array::from_fn(|_| C64::new(rng.sample(StandardNormal), 0.0));
        if let Ok(p) = CP3Point::new(z) {
            return p.rephase(phi);
        }
    }
}

/// A point of the quadric `Σzᵢ² = 0` (maximum locus, `κ = 1`): `a + ib` with
/// `a ⟂ b`, `|a| = |b|`.
pub fn random_quadric_point<R: Rng + ?Sized>(rng: &mut R) -> CP3Point {
    loop {
        let a: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let mut b: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let na2: f64 = a.iter().map(|x| x * x).sum();
        let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        b.iter_mut().zip(&a).for_each(|(y, x)| *y -= d / na2 * x);
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let na = na2.sqrt();
        if nb < 1e-6 || na < 1e-6 {
            continue;
        }
        let z: [C64; 4] = std::array::from_fn(|k| C64::new(a[k] / na, b[k] / nb));
        if let Ok(p) = CP3Point::new(z) {
            return p;
        }
    }
}

/// Haar-random element of `SO(4)` from the QR factorization of a Gaussian matrix.
pub fn random_so4<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    loop {
        let g = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.sample(StandardNormal));
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let mut m = Matrix4::<f64>::zeros();
        for c in 0..4 {
            let s = if r[(c, c)] < 0.0 { -1.0 } else { 1.0 };
            for row in 0..4 {
                m[(row, c)] = q[(row, c)] * s;
            }
        }
        if m.determinant() < 0.0 {
            for row in 0..4 {
                m[(row, 0)] = -m[(row, 0)];
            }
        }
        if (m.determinant() - 1.0).abs() < 1e-9 {
            return m;
        }
    }
}

/// `v ↦ Mv` for a real matrix `M`.
pub fn act(m: &Matrix4<f64>, p: &CP3Point) -> CP3Point {
    let z = p.coords();
    let w: [C64; 4] = std::array::from_fn(|r| (0..4).map(|c| z[c] * m[(r, c)]).sum());
    CP3Point {
        v: std::array::from_fn(|k| if k % 2 == 0 { w[k / 2].re } else { w[k / 2].im }),
    }
}

/// Rejection sampler for `|κ_CP³ − level| ≤ tol`, refined by bisection along
/// the segment joining a real point to a quadric point.
pub fn sample_level<R: Rng + ?Sized>(rng: &mut R, level: f64, tol: f64) -> Result<CP3Point> {
    if !(-1.0..=1.0).contains(&level) {
        return Err(Error::Domain(format!("kappa level {level} outside [-1,1]")));
    }
    loop {
        let lo = random_real_point(rng);
        let hi = random_quadric_point(rng);
        let mix = |s: f64| -> Option<CP3Point> {
            let a = lo.coords();
            let b = hi.coords();
            CP3Point::new(std::array::from_fn(|k| a[k] * (1.0 - s) + b[k] * s)).ok()
        };
        let (mut a, mut b) = (0.0, 1.0);
        let f = |s: f64| mix(s).map(|p| kappa_cp3(&p) - level);
        let (Some(fa), Some(fb)) = (f(a), f(b)) else {
            continue;
        };
        if fa > 0.0 || fb < 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            match f(m) {
                Some(v) if v < 0.0 => a = m,
                Some(_) => b = m,
                None => break,
            }
            if b - a < 1e-16 {
                break;
            }
        }
        if let Some(p) = mix(0.5 * (a + b)) {
            if (kappa_cp3(&p) - level).abs() <= tol {
                return Ok(p);
            }
        }
    }
}
