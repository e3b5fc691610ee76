//! Reified vacuum field and the two-mode squeezed source.
//!
//! A source realization is built from two independent vacuum Jones vectors
//! `z1`, `z2` through a Bogoliubov substitution that couples each
//! polarization of one mode to the orthogonal polarization of the other:
//!
//! ```text
//! mode1_H = cosh r · z1_H + sinh r · conj(z2_V)
//! mode1_V = cosh r · z1_V − sinh r · conj(z2_H)
//! mode2_H = cosh r · z2_H − sinh r · conj(z1_V)
//! mode2_V = cosh r · z2_V + sinh r · conj(z1_H)
//! ```
//!
//! The antisymmetric H↔V coupling is what makes the pair a singlet-like
//! macroscopic Bell state.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::optics::JonesVector;
use crate::rng::Stream;

/// Field amplitude in units where the vacuum has `E|z|² = σ²`.
pub type ComplexAmplitude = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub sigma_sq: f64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FieldError {
    #[error("squeezing strength must be finite and non-negative, got {0}")]
    Squeezing(f64),
    #[error("vacuum variance must be finite and positive, got {0}")]
    VacuumVariance(f64),
}

impl SqueezeParams {
    pub fn new(r: f64, sigma_sq: f64) -> Result<Self, FieldError> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(FieldError::Squeezing(r));
        }
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(FieldError::VacuumVariance(sigma_sq));
        }
        Ok(Self { r, sigma_sq })
    }

    /// `E|mode_k|²` for any single output component.
    pub fn mode_variance(&self) -> f64 {
        self.sigma_sq * (2.0 * self.r).cosh()
    }

    /// Magnitude of the cross-mode moment `E[mode1_H · mode2_V]`.
    pub fn cross_moment(&self) -> f64 {
        self.sigma_sq * (2.0 * self.r).sinh()
    }
}

/// Two independent vacuum Jones vectors feeding one source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumRealization {
    pub z1: JonesVector,
    pub z2: JonesVector,
}

/// One source's output: `mode1` goes to the Bell-state measurement,
/// `mode2` to the distant analyzer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomJonesPair {
    pub mode1: JonesVector,
    pub mode2: JonesVector,
}

/// Draws a circular complex Gaussian with `E|z|² = variance`.
#[inline]
pub fn complex_gaussian(rng: &mut Stream, variance: f64) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

pub fn sample_vacuum(rng: &mut Stream, sigma_sq: f64) -> VacuumRealization {
    let mut draw = || complex_gaussian(rng, sigma_sq);
    let z1 = JonesVector::new(draw(), draw());
    let z2 = JonesVector::new(draw(), draw());
    VacuumRealization { z1, z2 }
}

pub fn generate_source_pair(vac: &VacuumRealization, p: &SqueezeParams) -> RandomJonesPair {
    let (ch, sh) = (p.r.cosh(), p.r.sinh());
    let VacuumRealization { z1, z2 } = vac;
    RandomJonesPair {
        mode1: JonesVector::new(ch * z1.h + sh * z2.v.conj(), ch * z1.v - sh * z2.h.conj()),
        mode2: JonesVector::new(ch * z2.h - sh * z1.v.conj(), ch * z2.v + sh * z1.h.conj()),
    }
}

/// Draws `mode2` from its exact conditional law given `mode1`.
///
/// Each `mode2` component is jointly Gaussian with the conjugate of the
/// orthogonal `mode1` component and independent of the rest, so
/// `mode2_H = −tanh(2r)·conj(mode1_V) + n_H` and
/// `mode2_V = tanh(2r)·conj(mode1_H) + n_V` with `E|n|² = σ²/cosh(2r)`.
pub fn sample_partner(rng: &mut Stream, mode1: &JonesVector, p: &SqueezeParams) -> JonesVector {
    let two_r = 2.0 * p.r;
    let k = two_r.tanh();
    let residual = p.sigma_sq / two_r.cosh();
    JonesVector::new(
        -k * mode1.v.conj() + complex_gaussian(rng, residual),
        k * mode1.h.conj() + complex_gaussian(rng, residual),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn identity_at_zero_squeezing() {
        let mut s = rng::stream(3, &[]);
        let p = SqueezeParams::new(0.0, 1.0).unwrap();
        for _ in 0..100 {
            let vac = sample_vacuum(&mut s, 1.0);
            let pair = generate_source_pair(&vac, &p);
            assert_eq!(pair.mode1, vac.z1);
            assert_eq!(pair.mode2, vac.z2);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(SqueezeParams::new(-0.1, 1.0), Err(FieldError::Squeezing(-0.1)));
        assert!(SqueezeParams::new(0.5, 0.0).is_err());
        assert!(SqueezeParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn deterministic_per_stream() {
        let p = SqueezeParams::new(0.9, 1.0).unwrap();
        let a = generate_source_pair(&sample_vacuum(&mut rng::stream(11, &[4]), 1.0), &p);
        let b = generate_source_pair(&sample_vacuum(&mut rng::stream(11, &[4]), 1.0), &p);
        assert_eq!(a, b);
    }

    #[test]
    fn vacuum_moments() {
        let mut s = rng::stream(5, &[]);
        let n = 1_000_000;
        let (mut mean, mut power, mut cross) = (Complex64::default(), 0.0, Complex64::default());
        for _ in 0..n {
            let v = sample_vacuum(&mut s, 1.0);
            mean += v.z1.h;
            power += v.z1.h.norm_sqr();
            cross += v.z1.h * v.z2.v.conj();
        }
        let n = n as f64;
        assert!((mean / n).norm() < 5e-3);
        assert!((power / n - 1.0).abs() < 5e-3);
        assert!((cross / n).norm() < 5e-3);
    }

    #[test]
    fn partner_matches_joint_law() {
        // Moments of (mode1, sample_partner(mode1)) against the full route.
        let p = SqueezeParams::new(0.9, 1.0).unwrap();
        let mut s = rng::stream(9, &[]);
        let n = 400_000;
        let (mut hv, mut vh, mut pow2) = (Complex64::default(), Complex64::default(), 0.0);
        for _ in 0..n {
            let m1 = JonesVector::new(complex_gaussian(&mut s, p.mode_variance()), complex_gaussian(&mut s, p.mode_variance()));
            let m2 = sample_partner(&mut s, &m1, &p);
            hv += m1.h * m2.v;
            vh += m1.v * m2.h;
            pow2 += m2.h.norm_sqr();
        }
        let n = n as f64;
        let c = p.cross_moment();
        // 5 standard errors; the product has variance ≈ cosh²(2r).
        let tol = 5.0 * p.mode_variance() / n.sqrt();
        assert!((hv / n - c).norm() < tol, "{}", hv / n);
        assert!((vh / n + c).norm() < tol, "{}", vh / n);
        assert!((pow2 / n - p.mode_variance()).abs() < tol);
    }
}
