//! Jones calculus and the threshold detector.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::ComplexAmplitude;

/// H and V amplitudes of one spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JonesVector {
    pub h: ComplexAmplitude,
    pub v: ComplexAmplitude,
}

impl JonesVector {
    pub const fn new(h: ComplexAmplitude, v: ComplexAmplitude) -> Self {
        Self { h, v }
    }

    pub fn real(h: f64, v: f64) -> Self {
        Self::new(Complex64::new(h, 0.0), Complex64::new(v, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.v.is_finite()
    }
}

impl std::ops::Add for JonesVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.h + o.h, self.v + o.v)
    }
}

impl std::ops::Sub for JonesVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.h - o.h, self.v - o.v)
    }
}

impl std::ops::Mul<f64> for JonesVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.h * k, self.v * k)
    }
}

/// Lossless 50:50 beam splitter: `c = (a + b)/√2`, `d = (a − b)/√2`.
pub fn beam_splitter(a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// Real polarization rotation by `theta` radians.
pub fn rotate(vec: JonesVector, theta: f64) -> JonesVector {
    let (s, c) = theta.sin_cos();
    JonesVector::new(c * vec.h + s * vec.v, -s * vec.h + c * vec.v)
}

/// Analyzer setting. After [`basis_transform`] the `h` component feeds the
/// Plus detector and `v` the Minus detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeasurementBasis {
    Z,
    X,
    Y,
    /// Linear polarizer at the given angle in radians.
    Angle(f64),
}

impl MeasurementBasis {
    pub const PAULI: [MeasurementBasis; 3] = [MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Z];
}

pub fn basis_transform(vec: JonesVector, basis: MeasurementBasis) -> JonesVector {
    let i = Complex64::i();
    match basis {
        MeasurementBasis::Z => vec,
        MeasurementBasis::X => JonesVector::new(vec.h + vec.v, vec.h - vec.v) * FRAC_1_SQRT_2,
        MeasurementBasis::Y => JonesVector::new(vec.h - i * vec.v, vec.h + i * vec.v) * FRAC_1_SQRT_2,
        MeasurementBasis::Angle(theta) => rotate(vec, theta),
    }
}

/// Detector threshold γ, dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold(f64);

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("threshold must be finite and non-negative, got {0}")]
pub struct InvalidThreshold(pub f64);

impl Threshold {
    pub fn new(gamma: f64) -> Result<Self, InvalidThreshold> {
        if gamma.is_finite() && gamma >= 0.0 {
            Ok(Self(gamma))
        } else {
            Err(InvalidThreshold(gamma))
        }
    }

    pub fn gamma(self) -> f64 {
        self.0
    }

    /// Absolute amplitude cutoff for a field whose vacuum has `E|z|² = sigma_sq`.
    pub fn cutoff(self, sigma_sq: f64, units: ThresholdUnits) -> Cutoff {
        let amplitude = match units {
            ThresholdUnits::Amplitude => self.0 * sigma_sq.sqrt(),
            ThresholdUnits::ZeroPoint => self.0 * (2.0 * sigma_sq).sqrt(),
            ThresholdUnits::Intensity => (self.0 * sigma_sq).sqrt(),
        };
        Cutoff::from_amplitude(amplitude)
    }
}

/// How γ is calibrated against the vacuum scale.
///
/// All three compare the amplitude magnitude to a fixed cutoff and differ
/// only in how γ maps onto it:
/// - `Amplitude`: `|s| > γ·σ`
/// - `ZeroPoint`: `|s| > γ` with the field rescaled so the vacuum has
///   `E|z|² = 1/2`, i.e. `|s| > γ·√2·σ`
/// - `Intensity`: `|s|² > γ·σ²`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdUnits {
    #[default]
    Amplitude,
    ZeroPoint,
    Intensity,
}

impl ThresholdUnits {
    pub const ALL: [ThresholdUnits; 3] = [Self::Amplitude, Self::ZeroPoint, Self::Intensity];

    pub fn name(self) -> &'static str {
        match self {
            Self::Amplitude => "amplitude",
            Self::ZeroPoint => "zero-point",
            Self::Intensity => "intensity",
        }
    }
}

impl fmt::Display for ThresholdUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdUnits {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|u| u.name() == s)
            .ok_or_else(|| format!("unknown threshold units {s:?} (expected amplitude, zero-point or intensity)"))
    }
}

/// Squared absolute amplitude a detector must strictly exceed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    sq: f64,
}

impl Cutoff {
    pub fn from_amplitude(amplitude: f64) -> Self {
        Self { sq: amplitude * amplitude }
    }

    pub fn amplitude_sq(self) -> f64 {
        self.sq
    }
}

#[inline]
pub fn click(s: ComplexAmplitude, cutoff: Cutoff) -> bool {
    s.norm_sqr() > cutoff.sq
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnalyzerOutcome {
    Plus,
    Minus,
    InvalidNone,
    InvalidDouble,
}

impl AnalyzerOutcome {
    pub fn from_clicks(plus: bool, minus: bool) -> Self {
        match (plus, minus) {
            (true, false) => Self::Plus,
            (false, true) => Self::Minus,
            (false, false) => Self::InvalidNone,
            (true, true) => Self::InvalidDouble,
        }
    }

    /// ±1 for a valid outcome.
    pub fn sign(self) -> Option<i8> {
        match self {
            Self::Plus => Some(1),
            Self::Minus => Some(-1),
            _ => None,
        }
    }

    pub fn is_valid(self) -> bool {
        self.sign().is_some()
    }
}

/// Two-detector polarization analyzer.
pub fn analyze(vec: JonesVector, basis: MeasurementBasis, cutoff: Cutoff) -> AnalyzerOutcome {
    let out = basis_transform(vec, basis);
    AnalyzerOutcome::from_clicks(click(out.h, cutoff), click(out.v, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_cutoff(gamma: f64) -> Cutoff {
        Threshold::new(gamma).unwrap().cutoff(1.0, ThresholdUnits::Amplitude)
    }

    #[test]
    fn single_input_split() {
        let (cc, d) = beam_splitter(JonesVector::real(1.0, 0.0), JonesVector::default());
        assert_abs_diff_eq!(cc.h.re, FRAC_1_SQRT_2);
        assert_abs_diff_eq!(d.h.re, FRAC_1_SQRT_2);
        assert_eq!(cc.v, c(0.0, 0.0));
        assert_eq!(d.v, c(0.0, 0.0));
    }

    #[test]
    fn quarter_turn() {
        let out = rotate(JonesVector::real(1.0, 0.0), FRAC_PI_2);
        assert_abs_diff_eq!(out.h.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.v.re, -1.0, epsilon = 1e-15);
        assert_eq!(rotate(JonesVector::real(0.3, -2.0), 0.0), JonesVector::real(0.3, -2.0));
    }

    #[test]
    fn diagonal_to_plus() {
        let out = basis_transform(JonesVector::real(1.0, 1.0) * FRAC_1_SQRT_2, MeasurementBasis::X);
        assert_abs_diff_eq!(out.h.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.v.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn circular_ports() {
        // (1, i)/√2 is the +1 eigenvector of σ_y and lands on Plus;
        // (1, −i)/√2 lands on Minus.
        let plus = basis_transform(JonesVector::new(c(1.0, 0.0), c(0.0, 1.0)) * FRAC_1_SQRT_2, MeasurementBasis::Y);
        assert_abs_diff_eq!(plus.h.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.v.norm(), 0.0, epsilon = 1e-15);
        let minus = basis_transform(JonesVector::new(c(1.0, 0.0), c(0.0, -1.0)) * FRAC_1_SQRT_2, MeasurementBasis::Y);
        assert_abs_diff_eq!(minus.h.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.v.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn z_is_identity() {
        let v = JonesVector::new(c(0.2, -1.0), c(3.0, 0.5));
        assert_eq!(basis_transform(v, MeasurementBasis::Z), v);
    }

    #[test]
    fn click_is_strict() {
        assert!(!click(c(0.0, 0.0), unit_cutoff(0.0)));
        assert!(click(c(0.5, 0.0), unit_cutoff(0.0)));
        assert!(!click(c(2.3, 0.0), unit_cutoff(2.3)));
    }

    #[test]
    fn unit_conventions() {
        let t = Threshold::new(2.0).unwrap();
        assert_abs_diff_eq!(t.cutoff(4.0, ThresholdUnits::Amplitude).amplitude_sq(), 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.cutoff(4.0, ThresholdUnits::ZeroPoint).amplitude_sq(), 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.cutoff(4.0, ThresholdUnits::Intensity).amplitude_sq(), 8.0, epsilon = 1e-12);
        assert!(Threshold::new(-0.1).is_err());
        assert_eq!("zero-point".parse::<ThresholdUnits>(), Ok(ThresholdUnits::ZeroPoint));
    }

    #[test]
    fn analyzer_outcomes() {
        let cut = unit_cutoff(1.0);
        assert_eq!(analyze(JonesVector::real(3.0, 0.0), MeasurementBasis::Z, cut), AnalyzerOutcome::Plus);
        assert_eq!(analyze(JonesVector::real(0.0, -3.0), MeasurementBasis::Z, cut), AnalyzerOutcome::Minus);
        assert_eq!(analyze(JonesVector::real(3.0, 3.0), MeasurementBasis::Z, cut), AnalyzerOutcome::InvalidDouble);
        assert_eq!(analyze(JonesVector::real(0.1, 0.1), MeasurementBasis::Z, cut), AnalyzerOutcome::InvalidNone);
    }

    #[test]
    fn zero_threshold_never_misses() {
        let cut = unit_cutoff(0.0);
        let fixtures = [
            JonesVector::new(c(0.1, 0.0), c(0.0, -0.2)),
            JonesVector::new(c(1e-9, 1e-9), c(-4.0, 2.0)),
            JonesVector::new(c(-0.5, 0.3), c(0.7, 0.1)),
        ];
        for v in fixtures {
            for basis in [MeasurementBasis::Z, MeasurementBasis::Angle(0.3)] {
                assert_ne!(analyze(v, basis, cut), AnalyzerOutcome::InvalidNone);
            }
        }
    }

    fn jones() -> impl Strategy<Value = JonesVector> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(|x| JonesVector::new(c(x[0], x[1]), c(x[2], x[3])))
    }

    proptest! {
        #[test]
        fn beam_splitter_conserves_energy(a in jones(), b in jones()) {
            let (cc, d) = beam_splitter(a, b);
            let before = a.norm_sqr() + b.norm_sqr();
            prop_assert!((cc.norm_sqr() + d.norm_sqr() - before).abs() <= 1e-12 * before.max(1.0));
        }

        #[test]
        fn beam_splitter_is_involutive(a in jones(), b in jones()) {
            let (cc, d) = beam_splitter(a, b);
            let (a2, b2) = beam_splitter(cc, d);
            for (x, y) in [(a2.h, a.h), (a2.v, a.v), (b2.h, b.h), (b2.v, b.v)] {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn transforms_preserve_norm(v in jones(), theta in -10.0f64..10.0) {
            for basis in [MeasurementBasis::Z, MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Angle(theta)] {
                let out = basis_transform(v, basis);
                prop_assert!((out.norm_sqr() - v.norm_sqr()).abs() <= 1e-12 * v.norm_sqr().max(1.0));
            }
        }

        #[test]
        fn click_is_monotone(re in -5.0f64..5.0, im in -5.0f64..5.0, g1 in 0.0f64..5.0, dg in 0.0f64..5.0) {
            let s = c(re, im);
            if !click(s, unit_cutoff(g1)) {
                prop_assert!(!click(s, unit_cutoff(g1 + dg)));
            }
        }
    }
}
