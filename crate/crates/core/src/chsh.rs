//! CHSH game on the heralded modes.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::optics::{AnalyzerOutcome, MeasurementBasis};
use crate::tomography::{DensityMatrix, SettingTally};

/// Analyzer angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshSettings {
    fn default() -> Self {
        Self { a: 0.0, a_prime: FRAC_PI_4, b: FRAC_PI_8, b_prime: 3.0 * FRAC_PI_8 }
    }
}

impl ChshSettings {
    pub fn from_degrees(deg: [f64; 4]) -> Self {
        let [a, a_prime, b, b_prime] = deg.map(f64::to_radians);
        Self { a, a_prime, b, b_prime }
    }

    pub fn to_degrees(&self) -> [f64; 4] {
        [self.a, self.a_prime, self.b, self.b_prime].map(f64::to_degrees)
    }

    pub fn alice(&self, k: usize) -> f64 {
        [self.a, self.a_prime][k]
    }

    pub fn bob(&self, k: usize) -> f64 {
        [self.b, self.b_prime][k]
    }

    pub fn alice_basis(&self, k: usize) -> MeasurementBasis {
        MeasurementBasis::Angle(self.alice(k))
    }

    pub fn bob_basis(&self, k: usize) -> MeasurementBasis {
        MeasurementBasis::Angle(self.bob(k))
    }
}

/// Which S goes into reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshEstimator {
    /// Evaluated on the reconstructed density matrix.
    #[default]
    Reconstructed,
    /// Counted directly from analyzer coincidences at the four angle pairs.
    Direct,
}

impl ChshEstimator {
    pub fn name(self) -> &'static str {
        match self {
            Self::Reconstructed => "reconstructed",
            Self::Direct => "direct",
        }
    }
}

impl fmt::Display for ChshEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChshEstimator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reconstructed" => Ok(Self::Reconstructed),
            "direct" => Ok(Self::Direct),
            _ => Err(format!("unknown CHSH estimator {s:?} (expected reconstructed or direct)")),
        }
    }
}

/// Tallies at the four angle pairs, indexed `[alice][bob]` with 0 = unprimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChshCounts {
    cells: [[SettingTally; 2]; 2],
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("no valid coincidences at CHSH setting pair ({alice}, {bob})")]
pub struct ZeroValidCounts {
    pub alice: usize,
    pub bob: usize,
}

impl ChshCounts {
    pub fn record_event(&mut self, alice: usize, bob: usize, out_a: AnalyzerOutcome, out_b: AnalyzerOutcome) {
        self.cells[alice][bob].record(out_a, out_b);
    }

    pub fn cell(&self, alice: usize, bob: usize) -> &SettingTally {
        &self.cells[alice][bob]
    }

    pub fn merge(&mut self, other: &ChshCounts) {
        for a in 0..2 {
            for b in 0..2 {
                self.cells[a][b] += other.cells[a][b];
            }
        }
    }

    pub fn valid(&self) -> u64 {
        self.cells.iter().flatten().map(SettingTally::valid).sum()
    }

    pub fn invalid(&self) -> u64 {
        self.cells.iter().flatten().map(|t| t.invalid).sum()
    }

    pub fn result(&self) -> Result<ChshResult, ZeroValidCounts> {
        let e = |alice: usize, bob: usize| chsh_correlation(&self.cells[alice][bob]).ok_or(ZeroValidCounts { alice, bob });
        Ok(ChshResult::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?))
    }
}

/// Correlation at one angle pair over valid coincidences.
pub fn chsh_correlation(tally: &SettingTally) -> Option<f64> {
    tally.correlation()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_ab: f64,
    pub e_ab_prime: f64,
    pub e_a_prime_b: f64,
    pub e_a_prime_b_prime: f64,
    pub s: f64,
}

impl ChshResult {
    pub fn new(e_ab: f64, e_ab_prime: f64, e_a_prime_b: f64, e_a_prime_b_prime: f64) -> Self {
        let s = chsh_score(e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime);
        Self { e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime, s }
    }

    /// Correlations `tr(ρ · O_a ⊗ O_b)` for polarizer observables at the
    /// given angles.
    pub fn from_density_matrix(rho: &DensityMatrix, settings: &ChshSettings) -> Self {
        let e = |alice: usize, bob: usize| angle_correlation(rho, settings.alice(alice), settings.bob(bob));
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

/// `S = |E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)|`.
pub fn chsh_score(e_ab: f64, e_ab_prime: f64, e_a_prime_b: f64, e_a_prime_b_prime: f64) -> f64 {
    (e_ab - e_ab_prime + e_a_prime_b + e_a_prime_b_prime).abs()
}

/// Expected product of ±1 outcomes for polarizers at `theta_a`, `theta_b`.
///
/// A polarizer at θ sends `cos θ·h + sin θ·v` to Plus, so its Plus state is
/// `(cos θ, sin θ)` and its Minus state `(−sin θ, cos θ)`.
pub fn angle_correlation(rho: &DensityMatrix, theta_a: f64, theta_b: f64) -> f64 {
    let states = |t: f64| {
        let (s, c) = t.sin_cos();
        [([c, s], 1.0), ([-s, c], -1.0)]
    };
    let mut e = 0.0;
    for (pa, sa) in states(theta_a) {
        for (pb, sb) in states(theta_b) {
            let psi = Vector4::new(pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]).map(|x| Complex64::new(x, 0.0));
            let p = (psi.adjoint() * rho.0 * psi)[(0, 0)].re;
            e += sa * sb * p;
        }
    }
    e
}
