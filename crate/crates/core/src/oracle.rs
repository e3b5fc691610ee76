//! Independent checks of the simulator against closed forms.
//!
//! These avoid the code paths they test: the covariance oracle reads raw
//! realizations, and the tomography oracle synthesizes counts from explicit
//! projector states instead of Pauli operators.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::field::{generate_source_pair, sample_vacuum, SqueezeParams};
use crate::optics::AnalyzerOutcome;
use crate::rng::{self, Role};
use crate::tomography::{reconstruct, CountsTable, DensityMatrix, Pauli, Projection};

/// One second moment compared against its closed form.
#[derive(Debug, Clone)]
pub struct MomentCheck {
    pub name: String,
    pub expected: Complex64,
    pub observed: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub se: [f64; 2],
}

impl MomentCheck {
    /// Largest deviation in units of standard error.
    pub fn z_score(&self) -> f64 {
        let d = self.observed - self.expected;
        (d.re.abs() / self.se[0]).max(d.im.abs() / self.se[1])
    }
}

const LABELS: [&str; 4] = ["a1H", "a1V", "a2H", "a2V"];

/// Every second moment of `(mode1, mode2)` over `n` realizations.
///
/// With `E|z|² = σ²` per vacuum component the closed form is
/// `E|x|² = σ² cosh 2r`, `E[a1H a2V] = σ² sinh 2r`,
/// `E[a1V a2H] = −σ² sinh 2r`, and zero for every other pair.
pub fn covariance_checks(p: &SqueezeParams, n: usize, seed: u64) -> Vec<MomentCheck> {
    let mut rng = rng::stream(seed, &[Role::Validation as u64]);
    // Accumulate Σx, Σx² of re/im for x = c_i conj(c_j) and x = c_i c_j.
    let mut herm = [[[0.0f64; 4]; 4]; 4];
    let mut pseudo = [[[0.0f64; 4]; 4]; 4];
    let add = |acc: &mut [f64; 4], x: Complex64| {
        acc[0] += x.re;
        acc[1] += x.re * x.re;
        acc[2] += x.im;
        acc[3] += x.im * x.im;
    };
    for _ in 0..n {
        let pair = generate_source_pair(&sample_vacuum(&mut rng, p.sigma_sq), p);
        let x = [pair.mode1.h, pair.mode1.v, pair.mode2.h, pair.mode2.v];
        for i in 0..4 {
            for j in i..4 {
                add(&mut herm[i][j], x[i] * x[j].conj());
                add(&mut pseudo[i][j], x[i] * x[j]);
            }
        }
    }
    let nf = n as f64;
    let summarize = |acc: &[f64; 4]| {
        let mean_re = acc[0] / nf;
        let mean_im = acc[2] / nf;
        let se = |sum: f64, sq: f64| ((sq / nf - (sum / nf).powi(2)).max(f64::MIN_POSITIVE) / nf).sqrt();
        (Complex64::new(mean_re, mean_im), [se(acc[0], acc[1]), se(acc[2], acc[3])])
    };
    let diag = p.mode_variance();
    let cross = p.cross_moment();
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            let (observed, se) = summarize(&herm[i][j]);
            let expected = if i == j { diag } else { 0.0 };
            out.push(MomentCheck {
                name: format!("E[{} {}*]", LABELS[i], LABELS[j]),
                expected: Complex64::new(expected, 0.0),
                observed,
                // Diagonal products are real; keep the check meaningful.
                se: [se[0], if i == j { f64::INFINITY } else { se[1] }],
            });
            let (observed, se) = summarize(&pseudo[i][j]);
            let expected = match (i, j) {
                (0, 3) => cross,
                (1, 2) => -cross,
                _ => 0.0,
            };
            out.push(MomentCheck {
                name: format!("E[{} {}]", LABELS[i], LABELS[j]),
                expected: Complex64::new(expected, 0.0),
                observed,
                se,
            });
        }
    }
    out
}

/// Plus and Minus analyzer states for each Pauli setting, written out
/// explicitly: X `(1, ±1)/√2`, Y `(1, ±i)/√2`, Z `H` and `V`.
pub fn analyzer_states(p: Pauli) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let s = FRAC_1_SQRT_2;
    match p {
        Pauli::X => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        Pauli::Y => [[c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]],
        Pauli::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
    }
}

/// Joint outcome probabilities `[pp, pm, mp, mm]` at one setting pair.
pub fn outcome_probabilities(rho: &DensityMatrix, a: Pauli, b: Pauli) -> [f64; 4] {
    let (sa, sb) = (analyzer_states(a), analyzer_states(b));
    let mut out = [0.0; 4];
    for (k, (ea, eb)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let psi: Vec<Complex64> = (0..4).map(|idx| sa[ea][idx / 2] * sb[eb][idx % 2]).collect();
        let mut p = Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                p += psi[r].conj() * rho.0[(r, c)] * psi[c];
            }
        }
        out[k] = p.re;
    }
    out
}

const OUTCOMES: [(AnalyzerOutcome, AnalyzerOutcome); 4] = [
    (AnalyzerOutcome::Plus, AnalyzerOutcome::Plus),
    (AnalyzerOutcome::Plus, AnalyzerOutcome::Minus),
    (AnalyzerOutcome::Minus, AnalyzerOutcome::Plus),
    (AnalyzerOutcome::Minus, AnalyzerOutcome::Minus),
];

/// Tallies equal to exact probabilities × `scale`, rounded.
pub fn exact_counts(rho: &DensityMatrix, scale: f64) -> CountsTable {
    let mut table = CountsTable::new();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let probs = outcome_probabilities(rho, a, b);
            let cell = table.cell_mut(a, b);
            let [pp, pm, mp, mm] = probs.map(|p| (p * scale).round().max(0.0) as u64);
            (cell.pp, cell.pm, cell.mp, cell.mm) = (pp, pm, mp, mm);
        }
    }
    table
}

/// Draws `per_setting` events at every setting pair from the exact law.
pub fn sampled_counts(rho: &DensityMatrix, per_setting: u64, seed: u64) -> CountsTable {
    let mut rng = rng::stream(seed, &[Role::Validation as u64, 1]);
    let mut table = CountsTable::new();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let probs = outcome_probabilities(rho, a, b);
            for _ in 0..per_setting {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let k = probs.iter().position(|&p| {
                    acc += p;
                    u < acc
                });
                let (oa, ob) = OUTCOMES[k.unwrap_or(3)];
                table.record_event(a, b, oa, ob);
            }
        }
    }
    table
}

/// Result of reconstructing a known state from synthetic counts.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub max_entry_error: f64,
    pub fidelity: f64,
}

pub fn tomography_round_trip(rho: &DensityMatrix, counts: &CountsTable, method: Projection) -> RoundTrip {
    let rec = reconstruct(counts, method).expect("synthetic counts cover every setting");
    RoundTrip { max_entry_error: rec.rho.max_abs_diff(rho), fidelity: rec.fidelity }
}

/// Werner-type test state `w·|Ψ⁻⟩⟨Ψ⁻| + (1 − w)·I/4`.
pub fn werner(w: f64) -> DensityMatrix {
    DensityMatrix::singlet().mix(w, &DensityMatrix::maximally_mixed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{analyze, Cutoff, JonesVector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn analyzer_states_match_the_optics() {
        let cutoff = Cutoff::from_amplitude(1.0);
        for p in Pauli::ALL {
            let [plus, minus] = analyzer_states(p);
            let big = |s: [Complex64; 2]| JonesVector::new(s[0] * 3.0, s[1] * 3.0);
            assert_eq!(analyze(big(plus), p.basis(), cutoff), AnalyzerOutcome::Plus, "{p}");
            assert_eq!(analyze(big(minus), p.basis(), cutoff), AnalyzerOutcome::Minus, "{p}");
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let rho = werner(0.7);
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                assert_abs_diff_eq!(outcome_probabilities(&rho, a, b).iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
        // The singlet is anticorrelated in every Pauli basis.
        let p = outcome_probabilities(&DensityMatrix::singlet(), Pauli::Y, Pauli::Y);
        assert_abs_diff_eq!(p[1] + p[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn covariance_small_run() {
        let p = SqueezeParams::new(0.9, 1.0).unwrap();
        let checks = covariance_checks(&p, 100_000, 3);
        assert_eq!(checks.len(), 20);
        for c in &checks {
            assert!(c.z_score() < 5.0, "{} {:?} vs {:?}", c.name, c.observed, c.expected);
        }
    }

    #[test]
    fn exact_counts_invert_exactly() {
        let rho = werner(0.9);
        let rt = tomography_round_trip(&rho, &exact_counts(&rho, 1e8), Projection::Euclidean);
        assert!(rt.max_entry_error < 1e-4);
        assert_abs_diff_eq!(rt.fidelity, 0.925, epsilon = 1e-4);
    }

    #[test]
    fn sampled_counts_invert_within_noise() {
        let rho = werner(0.8);
        let rt = tomography_round_trip(&rho, &sampled_counts(&rho, 20_000, 5), Projection::Euclidean);
        assert!(rt.max_entry_error < 0.02, "{}", rt.max_entry_error);
    }
}
