//! Realization blocks and heralding.
//!
//! Realizations are grouped into fixed-length blocks, each drawn from its own
//! stream, so a trial is a pure function of its seed no matter how blocks are
//! scheduled across workers.
//!
//! Two samplers produce the same joint law of heralded `(alice, bob)` modes:
//!
//! - `Direct` draws both sources from the vacuum, runs the beam splitter and
//!   evaluates every detector.
//! - `Factorized` uses the fact that the beam splitter outputs `c`, `d` of two
//!   independent sources are four i.i.d. circular Gaussians of variance
//!   `σ²·cosh 2r`. A detector on such a component clicks with probability
//!   `exp(−cutoff²/var)`, so each click costs one uniform compare; the mode
//!   values are only materialised on success, after which `mode1` is
//!   recovered by inverting the beam splitter and each `mode2` is drawn from
//!   its conditional law given `mode1`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bsm::{bsm_measure, BsmPattern, BsmPolicy, PortClicks};
use crate::field::{complex_gaussian, generate_source_pair, sample_partner, sample_vacuum, SqueezeParams};
use crate::optics::{beam_splitter, Cutoff, JonesVector};
use crate::rng::{self, open_unit, Role, Stream};

/// Realizations per block.
pub const BLOCK_LEN: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    #[default]
    Factorized,
    Direct,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Factorized => "factorized",
            Self::Direct => "direct",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "factorized" => Ok(Self::Factorized),
            "direct" => Ok(Self::Direct),
            _ => Err(format!("unknown sampler {s:?} (expected factorized or direct)")),
        }
    }
}

/// Everything a block needs.
#[derive(Debug, Clone, Copy)]
pub struct HeraldParams {
    pub squeeze: SqueezeParams,
    pub cutoff: Cutoff,
    pub policy: BsmPolicy,
    pub sampler: SamplerKind,
}

/// A successful BSM and the modes it leaves at the analyzers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herald {
    /// Realization index within the block.
    pub offset: u32,
    pub pattern: BsmPattern,
    pub alice: JonesVector,
    pub bob: JonesVector,
    /// Raw draw for random setting assignment.
    pub choice: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: u64,
    pub len: u64,
    pub heralds: Vec<Herald>,
}

pub fn block_stream(trial_seed: u64, block: u64) -> Stream {
    rng::stream(trial_seed, &[Role::Realizations as u64, block])
}

pub fn run_block(params: &HeraldParams, trial_seed: u64, index: u64, len: u64) -> Block {
    let mut rng = block_stream(trial_seed, index);
    let heralds = match params.sampler {
        SamplerKind::Direct => direct_block(params, &mut rng, len),
        SamplerKind::Factorized => factorized_block(params, &mut rng, len),
    };
    Block { index, len, heralds }
}

fn direct_block(params: &HeraldParams, rng: &mut Stream, len: u64) -> Vec<Herald> {
    let sigma_sq = params.squeeze.sigma_sq;
    let mut heralds = Vec::new();
    for offset in 0..len {
        let alice = generate_source_pair(&sample_vacuum(rng, sigma_sq), &params.squeeze);
        let bob = generate_source_pair(&sample_vacuum(rng, sigma_sq), &params.squeeze);
        if let Some(pattern) = bsm_measure(alice.mode1, bob.mode1, params.cutoff, params.policy).pattern() {
            heralds.push(Herald { offset: offset as u32, pattern, alice: alice.mode2, bob: bob.mode2, choice: rng.next_u32() });
        }
    }
    heralds
}

/// One beam-splitter output component, sampled lazily.
struct Port {
    variance: f64,
    click_prob: f64,
}

impl Port {
    /// Uniform deciding the click, and the click itself.
    #[inline]
    fn draw(&self, rng: &mut Stream) -> (f64, bool) {
        let u = open_unit(rng);
        (u, u < self.click_prob)
    }

    /// Component value consistent with the uniform that decided its click:
    /// `|x|² = −var·ln u` is exponential with mean `var`.
    fn value(&self, rng: &mut Stream, u: f64) -> Complex64 {
        let magnitude = (-self.variance * u.ln()).sqrt();
        Complex64::from_polar(magnitude, TAU * open_unit(rng))
    }
}

fn factorized_block(params: &HeraldParams, rng: &mut Stream, len: u64) -> Vec<Herald> {
    let variance = params.squeeze.mode_variance();
    let port = Port { variance, click_prob: (-params.cutoff.amplitude_sq() / variance).exp() };
    let fixed = params.policy == BsmPolicy::FixedPolarizers;
    let mut heralds = Vec::new();
    for offset in 0..len {
        let (c, d, pattern) = if fixed {
            let (u_ch, c_h) = port.draw(rng);
            if !c_h {
                continue;
            }
            let (u_dv, d_v) = port.draw(rng);
            if !d_v {
                continue;
            }
            let c = JonesVector::new(port.value(rng, u_ch), complex_gaussian(rng, variance));
            let d = JonesVector::new(complex_gaussian(rng, variance), port.value(rng, u_dv));
            (c, d, BsmPattern::Fixed)
        } else {
            let (u_ch, c_h) = port.draw(rng);
            let (u_cv, c_v) = port.draw(rng);
            if c_h == c_v {
                continue;
            }
            let (u_dh, d_h) = port.draw(rng);
            let (u_dv, d_v) = port.draw(rng);
            let Some(pattern) = (PortClicks { c_h, c_v, d_h, d_v }).decide(params.policy).pattern() else {
                continue;
            };
            let c = JonesVector::new(port.value(rng, u_ch), port.value(rng, u_cv));
            let d = JonesVector::new(port.value(rng, u_dh), port.value(rng, u_dv));
            (c, d, pattern)
        };
        // The 50:50 splitter is its own inverse.
        let (a1, b1) = beam_splitter(c, d);
        let alice = sample_partner(rng, &a1, &params.squeeze);
        let bob = sample_partner(rng, &b1, &params.squeeze);
        heralds.push(Herald { offset: offset as u32, pattern, alice, bob, choice: rng.next_u32() });
    }
    heralds
}
