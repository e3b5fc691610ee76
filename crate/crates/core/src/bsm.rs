//! Partial Bell-state measurement on `mode1` of Alice's and Bob's sources.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::optics::{beam_splitter, click, Cutoff, JonesVector};

/// Which detector patterns herald a swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsmPolicy {
    /// Four detectors; exactly one click in each output port and the two
    /// clicked polarizations are orthogonal.
    #[default]
    OrthogonalPattern,
    /// Four detectors; exactly one click in each output port.
    AnyOnePerPort,
    /// Port `c` behind an H polarizer, port `d` behind a V polarizer; both
    /// detectors must click.
    FixedPolarizers,
}

impl BsmPolicy {
    pub const ALL: [BsmPolicy; 3] = [Self::OrthogonalPattern, Self::AnyOnePerPort, Self::FixedPolarizers];

    pub fn name(self) -> &'static str {
        match self {
            Self::OrthogonalPattern => "orthogonal-pattern",
            Self::AnyOnePerPort => "any-one-per-port",
            Self::FixedPolarizers => "fixed-polarizers",
        }
    }
}

impl fmt::Display for BsmPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BsmPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            format!("unknown BSM policy {s:?} (expected orthogonal-pattern, any-one-per-port or fixed-polarizers)")
        })
    }
}

/// Detectors that fired on a successful measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BsmPattern {
    CHdV,
    CVdH,
    CHdH,
    CVdV,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsmOutcome {
    pattern: Option<BsmPattern>,
}

impl BsmOutcome {
    pub const FAILURE: Self = Self { pattern: None };

    pub fn success(pattern: BsmPattern) -> Self {
        Self { pattern: Some(pattern) }
    }

    pub fn is_success(&self) -> bool {
        self.pattern.is_some()
    }

    pub fn pattern(&self) -> Option<BsmPattern> {
        self.pattern
    }
}

/// Click flags of the four BSM detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortClicks {
    pub c_h: bool,
    pub c_v: bool,
    pub d_h: bool,
    pub d_v: bool,
}

impl PortClicks {
    /// Applies `policy`. `FixedPolarizers` looks at `c_h` and `d_v` only.
    pub fn decide(self, policy: BsmPolicy) -> BsmOutcome {
        let Self { c_h, c_v, d_h, d_v } = self;
        if policy == BsmPolicy::FixedPolarizers {
            return if c_h && d_v { BsmOutcome::success(BsmPattern::Fixed) } else { BsmOutcome::FAILURE };
        }
        if c_h == c_v || d_h == d_v {
            return BsmOutcome::FAILURE;
        }
        let pattern = match (c_h, d_h) {
            (true, false) => BsmPattern::CHdV,
            (false, true) => BsmPattern::CVdH,
            (true, true) => BsmPattern::CHdH,
            (false, false) => BsmPattern::CVdV,
        };
        match (policy, pattern) {
            (BsmPolicy::OrthogonalPattern, BsmPattern::CHdH | BsmPattern::CVdV) => BsmOutcome::FAILURE,
            _ => BsmOutcome::success(pattern),
        }
    }
}

pub fn bsm_measure(a1: JonesVector, b1: JonesVector, cutoff: Cutoff, policy: BsmPolicy) -> BsmOutcome {
    let (c, d) = beam_splitter(a1, b1);
    let clicks = PortClicks {
        c_h: click(c.h, cutoff),
        c_v: policy != BsmPolicy::FixedPolarizers && click(c.v, cutoff),
        d_h: policy != BsmPolicy::FixedPolarizers && click(d.h, cutoff),
        d_v: click(d.v, cutoff),
    };
    clicks.decide(policy)
}
