//! Trials and parameter sweeps.
//!
//! A trial draws realizations until `target_bsm_events` swaps have been
//! heralded (per analysis stream), analyzes the heralded modes, and
//! reconstructs the state and/or CHSH score. A sweep runs `trials`
//! independent trials at every grid point.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bsm::BsmPolicy;
use crate::chsh::{ChshCounts, ChshEstimator, ChshResult, ChshSettings};
use crate::field::SqueezeParams;
use crate::optics::{analyze, Cutoff, Threshold, ThresholdUnits};
use crate::rng;
use crate::sampler::{run_block, Block, HeraldParams, SamplerKind, BLOCK_LEN};
use crate::tomography::{reconstruct, CountsTable, DensityMatrix, Pauli, Projection, TomographyError};

macro_rules! named_enum {
    ($ty:ident, $what:literal, { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    _ => Err(format!(concat!("unknown ", $what, " {:?} (expected one of: {})"), s, [$($name),+].join(", "))),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Tomography,
    Chsh,
    Both,
}

named_enum!(Mode, "mode", { Tomography => "tomography", Chsh => "chsh", Both => "both" });

impl Mode {
    pub fn has_tomography(self) -> bool {
        matches!(self, Mode::Tomography | Mode::Both)
    }

    pub fn has_chsh(self) -> bool {
        matches!(self, Mode::Chsh | Mode::Both)
    }

    fn streams(self) -> u64 {
        if self == Mode::Both {
            2
        } else {
            1
        }
    }
}

/// How analyzer settings are chosen for a heralded event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingAssignment {
    /// Every heralded realization is analyzed at every joint setting.
    #[default]
    Exhaustive,
    /// One joint setting per heralded event, uniformly at random.
    Random,
}

named_enum!(SettingAssignment, "setting assignment", { Exhaustive => "exhaustive", Random => "random" });

/// A single simulation point plus trial protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub r: f64,
    pub gamma_bsm: f64,
    pub gamma_qst: f64,
    pub sigma_sq: f64,
    pub threshold_units: ThresholdUnits,
    pub bsm_policy: BsmPolicy,
    pub mode: Mode,
    pub setting_assignment: SettingAssignment,
    pub projection: Projection,
    pub chsh_estimator: ChshEstimator,
    pub sampler: SamplerKind,
    pub target_bsm_events: u64,
    pub trials: u32,
    pub max_raw_realizations: u64,
    pub master_seed: u64,
    pub chsh: ChshSettings,
}

pub const DEFAULT_TARGET_BSM_EVENTS: u64 = 10_000;
pub const DEFAULT_TRIALS: u32 = 10;
pub const DEFAULT_MAX_RAW: u64 = 1_000_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed_0f5a_a95e_ed0f;

impl RunConfig {
    pub fn new(r: f64, gamma_bsm: f64, gamma_qst: f64) -> Self {
        Self {
            r,
            gamma_bsm,
            gamma_qst,
            sigma_sq: 1.0,
            threshold_units: ThresholdUnits::default(),
            bsm_policy: BsmPolicy::default(),
            mode: Mode::default(),
            setting_assignment: SettingAssignment::default(),
            projection: Projection::default(),
            chsh_estimator: ChshEstimator::default(),
            sampler: SamplerKind::default(),
            target_bsm_events: DEFAULT_TARGET_BSM_EVENTS,
            trials: DEFAULT_TRIALS,
            max_raw_realizations: DEFAULT_MAX_RAW,
            master_seed: DEFAULT_SEED,
            chsh: ChshSettings::default(),
        }
    }

    /// Checks every invariant; the error names the offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        SqueezeParams::new(self.r, self.sigma_sq).map_err(|e| {
            let key = if matches!(e, crate::field::FieldError::Squeezing(_)) { "r" } else { "sigma_sq" };
            (key, e.to_string())
        })?;
        Threshold::new(self.gamma_bsm).map_err(|e| ("gamma_bsm", e.to_string()))?;
        Threshold::new(self.gamma_qst).map_err(|e| ("gamma_qst", e.to_string()))?;
        if self.target_bsm_events == 0 {
            return Err(("target_bsm_events", "must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(("trials", "must be at least 1".into()));
        }
        if self.max_raw_realizations == 0 {
            return Err(("max_raw_realizations", "must be at least 1".into()));
        }
        if self.chsh.to_degrees().iter().any(|x| !x.is_finite()) {
            return Err(("chsh", "angles must be finite".into()));
        }
        if self.chsh_estimator == ChshEstimator::Direct && !self.mode.has_chsh() {
            return Err(("chsh_estimator", "direct CHSH needs mode chsh or both".into()));
        }
        if self.chsh_estimator == ChshEstimator::Reconstructed && !self.mode.has_tomography() {
            return Err(("chsh_estimator", "reconstructed CHSH needs mode tomography or both".into()));
        }
        Ok(())
    }

    pub fn squeeze(&self) -> SqueezeParams {
        SqueezeParams { r: self.r, sigma_sq: self.sigma_sq }
    }

    fn cutoff(&self, gamma: f64) -> Cutoff {
        Threshold::new(gamma).expect("validated threshold").cutoff(self.sigma_sq, self.threshold_units)
    }

    pub fn herald_params(&self) -> HeraldParams {
        HeraldParams {
            squeeze: self.squeeze(),
            cutoff: self.cutoff(self.gamma_bsm),
            policy: self.bsm_policy,
            sampler: self.sampler,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrialError {
    #[error("only {n_bsm_success} of {needed} BSM events after {n_raw} realizations")]
    InsufficientEvents { n_raw: u64, n_bsm_success: u64, needed: u64 },
    #[error("tomography failed after {n_bsm_success} BSM events: {reason}")]
    Tomography { n_raw: u64, n_bsm_success: u64, reason: String },
    #[error("CHSH failed after {n_bsm_success} BSM events: {reason}")]
    Chsh { n_raw: u64, n_bsm_success: u64, reason: String },
}

impl TrialError {
    pub fn counts(&self) -> (u64, u64) {
        match *self {
            Self::InsufficientEvents { n_raw, n_bsm_success, .. }
            | Self::Tomography { n_raw, n_bsm_success, .. }
            | Self::Chsh { n_raw, n_bsm_success, .. } => (n_raw, n_bsm_success),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyOutcome {
    pub counts: CountsTable,
    pub rho: DensityMatrix,
    pub fidelity: f64,
    /// CHSH correlations evaluated on `rho` at the configured angles.
    pub chsh: ChshResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshOutcome {
    pub counts: ChshCounts,
    pub result: ChshResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub n_raw: u64,
    pub n_bsm_success: u64,
    /// Analyzer pairs evaluated on heralded events.
    pub n_qst_analyses: u64,
    /// Analyses where both sides recorded exactly one click.
    pub n_qst_valid: u64,
    pub bsm_efficiency: f64,
    pub qst_efficiency: f64,
    pub tomography: Option<TomographyOutcome>,
    pub chsh_direct: Option<ChshOutcome>,
}

impl TrialResult {
    pub fn fidelity(&self) -> Option<f64> {
        self.tomography.as_ref().map(|t| t.fidelity)
    }

    /// S according to `estimator`.
    pub fn chsh(&self, estimator: ChshEstimator) -> Option<f64> {
        match estimator {
            ChshEstimator::Reconstructed => self.tomography.as_ref().map(|t| t.chsh.s),
            ChshEstimator::Direct => self.chsh_direct.as_ref().map(|c| c.result.s),
        }
    }
}

/// Worker pool; the result of any run is independent of its size.
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
    workers: usize,
}

impl Executor {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = (workers > 1).then(|| {
            rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool")
        });
        Self { pool, workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn blocks(&self, params: &HeraldParams, seed: u64, ranges: &[(u64, u64)]) -> Vec<Block> {
        let run = |&(index, len): &(u64, u64)| run_block(params, seed, index, len);
        match &self.pool {
            Some(pool) => pool.install(|| ranges.par_iter().map(run).collect()),
            None => ranges.iter().map(run).collect(),
        }
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::new(1)
    }
}

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(master: u64, point: u64, trial: u64) -> u64 {
    rng::derive_seed(master, &[point, trial])
}

pub fn run_trial(cfg: &RunConfig, point: u64, trial: u64, exec: &Executor) -> Result<TrialResult, TrialError> {
    run_trial_seeded(cfg, trial_seed(cfg.master_seed, point, trial), exec)
}

pub fn run_trial_seeded(cfg: &RunConfig, seed: u64, exec: &Executor) -> Result<TrialResult, TrialError> {
    let params = cfg.herald_params();
    let needed = cfg.target_bsm_events * cfg.mode.streams();
    let cap = cfg.max_raw_realizations;
    let total_blocks = cap.div_ceil(BLOCK_LEN);

    let mut heralds = Vec::with_capacity(needed.min(1 << 20) as usize);
    let mut n_raw = 0u64;
    let mut next_block = 0u64;
    let mut wave = 1u64;
    'outer: while next_block < total_blocks {
        let end = (next_block + wave).min(total_blocks);
        let ranges: Vec<(u64, u64)> = (next_block..end)
            .map(|b| (b, BLOCK_LEN.min(cap - b * BLOCK_LEN)))
            .collect();
        let mut found = 0u64;
        for block in exec.blocks(&params, seed, &ranges) {
            found += block.heralds.len() as u64;
            for h in block.heralds {
                heralds.push(h);
                if heralds.len() as u64 == needed {
                    n_raw = block.index * BLOCK_LEN + h.offset as u64 + 1;
                    break 'outer;
                }
            }
            n_raw = block.index * BLOCK_LEN + block.len;
        }
        next_block = end;
        // Size the next wave from the observed heralding rate.
        let remaining = needed - heralds.len() as u64;
        let per_block = found as f64 / ranges.len() as f64;
        let estimate = if per_block > 0.0 { (remaining as f64 / per_block * 1.1).ceil() as u64 } else { wave * 2 };
        wave = estimate.clamp(1, 4 * exec.workers() as u64).max(wave.min(4 * exec.workers() as u64));
    }

    let n_bsm_success = heralds.len() as u64;
    if n_bsm_success < needed {
        return Err(TrialError::InsufficientEvents { n_raw, n_bsm_success, needed });
    }

    let alice_cut = cfg.cutoff(cfg.gamma_qst);
    let mut tomo = cfg.mode.has_tomography().then(CountsTable::new);
    let mut chsh = cfg.mode.has_chsh().then(ChshCounts::default);
    let exhaustive = cfg.setting_assignment == SettingAssignment::Exhaustive;
    for (k, h) in heralds.iter().enumerate() {
        let to_tomography = match cfg.mode {
            Mode::Tomography => true,
            Mode::Chsh => false,
            Mode::Both => k % 2 == 0,
        };
        if to_tomography {
            let counts = tomo.as_mut().expect("tomography mode");
            if exhaustive {
                let a = Pauli::ALL.map(|p| analyze(h.alice, p.basis(), alice_cut));
                let b = Pauli::ALL.map(|p| analyze(h.bob, p.basis(), alice_cut));
                for (i, pa) in Pauli::ALL.into_iter().enumerate() {
                    for (j, pb) in Pauli::ALL.into_iter().enumerate() {
                        counts.record_event(pa, pb, a[i], b[j]);
                    }
                }
            } else {
                let setting = pick(h.choice, 9);
                let (pa, pb) = (Pauli::ALL[setting / 3], Pauli::ALL[setting % 3]);
                counts.record_event(pa, pb, analyze(h.alice, pa.basis(), alice_cut), analyze(h.bob, pb.basis(), alice_cut));
            }
        } else {
            let counts = chsh.as_mut().expect("chsh mode");
            let settings = &cfg.chsh;
            if exhaustive {
                let a = [0, 1].map(|i| analyze(h.alice, settings.alice_basis(i), alice_cut));
                let b = [0, 1].map(|j| analyze(h.bob, settings.bob_basis(j), alice_cut));
                for (i, &out_a) in a.iter().enumerate() {
                    for (j, &out_b) in b.iter().enumerate() {
                        counts.record_event(i, j, out_a, out_b);
                    }
                }
            } else {
                let setting = pick(h.choice, 4);
                let (i, j) = (setting / 2, setting % 2);
                counts.record_event(
                    i,
                    j,
                    analyze(h.alice, settings.alice_basis(i), alice_cut),
                    analyze(h.bob, settings.bob_basis(j), alice_cut),
                );
            }
        }
    }

    let n_qst_valid = tomo.as_ref().map_or(0, CountsTable::valid) + chsh.as_ref().map_or(0, ChshCounts::valid);
    let n_qst_invalid = tomo.as_ref().map_or(0, CountsTable::invalid) + chsh.as_ref().map_or(0, ChshCounts::invalid);
    let n_qst_analyses = n_qst_valid + n_qst_invalid;

    let tomography = match tomo {
        Some(counts) => {
            let rec = reconstruct(&counts, cfg.projection).map_err(|e: TomographyError| TrialError::Tomography {
                n_raw,
                n_bsm_success,
                reason: e.to_string(),
            })?;
            let chsh = ChshResult::from_density_matrix(&rec.rho, &cfg.chsh);
            Some(TomographyOutcome { counts, rho: rec.rho, fidelity: rec.fidelity, chsh })
        }
        None => None,
    };
    let chsh_direct = match chsh {
        Some(counts) => {
            let result = counts.result().map_err(|e| TrialError::Chsh { n_raw, n_bsm_success, reason: e.to_string() })?;
            Some(ChshOutcome { counts, result })
        }
        None => None,
    };

    Ok(TrialResult {
        seed,
        n_raw,
        n_bsm_success,
        n_qst_analyses,
        n_qst_valid,
        bsm_efficiency: n_bsm_success as f64 / n_raw as f64,
        qst_efficiency: n_qst_valid as f64 / n_qst_analyses as f64,
        tomography,
        chsh_direct,
    })
}

/// Maps a 32-bit draw onto `0..n`.
fn pick(draw: u32, n: u64) -> usize {
    ((draw as u64 * n) >> 32) as usize
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("cannot aggregate an empty list")]
pub struct EmptyInput;

/// Mean and sample standard deviation (n − 1 denominator, 0 for one value).
pub fn aggregate(values: &[f64]) -> Result<(f64, f64), EmptyInput> {
    if values.is_empty() {
        return Err(EmptyInput);
    }
    let n = values.len() as f64;
    // Shifted by the first value so identical inputs aggregate exactly.
    let x0 = values[0];
    let mean = x0 + values.iter().map(|x| x - x0).sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|x| (x - mean).powi(2)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Option<Self> {
        aggregate(values).ok().map(|(mean, std)| Self { mean, std })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    InsufficientEvents,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::InsufficientEvents => "insufficient_events",
        }
    }
}

/// Per-trial record kept for the state documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub result: Result<TrialResult, TrialError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: u64,
    pub config: RunConfig,
    pub status: RowStatus,
    pub bsm_efficiency: Option<Stat>,
    pub qst_efficiency: Option<Stat>,
    pub fidelity: Option<Stat>,
    pub chsh: Option<Stat>,
    pub trials: Vec<TrialRecord>,
}

impl SweepRow {
    pub fn from_trials(point: u64, config: RunConfig, trials: Vec<TrialRecord>) -> Self {
        let ok: Vec<&TrialResult> = trials.iter().filter_map(|t| t.result.as_ref().ok()).collect();
        if ok.len() < trials.len() || ok.is_empty() {
            return Self {
                point,
                config,
                status: RowStatus::InsufficientEvents,
                bsm_efficiency: None,
                qst_efficiency: None,
                fidelity: None,
                chsh: None,
                trials,
            };
        }
        let collect = |f: &dyn Fn(&TrialResult) -> Option<f64>| -> Option<Stat> {
            let values: Option<Vec<f64>> = ok.iter().map(|t| f(t)).collect();
            values.and_then(|v| Stat::of(&v))
        };
        let estimator = config.chsh_estimator;
        Self {
            point,
            status: RowStatus::Ok,
            bsm_efficiency: collect(&|t| Some(t.bsm_efficiency)),
            qst_efficiency: collect(&|t| Some(t.qst_efficiency)),
            fidelity: collect(&|t| t.fidelity()),
            chsh: collect(&|t| t.chsh(estimator)),
            config,
            trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn all_insufficient(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::InsufficientEvents)
    }
}

/// Parameter grid; every combination of the three axes is one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub r: Vec<f64>,
    pub gamma_bsm: Vec<f64>,
    pub gamma_qst: Vec<f64>,
}

impl SweepGrid {
    pub fn single(cfg: &RunConfig) -> Self {
        Self { r: vec![cfg.r], gamma_bsm: vec![cfg.gamma_bsm], gamma_qst: vec![cfg.gamma_qst] }
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.gamma_bsm.len() * self.gamma_qst.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row order: r outermost, then γ_B, then γ_A.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.r.iter().flat_map(move |&r| {
            self.gamma_bsm
                .iter()
                .flat_map(move |&gb| self.gamma_qst.iter().map(move |&ga| (r, gb, ga)))
        })
    }
}

pub fn run_point(cfg: &RunConfig, point: u64, exec: &Executor) -> SweepRow {
    let trials = (0..cfg.trials as u64)
        .map(|trial| TrialRecord {
            trial,
            seed: trial_seed(cfg.master_seed, point, trial),
            result: run_trial(cfg, point, trial, exec),
        })
        .collect();
    SweepRow::from_trials(point, cfg.clone(), trials)
}

pub fn run_sweep(grid: &SweepGrid, template: &RunConfig, exec: &Executor) -> SweepResult {
    let rows = grid
        .points()
        .enumerate()
        .map(|(k, (r, gamma_bsm, gamma_qst))| {
            let cfg = RunConfig { r, gamma_bsm, gamma_qst, ..template.clone() };
            run_point(&cfg, k as u64, exec)
        })
        .collect();
    SweepResult { rows }
}
