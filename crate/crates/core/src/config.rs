//! TOML configuration documents.
//!
//! ```toml
//! squeezing_r = 0.9
//! gamma_bsm = 2.3
//! gamma_qst = 0.6
//! bsm_policy = "fixed-polarizers"
//! threshold_units = "zero-point"
//!
//! [sweep]
//! gamma_qst = { start = 0.2, stop = 3.0, step = 0.2 }
//! r = [0.5, 0.9, 1.3]
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bsm::BsmPolicy;
use crate::chsh::{ChshEstimator, ChshSettings};
use crate::harness::{Mode, RunConfig, SettingAssignment, SweepGrid};
use crate::optics::ThresholdUnits;
use crate::sampler::SamplerKind;
use crate::tomography::Projection;

pub const DEFAULT_GAMMA_BSM: f64 = 2.3;
pub const DEFAULT_GAMMA_QST: f64 = 0.6;
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error: {message}")]
    Parse { message: String, line: Option<usize> },
    #[error("invalid {key}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Validation { key: String, line: Option<usize>, message: String },
}

impl ConfigError {
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Validation { key, .. } => Some(key),
            Self::Parse { .. } => None,
        }
    }
}

/// Inclusive range or explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl Axis {
    /// Expands a range endpoint-inclusively, tolerating half a step of
    /// rounding at the end.
    pub fn expand(&self) -> Result<Vec<f64>, String> {
        match *self {
            Axis::List(ref values) if values.is_empty() => Err("empty list".into()),
            Axis::List(ref values) => Ok(values.clone()),
            Axis::Range { start, stop, step } => {
                if step.is_nan() || step <= 0.0 || step.is_infinite() {
                    return Err(format!("step must be positive, got {step}"));
                }
                if !(start.is_finite() && stop.is_finite()) || stop < start {
                    return Err(format!("need start <= stop, got {start}..{stop}"));
                }
                let n = ((stop - start) / step + 0.5).floor() as usize;
                // Round to kill accumulated binary noise such as 0.6000000000000001.
                Ok((0..=n).map(|k| round_to(start + k as f64 * step, 12)).collect())
            }
        }
    }
}

fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_bsm: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_qst: Option<Axis>,
}

/// Raw document; absent keys are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeezing_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_bsm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_qst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuum_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_units: Option<ThresholdUnits>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsm_policy: Option<BsmPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub setting_assignment: Option<SettingAssignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<Projection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh_estimator: Option<ChshEstimator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_bsm_events: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_raw_realizations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chsh_angles_deg: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDocument>,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Point used by single runs; sweep axes override it per grid point.
    pub run: RunConfig,
    pub grid: SweepGrid,
    pub out_dir: PathBuf,
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let doc: ConfigDocument = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    resolve(&doc, text)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line where `key` is assigned, if it appears literally.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let (table, leaf) = match key.split_once('.') {
        Some((t, l)) => (Some(t), l),
        None => (None, key),
    };
    let mut current: Option<&str> = None;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(header) = trimmed.strip_prefix('[') {
            current = header.split(']').next().map(str::trim);
            continue;
        }
        let dotted = table.map(|t| format!("{t}.{leaf}"));
        let assigns = |k: &str| trimmed.strip_prefix(k).is_some_and(|rest| rest.trim_start().starts_with('='));
        let hit = match table {
            None => current.is_none() && assigns(leaf),
            Some(t) => (current == Some(t) && assigns(leaf)) || (current.is_none() && assigns(dotted.as_deref().unwrap())),
        };
        if hit {
            return Some(i + 1);
        }
    }
    None
}

fn resolve(doc: &ConfigDocument, text: &str) -> Result<Config, ConfigError> {
    let invalid = |key: &str, message: String| ConfigError::Validation {
        key: key.to_string(),
        line: key_line(text, key),
        message,
    };
    let sweep = doc.sweep.clone().unwrap_or_default();
    let axis = |key: &str, values: &Option<Axis>| -> Result<Option<Vec<f64>>, ConfigError> {
        values.as_ref().map(|a| a.expand().map_err(|m| invalid(key, m))).transpose()
    };
    let sweep_r = axis("sweep.r", &sweep.r)?;
    let sweep_gb = axis("sweep.gamma_bsm", &sweep.gamma_bsm)?;
    let sweep_ga = axis("sweep.gamma_qst", &sweep.gamma_qst)?;

    let r = match (doc.squeezing_r, &sweep_r) {
        (Some(r), _) => r,
        (None, Some(values)) => values[0],
        (None, None) => return Err(invalid("squeezing_r", "required (set squeezing_r or sweep.r)".into())),
    };
    let gamma_bsm = doc.gamma_bsm.or(sweep_gb.as_ref().map(|v| v[0])).unwrap_or(DEFAULT_GAMMA_BSM);
    let gamma_qst = doc.gamma_qst.or(sweep_ga.as_ref().map(|v| v[0])).unwrap_or(DEFAULT_GAMMA_QST);

    let defaults = RunConfig::new(r, gamma_bsm, gamma_qst);
    let mode = doc.mode.unwrap_or(defaults.mode);
    let run = RunConfig {
        sigma_sq: doc.vacuum_variance.unwrap_or(defaults.sigma_sq),
        threshold_units: doc.threshold_units.unwrap_or(defaults.threshold_units),
        bsm_policy: doc.bsm_policy.unwrap_or(defaults.bsm_policy),
        mode,
        setting_assignment: doc.setting_assignment.unwrap_or(defaults.setting_assignment),
        projection: doc.projection.unwrap_or(defaults.projection),
        chsh_estimator: doc.chsh_estimator.unwrap_or(if mode == Mode::Chsh {
            ChshEstimator::Direct
        } else {
            ChshEstimator::Reconstructed
        }),
        sampler: doc.sampler.unwrap_or(defaults.sampler),
        target_bsm_events: doc.target_bsm_events.unwrap_or(defaults.target_bsm_events),
        trials: doc.trials.unwrap_or(defaults.trials),
        max_raw_realizations: doc.max_raw_realizations.unwrap_or(defaults.max_raw_realizations),
        master_seed: doc.master_seed.unwrap_or(defaults.master_seed),
        chsh: doc.chsh_angles_deg.map(ChshSettings::from_degrees).unwrap_or_default(),
        ..defaults
    };
    let grid = SweepGrid {
        r: sweep_r.unwrap_or(vec![run.r]),
        gamma_bsm: sweep_gb.unwrap_or(vec![run.gamma_bsm]),
        gamma_qst: sweep_ga.unwrap_or(vec![run.gamma_qst]),
    };
    check(&run, &grid).map_err(|(key, message)| invalid(key, message))?;
    Ok(Config { run, grid, out_dir: doc.out_dir.clone().unwrap_or_else(|| DEFAULT_OUT_DIR.into()) })
}

/// Validates the run and every grid point; keys follow document names.
fn check(run: &RunConfig, grid: &SweepGrid) -> Result<(), (&'static str, String)> {
    let rename = |(key, msg): (&'static str, String)| {
        let key = match key {
            "r" => "squeezing_r",
            "sigma_sq" => "vacuum_variance",
            "chsh" => "chsh_angles_deg",
            other => other,
        };
        (key, msg)
    };
    run.validate().map_err(rename)?;
    for (r, gamma_bsm, gamma_qst) in grid.points() {
        RunConfig { r, gamma_bsm, gamma_qst, ..run.clone() }.validate().map_err(|e| {
            let (key, msg) = rename(e);
            let key = match key {
                "squeezing_r" => "sweep.r",
                "gamma_bsm" => "sweep.gamma_bsm",
                "gamma_qst" => "sweep.gamma_qst",
                other => other,
            };
            (key, msg)
        })?;
    }
    Ok(())
}

/// Fully explicit document describing `config`.
pub fn echo_document(config: &Config) -> ConfigDocument {
    let run = &config.run;
    let axis = |values: &[f64], point: f64| (values != [point]).then(|| Axis::List(values.to_vec()));
    let sweep = SweepDocument {
        r: axis(&config.grid.r, run.r),
        gamma_bsm: axis(&config.grid.gamma_bsm, run.gamma_bsm),
        gamma_qst: axis(&config.grid.gamma_qst, run.gamma_qst),
    };
    let has_sweep = sweep != SweepDocument::default();
    ConfigDocument {
        squeezing_r: Some(run.r),
        gamma_bsm: Some(run.gamma_bsm),
        gamma_qst: Some(run.gamma_qst),
        vacuum_variance: Some(run.sigma_sq),
        threshold_units: Some(run.threshold_units),
        bsm_policy: Some(run.bsm_policy),
        mode: Some(run.mode),
        setting_assignment: Some(run.setting_assignment),
        projection: Some(run.projection),
        chsh_estimator: Some(run.chsh_estimator),
        sampler: Some(run.sampler),
        target_bsm_events: Some(run.target_bsm_events),
        trials: Some(run.trials),
        max_raw_realizations: Some(run.max_raw_realizations),
        master_seed: Some(run.master_seed),
        chsh_angles_deg: Some(run.chsh.to_degrees()),
        out_dir: Some(config.out_dir.clone()),
        sweep: has_sweep.then_some(sweep),
    }
}

pub fn write_config(config: &Config) -> String {
    toml::to_string(&echo_document(config)).expect("config documents always serialize")
}
