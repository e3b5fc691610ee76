//! Result files: `results.csv` plus one JSON state document per grid point.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{echo_document, Config, ConfigDocument};
use crate::harness::{RowStatus, SweepGrid, SweepResult, SweepRow, Stat};
use crate::tomography::DensityMatrix;

pub const RESULTS_HEADER: [&str; 15] = [
    "r",
    "gamma_bsm",
    "gamma_qst",
    "trials",
    "target_bsm_events",
    "bsm_eff_mean",
    "bsm_eff_std",
    "qst_eff_mean",
    "qst_eff_std",
    "fidelity_mean",
    "fidelity_std",
    "chsh_mean",
    "chsh_std",
    "master_seed",
    "status",
];

#[derive(Debug, thiserror::Error)]
#[error("{}: {source}", path.display())]
pub struct IoError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError { path: path.to_path_buf(), source }
}

/// Writes `bytes` to a sibling temp file, syncs it, and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()
    })();
    if let Err(source) = result {
        let _ = fs::remove_file(&tmp);
        return Err(IoError { path: path.to_path_buf(), source });
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Shortest decimal that round-trips to the same `f64`.
fn num(x: f64) -> String {
    format!("{x}")
}

fn stat_fields(stat: Option<Stat>) -> [String; 2] {
    match stat {
        Some(s) => [num(s.mean), num(s.std)],
        None => [String::new(), String::new()],
    }
}

pub fn results_csv(sweep: &SweepResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).expect("in-memory write");
    for row in &sweep.rows {
        let c = &row.config;
        let mut record = vec![num(c.r), num(c.gamma_bsm), num(c.gamma_qst), c.trials.to_string(), c.target_bsm_events.to_string()];
        for stat in [row.bsm_efficiency, row.qst_efficiency, row.fidelity, row.chsh] {
            record.extend(stat_fields(stat));
        }
        record.push(c.master_seed.to_string());
        record.push(row.status.name().to_string());
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialState {
    pub trial: u64,
    pub seed: u64,
    pub n_raw: u64,
    pub n_bsm_success: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chsh_reconstructed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chsh_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<DensityMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub point: u64,
    pub status: RowStatus,
    pub config: ConfigDocument,
    pub trials: Vec<TrialState>,
}

impl StateDocument {
    pub fn from_row(row: &SweepRow, out_dir: &Path) -> Self {
        let point = Config { run: row.config.clone(), grid: SweepGrid::single(&row.config), out_dir: out_dir.to_path_buf() };
        let trials = row
            .trials
            .iter()
            .map(|t| match &t.result {
                Ok(res) => TrialState {
                    trial: t.trial,
                    seed: t.seed,
                    n_raw: res.n_raw,
                    n_bsm_success: res.n_bsm_success,
                    fidelity: res.fidelity(),
                    chsh_reconstructed: res.tomography.as_ref().map(|o| o.chsh.s),
                    chsh_direct: res.chsh_direct.as_ref().map(|o| o.result.s),
                    rho: res.tomography.as_ref().map(|o| o.rho),
                    error: None,
                },
                Err(e) => {
                    let (n_raw, n_bsm_success) = e.counts();
                    TrialState {
                        trial: t.trial,
                        seed: t.seed,
                        n_raw,
                        n_bsm_success,
                        fidelity: None,
                        chsh_reconstructed: None,
                        chsh_direct: None,
                        rho: None,
                        error: Some(e.to_string()),
                    }
                }
            })
            .collect();
        Self { point: row.point, status: row.status, config: echo_document(&point), trials }
    }
}

pub fn state_path(out_dir: &Path, point: u64) -> PathBuf {
    out_dir.join("states").join(format!("point_{point:04}.json"))
}

pub fn read_state(path: &Path) -> Result<StateDocument, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| IoError { path: path.to_path_buf(), source: e.into() })
}

/// Writes `results.csv` and `states/point_XXXX.json`, each atomically.
pub fn write_results(sweep: &SweepResult, out_dir: &Path) -> Result<(), IoError> {
    let states = out_dir.join("states");
    fs::create_dir_all(&states).map_err(io_err(&states))?;
    write_atomic(&out_dir.join("results.csv"), results_csv(sweep).as_bytes())?;
    for row in &sweep.rows {
        let doc = StateDocument::from_row(row, out_dir);
        let mut json = serde_json::to_string_pretty(&doc).expect("state documents serialize");
        json.push('\n');
        write_atomic(&state_path(out_dir, row.point), json.as_bytes())?;
    }
    Ok(())
}
