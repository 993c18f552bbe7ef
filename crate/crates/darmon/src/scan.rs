//! Concurrent, resumable driver for the t-scan. Finished rows are appended
//! to a progress file as JSON lines keyed by the config hash; a rerun
//! skips every row already present.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use darmon_core::gkzscan::{scan_row, ScanConfig, ScanError};
use darmon_core::hmf::CoefficientTable;
use darmon_core::nfield::ElementF;

use crate::report::ScanRecord;

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("progress file: {0}")]
    Io(#[from] std::io::Error),
    #[error("progress file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct ProgressLine {
    config_hash: String,
    index: usize,
    record: ScanRecord,
}

/// Rows of an earlier run with the same hash, by position in the t list.
fn load_progress(path: &Path, hash: &str) -> Result<BTreeMap<usize, ScanRecord>, DriverError> {
    let mut done = BTreeMap::new();
    if !path.exists() {
        return Ok(done);
    }
    for line in std::fs::read_to_string(path)?.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let Ok(p) = serde_json::from_str::<ProgressLine>(line) else { continue };
        if p.config_hash == hash {
            done.insert(p.index, p.record);
        }
    }
    Ok(done)
}

#[derive(Clone, Debug)]
pub struct ScanRun {
    pub records: Vec<Option<ScanRecord>>,
    pub resumed: usize,
    pub computed: usize,
}

impl ScanRun {
    pub fn complete(&self) -> bool {
        self.records.iter().all(Option::is_some)
    }

    pub fn rows(&self) -> Vec<ScanRecord> {
        self.records.iter().flatten().cloned().collect()
    }
}

/// Evaluates the rows for `ts`, at most `budget` new ones, on `threads`
/// workers. Output order is the order of `ts` whatever the schedule.
pub fn run_scan(
    cfg: &ScanConfig,
    table: &CoefficientTable,
    ts: &[ElementF],
    threads: usize,
    progress: Option<&Path>,
    hash: &str,
    budget: Option<usize>,
) -> Result<ScanRun, DriverError> {
    let done = match progress {
        Some(p) => load_progress(p, hash)?,
        None => BTreeMap::new(),
    };
    let resumed = done.len();
    let pending: Vec<usize> = (0..ts.len()).filter(|i| !done.contains_key(i)).take(budget.unwrap_or(usize::MAX)).collect();
    let results: Mutex<BTreeMap<usize, ScanRecord>> = Mutex::new(done);
    let sink = match progress {
        Some(p) => Some(Mutex::new(std::fs::OpenOptions::new().create(true).append(true).open(p)?)),
        None => None,
    };
    let next = AtomicUsize::new(0);
    let failure: Mutex<Option<DriverError>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&i) = pending.get(k) else { break };
                let outcome = scan_row(cfg, table, &ts[i]).map(|row| ScanRecord::new(&row, cfg.precision));
                match outcome {
                    Ok(record) => {
                        if let Some(sink) = &sink {
                            let line = ProgressLine { config_hash: hash.to_string(), index: i, record: record.clone() };
                            let text = serde_json::to_string(&line).expect("record serializes");
                            let mut f = sink.lock().expect("progress lock");
                            if let Err(e) = writeln!(f, "{text}") {
                                *failure.lock().expect("failure lock") = Some(e.into());
                            }
                        }
                        results.lock().expect("results lock").insert(i, record);
                    }
                    Err(e) => {
                        *failure.lock().expect("failure lock") = Some(e.into());
                    }
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e);
    }
    let mut map = results.into_inner().expect("results lock");
    let records = (0..ts.len()).map(|i| map.remove(&i)).collect();
    Ok(ScanRun { records, resumed, computed: pending.len() })
}
