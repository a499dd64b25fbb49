//! Checkpoint selection from per-epoch metric logs.
//!
//! Mode I picks the epoch with the best mIoU on a named target dataset;
//! mode II is the clean selection using only the source validation mIoU.
//! Ties break toward the earliest epoch.

use std::collections::BTreeMap;
use std::io::Read;

use crate::{MetricsError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointEntry {
    pub epoch: u64,
    pub source_val_miou: f64,
    /// mIoU per named target dataset.
    pub target_mious: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointLog {
    pub entries: Vec<CheckpointEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionMode {
    /// Best performance on the named target series.
    TargetBest(String),
    /// Clean selection on the source validation series.
    SourceBest,
}

impl CheckpointLog {
    pub fn new(entries: Vec<CheckpointEntry>) -> Result<Self> {
        let log = Self { entries };
        log.validate()?;
        Ok(log)
    }

    fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(MetricsError::InvalidInput("checkpoint log is empty".into()));
        }
        for pair in self.entries.windows(2) {
            if pair[1].epoch <= pair[0].epoch {
                return Err(MetricsError::InvalidInput(format!(
                    "epochs must be strictly increasing ({} then {})",
                    pair[0].epoch, pair[1].epoch
                )));
            }
        }
        for e in &self.entries {
            let mut values: Vec<f64> = vec![e.source_val_miou];
            values.extend(e.target_mious.values());
            if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(MetricsError::InvalidInput(format!(
                    "epoch {}: mIoU outside [0, 1]",
                    e.epoch
                )));
            }
        }
        Ok(())
    }

    /// Parse the CSV format `epoch,source_val_miou,<target>,...`. Lines
    /// starting with `#` are metadata comments.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let headers = csv
            .headers()
            .map_err(|e| MetricsError::InvalidInput(e.to_string()))?
            .clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.len() < 2 || cols[0] != "epoch" || cols[1] != "source_val_miou" {
            return Err(MetricsError::InvalidInput(
                "expected header epoch,source_val_miou,<target>...".into(),
            ));
        }
        let targets: Vec<String> = cols[2..].iter().map(|s| s.to_string()).collect();
        let mut entries = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| MetricsError::InvalidInput(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| MetricsError::InvalidInput("short row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| MetricsError::InvalidInput(e.to_string()))
            };
            let epoch = field(0)? as u64;
            let source_val_miou = field(1)?;
            let mut target_mious = BTreeMap::new();
            for (i, name) in targets.iter().enumerate() {
                target_mious.insert(name.clone(), field(2 + i)?);
            }
            entries.push(CheckpointEntry { epoch, source_val_miou, target_mious });
        }
        Self::new(entries)
    }
}

/// Return the chosen epoch under the given mode.
pub fn select_checkpoint(log: &CheckpointLog, mode: &SelectionMode) -> Result<u64> {
    log.validate()?;
    let metric = |e: &CheckpointEntry| -> Result<f64> {
        match mode {
            SelectionMode::SourceBest => Ok(e.source_val_miou),
            SelectionMode::TargetBest(name) => e.target_mious.get(name).copied().ok_or_else(|| {
                MetricsError::InvalidInput(format!("target series {name:?} missing at epoch {}", e.epoch))
            }),
        }
    };
    let mut best = (log.entries[0].epoch, metric(&log.entries[0])?);
    for e in &log.entries[1..] {
        let v = metric(e)?;
        // Strict improvement only: ties keep the earliest epoch.
        if v > best.1 {
            best = (e.epoch, v);
        }
    }
    Ok(best.0)
}
