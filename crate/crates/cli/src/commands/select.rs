use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use segmetrics::{select_checkpoint, CheckpointLog, SelectionMode};
use serde_json::json;

/// Report the checkpoint chosen by both selection rules, optionally
/// highlighting one of them.
pub fn run(log_path: &Path, mode: Option<&str>, target: Option<&str>) -> Result<()> {
    let file =
        File::open(log_path).with_context(|| format!("opening {}", log_path.display()))?;
    let log = CheckpointLog::from_csv(file)?;

    let targets: Vec<String> = log.entries[0].target_mious.keys().cloned().collect();
    let target = match target {
        Some(name) => name.to_string(),
        None if targets.len() == 1 => targets[0].clone(),
        None => bail!("--target required; log has target columns: {}", targets.join(", ")),
    };

    let epoch_i = select_checkpoint(&log, &SelectionMode::TargetBest(target.clone()))?;
    let epoch_ii = select_checkpoint(&log, &SelectionMode::SourceBest)?;
    let entry = |epoch: u64| log.entries.iter().find(|e| e.epoch == epoch).unwrap();
    let describe = |epoch: u64| {
        let e = entry(epoch);
        json!({
            "epoch": epoch,
            "source_val_miou": e.source_val_miou,
            "target_miou": e.target_mious[&target],
        })
    };

    let selected = match mode {
        Some("i") | Some("I") => Some(epoch_i),
        Some("ii") | Some("II") => Some(epoch_ii),
        None => None,
        Some(other) => bail!("unknown mode {other:?} (expected i or ii)"),
    };
    let value = json!({
        "command": "select",
        "log": log_path.display().to_string(),
        "target": target,
        "mode_i": describe(epoch_i),
        "mode_ii": describe(epoch_ii),
        "selected_epoch": selected,
    });
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}
