use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use segmetrics::{ConfusionMatrix, IGNORE_INDEX};
use serde_json::json;

use super::{list_images, worker_pool};

/// Evaluate predicted label maps against ground truth by filename pairing.
pub fn run(
    pred_dir: &Path,
    truth_dir: &Path,
    classes: Option<&[usize]>,
    num_classes: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let preds = list_images(pred_dir)?;
    let truths = list_images(truth_dir)?;
    let names = |paths: &[std::path::PathBuf]| -> BTreeSet<String> {
        paths
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    };
    let pred_names = names(&preds);
    let truth_names = names(&truths);
    let unmatched: Vec<String> = pred_names
        .symmetric_difference(&truth_names)
        .cloned()
        .collect();
    if !unmatched.is_empty() {
        bail!("unmatched files between directories: {}", unmatched.join(", "));
    }
    if truth_names.is_empty() {
        bail!("no label maps found");
    }

    let pairs: Vec<(std::path::PathBuf, std::path::PathBuf)> = truth_names
        .iter()
        .map(|name| (pred_dir.join(name), truth_dir.join(name)))
        .collect();

    // Load all pairs (in parallel), then size the matrix.
    let pool = worker_pool()?;
    let maps: Vec<(imgcore::Image, imgcore::Image)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(p, t)| {
                let pred = imgcore::read_image(p)
                    .with_context(|| format!("reading {}", p.display()))?;
                let truth = imgcore::read_image(t)
                    .with_context(|| format!("reading {}", t.display()))?;
                Ok((pred, truth))
            })
            .collect::<Result<_>>()
    })?;

    let k = match num_classes {
        Some(k) => k,
        None => {
            let max_label = maps
                .iter()
                .flat_map(|(p, t)| p.samples().iter().chain(t.samples()))
                .copied()
                .filter(|&v| v != IGNORE_INDEX)
                .max()
                .unwrap_or(0);
            max_label as usize + 1
        }
    };

    let cm = pool.install(|| {
        maps.par_iter()
            .try_fold(
                || ConfusionMatrix::new(k),
                |mut acc, (pred, truth)| {
                    acc.accumulate(truth, pred)?;
                    Ok::<_, segmetrics::MetricsError>(acc)
                },
            )
            .try_reduce(
                || ConfusionMatrix::new(k),
                |mut a, b| {
                    a.merge(&b)?;
                    Ok(a)
                },
            )
    })?;

    let report = cm.miou(classes)?;
    let value = json!({
        "command": "eval",
        "pred_dir": pred_dir.display().to_string(),
        "truth_dir": truth_dir.display().to_string(),
        "files": pairs.len(),
        "num_classes": k,
        "classes": classes,
        "per_class": report
            .per_class
            .iter()
            .map(|(c, iou)| json!({ "class": c, "iou": iou }))
            .collect::<Vec<_>>(),
        "miou": report.miou,
    });
    let text = serde_json::to_string_pretty(&value)?;
    if let Some(path) = out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(())
}
