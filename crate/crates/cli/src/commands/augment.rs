use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use augment::{apply_pipeline, Pipeline, StageRecord};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{list_images, worker_pool};

#[derive(Serialize)]
struct FileRecord {
    input: String,
    output: String,
    image_index: u64,
    stages: Vec<StageRecord>,
}

#[derive(Serialize)]
struct FileError {
    input: String,
    error: String,
}

/// Apply the pipeline to every image in `in_dir`. Each image's index is its
/// rank in the lexicographic filename order; outputs keep their filenames.
/// A JSON manifest records the invocation, per-file stage logs and errors.
pub fn run(
    in_dir: &Path,
    out_dir: &Path,
    pipeline_path: &Path,
    seed_override: Option<u64>,
    manifest_path: Option<&Path>,
) -> Result<()> {
    let text = fs::read_to_string(pipeline_path)
        .with_context(|| format!("reading pipeline {}", pipeline_path.display()))?;
    let mut pipeline = Pipeline::from_json(&text)?;
    if let Some(seed) = seed_override {
        pipeline.master_seed = seed;
    }
    let inputs = list_images(in_dir)?;
    if inputs.is_empty() {
        bail!("no readable images (png/ppm/pgm) in {}", in_dir.display());
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let pool = worker_pool()?;
    let results: Vec<std::result::Result<FileRecord, FileError>> = pool.install(|| {
        inputs
            .par_iter()
            .enumerate()
            .map(|(index, input)| {
                let name = input.file_name().expect("listed files have names");
                let output: PathBuf = out_dir.join(name);
                let process = || -> Result<Vec<StageRecord>> {
                    let img = imgcore::read_image(input)?;
                    let (out, records) = apply_pipeline(&pipeline, &img, index as u64)?;
                    imgcore::write_image(&output, &out)?;
                    Ok(records)
                };
                match process() {
                    Ok(stages) => Ok(FileRecord {
                        input: input.display().to_string(),
                        output: output.display().to_string(),
                        image_index: index as u64,
                        stages,
                    }),
                    Err(err) => Err(FileError {
                        input: input.display().to_string(),
                        error: format!("{err:#}"),
                    }),
                }
            })
            .collect()
    });

    let mut files = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(record) => files.push(record),
            Err(e) => errors.push(e),
        }
    }

    let manifest = json!({
        "command": "augment",
        "seed": pipeline.master_seed,
        "pipeline_path": pipeline_path.display().to_string(),
        "pipeline": serde_json::from_str::<serde_json::Value>(&pipeline.to_json())?,
        "in_dir": in_dir.display().to_string(),
        "out_dir": out_dir.display().to_string(),
        "files": files,
        "errors": errors,
    });
    let manifest_path = manifest_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out_dir.join("manifest.json"));
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    if !errors.is_empty() {
        bail!(
            "{} of {} images failed; see {}",
            errors.len(),
            inputs.len(),
            manifest_path.display()
        );
    }
    println!(
        "augmented {} images -> {} (manifest {})",
        files.len(),
        out_dir.display(),
        manifest_path.display()
    );
    Ok(())
}
