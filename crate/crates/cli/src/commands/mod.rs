pub mod analyze;
pub mod augment;
pub mod evaluate;
pub mod plan;
pub mod select;

use anyhow::{Context, Result};
use std::path::{Path, PathBuf};

/// Image files in a directory, sorted lexicographically by filename. The
/// rank in this listing is the image index used for substream derivation,
/// so results do not depend on filesystem enumeration order.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
                    Some(ref ext) if ["png", "ppm", "pgm"].contains(&ext.as_str())
                )
        })
        .collect();
    files.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));
    Ok(files)
}

/// Thread pool honoring the AUGDOE_THREADS cap.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("AUGDOE_THREADS") {
        let n: usize = value
            .parse()
            .with_context(|| format!("AUGDOE_THREADS={value:?} is not a thread count"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}
