use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Write the full factorial manifest CSV for the given factors. A leading
/// `#` comment records the invocation so the plan is self-describing.
pub fn run(factors: &[String], seed: u64, out: &Path) -> Result<()> {
    let design = doe::generate_design(factors, seed)?;
    let mut file = BufWriter::new(
        File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    writeln!(file, "# augdoe plan --factors {} --seed {seed}", factors.join(","))?;
    design.write_manifest(&mut file)?;
    println!(
        "planned {} runs over {} factors (seed {seed}) -> {}",
        design.runs.len(),
        factors.len(),
        out.display()
    );
    Ok(())
}
