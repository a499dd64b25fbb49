use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use doe::{Coding, Model, ResultsTable};
use regstats::{analyze, resolve_coding, AnalysisReport, ReferenceTable, Tolerances};

fn write_report(report: &AnalysisReport, out: &Path) -> Result<()> {
    let json_path = out.with_extension("json");
    let text_path = out.with_extension("txt");
    fs::write(&json_path, serde_json::to_string_pretty(&report.to_json())?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    fs::write(&text_path, report.render_text())
        .with_context(|| format!("writing {}", text_path.display()))?;
    print!("{}", report.render_text());
    println!("reports: {} {}", json_path.display(), text_path.display());
    Ok(())
}

/// Fit the requested model and write the JSON and text reports. Under
/// `--coding auto` both codings are fitted, the one closer to the reference
/// table wins, and a discrepancy report quantifies the residuals.
pub fn run(
    results: &Path,
    response: &str,
    model: &str,
    coding: &str,
    reference: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let text = fs::read_to_string(results)
        .with_context(|| format!("reading {}", results.display()))?;
    let table = ResultsTable::from_csv(text.as_bytes(), None)?;
    let model = Model::parse(model)?;

    match coding {
        "auto" => {
            let Some(reference_path) = reference else {
                bail!("--coding auto needs --reference <published table JSON>");
            };
            let ref_text = fs::read_to_string(reference_path)
                .with_context(|| format!("reading {}", reference_path.display()))?;
            let reference = ReferenceTable::from_json(&ref_text)?;
            let resolution = resolve_coding(&table, response, model, &reference)?;
            let tol = Tolerances::default();
            let discrepancy = resolution.discrepancy_report(&tol);
            let best = resolution.best_candidate();
            println!(
                "coding resolution: {} (max |d estimate| {:.4} vs {:.4}); within tolerance: {}",
                resolution.best.as_str(),
                best.max_estimate,
                resolution
                    .candidates
                    .iter()
                    .find(|c| c.coding != resolution.best.as_str())
                    .map(|c| c.max_estimate)
                    .unwrap_or(f64::NAN),
                best.within(&tol),
            );
            let discrepancy_path = out.with_extension("discrepancy.json");
            fs::write(&discrepancy_path, serde_json::to_string_pretty(&discrepancy)?)
                .with_context(|| format!("writing {}", discrepancy_path.display()))?;
            println!("discrepancy report: {}", discrepancy_path.display());
            write_report(&resolution.best_report, out)
        }
        name => {
            let report = analyze(&table, response, model, Coding::parse(name)?)?;
            write_report(&report, out)
        }
    }
}
