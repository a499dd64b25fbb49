//! Fitting factorial models from results tables and rendering reports,
//! including comparison against published coefficient tables and the
//! protocol that resolves which factor coding a published table used.

use doe::{encode_design_matrix, Coding, Model, ResultsTable};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ols::ols_fit;
use crate::{ModelFit, Result, StatsError, ALPHA};

/// A fitted model together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub response: String,
    pub model: Model,
    pub coding: Coding,
    pub fit: ModelFit,
}

impl AnalysisReport {
    pub fn significant(&self, term_index: usize) -> bool {
        self.fit.p_values[term_index] < ALPHA
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = (0..self.fit.terms.len())
            .map(|i| {
                json!({
                    "name": self.fit.terms[i],
                    "estimate": self.fit.estimates[i],
                    "std_error": self.fit.std_errors[i],
                    "t": self.fit.t_values[i],
                    "p": self.fit.p_values[i],
                    "significant": self.significant(i),
                })
            })
            .collect();
        json!({
            "response": self.response,
            "model": self.model.as_str(),
            "coding": self.coding.as_str(),
            "alpha": ALPHA,
            "observations": self.fit.residual_df + self.fit.terms.len(),
            "residual_df": self.fit.residual_df,
            "sigma2": self.fit.sigma2,
            "r2": self.fit.r2,
            "terms": terms,
        })
    }

    /// Plain-text table mirroring the usual regression summary layout:
    /// estimates and standard errors with four decimals, t with two.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# response: {} | model: {} | coding: {} | alpha: {}\n",
            self.response,
            self.model.as_str(),
            self.coding.as_str(),
            ALPHA
        ));
        out.push_str(&format!(
            "# n: {} | residual df: {} | sigma^2: {:.6} | R^2: {:.4}\n",
            self.fit.residual_df + self.fit.terms.len(),
            self.fit.residual_df,
            self.fit.sigma2,
            self.fit.r2
        ));
        let name_width =
            self.fit.terms.iter().map(|t| t.len()).max().unwrap_or(4).max("term".len());
        out.push_str(&format!(
            "{:<name_width$} {:>10} {:>11} {:>8} {:>9}\n",
            "term", "Estimate", "Std. Error", "t value", "Pr(>|t|)"
        ));
        for i in 0..self.fit.terms.len() {
            let marker = if self.significant(i) { " *" } else { "" };
            out.push_str(&format!(
                "{:<name_width$} {:>10.4} {:>11.4} {:>8.2} {:>9.4}{}\n",
                self.fit.terms[i],
                self.fit.estimates[i],
                self.fit.std_errors[i],
                self.fit.t_values[i],
                self.fit.p_values[i],
                marker
            ));
        }
        out
    }
}

/// Encode the design matrix for the chosen coding/model and fit the named
/// response.
pub fn analyze(
    table: &ResultsTable,
    response: &str,
    model: Model,
    coding: Coding,
) -> Result<AnalysisReport> {
    let y_values = table.response_column(response)?;
    let matrix = encode_design_matrix(table, coding, model);
    let x = DMatrix::from_row_slice(matrix.rows, matrix.cols, &matrix.data);
    let y = DVector::from_column_slice(&y_values);
    let fit = ols_fit(&x, &y, &matrix.names)?;
    Ok(AnalysisReport { response: response.to_string(), model, coding, fit })
}

/// One row of a published coefficient table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceTerm {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

/// A published coefficient table to reproduce.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceTable {
    #[serde(default)]
    pub description: String,
    pub terms: Vec<ReferenceTerm>,
}

impl ReferenceTable {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| StatsError::InvalidInput(e.to_string()))
    }
}

/// Per-term absolute deviations from a reference table.
#[derive(Debug, Clone, Serialize)]
pub struct TermDeviation {
    pub name: String,
    pub d_estimate: f64,
    pub d_std_error: f64,
    pub d_t: f64,
    pub d_p: f64,
}

/// Acceptance tolerances for reproducing a published table.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { estimate: 0.01, std_error: 0.01, t: 0.02, p: 0.002 }
    }
}

/// Deviations of one fit from a reference table, with maxima per statistic.
#[derive(Debug, Clone, Serialize)]
pub struct CodingCandidate {
    pub coding: String,
    pub per_term: Vec<TermDeviation>,
    pub max_estimate: f64,
    pub max_std_error: f64,
    pub max_t: f64,
    pub max_p: f64,
}

impl CodingCandidate {
    pub fn within(&self, tol: &Tolerances) -> bool {
        self.max_estimate <= tol.estimate
            && self.max_std_error <= tol.std_error
            && self.max_t <= tol.t
            && self.max_p <= tol.p
    }
}

/// Compare a fit to a reference table. Term names must match pairwise.
pub fn compare_to_reference(fit: &ModelFit, reference: &ReferenceTable) -> Result<CodingCandidate> {
    if fit.terms.len() != reference.terms.len() {
        return Err(StatsError::InvalidInput(format!(
            "fit has {} terms, reference {}",
            fit.terms.len(),
            reference.terms.len()
        )));
    }
    let mut per_term = Vec::with_capacity(fit.terms.len());
    for (i, term) in reference.terms.iter().enumerate() {
        if fit.terms[i] != term.name {
            return Err(StatsError::InvalidInput(format!(
                "term {i} name mismatch: fit {:?}, reference {:?}",
                fit.terms[i], term.name
            )));
        }
        per_term.push(TermDeviation {
            name: term.name.clone(),
            d_estimate: (fit.estimates[i] - term.estimate).abs(),
            d_std_error: (fit.std_errors[i] - term.std_error).abs(),
            d_t: (fit.t_values[i] - term.t).abs(),
            d_p: (fit.p_values[i] - term.p).abs(),
        });
    }
    let max = |f: fn(&TermDeviation) -> f64| per_term.iter().map(f).fold(0.0f64, f64::max);
    let (max_estimate, max_std_error, max_t, max_p) = (
        max(|d| d.d_estimate),
        max(|d| d.d_std_error),
        max(|d| d.d_t),
        max(|d| d.d_p),
    );
    Ok(CodingCandidate { coding: String::new(), per_term, max_estimate, max_std_error, max_t, max_p })
}

/// Outcome of the coding-resolution protocol: both codings fitted and
/// compared against the reference; the candidate with the smaller maximum
/// estimate deviation wins.
#[derive(Debug, Clone)]
pub struct CodingResolution {
    pub best: Coding,
    pub best_report: AnalysisReport,
    pub candidates: Vec<CodingCandidate>,
}

impl CodingResolution {
    pub fn best_candidate(&self) -> &CodingCandidate {
        self.candidates
            .iter()
            .find(|c| c.coding == self.best.as_str())
            .expect("best coding always has a candidate entry")
    }

    /// Machine-readable discrepancy report quantifying the residuals of the
    /// best coding against the reference table.
    pub fn discrepancy_report(&self, tol: &Tolerances) -> serde_json::Value {
        let best = self.best_candidate();
        json!({
            "response": self.best_report.response,
            "model": self.best_report.model.as_str(),
            "resolved_coding": self.best.as_str(),
            "within_tolerance": best.within(tol),
            "tolerances": {
                "estimate": tol.estimate,
                "std_error": tol.std_error,
                "t": tol.t,
                "p": tol.p,
            },
            "candidates": self.candidates,
        })
    }
}

/// Fit the response under both codings and pick the one that best
/// reproduces the reference table.
pub fn resolve_coding(
    table: &ResultsTable,
    response: &str,
    model: Model,
    reference: &ReferenceTable,
) -> Result<CodingResolution> {
    let mut candidates = Vec::new();
    let mut reports = Vec::new();
    for coding in [Coding::ZeroOne, Coding::PlusMinus] {
        let report = analyze(table, response, model, coding)?;
        let mut candidate = compare_to_reference(&report.fit, reference)?;
        candidate.coding = coding.as_str().to_string();
        candidates.push(candidate);
        reports.push(report);
    }
    let best_idx = if candidates[0].max_estimate <= candidates[1].max_estimate { 0 } else { 1 };
    Ok(CodingResolution {
        best: reports[best_idx].coding,
        best_report: reports.swap_remove(best_idx),
        candidates,
    })
}
