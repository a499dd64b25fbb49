//! Ordinary least squares with t-based inference, plus report generation
//! for two-level factorial experiments: main-effect and first-order
//! interaction models, both factor codings, and comparison against
//! published coefficient tables.

mod analyze;
mod dist;
mod ols;

pub use analyze::{
    analyze, compare_to_reference, resolve_coding, AnalysisReport, CodingCandidate,
    CodingResolution, ReferenceTable, ReferenceTerm, TermDeviation, Tolerances,
};
pub use dist::{betainc, ln_gamma, t_p_value};
pub use ols::ols_fit;

use thiserror::Error;

/// Significance level used to flag terms in reports.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient data: {rows} rows for {cols} coefficients")]
    InsufficientData { rows: usize, cols: usize },
    #[error("singular design; collinear columns: {columns:?}")]
    SingularDesign { columns: Vec<String> },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Design(#[from] doe::DesignError),
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// Regression output: one entry per design-matrix column.
#[derive(Debug, Clone)]
pub struct ModelFit {
    pub terms: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residual_df: usize,
    pub sigma2: f64,
    pub r2: f64,
}

impl ModelFit {
    pub fn term_index(&self, name: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == name)
    }

    /// Estimate for a named term.
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.estimates[i])
    }
}
