//! Two-level full factorial experiment plans: design generation with a
//! seeded run order, manifest/results CSV formats, and coded design-matrix
//! construction for the regression engine.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use imgcore::RngStream;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("csv error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, DesignError>;

/// Factor-level coding for the design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    /// Levels map to 0 and 1; the intercept is the all-off cell mean.
    ZeroOne,
    /// Levels map to -1 and +1; columns are mutually orthogonal on a full
    /// factorial.
    PlusMinus,
}

impl Coding {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ZeroOne => "zero_one",
            Self::PlusMinus => "plus_minus",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "zero_one" => Ok(Self::ZeroOne),
            "plus_minus" => Ok(Self::PlusMinus),
            other => Err(DesignError::InvalidInput(format!("unknown coding {other:?}"))),
        }
    }
}

/// Regression model family: main effects only, or mains plus all pairwise
/// interactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Linear,
    Quadratic,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Quadratic => "quadratic",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            other => Err(DesignError::InvalidInput(format!("unknown model {other:?}"))),
        }
    }
}

/// A 2^i full factorial plan with a seeded execution order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    pub factors: Vec<String>,
    /// All 2^i level combinations; row r holds the binary expansion of r
    /// with factor 0 as the most significant bit.
    pub runs: Vec<Vec<u8>>,
    /// Execution order: `run_order[k]` is the row executed k-th.
    pub run_order: Vec<usize>,
}

fn check_factor_names(factors: &[String]) -> Result<()> {
    if factors.is_empty() || factors.len() > 20 {
        return Err(DesignError::InvalidInput(format!(
            "factor count {} outside 1..=20",
            factors.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for f in factors {
        if f.trim().is_empty() {
            return Err(DesignError::InvalidInput("empty factor name".into()));
        }
        if !seen.insert(f) {
            return Err(DesignError::InvalidInput(format!("duplicate factor name {f:?}")));
        }
    }
    Ok(())
}

/// Enumerate all 2^i level combinations and shuffle the execution order with
/// the seed.
pub fn generate_design(factors: &[String], seed: u64) -> Result<Design> {
    check_factor_names(factors)?;
    let i = factors.len();
    let n = 1usize << i;
    let mut runs = Vec::with_capacity(n);
    for r in 0..n {
        let levels: Vec<u8> =
            (0..i).map(|j| ((r >> (i - 1 - j)) & 1) as u8).collect();
        runs.push(levels);
    }
    let mut run_order: Vec<usize> = (0..n).collect();
    let mut rng = RngStream::derive(seed, &[0x0D0E]);
    rng.shuffle(&mut run_order);
    Ok(Design { factors: factors.to_vec(), runs, run_order })
}

impl Design {
    /// Write the manifest CSV: `run_id,order,<factor0>,...`.
    pub fn write_manifest(&self, writer: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec!["run_id".to_string(), "order".to_string()];
        header.extend(self.factors.iter().cloned());
        csv.write_record(&header).map_err(|e| DesignError::Csv(e.to_string()))?;
        // order[row] = execution position of that row.
        let mut position = vec![0usize; self.runs.len()];
        for (k, &row) in self.run_order.iter().enumerate() {
            position[row] = k;
        }
        for (run_id, levels) in self.runs.iter().enumerate() {
            let mut record = vec![run_id.to_string(), position[run_id].to_string()];
            record.extend(levels.iter().map(|l| l.to_string()));
            csv.write_record(&record).map_err(|e| DesignError::Csv(e.to_string()))?;
        }
        csv.flush().map_err(|e| DesignError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Parse a manifest CSV back into a design. Lines starting with `#` are
    /// metadata comments. Rows must form the complete 2^i factorial with
    /// levels matching each run id's binary expansion.
    pub fn read_manifest(reader: impl Read) -> Result<Design> {
        let mut csv = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = csv.headers().map_err(|e| DesignError::Csv(e.to_string()))?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.len() < 3 || cols[0] != "run_id" || cols[1] != "order" {
            return Err(DesignError::InvalidInput(
                "expected header run_id,order,<factor>...".into(),
            ));
        }
        let factors: Vec<String> = cols[2..].iter().map(|s| s.to_string()).collect();
        check_factor_names(&factors)?;
        let i = factors.len();
        let n = 1usize << i;
        let mut runs = vec![Vec::new(); n];
        let mut run_order = vec![usize::MAX; n];
        let mut seen = 0usize;
        for record in csv.records() {
            let record = record.map_err(|e| DesignError::Csv(e.to_string()))?;
            let field = |j: usize| -> Result<usize> {
                record
                    .get(j)
                    .ok_or_else(|| DesignError::InvalidInput("short row".into()))?
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| DesignError::InvalidInput(e.to_string()))
            };
            let run_id = field(0)?;
            let order = field(1)?;
            if run_id >= n || order >= n {
                return Err(DesignError::InvalidInput(format!(
                    "run_id {run_id} / order {order} outside 0..{n}"
                )));
            }
            let levels: Vec<u8> =
                (0..i).map(|j| field(2 + j).map(|v| v as u8)).collect::<Result<_>>()?;
            let expected: Vec<u8> =
                (0..i).map(|j| ((run_id >> (i - 1 - j)) & 1) as u8).collect();
            if levels != expected {
                return Err(DesignError::InvalidInput(format!(
                    "run {run_id}: levels {levels:?} do not match its binary expansion"
                )));
            }
            if !runs[run_id].is_empty() || run_order[order] != usize::MAX {
                return Err(DesignError::InvalidInput(format!(
                    "duplicate run_id {run_id} or order {order}"
                )));
            }
            runs[run_id] = levels;
            run_order[order] = run_id;
            seen += 1;
        }
        if seen != n {
            return Err(DesignError::InvalidInput(format!("{seen} rows for a 2^{i} design")));
        }
        Ok(Design { factors, runs, run_order })
    }
}

/// Measured responses joined to their level combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub factors: Vec<String>,
    pub responses: Vec<String>,
    /// One row per run: the level vector and the response values (in the
    /// order of `responses`).
    pub rows: Vec<(Vec<u8>, Vec<f64>)>,
}

impl ResultsTable {
    pub fn new(
        factors: Vec<String>,
        responses: Vec<String>,
        rows: Vec<(Vec<u8>, Vec<f64>)>,
    ) -> Result<Self> {
        check_factor_names(&factors)?;
        if responses.is_empty() {
            return Err(DesignError::InvalidInput("no response columns".into()));
        }
        let mut seen = BTreeSet::new();
        for (levels, values) in &rows {
            if levels.len() != factors.len() {
                return Err(DesignError::InvalidInput("level vector length mismatch".into()));
            }
            if levels.iter().any(|&l| l > 1) {
                return Err(DesignError::InvalidInput("levels must be 0 or 1".into()));
            }
            if values.len() != responses.len() {
                return Err(DesignError::InvalidInput("response value count mismatch".into()));
            }
            if !seen.insert(levels.clone()) {
                return Err(DesignError::InvalidInput(format!(
                    "duplicate level vector {levels:?}"
                )));
            }
        }
        Ok(Self { factors, responses, rows })
    }

    /// Parse a results CSV: the manifest columns (`run_id` and `order`
    /// optional) plus one column per response metric. Lines starting with
    /// `#` are metadata comments.
    pub fn from_csv(reader: impl Read, factor_count_hint: Option<usize>) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let headers =
            csv.headers().map_err(|e| DesignError::Csv(e.to_string()))?.clone();
        let cols: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
        let mut idx = 0usize;
        for name in ["run_id", "order"] {
            if idx < cols.len() && cols[idx] == name {
                idx += 1;
            }
        }
        let records: Vec<csv::StringRecord> = csv
            .records()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| DesignError::Csv(e.to_string()))?;

        // Factor columns hold only 0/1; the remainder are responses. A hint
        // can override the inference (e.g. a binary-valued response).
        let first_response = match factor_count_hint {
            Some(k) => idx + k,
            None => {
                let mut j = idx;
                'cols: while j < cols.len() {
                    for record in &records {
                        let field = record.get(j).unwrap_or("").trim();
                        if field != "0" && field != "1" {
                            break 'cols;
                        }
                    }
                    j += 1;
                }
                j
            }
        };
        if first_response == idx || first_response > cols.len() {
            return Err(DesignError::InvalidInput(
                "could not locate factor columns in results CSV".into(),
            ));
        }
        let factors: Vec<String> = cols[idx..first_response].to_vec();
        let responses: Vec<String> = cols[first_response..].to_vec();
        let mut rows = Vec::with_capacity(records.len());
        for record in &records {
            let levels: Vec<u8> = (idx..first_response)
                .map(|j| {
                    match record.get(j).map(str::trim) {
                        Some("0") => Ok(0u8),
                        Some("1") => Ok(1u8),
                        other => Err(DesignError::InvalidInput(format!(
                            "bad level {other:?} in column {}",
                            cols[j]
                        ))),
                    }
                })
                .collect::<Result<_>>()?;
            let values: Vec<f64> = (first_response..cols.len())
                .map(|j| {
                    record
                        .get(j)
                        .unwrap_or("")
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| DesignError::InvalidInput(format!("{}: {e}", cols[j])))
                })
                .collect::<Result<_>>()?;
            rows.push((levels, values));
        }
        Self::new(factors, responses, rows)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec!["run_id".to_string()];
        header.extend(self.factors.iter().cloned());
        header.extend(self.responses.iter().cloned());
        csv.write_record(&header).map_err(|e| DesignError::Csv(e.to_string()))?;
        for (run_id, (levels, values)) in self.rows.iter().enumerate() {
            let mut record = vec![run_id.to_string()];
            record.extend(levels.iter().map(|l| l.to_string()));
            record.extend(values.iter().map(|v| v.to_string()));
            csv.write_record(&record).map_err(|e| DesignError::Csv(e.to_string()))?;
        }
        csv.flush().map_err(|e| DesignError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn response_index(&self, name: &str) -> Result<usize> {
        self.responses.iter().position(|r| r == name).ok_or_else(|| {
            DesignError::InvalidInput(format!(
                "response {name:?} not found; available: {}",
                self.responses.join(", ")
            ))
        })
    }

    pub fn response_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.response_index(name)?;
        Ok(self.rows.iter().map(|(_, values)| values[idx]).collect())
    }
}

/// A dense design matrix in row-major order with its column names.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub names: Vec<String>,
    pub data: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl DesignMatrix {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

/// Encode the coded design matrix: an intercept, one column per main effect
/// and, for the quadratic model, one column per factor pair (products of the
/// coded main-effect columns). Interaction columns are named "A:B" in factor
/// order.
pub fn encode_design_matrix(table: &ResultsTable, coding: Coding, model: Model) -> DesignMatrix {
    let i = table.factors.len();
    let mut names = vec!["(Intercept)".to_string()];
    names.extend(table.factors.iter().cloned());
    if model == Model::Quadratic {
        for a in 0..i {
            for b in (a + 1)..i {
                names.push(format!("{}:{}", table.factors[a], table.factors[b]));
            }
        }
    }
    let cols = names.len();
    let mut data = Vec::with_capacity(table.rows.len() * cols);
    for (levels, _) in &table.rows {
        let coded: Vec<f64> = levels
            .iter()
            .map(|&l| match coding {
                Coding::ZeroOne => l as f64,
                Coding::PlusMinus => 2.0 * l as f64 - 1.0,
            })
            .collect();
        data.push(1.0);
        data.extend(&coded);
        if model == Model::Quadratic {
            for a in 0..i {
                for b in (a + 1)..i {
                    data.push(coded[a] * coded[b]);
                }
            }
        }
    }
    DesignMatrix { names, data, rows: table.rows.len(), cols }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn one_factor_design_has_both_levels() {
        let d = generate_design(&names(&["A"]), 1).unwrap();
        assert_eq!(d.runs, vec![vec![0], vec![1]]);
    }

    #[test]
    fn two_factor_design_enumerates_in_binary_order() {
        let d = generate_design(&names(&["A", "B"]), 1).unwrap();
        assert_eq!(d.runs, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn five_factors_give_32_distinct_rows() {
        let d = generate_design(&names(&["GB", "RRain", "ET", "CLA", "RRC"]), 7).unwrap();
        assert_eq!(d.runs.len(), 32);
        let distinct: BTreeSet<_> = d.runs.iter().cloned().collect();
        assert_eq!(distinct.len(), 32);
        // Row index encodes the level vector (factor 0 = most significant).
        for (r, levels) in d.runs.iter().enumerate() {
            let from_bits: usize =
                levels.iter().fold(0, |acc, &l| (acc << 1) | l as usize);
            assert_eq!(from_bits, r);
        }
    }

    #[test]
    fn run_order_is_a_seeded_permutation() {
        let a = generate_design(&names(&["A", "B", "C"]), 5).unwrap();
        let b = generate_design(&names(&["A", "B", "C"]), 5).unwrap();
        let c = generate_design(&names(&["A", "B", "C"]), 6).unwrap();
        assert_eq!(a.run_order, b.run_order);
        assert_ne!(a.run_order, c.run_order);
        let mut sorted = a.run_order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn bad_factor_lists_are_rejected() {
        assert!(generate_design(&[], 0).is_err());
        assert!(generate_design(&names(&["A", "A"]), 0).is_err());
        assert!(generate_design(&names(&[""]), 0).is_err());
        let too_many: Vec<String> = (0..21).map(|i| format!("F{i}")).collect();
        assert!(generate_design(&too_many, 0).is_err());
    }

    fn small_table() -> ResultsTable {
        let design = generate_design(&names(&["A", "B"]), 3).unwrap();
        let rows = design
            .runs
            .iter()
            .map(|levels| {
                let y = 1.0 + 2.0 * levels[0] as f64 + 3.0 * levels[1] as f64;
                (levels.clone(), vec![y])
            })
            .collect();
        ResultsTable::new(design.factors, names(&["y"]), rows).unwrap()
    }

    #[test]
    fn quadratic_zero_one_row_encoding() {
        let table = small_table();
        let m = encode_design_matrix(&table, Coding::ZeroOne, Model::Quadratic);
        assert_eq!(m.names, vec!["(Intercept)", "A", "B", "A:B"]);
        // Row 00 encodes as (1, 0, ..., 0).
        assert_eq!(&m.data[0..4], &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(&m.data[12..16], &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn five_factor_quadratic_has_16_named_columns() {
        let design = generate_design(&names(&["GB", "RRain", "ET", "CLA", "RRC"]), 7).unwrap();
        let rows = design.runs.iter().map(|l| (l.clone(), vec![0.0])).collect();
        let table = ResultsTable::new(design.factors, names(&["y"]), rows).unwrap();
        let m = encode_design_matrix(&table, Coding::ZeroOne, Model::Quadratic);
        assert_eq!(m.cols, 16);
        assert_eq!(
            m.names,
            vec![
                "(Intercept)",
                "GB",
                "RRain",
                "ET",
                "CLA",
                "RRC",
                "GB:RRain",
                "GB:ET",
                "GB:CLA",
                "GB:RRC",
                "RRain:ET",
                "RRain:CLA",
                "RRain:RRC",
                "ET:CLA",
                "ET:RRC",
                "CLA:RRC"
            ]
        );
    }

    #[test]
    fn plus_minus_full_factorial_is_orthogonal() {
        let design = generate_design(&names(&["A", "B", "C", "D", "E"]), 1).unwrap();
        let rows = design.runs.iter().map(|l| (l.clone(), vec![0.0])).collect();
        let table = ResultsTable::new(design.factors, names(&["y"]), rows).unwrap();
        let m = encode_design_matrix(&table, Coding::PlusMinus, Model::Quadratic);
        let n = m.rows as f64;
        for a in 0..m.cols {
            for b in 0..m.cols {
                let dot: f64 = (0..m.rows).map(|r| m.at(r, a) * m.at(r, b)).sum();
                let expect = if a == b { n } else { 0.0 };
                assert_eq!(dot, expect, "columns {} and {}", m.names[a], m.names[b]);
            }
        }
    }

    #[test]
    fn results_csv_round_trips() {
        let table = small_table();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let parsed = ResultsTable::from_csv(buf.as_slice(), None).unwrap();
        assert_eq!(parsed, table);
    }

    #[test]
    fn manifest_csv_lists_every_run_once() {
        let design = generate_design(&names(&["A", "B", "C"]), 9).unwrap();
        let mut buf = Vec::new();
        design.write_manifest(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "run_id,order,A,B,C");
        let mut orders = BTreeSet::new();
        let mut count = 0;
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            orders.insert(fields[1].parse::<usize>().unwrap());
            count += 1;
        }
        assert_eq!(count, 8);
        assert_eq!(orders, (0..8).collect());
    }

    #[test]
    fn manifest_round_trips_exactly() {
        let design = generate_design(&names(&["GB", "RRain", "ET", "CLA", "RRC"]), 77).unwrap();
        let mut buf = Vec::new();
        design.write_manifest(&mut buf).unwrap();
        // Metadata comment lines are tolerated.
        let with_comment = format!("# seed: 77\n{}", String::from_utf8(buf).unwrap());
        let parsed = Design::read_manifest(with_comment.as_bytes()).unwrap();
        assert_eq!(parsed, design);

        let truncated = "run_id,order,A\n0,0,0\n";
        assert!(Design::read_manifest(truncated.as_bytes()).is_err());
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let rows = vec![(vec![0, 0], vec![1.0]), (vec![0, 0], vec![2.0])];
        assert!(ResultsTable::new(names(&["A", "B"]), names(&["y"]), rows).is_err());
    }

    #[test]
    fn response_lookup_reports_available_names() {
        let table = small_table();
        assert!(table.response_column("y").is_ok());
        let err = table.response_column("z").unwrap_err();
        assert!(err.to_string().contains("available: y"));
    }
}
