//! CSV ingestion.

use crate::config::{AnalysisConfig, Kind};
use crate::error::{CliError, Result};
use mixassoc::{Covariates, ModelSpec, OutcomeKind, PairData};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub column: String,
    pub spec: ModelSpec,
    /// Continuous values, binary `0/1` or ordinal `1..=J` codes.
    pub y: Vec<f64>,
    /// Category labels in code order (discrete outcomes only).
    pub levels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadedData {
    pub outcomes: Vec<Outcome>,
    pub covariate_names: Vec<String>,
    pub covariates: Covariates,
    /// Line numbers (1-based, header = 1) of rows dropped for missing cells.
    pub rejected_lines: Vec<u64>,
}

impl LoadedData {
    pub fn n(&self) -> usize {
        self.covariates.nrows()
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<PairData> {
        Ok(PairData::new(
            self.outcomes[i].y.clone(),
            self.outcomes[j].y.clone(),
            self.covariates.clone(),
        )?)
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null")
}

fn parse_number(line: u64, column: &str, cell: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::NonNumericCell {
            line,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

/// Observed labels ordered numerically if they all parse, lexically otherwise.
fn sorted_labels(cells: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = cells.iter().collect();
    let mut labels: Vec<String> = distinct.into_iter().cloned().collect();
    let numeric: Option<Vec<f64>> = labels.iter().map(|l| l.parse::<f64>().ok().filter(|v| v.is_finite())).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(f64, String)> = values.into_iter().zip(labels).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        labels = paired.into_iter().map(|(_, l)| l).collect();
    }
    labels
}

fn encode_discrete(
    column: &str,
    kind: Kind,
    declared: Option<&Vec<String>>,
    cells: &[String],
    lines: &[u64],
) -> Result<(Vec<f64>, Vec<String>)> {
    let levels = match declared {
        Some(levels) => {
            let observed: BTreeSet<&String> = cells.iter().collect();
            let missing: Vec<String> = levels.iter().filter(|l| !observed.contains(l)).cloned().collect();
            if !missing.is_empty() {
                return Err(CliError::UnobservedCategory {
                    column: column.to_string(),
                    categories: missing,
                });
            }
            levels.clone()
        }
        None => sorted_labels(cells),
    };
    if kind == Kind::Binary && levels.len() != 2 {
        return Err(CliError::Data(format!(
            "column `{column}`: a binary outcome needs 2 levels, found {}",
            levels.len()
        )));
    }
    let index: BTreeMap<&String, usize> = levels.iter().enumerate().map(|(k, l)| (l, k)).collect();
    let offset = if kind == Kind::Binary { 0.0 } else { 1.0 };
    let codes = cells
        .iter()
        .zip(lines)
        .map(|(c, &line)| match index.get(c) {
            Some(&k) => Ok(k as f64 + offset),
            None => Err(CliError::UnknownCategory {
                line,
                column: column.to_string(),
                value: c.clone(),
            }),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((codes, levels))
}

/// Loads the configured columns. Rows with a missing cell in any used column
/// are dropped and their line numbers recorded.
pub fn load_dataset(csv_path: &Path, config: &AnalysisConfig) -> Result<LoadedData> {
    let file = std::fs::File::open(csv_path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", csv_path.display())))?;
    read_dataset(file, config)
}

pub fn read_dataset<R: std::io::Read>(reader: R, config: &AnalysisConfig) -> Result<LoadedData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
    let position = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    };
    let names: Vec<&str> = config
        .outcomes
        .iter()
        .map(|o| o.column.as_str())
        .chain(config.covariates.iter().map(String::as_str))
        .collect();
    let cols = names.iter().map(|n| position(n)).collect::<Result<Vec<usize>>>()?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); cols.len()];
    let mut lines = Vec::new();
    let mut rejected_lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row: Vec<&str> = cols.iter().map(|&c| record.get(c).unwrap_or("")).collect();
        if row.iter().any(|c| is_missing(c)) {
            rejected_lines.push(line);
            continue;
        }
        for (store, cell) in cells.iter_mut().zip(row) {
            store.push(cell.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(CliError::EmptyAfterFiltering {
            rejected: rejected_lines.len(),
        });
    }

    let mut outcomes = Vec::with_capacity(config.outcomes.len());
    for (oc, column) in config.outcomes.iter().zip(&cells) {
        let (y, levels) = match oc.kind {
            Kind::Continuous => {
                let y = column
                    .iter()
                    .zip(&lines)
                    .map(|(c, &l)| parse_number(l, &oc.column, c))
                    .collect::<Result<Vec<f64>>>()?;
                (y, None)
            }
            kind => {
                let (codes, levels) = encode_discrete(&oc.column, kind, oc.levels.as_ref(), column, &lines)?;
                (codes, Some(levels))
            }
        };
        let spec = oc.spec(levels.as_ref().map_or(0, Vec::len))?;
        outcomes.push(Outcome {
            column: oc.column.clone(),
            spec,
            y,
            levels,
        });
    }
    let k = config.outcomes.len();
    let columns = config
        .covariates
        .iter()
        .zip(&cells[k..])
        .map(|(name, column)| {
            column
                .iter()
                .zip(&lines)
                .map(|(c, &l)| parse_number(l, name, c))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let covariates = if columns.is_empty() {
        Covariates::empty(lines.len())
    } else {
        Covariates::from_columns(&columns)?
    };
    Ok(LoadedData {
        outcomes,
        covariate_names: config.covariates.clone(),
        covariates,
        rejected_lines,
    })
}

/// Writes the loaded columns back out, discrete outcomes as their labels.
pub fn write_dataset<W: std::io::Write>(data: &LoadedData, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = data
        .outcomes
        .iter()
        .map(|o| o.column.as_str())
        .chain(data.covariate_names.iter().map(String::as_str))
        .collect();
    let io = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(&header).map_err(io)?;
    for i in 0..data.n() {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        for o in &data.outcomes {
            row.push(match &o.levels {
                Some(levels) => {
                    let offset = if o.spec.outcome == OutcomeKind::Binary { 0 } else { 1 };
                    levels[o.y[i] as usize - offset].clone()
                }
                None => format_float(o.y[i]),
            });
        }
        row.extend(data.covariates.row(i).iter().map(|&v| format_float(v)));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(e.to_string()))
}

/// Shortest representation that parses back to the same value.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}
