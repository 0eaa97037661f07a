//! Synthetic datasets and power studies as CSV tables.

use crate::dataset::format_float;
use crate::error::{CliError, Result};
use mixassoc::simgen::{gen_power, gen_wellbeing, PowerRow, PowerScenario, WellbeingScenario};
use mixassoc::{PairData, RngStream};
use std::io::Write;

pub const WELLBEING_COVARIATES: [&str; 6] = ["strain", "health", "loneliness", "accommodation", "age", "gender"];

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(format!("write failed: {e}"))
}

fn write_pair<W: Write>(pair: &PairData, names: &[&str], w: W) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(names).map_err(csv_err)?;
    for (i, x) in pair.x.rows().enumerate() {
        let mut row = vec![format_float(pair.y1[i]), format_float(pair.y2[i])];
        row.extend(x.iter().map(|&v| format_float(v)));
        c.write_record(&row).map_err(csv_err)?;
    }
    c.flush().map_err(|e| CliError::Data(e.to_string()))
}

/// Columns `wellbeing, anxiety` and the six risk factors.
pub fn write_wellbeing<W: Write>(sc: &WellbeingScenario, seed: u64, w: W) -> Result<()> {
    if sc.covariates.len() != WELLBEING_COVARIATES.len() {
        return Err(CliError::Config(format!(
            "the well-being table has {} risk factors, scenario has {}",
            WELLBEING_COVARIATES.len(),
            sc.covariates.len()
        )));
    }
    let pair = gen_wellbeing(sc, &RngStream::new(seed))?;
    let mut names = vec!["wellbeing", "anxiety"];
    names.extend(WELLBEING_COVARIATES);
    write_pair(&pair, &names, w)
}

/// Columns `y1, y2, x1, x2`.
pub fn write_power_dataset<W: Write>(sc: &PowerScenario, seed: u64, w: W) -> Result<()> {
    let pair = gen_power(sc, &RngStream::new(seed))?;
    write_pair(&pair, &["y1", "y2", "x1", "x2"], w)
}

pub fn write_power_rows<W: Write>(rows: &[PowerRow], w: W) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["scenario_id", "lambda", "shape", "method", "rejection_rate", "reps", "seed"])
        .map_err(csv_err)?;
    for r in rows {
        c.write_record([
            r.scenario_id.to_string(),
            format_float(r.lambda),
            r.shape.name().to_string(),
            r.method.name().to_string(),
            format_float(r.rejection_rate),
            r.reps.to_string(),
            r.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    c.flush().map_err(|e| CliError::Data(e.to_string()))
}
