//! Synthetic data generators and the comparison methods used in the
//! simulation studies.

mod baseline;
mod power;
mod wellbeing;

pub use baseline::{coef_change_baseline, lrt_partial, Direction, LrtResult};
pub use power::{
    default_lambda_grid, gen_power, ordinal_spec_for, power_grid, proposed_test, run_power_cell,
    run_power_study, EtaShape, Method, PowerOptions, PowerRow, PowerScenario,
};
pub use wellbeing::{gen_wellbeing, CovariateGen, WellbeingScenario};

use crate::data::encode_ordinal;
use crate::error::Result;

/// Re-encodes ordinal codes to `1..=J_observed`, dropping empty categories.
/// Returns the codes and the number of observed levels.
pub fn observed_levels(codes: &[f64]) -> Result<(Vec<f64>, usize)> {
    let (recoded, levels) = encode_ordinal(codes)?;
    Ok((recoded, levels.len()))
}
