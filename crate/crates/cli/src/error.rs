use crate::lowess::LowessError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("column `{0}` not found in the data header")]
    MissingColumn(String),

    #[error("line {line}: column `{column}` has non-numeric value `{value}`")]
    NonNumericCell { line: u64, column: String, value: String },

    #[error("no rows left after dropping {rejected} rows with missing cells")]
    EmptyAfterFiltering { rejected: usize },

    #[error("column `{column}`: declared categories not observed: {}", categories.join(", "))]
    UnobservedCategory { column: String, categories: Vec<String> },

    #[error("line {line}: column `{column}` has undeclared category `{value}`")]
    UnknownCategory { line: u64, column: String, value: String },

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Lowess(#[from] LowessError),

    #[error(transparent)]
    Model(#[from] mixassoc::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for data problems,
    /// 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingColumn(_) => 2,
            CliError::Lowess(LowessError::DegenerateWindow { .. }) => 4,
            CliError::Lowess(_) => 3,
            CliError::Model(e) if e.is_numerical() => 4,
            CliError::Model(
                mixassoc::Error::InvalidSpec(_) | mixassoc::Error::InvalidConfig(_) | mixassoc::Error::InvalidAlpha(_),
            ) => 2,
            _ => 3,
        }
    }
}
