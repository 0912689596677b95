use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum HistoryError {
    #[error("history query t={t} outside recorded range [0, {max}]")]
    OutOfRange { t: f64, max: f64 },
}
