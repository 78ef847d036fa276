use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` requires parameter `{param}`")]
    MissingParameter { symbol: String, param: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("flow blew up at t = {t_event}: {diagnostic}")]
    BlowUp { t_event: f64, diagnostic: String },
    #[error("point (x = {x:?}, t = {t}) lies on a caustic")]
    AtCaustic { x: Vec<f64>, t: f64 },
    #[error("grid under-resolved: {0}")]
    UnderResolved(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
