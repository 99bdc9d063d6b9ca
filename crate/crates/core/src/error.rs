use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point does not belong to the space it was paired with.
    #[error("type error: {0}")]
    Type(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    /// A one-sided limit did not settle along the step schedule.
    #[error("limit not resolved at t = {t} ({side} side)")]
    LimitNotResolved { t: f64, side: Side },

    /// Running variation exceeded the blow-up bound.
    #[error("not of bounded variation on [{lo}, {hi}]: running value exceeded {bound:e}")]
    NotBoundedVariation { lo: f64, hi: f64, bound: f64 },

    #[error("numeric inconsistency: {0}")]
    Inconsistency(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}
