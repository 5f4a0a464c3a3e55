use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("truncation insufficient: {0}")]
    Truncation(String),

    #[error("ambiguous sector classification for eigenstate {index}: mu population {mu_population:e}")]
    Classification { index: usize, mu_population: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("singular synthesis: coefficient {name} = {value:e} is too small")]
    SingularSynthesis { name: String, value: f64 },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("zero norm: {0}")]
    ZeroNorm(String),

    #[error("time {t} ns outside schedule [0, {t_f}] ns")]
    Range { t: f64, t_f: f64 },

    #[error("integrator failure at t = {t} ns: step {step:e} ns underflowed after {steps} steps")]
    StiffFailure { t: f64, step: f64, steps: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("RWA check failed: {0}")]
    Rwa(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),
}
