use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),

    #[error("not of finite type: principal minor on rows {rows:?} equals {value}")]
    NotFiniteType { rows: Vec<usize>, value: i128 },

    #[error("rank {rank} exceeds the configured limit {limit}")]
    RankLimit { rank: usize, limit: usize },

    #[error("not integral: {0}")]
    Integrality(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} budget of {limit} exceeded (reached {reached})")]
    Budget {
        what: &'static str,
        limit: usize,
        reached: usize,
    },

    #[error("tau is outside the convergence region: {0}")]
    Domain(String),

    #[error("exact evaluation of a fractional power of tau_{index} needs its root")]
    MissingRoot { index: usize },

    #[error("function is not harmonic: worst row defect {defect} at state {state}")]
    NotHarmonic { state: String, defect: String },

    #[error("state set is not closed under one step; missing {missing:?}")]
    NotClosed { missing: Vec<String> },

    #[error("integrity check failed: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
