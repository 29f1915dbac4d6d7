use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph must contain at least one site")]
    EmptyGraph,
    #[error("site {site} is outside 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("self-coupling on site {0}")]
    SelfPair(usize),
    #[error("pair ({0}, {1}) listed more than once")]
    DuplicatePair(usize, usize),
    #[error("coupling between {i} and {j} must be strictly positive, got {value}")]
    NonPositiveCoupling { i: usize, j: usize, value: f64 },
    #[error("field on site {site} must be finite and non-negative, got {value}")]
    InvalidField { site: usize, value: f64 },
    #[error("{what} must be finite and non-negative, got {value}")]
    InvalidTime { what: &'static str, value: f64 },
    #[error("value outside its domain: {0}")]
    Domain(String),
    #[error("{n_sites} sites exceed the brute-force limit of {limit}")]
    TooLarge { n_sites: usize, limit: usize },
    #[error("Bessel evaluation outside supported range: order {order}, argument {arg}")]
    BesselRange { order: usize, arg: f64 },
    #[error("Bessel series truncated too early: first dropped term {0:e}")]
    Truncation(f64),
    #[error("search configuration: {0}")]
    Search(String),
    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
