use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A target lies inside the admissible range but cannot be reached with
    /// double-precision error probabilities.
    #[error("{name} = {value} cannot be reached: {reason}")]
    Unreachable {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid simulation config: {0}")]
    Config(String),

    /// Some simulated paths never left the continuation region.
    #[error("{capped} of {paths} paths hit the time cap {max_time}")]
    Capped {
        capped: u64,
        paths: u64,
        max_time: f64,
    },

    #[error("grid shape {grid} does not fit verifier {verifier}")]
    GridShape {
        verifier: &'static str,
        grid: &'static str,
    },

    #[error("empty grid")]
    EmptyGrid,

    /// A grid point fell outside a verifier's domain.
    #[error("{verifier} failed at {point}: {source}")]
    ScanPoint {
        verifier: &'static str,
        point: String,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
