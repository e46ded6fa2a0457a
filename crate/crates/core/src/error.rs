use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("propagation produced non-finite values at t = {time:e} s")]
    Propagation { time: f64 },

    #[error("axis: {0}")]
    InvalidAxis(String),

    #[error("grid too coarse: {0}")]
    CoarseGrid(String),

    #[error("no unique steady state: {0}")]
    SteadyState(String),

    #[error("linear solve failed: {0}")]
    Singular(String),

    #[error("vanishing emitted power ({power:e}); indistinguishability undefined")]
    VanishingPower { power: f64 },

    #[error("field grid: {0}")]
    FieldGrid(String),

    #[error("position {0:?} lies outside the field grid")]
    OutsideDomain([f64; 3]),

    #[error("signal: {0}")]
    Signal(String),

    #[error("spectra do not overlap: {0}")]
    DisjointRanges(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier of the failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::InvalidState(_) => "invalid_state",
            Error::Propagation { .. } => "propagation",
            Error::InvalidAxis(_) => "invalid_axis",
            Error::CoarseGrid(_) => "coarse_grid",
            Error::SteadyState(_) => "steady_state",
            Error::Singular(_) => "singular",
            Error::VanishingPower { .. } => "vanishing_power",
            Error::FieldGrid(_) => "field_grid",
            Error::OutsideDomain(_) => "outside_domain",
            Error::Signal(_) => "signal",
            Error::DisjointRanges(_) => "disjoint_ranges",
            Error::Format { .. } => "format",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
