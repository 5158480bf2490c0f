use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("piece {index} is empty or reversed: [{a}, {b}]")]
    InvalidPiece { index: usize, a: f64, b: f64 },
    #[error("piece {index} overlaps its predecessor (starts at {a}, previous ends at {prev_b})")]
    OverlappingPieces { index: usize, a: f64, prev_b: f64 },
    #[error("piece {index} has negative density {density}")]
    NegativeDensity { index: usize, density: f64 },
    #[error("total mass is {mass}, expected 1")]
    MassNotOne { mass: f64 },
    #[error("value {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("critical distance is zero: the two measures coincide")]
    DegenerateCritical,
    #[error("component {index}: source mass {source_mass} differs from target mass {target_mass}")]
    MassMismatch { index: usize, source_mass: f64, target_mass: f64 },
    #[error("atom ({x}, {y}) has displacement {displacement} above the band {lambda}")]
    BandViolation { x: f64, y: f64, displacement: f64, lambda: f64 },
    #[error("marginal mismatch in {what}: discrepancy {discrepancy}")]
    MarginalMismatch { what: String, discrepancy: f64 },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("sample sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("problem size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("no perfect matching within band {lambda}")]
    Infeasible { lambda: f64 },
    #[error("no positive witness found (best value {best_value})")]
    NoWitnessFound { best_value: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot parse {0}")]
    Parse(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by unreadable or malformed input, as opposed to
    /// a mathematical check failing.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Io(_)
                | Error::InvalidPiece { .. }
                | Error::OverlappingPieces { .. }
                | Error::NegativeDensity { .. }
                | Error::MassNotOne { .. }
                | Error::DomainError { .. }
                | Error::Invalid(_)
        )
    }
}
