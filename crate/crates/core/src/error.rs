use std::fmt;

use thiserror::Error;

use crate::instance::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", ViolationList(.0))]
    Invalid(Vec<Violation>),

    #[error("non-finite utility at zone {zone}, location {location}")]
    NonFiniteUtility { zone: usize, location: usize },

    #[error("competitor utilities vanish at zone {zone}")]
    VanishingCompetitors { zone: usize },

    #[error("invalid choice model: {0}")]
    InvalidModel(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown zone {0}")]
    UnknownZone(usize),

    #[error("enumeration needs {count} subsets, above the cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },

    #[error("time budget exhausted before a feasible solution was found")]
    BudgetExhausted,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
