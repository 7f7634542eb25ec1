use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order mismatch: Q(zeta_{left}) vs Q(zeta_{right})")]
    OrderMismatch { left: u32, right: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("{0}")]
    Precondition(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("budget exceeded: {base}^{exponent} terms, budget is 2^{budget}")]
    BudgetExceeded {
        base: usize,
        exponent: usize,
        budget: u32,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Log2 bound on the number of terms a single brute-force enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u32);

impl Default for Budget {
    fn default() -> Self {
        Budget(24)
    }
}

impl Budget {
    /// Checks that `base^exponent` terms fit; returns the count when they do.
    pub fn admit(self, base: usize, exponent: usize) -> Result<u128> {
        let limit = 1u128 << self.0.min(127);
        let count = u32::try_from(exponent)
            .ok()
            .and_then(|e| (base as u128).checked_pow(e))
            .filter(|&c| c <= limit);
        count.ok_or(Error::BudgetExceeded {
            base,
            exponent,
            budget: self.0,
        })
    }
}
