use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input is outside the domain where the model is defined.
    #[error("{quantity} = {value} violates {bound}")]
    Domain {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("trajectory does not cross the beam edge: {0}")]
    NoCrossing(&'static str),

    #[error("numerical failure: {reason} (estimate {estimate:e}, error {error:e})")]
    Numeric {
        reason: &'static str,
        estimate: f64,
        error: f64,
    },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, bound: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            bound,
        }
    }
}

/// Returns a domain error unless `ok` holds.
pub(crate) fn ensure(ok: bool, quantity: &'static str, value: f64, bound: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::domain(quantity, value, bound))
    }
}
