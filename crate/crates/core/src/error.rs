use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("N_{nu}({z}) overflows the f64 range")]
    NeumannOverflow { nu: f64, z: f64 },

    #[error("asymptotic regime not reached: order {nu} must exceed e*max(x,y)/2 = {required}")]
    AsymptoticRegime { nu: f64, required: f64 },

    #[error(
        "angular momentum sum not converged at l = {l}: tail estimate {tail:e} vs partial sum {partial:e}"
    )]
    SeriesNonConvergence { l: u32, tail: f64, partial: f64 },

    #[error(
        "quadrature did not converge: best estimate {estimate:e}, achieved error {achieved:e}, requested {requested:e}"
    )]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::Domain {
            what,
            requirement,
            value,
        }
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(what, "finite and > 0", value))
    }
}
