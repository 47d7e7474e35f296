use thiserror::Error;

/// Errors produced by the solvers and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} is outside the evaluable domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial history: {0}")]
    InvalidHistory(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("kappa1*kappa2 == alpha1*alpha2: the coexistence equilibrium is not isolated")]
    MarginalCase,

    #[error("root count inconclusive (winding residue {residue:.3})")]
    Inconclusive { residue: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::OutOfDomain { .. }
                | Error::InvalidParams(_)
                | Error::InvalidHistory(_)
                | Error::Config(_)
                | Error::MarginalCase
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
