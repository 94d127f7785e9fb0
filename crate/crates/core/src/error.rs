use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("cable triple not realizable: bend angle {alpha:.6} rad exceeds limit {limit:.6} rad")]
    Realizability { alpha: f64, limit: f64 },

    #[error("euler kinematics singular at pitch {theta:.6} rad")]
    Singularity { theta: f64 },

    #[error("allocation matrix is ill-conditioned (reciprocal condition {rcond:e})")]
    Conditioning { rcond: f64 },

    #[error("infeasible actuator demand: {0}")]
    Infeasible(String),

    #[error("locked nozzle configuration is singular (normalized det {det:e})")]
    SingularConfig { det: f64 },

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("mode switch rejected: {0}")]
    SwitchRejected(String),

    #[error("simulation diverged at t = {t:.4} s (state norm {norm:e})")]
    Divergence { t: f64, norm: f64 },

    #[error("at t = {t:.4} s: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// Short machine-readable category used by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Realizability { .. } => "realizability",
            Error::Singularity { .. } => "singularity",
            Error::Conditioning { .. } => "conditioning",
            Error::Infeasible(_) => "infeasible",
            Error::SingularConfig { .. } => "singular-config",
            Error::Unreachable(_) => "unreachable",
            Error::SwitchRejected(_) => "switch-rejected",
            Error::Divergence { .. } => "divergence",
            Error::AtTime { source, .. } => source.category(),
            Error::Scenario(_) => "scenario",
        }
    }

    pub(crate) fn at(self, t: f64) -> Error {
        match self {
            e @ (Error::AtTime { .. } | Error::Divergence { .. }) => e,
            e => Error::AtTime {
                t,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
