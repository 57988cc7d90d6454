use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("storage unit {unit}: energy {x} outside [{x_min}, {x_max}]")]
    StateViolation {
        unit: usize,
        x: f64,
        x_min: f64,
        x_max: f64,
    },

    /// No value of `rho` balances the grid: the demand lies outside the
    /// aggregate saturation range of the committed units.
    #[error("power balance infeasible: demand {demand} outside [{min}, {max}]")]
    Infeasible { demand: f64, min: f64, max: f64 },

    /// A commitment plan failed a scenario rollout.
    #[error("plan infeasible at horizon step {step} in scenario {scenario}: demand {demand} outside [{min}, {max}]")]
    PlanInfeasible {
        step: usize,
        scenario: usize,
        demand: f64,
        min: f64,
        max: f64,
    },

    #[error("no commitment plan is feasible for every scenario")]
    NoFeasiblePlan,

    /// A closed-loop run failed while planning or applying step `step`.
    #[error("closed-loop step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: row {row}: {msg}")]
    Parse {
        path: PathBuf,
        row: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that mean the grid cannot be balanced, as opposed to
    /// malformed input.
    pub fn is_infeasibility(&self) -> bool {
        match self {
            Error::AtStep { source, .. } => source.is_infeasibility(),
            other => matches!(
                other,
                Error::Infeasible { .. } | Error::PlanInfeasible { .. } | Error::NoFeasiblePlan
            ),
        }
    }
}
