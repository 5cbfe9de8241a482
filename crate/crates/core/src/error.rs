use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Rotor speed fell to or below the guard speed; aerodynamic torque and
    /// tracking torque are undefined there.
    #[error("rotor stopped: speed {speed:.4} rad/s is at or below guard {guard} rad/s")]
    RotorStopped { speed: f64, guard: f64 },

    #[error("calibrated cp_max {cp_max:.5} outside the accepted range (0.40, 0.55)")]
    CalibrationOutOfRange { cp_max: f64 },

    #[error("greedy power-vs-speed map is not monotone near {power:.1} W")]
    NonMonotonicCurve { power: f64 },

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative farm reference {0} W")]
    NegativeReference(f64),

    #[error("unknown case id {0} (valid: 0..=4)")]
    UnknownCase(u8),

    #[error("evaluation window is empty: {records} records, window starts at {start} s")]
    WindowTooShort { records: usize, start: f64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A model or controller error raised while advancing the simulation.
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                step,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from invalid user configuration rather than a
    /// failure while running the model.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::UnknownCase(_)
                | Error::CalibrationOutOfRange { .. }
                | Error::NonMonotonicCurve { .. }
        )
    }
}
