use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary: max |U^H U - I| = {deviation:.3e} exceeds {tol:.1e}")]
    NotUnitary { deviation: f64, tol: f64 },

    /// A requested phase needs more voltage than the actuator may be driven with.
    #[error("actuator {actuator}: required {required:.4} V exceeds compliance limit {limit:.4} V")]
    Range {
        actuator: String,
        required: f64,
        limit: f64,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("device error ({context}): {source}")]
    Device {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub(crate) fn device(context: impl Into<String>, source: Error) -> Self {
        Error::Device {
            context: context.into(),
            source: Box::new(source),
        }
    }

    /// Process exit code used by the command-line tool: 2 for validation
    /// problems, 3 for fit and data problems, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::NotUnitary { .. }
            | Error::Range { .. }
            | Error::Json(_) => 2,
            Error::Fit(_) | Error::Data(_) => 3,
            Error::Device { source, .. } => source.exit_code(),
            Error::Io(_) => 1,
        }
    }
}
