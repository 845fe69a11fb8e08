use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: domain error: {msg}")]
    Domain { module: &'static str, msg: String },
    #[error("{module}: precondition failed: {msg}")]
    Precondition { module: &'static str, msg: String },
    #[error("{module}: no convergence: {msg} (residual {residual:.3e})")]
    Convergence {
        module: &'static str,
        msg: String,
        residual: f64,
    },
    #[error("{module}: ill-conditioned: {msg}")]
    Conditioning { module: &'static str, msg: String },
    #[error("{module}: truncation: {msg}")]
    Truncation { module: &'static str, msg: String },
    #[error("{module}: geometry: {msg}")]
    Geometry { module: &'static str, msg: String },
    #[error("{module}: path: {msg}")]
    Path { module: &'static str, msg: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { module, msg: msg.into() }
    }
    pub fn precondition(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition { module, msg: msg.into() }
    }
    pub fn convergence(module: &'static str, msg: impl Into<String>, residual: f64) -> Self {
        Error::Convergence { module, msg: msg.into(), residual }
    }
    pub fn conditioning(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Conditioning { module, msg: msg.into() }
    }
    pub fn geometry(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Geometry { module, msg: msg.into() }
    }
    pub fn path(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Path { module, msg: msg.into() }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
