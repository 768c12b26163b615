use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("grid dimensions differ: {left:?} vs {right:?}")]
    DimsMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("no centerline")]
    NoCenterline,

    #[error("no eligible cells in radius class {0}")]
    NoEligibleCells(usize),

    #[error("step sizes violate convergence condition: 1/tau - sigma*|L|^2 = {margin:.6} < 0")]
    StepSizes { margin: f64 },

    #[error("reconnector contract: {0}")]
    ReconnectorContract(String),

    #[error("divergence: non-finite primal values at iteration {0}")]
    Divergence(usize),

    #[error("degenerate image: intensities are constant")]
    DegenerateImage,

    #[error("empty surface: {0} mask has no foreground")]
    EmptySurface(&'static str),

    #[error("model load: {0}")]
    ModelLoad(String),

    #[error("model signature: {0}")]
    ModelSignature(String),

    #[error("model output: {0}")]
    ModelOutput(String),

    #[error("malformed config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("unsupported format: {0}")]
    Format(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
