use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field does not decay: |rho({xi})| = {value:.3e} exceeds {tolerance:.1e}")]
    DecayViolated { xi: f64, value: f64, tolerance: f64 },

    #[error("xi = {xi} lies outside the grid [{lo}, {hi}]")]
    OutOfGrid { xi: f64, lo: f64, hi: f64 },

    #[error(
        "total integral {total} is not quantized: |I/pi - n| = {distance:.3e} > {tolerance:.1e}"
    )]
    NotQuantized {
        total: f64,
        distance: f64,
        tolerance: f64,
    },

    #[error("support escapes the grid after a shift of {shift}")]
    SupportEscaped { shift: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("singular reflectionless system at xi = {xi}")]
    SingularSystem { xi: f64 },

    #[error("monodromy at lambda = 0 deviates from +-1 by {deviation:.3e}")]
    ParityUndefined { deviation: f64 },

    #[error("spectral integration at lambda = {lambda} does not converge: {reason}")]
    Integration { lambda: String, reason: String },

    #[error("eigenvalue search failed: {0}")]
    EigenvalueSearch(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("point (xi0, xi1) = ({xi0}, {xi1}) is a cusp (|cos theta| = {cos:.3e})")]
    CuspPoint { xi0: f64, xi1: f64, cos: f64 },

    #[error("cusp on the window boundary near (xi+, xi-) = ({plus}, {minus})")]
    CuspOnBoundary { plus: f64, minus: f64 },

    #[error(
        "F_J = {f_j:.3e} vanishes, Omega is undefined (off-shell residual P^2 = {p_squared:.6e})"
    )]
    OmegaUndefined { f_j: f64, p_squared: f64 },

    #[error("cusp root at the grid edge (xi0 = {xi0}, xi1 = {xi1})")]
    RootAtEdge { xi0: f64, xi1: f64 },

    #[error("cusp continuation failed at xi0 = {xi0}: {reason}")]
    Continuation { xi0: f64, reason: String },

    #[error("braid: {0}")]
    Braid(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// Input problems (bad parameters, files, schemas) as opposed to numerical
    /// failures. The CLI maps these to exit code 2, everything else to 3.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidSpectrum(_)
                | Error::GridMismatch(_)
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::Scenario(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
