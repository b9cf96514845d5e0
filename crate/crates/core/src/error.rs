use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("eigensolver did not converge (achieved residual {residual:.3e})")]
    EigenNonConvergence { residual: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no bound state: lowest eigenvalue of -Δ+V is {lowest:.6e} >= 0")]
    NoBoundState { lowest: f64 },

    #[error("spectral gap violated: g = {gap:.6e} at eps = {eps} (sector l = {sector})")]
    GapViolated { gap: f64, eps: f64, sector: usize },

    #[error("no admissible lambda: s1^2 = {s1_sq:.6e} at h = {h}")]
    Inadmissible { s1_sq: f64, h: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("f0 underflows at r = {r:.4} inside the support of psi*")]
    DivisionRegion { r: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        what: String,
        iterations: usize,
        residual: f64,
    },
}

impl Error {
    /// Numerical failures (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenNonConvergence { .. }
                | Error::NotConverged { .. }
                | Error::DegenerateFit(_)
                | Error::NoSignChange { .. }
                | Error::Inadmissible { .. }
        )
    }
}
