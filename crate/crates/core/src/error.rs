use std::io;

use crate::Mode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("state violates the uncertainty principle (min eigenvalue of V + i(hbar/2)Omega is {0:e})")]
    NonPhysical(f64),
    #[error("expected a {expected}-mode state, got {found} modes")]
    ModeCount { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("domain too small on axis {axis}: half-width {half_width} < required {required}")]
    DomainTooSmall {
        axis: usize,
        half_width: f64,
        required: f64,
    },
    #[error("axis {axis} under-resolved: Nyquist wavenumber {max_wavenumber} < required {required}")]
    Underresolved {
        axis: usize,
        max_wavenumber: f64,
        required: f64,
    },
    #[error("time step {dt} exceeds the stability bound {bound} (per-step phase {phase:.3} > pi)")]
    Stability { dt: f64, bound: f64, phase: f64 },
    #[error("observable kind mismatch: expected {expected} observable")]
    KindMismatch { expected: &'static str },
    #[error("operator term `{0}` is not Hermitian as written; wrap it in sym(...)")]
    NonHermitian(String),
    #[error("observable touches mode {0:?}, which overlaps the other operand")]
    SupportOverlap(Mode),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}
