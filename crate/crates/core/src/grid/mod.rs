//! Split-operator backend on a uniform periodic grid over `(q, q', x)`.
//!
//! Amplitudes are stored row-major with axis order `q, q', x` (the `x`
//! index is contiguous). Derivatives are spectral; the Nyquist mode is
//! dropped so the discrete derivative is exactly skew-adjoint.

mod ensemble;
mod evolve;
mod moments;
mod spec;
mod spectral;
mod state;

pub use ensemble::{to_ensemble, EnsembleRepresentation, DEFAULT_SUPPORT_THRESHOLD};
pub use evolve::{split_step_evolve, stability_phase};
pub use moments::{grid_moments, momentum_marginal, GridMoments, MomentumMarginal};
pub use spec::{Axis, GridSpec};
pub use spectral::{fixed_order_sum, SpectralOps};
pub use state::{init_product_gaussian, GridState};
