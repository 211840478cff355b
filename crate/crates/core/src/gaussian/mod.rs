//! Exact phase-space backend.
//!
//! All Gaussian quantities are expressed in the canonical ordering
//! `(q, p, q', p', x, k)` with symmetrized second moments
//! `V_ij = <{r_i - <r_i>, r_j - <r_j>}> / 2`.

mod chsh;
mod entanglement;
mod hamiltonian;
mod state;
mod symplectic;
mod tomography;

pub use chsh::{chsh_displaced_parity, optimize_chsh, parity_correlation, ChshSettings, CHSH_START_GRID};
pub use entanglement::{logarithmic_negativity, symplectic_eigenvalues, witness_expectation};
pub use hamiltonian::{build_hamiltonian, QuadraticHamiltonian, Variant};
pub use state::{symplectic_form, ModeParams, PhaseSpaceState};
pub use symplectic::{closed_form_propagator, evolve_gaussian, symplectic_propagator, SymplecticMatrix};
pub use tomography::{
    mediator_moment_inversion, probe_sample, simulate_probe_series, MediatorEstimate, ProbeSample,
    ProbeSeries,
};
