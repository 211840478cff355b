//! Ensemble functionals, their variational derivatives and the hybrid
//! Poisson bracket
//!
//! `{A, B} = int [dA/dP dB/dS - dA/dS dB/dP] dz`
//!
//! evaluated on a [`GridState`](crate::grid::GridState).

mod bracket;
mod functional;
mod observable;
mod operator;
mod poly;

pub use bracket::{
    bracket_from_gradients, factorization_probe, hybrid_bracket, hybrid_bracket_with, separability_probe,
    BracketForm, BracketResult,
};
pub use functional::{
    classical_functional, ensemble_hamiltonian_value, functional_gradients, functional_gradients_with,
    quantum_functional, FunctionalGradient, HERMITICITY_TOL,
};
pub use observable::{Kind, ObservableSpec, Primitive, Term};
pub use poly::{Exponents, Poly};
