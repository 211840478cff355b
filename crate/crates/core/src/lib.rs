//! Numerical laboratory for hybrid quantum-classical ensembles.
//!
//! Three probes share the configuration space `z = (q, q', x)`: two quantum
//! systems `Q`, `Q'` and a mediator `C`. The crate provides
//!
//! * [`gaussian`]: an exact phase-space backend for the quadratic coupling
//!   `g1 p x + g2 q' k` (symplectic propagation, logarithmic negativity,
//!   the `q p' + q' p` witness, displaced-parity CHSH, mediator tomography);
//! * [`grid`]: a split-operator FFT backend evolving `psi(q, q', x)` and
//!   exposing the ensemble pair `(P, grad S)`;
//! * [`brackets`]: classical and quantum ensemble functionals, their
//!   variational derivatives and the hybrid Poisson bracket built on them.

pub mod brackets;
mod error;
pub mod gaussian;
pub mod grid;

pub use error::{Error, Result};

/// Index of each physical subsystem; phase-space vectors are ordered
/// `(q, p, q', p', x, k)`, i.e. mode `m` owns entries `2m` and `2m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Q,
    QPrime,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Q, Mode::QPrime, Mode::C];

    pub fn index(self) -> usize {
        match self {
            Mode::Q => 0,
            Mode::QPrime => 1,
            Mode::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Mode> {
        Mode::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Q => "Q",
            Mode::QPrime => "Q'",
            Mode::C => "C",
        }
    }
}
