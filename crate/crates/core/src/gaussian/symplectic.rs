use nalgebra::DMatrix;

use super::hamiltonian::QuadraticHamiltonian;
use super::state::{symplectic_form, PhaseSpaceState};
use crate::{Error, Result};

/// Linear canonical map `r(t) = S r(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let s = SymplecticMatrix(entries);
        let err = s.symplectic_error();
        if !(err <= 1e-10) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic (max |S^T Omega S - Omega| = {err:e})"
            )));
        }
        Ok(s)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `max |S^T Omega S - Omega|`.
    pub fn symplectic_error(&self) -> f64 {
        let n = self.0.nrows();
        if n % 2 != 0 || self.0.ncols() != n {
            return f64::INFINITY;
        }
        let omega = symplectic_form(n / 2);
        (self.0.transpose() * &omega * &self.0 - omega).amax()
    }
}

/// `exp(Omega G t)` by Padé scaling-and-squaring.
pub fn symplectic_propagator(h: &QuadraticHamiltonian, t: f64) -> SymplecticMatrix {
    let generator = symplectic_form(3) * &h.gmatrix * t;
    SymplecticMatrix(generator.exp())
}

/// Closed form of the [`Variant::Pairwise`] propagator. The generator cubes to
/// zero, so `S = I + A t + A^2 t^2 / 2`:
///
/// ```text
/// q  -> q + g1 t x + g1 g2 t^2 q' / 2      x -> x + g2 t q'
/// p' -> p' - g2 t k + g1 g2 t^2 p / 2      k -> k - g1 t p
/// ```
pub fn closed_form_propagator(g1: f64, g2: f64, t: f64) -> SymplecticMatrix {
    let mut s = DMatrix::identity(6, 6);
    let half = 0.5 * g1 * g2 * t * t;
    s[(0, 4)] = g1 * t;
    s[(0, 2)] = half;
    s[(3, 5)] = -g2 * t;
    s[(3, 1)] = half;
    s[(4, 2)] = g2 * t;
    s[(5, 1)] = -g1 * t;
    SymplecticMatrix(s)
}

pub fn evolve_gaussian(
    state: &PhaseSpaceState,
    h: &QuadraticHamiltonian,
    t: f64,
) -> Result<PhaseSpaceState> {
    if state.n_modes() != 3 {
        return Err(Error::ModeCount {
            expected: 3,
            found: state.n_modes(),
        });
    }
    state.check_physical()?;
    let s = symplectic_propagator(h, t);
    Ok(state.transformed(s.entries()))
}
