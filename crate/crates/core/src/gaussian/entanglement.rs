use nalgebra::DMatrix;

use super::state::{symplectic_form, PhaseSpaceState};
use crate::{Error, Mode, Result};

// Symplectic eigenvalues within this relative distance of hbar/2 are
// treated as saturating the bound (roundoff on pure product modes).
const SATURATION_TOL: f64 = 1e-12;

/// Symplectic eigenvalues of a positive-definite covariance matrix, ascending.
///
/// Uses `nu^2 = eig(V^{1/2} Omega^T V Omega V^{1/2})`, which is symmetric, so
/// each `nu` appears twice and every other value is kept.
pub fn symplectic_eigenvalues(covariance: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = covariance.nrows();
    if dim % 2 != 0 || covariance.ncols() != dim {
        return Err(Error::InvalidArgument("covariance must be 2n x 2n".into()));
    }
    let eig = covariance.clone().symmetric_eigen();
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::NonPhysical(eig.eigenvalues.min()));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let omega = symplectic_form(dim / 2);
    let m = &root * omega.transpose() * covariance * &omega * &root;
    let m = (&m + m.transpose()) * 0.5;
    let mut nu2: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    nu2.sort_by(f64::total_cmp);
    Ok(nu2.iter().step_by(2).map(|v| v.max(0.0).sqrt()).collect())
}

/// `E_N(A|B) = sum_j max(0, -ln(2 nu~_j / hbar))` over the symplectic
/// eigenvalues of the partially transposed covariance (natural-log units).
/// Modes outside `a` and `b` are traced out.
pub fn logarithmic_negativity(state: &PhaseSpaceState, a: &[Mode], b: &[Mode]) -> Result<f64> {
    state.check_physical()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("both sides of the bipartition must be non-empty".into()));
    }
    if let Some(m) = a.iter().find(|m| b.contains(m)) {
        return Err(Error::SupportOverlap(*m));
    }
    let modes: Vec<Mode> = a.iter().chain(b).copied().collect();
    let reduced = state.reduce_modes(&modes)?;
    let mut cov = reduced.covariance().clone();
    // Partial transpose on B flips the sign of its momenta.
    for k in a.len()..modes.len() {
        let p = 2 * k + 1;
        for j in 0..cov.nrows() {
            if j != p {
                cov[(p, j)] = -cov[(p, j)];
                cov[(j, p)] = -cov[(j, p)];
            }
        }
    }
    let hbar = state.hbar();
    let nu = symplectic_eigenvalues(&cov)?;
    Ok(nu
        .iter()
        .map(|&v| 2.0 * v / hbar)
        .filter(|&ratio| ratio < 1.0 - SATURATION_TOL)
        .map(|ratio| -ratio.ln())
        .fold(0.0, |acc, v| acc + v))
}

/// `<q p' + q' p>` with the symmetrized ordering (the two factors of each
/// product act on different modes, so no ordering ambiguity remains).
pub fn witness_expectation(state: &PhaseSpaceState) -> Result<f64> {
    if state.n_modes() < 2 {
        return Err(Error::ModeCount {
            expected: 2,
            found: state.n_modes(),
        });
    }
    Ok(state.raw_moment(0, 3) + state.raw_moment(2, 1))
}
