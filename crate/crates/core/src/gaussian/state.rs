use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Mode, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form `diag([[0, 1], [-1, 0]], ...)`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// Single-mode pure Gaussian described the way the grid backend builds it:
/// `psi(y) ~ exp(-(y - mean)^2 / (4 width^2) + i tilt y + i c (y - mean)^2 / (2 hbar))`
/// where `c = correlation / width^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    /// Position mean.
    pub mean: f64,
    /// Position standard deviation.
    pub width: f64,
    /// Plane-wave wavenumber; the momentum mean is `hbar * tilt`.
    pub tilt: f64,
    /// Symmetrized position-momentum covariance `<{y, p}>/2 - <y><p>`.
    pub correlation: f64,
}

impl ModeParams {
    pub fn vacuum(hbar: f64) -> Self {
        ModeParams {
            mean: 0.0,
            width: (hbar / 2.0).sqrt(),
            tilt: 0.0,
            correlation: 0.0,
        }
    }

    /// Position-squeezed vacuum, `width = sqrt(hbar/2) e^{-r}`.
    pub fn squeezed(r: f64, hbar: f64) -> Self {
        ModeParams {
            width: (hbar / 2.0).sqrt() * (-r).exp(),
            ..Self::vacuum(hbar)
        }
    }

    /// Phase chirp coefficient `c` such that `S(y) = hbar tilt y + c (y - mean)^2 / 2`.
    pub fn chirp(&self) -> f64 {
        self.correlation / (self.width * self.width)
    }

    pub fn momentum_mean(&self, hbar: f64) -> f64 {
        hbar * self.tilt
    }

    pub fn momentum_variance(&self, hbar: f64) -> f64 {
        let c = self.chirp();
        hbar * hbar / (4.0 * self.width * self.width) + c * c * self.width * self.width
    }
}

/// Gaussian state: first moments and symmetrized covariance of `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceState {
    means: DVector<f64>,
    covariance: DMatrix<f64>,
    hbar: f64,
}

impl PhaseSpaceState {
    /// Validates symmetry and the uncertainty relation before accepting.
    pub fn new(means: DVector<f64>, covariance: DMatrix<f64>, hbar: f64) -> Result<Self> {
        let state = Self::new_unchecked(means, covariance, hbar)?;
        state.check_physical()?;
        Ok(state)
    }

    pub(crate) fn new_unchecked(
        means: DVector<f64>,
        covariance: DMatrix<f64>,
        hbar: f64,
    ) -> Result<Self> {
        let dim = means.len();
        if dim == 0 || dim % 2 != 0 || covariance.nrows() != dim || covariance.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "means of length {dim} and covariance {}x{} do not describe whole modes",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(PhaseSpaceState {
            means,
            covariance,
            hbar,
        })
    }

    pub fn vacuum(n_modes: usize, hbar: f64) -> Self {
        PhaseSpaceState {
            means: DVector::zeros(2 * n_modes),
            covariance: DMatrix::identity(2 * n_modes, 2 * n_modes) * (hbar / 2.0),
            hbar,
        }
    }

    /// Uncorrelated product of single-mode Gaussians, one per entry.
    pub fn product(modes: &[ModeParams], hbar: f64) -> Result<Self> {
        let n = modes.len();
        let mut means = DVector::zeros(2 * n);
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (m, p) in modes.iter().enumerate() {
            if !(p.width > 0.0) {
                return Err(Error::InvalidArgument(format!("mode {m}: width must be positive")));
            }
            means[2 * m] = p.mean;
            means[2 * m + 1] = p.momentum_mean(hbar);
            cov[(2 * m, 2 * m)] = p.width * p.width;
            cov[(2 * m, 2 * m + 1)] = p.correlation;
            cov[(2 * m + 1, 2 * m)] = p.correlation;
            cov[(2 * m + 1, 2 * m + 1)] = p.momentum_variance(hbar);
        }
        Self::new(means, cov, hbar)
    }

    /// Two-mode squeezed vacuum with squeezing `r` (EPR correlations
    /// `<q1 q2> > 0`, `<p1 p2> < 0`).
    pub fn two_mode_squeezed(r: f64, hbar: f64) -> Self {
        let c = (2.0 * r).cosh() * hbar / 2.0;
        let s = (2.0 * r).sinh() * hbar / 2.0;
        let covariance = DMatrix::from_row_slice(
            4,
            4,
            &[c, 0.0, s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, -s, 0.0, c],
        );
        PhaseSpaceState {
            means: DVector::zeros(4),
            covariance,
            hbar,
        }
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn n_modes(&self) -> usize {
        self.means.len() / 2
    }

    /// Symmetrized second moment `<{r_i, r_j}>/2`, not centred.
    pub fn raw_moment(&self, i: usize, j: usize) -> f64 {
        self.covariance[(i, j)] + self.means[i] * self.means[j]
    }

    pub fn with_means(mut self, means: DVector<f64>) -> Result<Self> {
        if means.len() != self.means.len() {
            return Err(Error::InvalidArgument("means length mismatch".into()));
        }
        self.means = means;
        Ok(self)
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + i (hbar/2) Omega`.
    pub fn physicality_margin(&self) -> f64 {
        let dim = self.means.len();
        let omega = symplectic_form(self.n_modes());
        let h = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
            Complex64::new(self.covariance[(i, j)], 0.5 * self.hbar * omega[(i, j)])
        });
        h.symmetric_eigenvalues().min()
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.covariance - self.covariance.transpose()).amax()
    }

    pub fn check_physical(&self) -> Result<()> {
        let asym = self.asymmetry();
        if asym > SYMMETRY_TOL * self.covariance.amax().max(1.0) {
            return Err(Error::Asymmetric(asym));
        }
        let margin = self.physicality_margin();
        if !margin.is_finite() || margin < -PHYSICALITY_TOL * self.covariance.amax().max(1.0) {
            return Err(Error::NonPhysical(margin));
        }
        Ok(())
    }

    /// Marginal on the listed modes (trace over the rest), in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            if m >= self.n_modes() {
                return Err(Error::InvalidArgument(format!(
                    "mode {m} out of range for a {}-mode state",
                    self.n_modes()
                )));
            }
            idx.push(2 * m);
            idx.push(2 * m + 1);
        }
        let means = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.means[i]));
        let covariance =
            DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.covariance[(idx[a], idx[b])]);
        Ok(PhaseSpaceState {
            means,
            covariance,
            hbar: self.hbar,
        })
    }

    pub fn reduce_modes(&self, modes: &[Mode]) -> Result<Self> {
        let idx: Vec<usize> = modes.iter().map(|m| m.index()).collect();
        self.reduce(&idx)
    }

    /// `r -> S r`: means `S mu`, covariance `S V S^T`.
    pub(crate) fn transformed(&self, s: &DMatrix<f64>) -> Self {
        let covariance = s * &self.covariance * s.transpose();
        PhaseSpaceState {
            means: s * &self.means,
            covariance: (&covariance + covariance.transpose()) * 0.5,
            hbar: self.hbar,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_physical_and_saturates() {
        let v = PhaseSpaceState::vacuum(3, 1.0);
        v.check_physical().unwrap();
        assert!(v.physicality_margin().abs() < 1e-12);
    }

    #[test]
    fn sub_vacuum_noise_rejected() {
        let mut cov = DMatrix::identity(2, 2) * 0.4;
        cov[(0, 1)] = 0.0;
        let err = PhaseSpaceState::new(DVector::zeros(2), cov, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonPhysical(_)));
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let mut cov = DMatrix::identity(2, 2);
        cov[(0, 1)] = 0.1;
        let err = PhaseSpaceState::new(DVector::zeros(2), cov, 1.0).unwrap_err();
        assert!(matches!(err, Error::Asymmetric(_)));
    }

    #[test]
    fn chirped_mode_is_pure() {
        let hbar = 0.7;
        let p = ModeParams {
            mean: 0.3,
            width: 0.9,
            tilt: -1.2,
            correlation: 0.35,
        };
        let s = PhaseSpaceState::product(&[p], hbar).unwrap();
        let det = s.covariance().determinant();
        assert!((det - hbar * hbar / 4.0).abs() < 1e-12);
        assert!((s.means()[1] - hbar * -1.2).abs() < 1e-15);
    }

    #[test]
    fn reduce_picks_blocks() {
        let modes = [
            ModeParams::squeezed(0.1, 1.0),
            ModeParams::squeezed(0.2, 1.0),
            ModeParams::squeezed(0.3, 1.0),
        ];
        let s = PhaseSpaceState::product(&modes, 1.0).unwrap();
        let r = s.reduce(&[2, 0]).unwrap();
        assert_eq!(r.n_modes(), 2);
        assert_eq!(r.covariance()[(0, 0)], s.covariance()[(4, 4)]);
        assert_eq!(r.covariance()[(3, 3)], s.covariance()[(1, 1)]);
        assert!(s.reduce(&[3]).is_err());
    }
}
