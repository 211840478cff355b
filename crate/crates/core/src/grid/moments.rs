use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::spec::Axis;
use super::spectral::{fixed_order_sum, SpectralOps};
use super::state::GridState;

/// First moments and symmetrized covariance in the `(q, p, q', p', x, k)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMoments {
    pub means: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GridMoments {
    /// Largest absolute difference over the 6 means and 21 independent
    /// covariance entries.
    pub fn max_discrepancy(&self, means: &DVector<f64>, covariance: &DMatrix<f64>) -> f64 {
        let dm = (&self.means - means).amax();
        let mut dc: f64 = 0.0;
        for i in 0..6 {
            for j in i..6 {
                dc = dc.max((self.covariance[(i, j)] - covariance[(i, j)]).abs());
            }
        }
        dm.max(dc)
    }
}

/// `A_i psi` for the six canonical operators.
pub(crate) fn canonical_images(state: &GridState, ops: &SpectralOps) -> [Vec<Complex64>; 6] {
    let spec = state.spec;
    let psi = &state.amplitudes;
    let position = |axis: usize| -> Vec<Complex64> {
        psi.iter()
            .enumerate()
            .map(|(f, a)| a * spec.coordinate(axis, spec.multi_index(f)[axis]))
            .collect()
    };
    let momentum = |axis: usize| -> Vec<Complex64> {
        let mi = Complex64::new(0.0, -spec.hbar);
        ops.derivative(psi, axis).into_iter().map(|d| d * mi).collect()
    };
    [
        position(0),
        momentum(0),
        position(1),
        momentum(1),
        position(2),
        momentum(2),
    ]
}

/// Means by `Re <psi|A_i psi>` and second moments by `Re <A_i psi|A_j psi>`,
/// which is the symmetrized `<{A_i, A_j}>/2` for Hermitian `A_i`, `A_j`.
pub fn grid_moments(state: &GridState) -> GridMoments {
    let ops = SpectralOps::new(&state.spec);
    let dv = state.spec.cell_volume();
    let images = canonical_images(state, &ops);
    let psi = &state.amplitudes;
    let n = psi.len();
    let mut means = DVector::zeros(6);
    for i in 0..6 {
        let a = &images[i];
        means[i] = fixed_order_sum(n, |f| (psi[f].conj() * a[f]).re) * dv;
    }
    let mut covariance = DMatrix::zeros(6, 6);
    for i in 0..6 {
        for j in i..6 {
            let (a, b) = (&images[i], &images[j]);
            let m = fixed_order_sum(n, |f| (a[f].conj() * b[f]).re) * dv;
            let c = m - means[i] * means[j];
            covariance[(i, j)] = c;
            covariance[(j, i)] = c;
        }
    }
    GridMoments { means, covariance }
}

/// Distribution of the momentum conjugate to one axis, ascending in momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMarginal {
    pub momenta: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MomentumMarginal {
    pub fn mean(&self) -> f64 {
        self.momenta.iter().zip(&self.weights).map(|(p, w)| p * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.momenta
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| (p - m) * (p - m) * w)
            .sum()
    }
}

pub fn momentum_marginal(state: &GridState, axis: Axis) -> MomentumMarginal {
    let spec = state.spec;
    let a = axis.index();
    let ops = SpectralOps::new(&spec);
    let mut data = state.amplitudes.clone();
    ops.forward_transform(&mut data, a);
    let n = spec.points[a];
    let mut bins = vec![0.0; n];
    for (f, v) in data.iter().enumerate() {
        bins[spec.multi_index(f)[a]] += v.norm_sqr();
    }
    let total: f64 = bins.iter().sum();
    // fftshift: negative frequencies first
    let order: Vec<usize> = (n / 2..n).chain(0..n / 2).collect();
    MomentumMarginal {
        momenta: order.iter().map(|&j| spec.hbar * spec.wavenumber(a, j)).collect(),
        weights: order.iter().map(|&j| bins[j] / total).collect(),
    }
}
