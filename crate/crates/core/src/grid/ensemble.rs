use super::spec::GridSpec;
use super::spectral::{fixed_order_sum, SpectralOps};
use super::state::GridState;
use crate::{Error, Result};

/// Default support threshold, relative to `max P`.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-12;

/// The pair `(P, grad S)` with `psi = sqrt(P) e^{i S / hbar}`.
///
/// `S` itself is never formed; gradients come from
/// `hbar Im(psi* grad psi) / |psi|^2` and are zero off the support.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRepresentation {
    pub spec: GridSpec,
    pub density: Vec<f64>,
    /// `(d_q S, d_q' S, d_x S)`.
    pub phase_gradients: [Vec<f64>; 3],
    pub support_mask: Vec<bool>,
}

impl EnsembleRepresentation {
    /// Fraction of grid points excluded from the support.
    pub fn masked_fraction(&self) -> f64 {
        let out = self.support_mask.iter().filter(|&&m| !m).count();
        out as f64 / self.support_mask.len() as f64
    }

    /// `sum_{support} P g dV`.
    pub fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync,
    {
        let (p, mask) = (&self.density, &self.support_mask);
        fixed_order_sum(p.len(), |f| if mask[f] { p[f] * g(f) } else { 0.0 }) * self.spec.cell_volume()
    }
}

/// `threshold` is relative: the support is `P > threshold * max P`.
pub fn to_ensemble(state: &GridState, threshold: f64) -> Result<EnsembleRepresentation> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument("support threshold must be positive".into()));
    }
    let spec = state.spec;
    let ops = SpectralOps::new(&spec);
    let psi = &state.amplitudes;
    let density = state.density();
    let cut = threshold * density.iter().copied().fold(0.0, f64::max);
    let support_mask: Vec<bool> = density.iter().map(|&p| p > cut).collect();
    let phase_gradients = [0, 1, 2].map(|axis| {
        let d = ops.derivative(psi, axis);
        psi.iter()
            .zip(&d)
            .zip(density.iter().zip(&support_mask))
            .map(|((a, da), (&p, &inside))| {
                if inside {
                    spec.hbar * (a.conj() * da).im / p
                } else {
                    0.0
                }
            })
            .collect()
    });
    Ok(EnsembleRepresentation {
        spec,
        density,
        phase_gradients,
        support_mask,
    })
}
