use num_complex::Complex64;
use rayon::prelude::*;

use super::observable::{Kind, ObservableSpec};
use super::operator::apply_weyl;
use super::poly::Poly;
use crate::grid::{
    fixed_order_sum, to_ensemble, EnsembleRepresentation, GridSpec, GridState, SpectralOps,
    DEFAULT_SUPPORT_THRESHOLD,
};
use crate::{Error, Result};

/// Largest imaginary part tolerated in `<psi|M|psi>`.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Variational derivatives `(dA/dP, dA/dS)` sampled on the grid; both are
/// zero off the support mask.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalGradient {
    pub spec: GridSpec,
    pub d_dp: Vec<f64>,
    pub d_ds: Vec<f64>,
    pub support_mask: Vec<bool>,
}

impl FunctionalGradient {
    pub fn masked_fraction(&self) -> f64 {
        let out = self.support_mask.iter().filter(|&&m| !m).count();
        out as f64 / self.support_mask.len() as f64
    }
}

fn require(obs: &ObservableSpec, kind: Kind) -> Result<()> {
    if obs.kind() == kind {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected: kind.name(),
        })
    }
}

/// `f(x, u)` at every grid point, with `u = d_x S`.
fn classical_field(ens: &EnsembleRepresentation, f: &Poly) -> Vec<f64> {
    let spec = ens.spec;
    let u = &ens.phase_gradients[2];
    (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let x = spec.coordinate(2, spec.multi_index(i)[2]);
            f.eval(&[0.0, 0.0, 0.0, 0.0, x, u[i]])
        })
        .collect()
}

/// `C_f = int P f(x, d_x S)` over the support.
pub fn classical_functional(ens: &EnsembleRepresentation, f: &ObservableSpec) -> Result<f64> {
    require(f, Kind::Classical)?;
    let field = classical_field(ens, &f.symbol());
    Ok(ens.integrate(|i| field[i]))
}

/// `Q_M = <psi|M|psi>` with `M` the Weyl quantization of the spec.
pub fn quantum_functional(state: &GridState, m: &ObservableSpec) -> Result<f64> {
    require(m, Kind::Quantum)?;
    let ops = SpectralOps::new(&state.spec);
    let psi = &state.amplitudes;
    let mpsi = apply_weyl(&ops, &m.symbol(), psi);
    let dv = state.spec.cell_volume();
    let re = fixed_order_sum(psi.len(), |i| (psi[i].conj() * mpsi[i]).re) * dv;
    let im = fixed_order_sum(psi.len(), |i| (psi[i].conj() * mpsi[i]).im) * dv;
    if im.abs() >= HERMITICITY_TOL {
        return Err(Error::NonHermitian(format!("{m} (imaginary part {im:e})")));
    }
    Ok(re)
}

pub fn functional_gradients(state: &GridState, obs: &ObservableSpec) -> Result<FunctionalGradient> {
    functional_gradients_with(state, obs, DEFAULT_SUPPORT_THRESHOLD)
}

/// Classical: `dC/dP = f(x, u)`, `dC/dS = -d_x(P df/du)`.
/// Quantum: `dQ/dP = Re(psi* M psi) / P`, `dQ/dS = (2/hbar) Im(psi* M psi)`.
pub fn functional_gradients_with(
    state: &GridState,
    obs: &ObservableSpec,
    threshold: f64,
) -> Result<FunctionalGradient> {
    let spec = state.spec;
    let ens = to_ensemble(state, threshold)?;
    let mask = ens.support_mask.clone();
    let on_support = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter()
            .zip(&mask)
            .map(|(v, &inside)| if inside { v } else { 0.0 })
            .collect()
    };
    let symbol = obs.symbol();
    let (d_dp, d_ds) = match obs.kind() {
        Kind::Classical => {
            let f = classical_field(&ens, &symbol);
            let fu = classical_field(&ens, &symbol.derivative(5));
            let flux: Vec<f64> = ens.density.iter().zip(&fu).map(|(p, fu)| p * fu).collect();
            let ops = SpectralOps::new(&spec);
            let d = ops.derivative_real(&flux, 2);
            (on_support(f), on_support(d.into_iter().map(|v| -v).collect()))
        }
        Kind::Quantum => {
            let ops = SpectralOps::new(&spec);
            let psi = &state.amplitudes;
            let mpsi = apply_weyl(&ops, &symbol, psi);
            let z: Vec<Complex64> = psi.iter().zip(&mpsi).map(|(a, b)| a.conj() * b).collect();
            let dp = z.iter().zip(&ens.density).map(|(z, p)| z.re / p).collect();
            let ds = z.iter().map(|z| 2.0 / spec.hbar * z.im).collect();
            (on_support(dp), on_support(ds))
        }
    };
    Ok(FunctionalGradient {
        spec,
        d_dp,
        d_ds,
        support_mask: mask,
    })
}

/// `g1 int P (d_q S) x + g2 int P (d_x S) q'`.
pub fn ensemble_hamiltonian_value(ens: &EnsembleRepresentation, g1: f64, g2: f64) -> f64 {
    let spec = ens.spec;
    let [sq, _, sx] = &ens.phase_gradients;
    ens.integrate(|i| {
        let [_, j, k] = spec.multi_index(i);
        g1 * sq[i] * spec.coordinate(2, k) + g2 * sx[i] * spec.coordinate(1, j)
    })
}

/// Midpoint quadrature of `field` together with `|full - half|`, where the
/// half-resolution sum keeps every second point on each axis.
pub(crate) fn quadrature(spec: &GridSpec, field: &[f64]) -> (f64, f64) {
    let dv = spec.cell_volume();
    let full = fixed_order_sum(field.len(), |i| field[i]) * dv;
    let half = fixed_order_sum(field.len(), |i| {
        if spec.multi_index(i).iter().all(|j| j % 2 == 0) {
            field[i]
        } else {
            0.0
        }
    }) * dv
        * 8.0;
    (full, (full - half).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::ModeParams;
    use crate::grid::{init_product_gaussian, momentum_marginal, Axis};

    fn spec() -> GridSpec {
        GridSpec::new([32; 3], [6.0; 3], 1.0).unwrap()
    }

    fn parse(s: &str) -> ObservableSpec {
        s.parse().unwrap()
    }

    fn displaced_tilted() -> GridState {
        let c = ModeParams {
            mean: 0.7,
            tilt: 0.9,
            ..ModeParams::vacuum(1.0)
        };
        let q = ModeParams {
            mean: -0.4,
            ..ModeParams::vacuum(1.0)
        };
        init_product_gaussian(&spec(), &[q, ModeParams::vacuum(1.0), c]).unwrap()
    }

    #[test]
    fn classical_examples() {
        let s = displaced_tilted();
        let ens = to_ensemble(&s, DEFAULT_SUPPORT_THRESHOLD).unwrap();
        assert!((classical_functional(&ens, &parse("C[ 1 ]")).unwrap() - 1.0).abs() < 1e-10);
        assert!((classical_functional(&ens, &parse("C[ x ]")).unwrap() - 0.7).abs() < 1e-6);
        let u = classical_functional(&ens, &parse("C[ u ]")).unwrap();
        assert!((u - momentum_marginal(&s, Axis::X).mean()).abs() < 1e-6);
        assert!(matches!(
            classical_functional(&ens, &parse("Q[ q ]")),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn quantum_examples() {
        let s = displaced_tilted();
        assert!((quantum_functional(&s, &parse("Q[ 1 ]")).unwrap() - 1.0).abs() < 1e-12);
        assert!((quantum_functional(&s, &parse("Q[ q ]")).unwrap() + 0.4).abs() < 1e-10);
        assert!((quantum_functional(&s, &parse("Q[ k ]")).unwrap() - 0.9).abs() < 1e-10);
        assert!(quantum_functional(&s, &parse("C[ x ]")).is_err());
    }

    #[test]
    fn simple_gradients() {
        let s = displaced_tilted();
        let gx = functional_gradients(&s, &parse("C[ x ]")).unwrap();
        let gq = functional_gradients(&s, &parse("Q[ q ]")).unwrap();
        for i in (0..s.spec.len()).step_by(97) {
            if !gx.support_mask[i] {
                continue;
            }
            let [a, _, c] = s.spec.multi_index(i);
            assert_eq!(gx.d_dp[i], s.spec.coordinate(2, c));
            assert_eq!(gx.d_ds[i], 0.0);
            assert!((gq.d_dp[i] - s.spec.coordinate(0, a)).abs() < 1e-9);
            assert!(gq.d_ds[i].abs() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_value_vanishes_on_real_states() {
        let s = init_product_gaussian(&spec(), &[ModeParams::squeezed(0.3, 1.0); 3]).unwrap();
        let ens = to_ensemble(&s, DEFAULT_SUPPORT_THRESHOLD).unwrap();
        assert_eq!(ensemble_hamiltonian_value(&ens, 0.0, 0.0), 0.0);
        assert!(ensemble_hamiltonian_value(&ens, 1.0, 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_estimate_is_small_for_smooth_fields() {
        let s = displaced_tilted();
        let (v, est) = quadrature(&s.spec, &s.density());
        assert!((v - 1.0).abs() < 1e-12);
        assert!(est < 1e-4, "{est}");
    }
}
