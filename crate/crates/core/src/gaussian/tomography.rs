//! Recovering the mediator's `x` and `k` moments from probe data alone.
//!
//! Under the coupling, probe observables at time `t` are linear in the
//! initial moments of all three systems (`<q>(t)` picks up `g1 t <x>`,
//! `Var p'(t)` picks up `g2^2 t^2 Var k`, and so on). Given the propagator,
//! the probe moments at several times form an overdetermined linear system
//! for the initial moments of a product state, which is solved by least
//! squares.

use nalgebra::{DMatrix, DVector};

use super::hamiltonian::QuadraticHamiltonian;
use super::state::PhaseSpaceState;
use super::symplectic::{evolve_gaussian, symplectic_propagator};
use crate::{Error, Result};

const RANK_TOL: f64 = 1e-10;

/// First and symmetrized second moments of `(q, p, q', p')` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSample {
    pub t: f64,
    pub means: [f64; 4],
    pub covariance: [[f64; 4]; 4],
}

pub type ProbeSeries = Vec<ProbeSample>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediatorEstimate {
    pub mean_x: f64,
    pub mean_k: f64,
    pub var_x: f64,
    pub var_k: f64,
    pub cov_xk: f64,
    /// Euclidean norm of the least-squares misfit over all equations.
    pub residual: f64,
}

impl MediatorEstimate {
    /// Uncertainty-relation check up to fit noise.
    pub fn is_physical(&self, hbar: f64, tol: f64) -> bool {
        self.var_x >= -tol
            && self.var_k >= -tol
            && self.var_x * self.var_k - self.cov_xk * self.cov_xk >= hbar * hbar / 4.0 - tol
    }
}

pub fn probe_sample(state: &PhaseSpaceState, t: f64) -> ProbeSample {
    let mut means = [0.0; 4];
    let mut covariance = [[0.0; 4]; 4];
    for i in 0..4 {
        means[i] = state.means()[i];
        for j in 0..4 {
            covariance[i][j] = state.covariance()[(i, j)];
        }
    }
    ProbeSample { t, means, covariance }
}

/// Forward model: probe moments of `initial` evolved to each time.
pub fn simulate_probe_series(
    initial: &PhaseSpaceState,
    h: &QuadraticHamiltonian,
    times: &[f64],
) -> Result<ProbeSeries> {
    times
        .iter()
        .map(|&t| Ok(probe_sample(&evolve_gaussian(initial, h, t)?, t)))
        .collect()
}

// Covariance parameters of a product state: (row, col) of each unknown.
const COV_PARAMS: [(usize, usize); 9] = [
    (0, 0),
    (0, 1),
    (1, 1),
    (2, 2),
    (2, 3),
    (3, 3),
    (4, 4),
    (4, 5),
    (5, 5),
];

pub fn mediator_moment_inversion(
    series: &[ProbeSample],
    h: &QuadraticHamiltonian,
) -> Result<MediatorEstimate> {
    if h.g1 == 0.0 || h.g2 == 0.0 {
        return Err(Error::DegenerateDesign(
            "both couplings must be nonzero for the mediator to leave a trace on the probes".into(),
        ));
    }
    let mut distinct: Vec<f64> = series.iter().map(|s| s.t).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateDesign(format!(
            "need at least 3 distinct sample times, got {}",
            distinct.len()
        )));
    }

    let n = series.len();
    let mut mean_design = DMatrix::zeros(4 * n, 6);
    let mut mean_obs = DVector::zeros(4 * n);
    let mut cov_design = DMatrix::zeros(10 * n, COV_PARAMS.len());
    let mut cov_obs = DVector::zeros(10 * n);
    for (s_idx, sample) in series.iter().enumerate() {
        let prop = symplectic_propagator(h, sample.t);
        let s = prop.entries();
        for i in 0..4 {
            let row = 4 * s_idx + i;
            for a in 0..6 {
                mean_design[(row, a)] = s[(i, a)];
            }
            mean_obs[row] = sample.means[i];
        }
        let mut row = 10 * s_idx;
        for i in 0..4 {
            for j in i..4 {
                for (col, &(a, b)) in COV_PARAMS.iter().enumerate() {
                    cov_design[(row, col)] = if a == b {
                        s[(i, a)] * s[(j, a)]
                    } else {
                        s[(i, a)] * s[(j, b)] + s[(i, b)] * s[(j, a)]
                    };
                }
                cov_obs[row] = sample.covariance[i][j];
                row += 1;
            }
        }
    }

    let (mean_fit, mean_rss) = least_squares(mean_design, &mean_obs, "first moments")?;
    let (cov_fit, cov_rss) = least_squares(cov_design, &cov_obs, "second moments")?;
    Ok(MediatorEstimate {
        mean_x: mean_fit[4],
        mean_k: mean_fit[5],
        var_x: cov_fit[6],
        cov_xk: cov_fit[7],
        var_k: cov_fit[8],
        residual: (mean_rss + cov_rss).sqrt(),
    })
}

fn least_squares(
    design: DMatrix<f64>,
    obs: &DVector<f64>,
    what: &str,
) -> Result<(DVector<f64>, f64)> {
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin / smax < RANK_TOL {
        return Err(Error::DegenerateDesign(format!(
            "{what} design is rank deficient (condition {:e})",
            smax / smin
        )));
    }
    let x = svd
        .solve(obs, 0.0)
        .map_err(|e| Error::DegenerateDesign(e.to_string()))?;
    let rss = (design * &x - obs).norm_squared();
    Ok((x, rss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{build_hamiltonian, ModeParams, Variant};

    fn planted() -> PhaseSpaceState {
        let modes = [
            ModeParams {
                mean: 0.1,
                tilt: -0.2,
                ..ModeParams::squeezed(0.2, 1.0)
            },
            ModeParams {
                mean: -0.4,
                correlation: 0.1,
                ..ModeParams::vacuum(1.0)
            },
            ModeParams {
                mean: 0.7,
                tilt: -0.3,
                correlation: 0.15,
                width: 0.8,
            },
        ];
        PhaseSpaceState::product(&modes, 1.0).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let h = build_hamiltonian(1.0, 0.8, Variant::Pairwise);
        let s0 = planted();
        let series = simulate_probe_series(&s0, &h, &[0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
        let est = mediator_moment_inversion(&series, &h).unwrap();
        assert!((est.mean_x - 0.7).abs() < 1e-8);
        assert!((est.mean_k + 0.3).abs() < 1e-8);
        assert!((est.var_x - 0.64).abs() < 1e-8);
        assert!((est.cov_xk - 0.15).abs() < 1e-8);
        assert!((est.var_k - s0.covariance()[(5, 5)]).abs() < 1e-8);
        assert!(est.residual < 1e-10);
        assert!(est.is_physical(1.0, 1e-9));
    }

    #[test]
    fn zero_series_gives_zero_estimate() {
        let h = build_hamiltonian(1.0, 1.0, Variant::Pairwise);
        let series: Vec<_> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&t| ProbeSample {
                t,
                means: [0.0; 4],
                covariance: [[0.0; 4]; 4],
            })
            .collect();
        let est = mediator_moment_inversion(&series, &h).unwrap();
        assert_eq!(
            [est.mean_x, est.mean_k, est.var_x, est.var_k, est.cov_xk],
            [0.0; 5]
        );
    }

    #[test]
    fn equal_times_are_degenerate() {
        let h = build_hamiltonian(1.0, 1.0, Variant::Pairwise);
        let series = simulate_probe_series(&planted(), &h, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            mediator_moment_inversion(&series, &h),
            Err(Error::DegenerateDesign(_))
        ));
    }

    #[test]
    fn zero_coupling_is_degenerate() {
        let h = build_hamiltonian(1.0, 0.0, Variant::Pairwise);
        let series = simulate_probe_series(&planted(), &h, &[0.0, 1.0, 2.0]).unwrap();
        assert!(mediator_moment_inversion(&series, &h).is_err());
    }
}
