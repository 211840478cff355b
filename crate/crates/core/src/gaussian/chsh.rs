use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::state::PhaseSpaceState;
use crate::{Error, Result};

/// Real displacement offsets of the multi-start grid. Each of the 25 starts
/// sets `alpha_1 = beta_1 = 0`, `alpha_2 = a`, `beta_2 = b` for
/// `(a, b)` in `CHSH_START_GRID x CHSH_START_GRID`; the all-zero start is
/// visited first so ties resolve to zero displacements.
pub const CHSH_START_GRID: [f64; 5] = [0.0, -0.4, 0.4, -0.8, 0.8];

const INITIAL_STEP: f64 = 0.25;
const FINAL_STEP: f64 = 1e-6;

/// Displacements for the two parity settings on each side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChshSettings {
    pub alpha: [Complex64; 2],
    pub beta: [Complex64; 2],
}

impl ChshSettings {
    fn from_params(x: &[f64; 8]) -> Self {
        ChshSettings {
            alpha: [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])],
            beta: [Complex64::new(x[4], x[5]), Complex64::new(x[6], x[7])],
        }
    }

    fn to_params(self) -> [f64; 8] {
        [
            self.alpha[0].re,
            self.alpha[0].im,
            self.alpha[1].re,
            self.alpha[1].im,
            self.beta[0].re,
            self.beta[0].im,
            self.beta[1].re,
            self.beta[1].im,
        ]
    }
}

/// Two-mode displaced-parity correlator, `E(alpha, beta) = (pi hbar)^2 W(r)`,
/// evaluated from the Gaussian Wigner function.
struct ParityCorrelator {
    inverse: Matrix4<f64>,
    mean: Vector4<f64>,
    prefactor: f64,
    scale: f64,
}

impl ParityCorrelator {
    fn new(state: &PhaseSpaceState) -> Result<Self> {
        if state.n_modes() != 2 {
            return Err(Error::ModeCount {
                expected: 2,
                found: state.n_modes(),
            });
        }
        state.check_physical()?;
        let hbar = state.hbar();
        let v = Matrix4::from_iterator(state.covariance().iter().copied());
        let inverse = v
            .try_inverse()
            .ok_or_else(|| Error::NonPhysical(0.0))?;
        let det = (v * (2.0 / hbar)).determinant();
        Ok(ParityCorrelator {
            inverse,
            mean: Vector4::from_iterator(state.means().iter().copied()),
            prefactor: 1.0 / det.sqrt(),
            scale: (2.0 * hbar).sqrt(),
        })
    }

    fn correlation(&self, alpha: Complex64, beta: Complex64) -> f64 {
        let r = Vector4::new(alpha.re, alpha.im, beta.re, beta.im) * self.scale;
        let d = r - self.mean;
        self.prefactor * (-0.5 * d.dot(&(self.inverse * d))).exp()
    }

    fn chsh(&self, s: &ChshSettings) -> f64 {
        let [a1, a2] = s.alpha;
        let [b1, b2] = s.beta;
        self.correlation(a1, b1) + self.correlation(a2, b1) + self.correlation(a1, b2)
            - self.correlation(a2, b2)
    }
}

pub fn parity_correlation(state: &PhaseSpaceState, alpha: Complex64, beta: Complex64) -> Result<f64> {
    Ok(ParityCorrelator::new(state)?.correlation(alpha, beta))
}

/// `B = E(a1,b1) + E(a2,b1) + E(a1,b2) - E(a2,b2)`.
pub fn chsh_displaced_parity(state: &PhaseSpaceState, settings: &ChshSettings) -> Result<f64> {
    Ok(ParityCorrelator::new(state)?.chsh(settings))
}

/// Multi-start coordinate ascent over the eight real displacement
/// components (see [`CHSH_START_GRID`]). Deterministic.
pub fn optimize_chsh(state: &PhaseSpaceState) -> Result<(f64, ChshSettings)> {
    let corr = ParityCorrelator::new(state)?;
    let mut best = (f64::NEG_INFINITY, ChshSettings::default());
    for &a in &CHSH_START_GRID {
        for &b in &CHSH_START_GRID {
            let start = ChshSettings {
                alpha: [Complex64::new(0.0, 0.0), Complex64::new(a, 0.0)],
                beta: [Complex64::new(0.0, 0.0), Complex64::new(b, 0.0)],
            };
            let (value, settings) = coordinate_ascent(&corr, start);
            if value > best.0 + 1e-12 {
                best = (value, settings);
            }
        }
    }
    Ok(best)
}

fn coordinate_ascent(corr: &ParityCorrelator, start: ChshSettings) -> (f64, ChshSettings) {
    let mut x = start.to_params();
    let mut value = corr.chsh(&start);
    let mut step = INITIAL_STEP;
    while step >= FINAL_STEP {
        let mut improved = false;
        for i in 0..8 {
            for dir in [1.0, -1.0] {
                loop {
                    let mut trial = x;
                    trial[i] += dir * step;
                    let v = corr.chsh(&ChshSettings::from_params(&trial));
                    if v > value {
                        x = trial;
                        value = v;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, ChshSettings::from_params(&x))
}
