use std::f64::consts::PI;

use num_complex::Complex64;

use super::spec::GridSpec;
use super::spectral::SpectralOps;
use super::state::GridState;
use crate::gaussian::{QuadraticHamiltonian, Variant};
use crate::{Error, Result};

/// Largest phase a single step imprints at the grid corners:
/// `dt * max(|g1| kmax_q L_x, |g2| L_j kmax_x)` where `j` is the axis
/// multiplying `k`. Steps are accepted when this is at most `pi`, i.e.
/// the shear moves the domain edge by at most one cell per step.
pub fn stability_phase(spec: &GridSpec, h: &QuadraticHamiltonian, dt: f64) -> f64 {
    let partner = partner_axis(h.variant);
    let a = h.g1.abs() * spec.max_wavenumber(0) * spec.half_widths[2];
    let b = h.g2.abs() * spec.half_widths[partner] * spec.max_wavenumber(2);
    dt.abs() * a.max(b)
}

fn partner_axis(v: Variant) -> usize {
    match v {
        Variant::Pairwise => 1,
        Variant::SingleProbe => 0,
    }
}

/// Strang splitting `e^{-i A dt/2} e^{-i B dt} e^{-i A dt/2}` with
/// `A = g1 p x` (diagonal after an FFT along `q`) and `B = g2 q' k`
/// (or `g2 q k`), diagonal after an FFT along `x`.
pub fn split_step_evolve(
    state: &GridState,
    h: &QuadraticHamiltonian,
    dt: f64,
    steps: usize,
) -> Result<GridState> {
    let spec = state.spec;
    let phase = stability_phase(&spec, h, dt);
    if !(phase <= PI) {
        let per_unit = stability_phase(&spec, h, 1.0);
        return Err(Error::Stability {
            dt,
            bound: PI / per_unit,
            phase,
        });
    }
    let mut psi = state.amplitudes.clone();
    if steps == 0 {
        return GridState::new(spec, psi);
    }
    let ops = SpectralOps::new(&spec);
    let partner = partner_axis(h.variant);
    let x = spec.coordinates(2);
    let partner_coords = spec.coordinates(partner);
    let kq: Vec<f64> = (0..spec.points[0]).map(|j| spec.wavenumber(0, j)).collect();
    let kx: Vec<f64> = (0..spec.points[2]).map(|j| spec.wavenumber(2, j)).collect();

    // exp(-i g1 hbar kappa_q x tau / hbar)
    let a_step = |psi: &mut Vec<Complex64>, tau: f64| {
        ops.apply_multiplier(psi, 0, |line, j| {
            let ix = ops.line_coordinates(0, line)[1];
            Complex64::from_polar(1.0, -h.g1 * kq[j] * x[ix] * tau)
        });
    };
    let full_b = |psi: &mut Vec<Complex64>| {
        ops.apply_multiplier(psi, 2, |line, j| {
            let [iq, iqp] = ops.line_coordinates(2, line);
            let y = partner_coords[if partner == 1 { iqp } else { iq }];
            Complex64::from_polar(1.0, -h.g2 * y * kx[j] * dt)
        });
    };
    // Adjacent half-steps of A are fused: A/2 B (A B)^{n-1} A/2.
    a_step(&mut psi, 0.5 * dt);
    for step in 0..steps {
        full_b(&mut psi);
        a_step(&mut psi, if step + 1 == steps { 0.5 * dt } else { dt });
    }
    GridState::new(spec, psi)
}
