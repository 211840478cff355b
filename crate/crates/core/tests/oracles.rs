mod common;

use common::fock::{fock_amplitudes, negativity_01};
use hybrid_core::gaussian::{logarithmic_negativity, PhaseSpaceState};
use hybrid_core::Mode;
use nalgebra::DMatrix;

fn tmsv_with_vacuum(r: f64) -> PhaseSpaceState {
    let tmsv = PhaseSpaceState::two_mode_squeezed(r, 1.0);
    let mut cov = DMatrix::identity(6, 6) * 0.5;
    cov.view_mut((0, 0), (4, 4)).copy_from(tmsv.covariance());
    PhaseSpaceState::new(nalgebra::DVector::zeros(6), cov, 1.0).unwrap()
}

#[test]
fn fock_oracle_reproduces_two_mode_squeezed_negativity() {
    let t0 = std::time::Instant::now();
    let state = tmsv_with_vacuum(0.5);
    let (c, norm) = fock_amplitudes(state.covariance(), 1.0, 40);
    assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    let en = negativity_01(&c, 40);
    println!("fock {en} in {:?}", t0.elapsed());
    assert!((en - 1.0).abs() < 1e-4, "{en}");
    let g = logarithmic_negativity(&state, &[Mode::Q], &[Mode::QPrime]).unwrap();
    assert!((g - en).abs() < 1e-4);
}
