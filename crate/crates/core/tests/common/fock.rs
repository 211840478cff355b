//! Fock-space reference for pure zero-mean Gaussian states.
//!
//! Independent of the phase-space code: the state is rebuilt from its
//! wavefunction `exp(-x^T Z x / 2)`, expanded in number states through the
//! Bargmann recurrence, and the negativity is taken from the spectrum of the
//! partially transposed reduced density matrix.

use nalgebra::{DMatrix, Complex};

type C64 = Complex<f64>;

/// Number-state amplitudes `c[n_0, ..., n_{m-1}]` (row-major, `cutoff^m`
/// entries) of the pure Gaussian with covariance `cov` in `(q, p)`-pair
/// ordering. Returns the amplitudes and the truncated norm.
pub fn fock_amplitudes(cov: &DMatrix<f64>, hbar: f64, cutoff: usize) -> (Vec<C64>, f64) {
    let m = cov.nrows() / 2;
    // Rescale to hbar = 1 quadratures.
    let v = cov / hbar;
    let vxx = DMatrix::from_fn(m, m, |i, j| v[(2 * i, 2 * j)]);
    let vxp = DMatrix::from_fn(m, m, |i, j| v[(2 * i, 2 * j + 1)]);
    let vxx_inv = vxx.clone().try_inverse().expect("position block invertible");
    let a = &vxx_inv * 0.5;
    let b = &vxx_inv * &vxp;
    let z: DMatrix<C64> = DMatrix::from_fn(m, m, |i, j| C64::new(a[(i, j)], -b[(i, j)]));
    let id = DMatrix::<C64>::identity(m, m);
    let zi = (&z + &id).try_inverse().expect("Z + I invertible");
    let bargmann = zi * C64::new(2.0, 0.0) - &id;
    let det_a = a.determinant();
    let det_zi = (&z + &id).determinant().norm();
    let c0 = det_a.powf(0.25) * 2f64.powf(m as f64 / 2.0) / det_zi.sqrt();

    let len = cutoff.pow(m as u32);
    let mut c = vec![C64::new(0.0, 0.0); len];
    c[0] = C64::new(c0, 0.0);
    let stride: Vec<usize> = (0..m).map(|i| cutoff.pow((m - 1 - i) as u32)).collect();
    for flat in 1..len {
        let n: Vec<usize> = (0..m).map(|i| (flat / stride[i]) % cutoff).collect();
        // Lower the first nonzero index: c_{n} from c_{n - e_i}.
        let i = n.iter().position(|&k| k > 0).unwrap();
        let prev = flat - stride[i];
        let ni = (n[i] - 1) as f64;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            let nj = if j == i { n[j] - 1 } else { n[j] };
            if nj > 0 {
                acc += bargmann[(i, j)] * (nj as f64).sqrt() * c[prev - stride[j]];
            }
        }
        c[flat] = acc / (ni + 1.0).sqrt();
    }
    let norm = c.iter().map(|a| a.norm_sqr()).sum();
    (c, norm)
}

/// `ln || rho_{01}^{T_1} ||_1` for a three-mode pure state, tracing out mode 2.
///
/// Zero-mean Gaussian amplitudes vanish unless the total photon number is
/// even, so the partial transpose is block diagonal in the parity of
/// `a + b`; each block is diagonalized separately.
pub fn negativity_01(c: &[C64], cutoff: usize) -> f64 {
    let n = cutoff;
    let mut trace_norm = 0.0;
    for parity in 0..2 {
        let basis: Vec<(usize, usize)> = (0..n * n)
            .map(|r| (r / n, r % n))
            .filter(|(a, b)| (a + b) % 2 == parity)
            .collect();
        let d = basis.len();
        // rho^{T_1}[(a, b), (a', b')] = rho[(a, b'), (a', b)]
        let block = DMatrix::<C64>::from_fn(d, d, |r, s| {
            let (a, b) = basis[r];
            let (a2, b2) = basis[s];
            let row = (a * n + b2) * n;
            let col = (a2 * n + b) * n;
            (0..n).map(|k| c[row + k] * c[col + k].conj()).sum()
        });
        trace_norm += block.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>();
    }
    trace_norm.ln()
}
