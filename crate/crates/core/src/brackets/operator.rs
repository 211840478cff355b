use num_complex::Complex64;
use rayon::prelude::*;

use super::poly::{Exponents, Poly};
use crate::grid::{GridSpec, SpectralOps};

/// Applies the Weyl quantization of `symbol` to `psi`.
///
/// Each mode is handled with the McCoy expansion
/// `W(q^a p^b) = 2^-a sum_j C(a, j) q^j p^b q^(a-j)`; factors of different
/// modes commute. `p^b` is applied spectrally (Nyquist bin dropped).
pub(crate) fn apply_weyl(ops: &SpectralOps, symbol: &Poly, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (e, c) in symbol.terms() {
        let term = apply_monomial(ops, e, psi);
        out.par_iter_mut().zip(&term).for_each(|(o, t)| *o += c * t);
    }
    out
}

fn apply_monomial(ops: &SpectralOps, e: &Exponents, psi: &[Complex64]) -> Vec<Complex64> {
    let mut cur = psi.to_vec();
    for axis in 0..3 {
        let (a, b) = (e[2 * axis], e[2 * axis + 1]);
        if a == 0 && b == 0 {
            continue;
        }
        if b == 0 {
            multiply_position(ops.spec(), &mut cur, axis, a);
            continue;
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); cur.len()];
        for j in 0..=a {
            let weight = binomial(a, j) / 2f64.powi(a as i32);
            let mut v = cur.clone();
            multiply_position(ops.spec(), &mut v, axis, a - j);
            apply_momentum(ops, &mut v, axis, b);
            multiply_position(ops.spec(), &mut v, axis, j);
            acc.par_iter_mut().zip(&v).for_each(|(o, t)| *o += weight * t);
        }
        cur = acc;
    }
    cur
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn multiply_position(spec: &GridSpec, data: &mut [Complex64], axis: usize, power: u32) {
    if power == 0 {
        return;
    }
    let spec = *spec;
    data.par_iter_mut().enumerate().for_each(|(f, v)| {
        let y = spec.coordinate(axis, spec.multi_index(f)[axis]);
        *v *= y.powi(power as i32);
    });
}

/// `(-i hbar d_y)^b`, i.e. the multiplier `(hbar kappa)^b`.
fn apply_momentum(ops: &SpectralOps, data: &mut [Complex64], axis: usize, power: u32) {
    let spec = *ops.spec();
    let n = spec.points[axis];
    ops.apply_multiplier(data, axis, |_, j| {
        if j == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((spec.hbar * spec.wavenumber(axis, j)).powi(power as i32), 0.0)
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::ModeParams;
    use crate::grid::init_product_gaussian;

    #[test]
    fn weyl_qp_is_half_anticommutator() {
        let spec = GridSpec::new([32; 3], [6.0; 3], 1.0).unwrap();
        let m = ModeParams {
            tilt: 0.4,
            correlation: 0.3,
            ..ModeParams::vacuum(1.0)
        };
        let s = init_product_gaussian(&spec, &[m; 3]).unwrap();
        let ops = SpectralOps::new(&spec);
        let sym = Poly::monomial(1.0, [1, 1, 0, 0, 0, 0]);
        let w = apply_weyl(&ops, &sym, &s.amplitudes);
        let q = Poly::variable(0);
        let p = Poly::variable(1);
        let qp = apply_weyl(&ops, &q, &apply_weyl(&ops, &p, &s.amplitudes));
        let pq = apply_weyl(&ops, &p, &apply_weyl(&ops, &q, &s.amplitudes));
        let err = w
            .iter()
            .zip(qp.iter().zip(&pq))
            .map(|(a, (b, c))| (a - 0.5 * (b + c)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(3, 3), 1.0);
    }
}
