use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::spec::GridSpec;

const SUM_CHUNK: usize = 4096;

/// Sum of `f(0..n)` with a fixed chunking, so the result does not depend on
/// the number of worker threads.
pub fn fixed_order_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..n.div_ceil(SUM_CHUNK))
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * SUM_CHUNK).min(n);
            (c * SUM_CHUNK..end).map(&f).sum::<f64>()
        })
        .collect();
    partial.iter().sum()
}

/// FFT plans for the three axes of a grid, plus line-wise helpers.
pub struct SpectralOps {
    spec: GridSpec,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl SpectralOps {
    pub fn new(spec: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let forward = spec.points.map(|n| planner.plan_fft_forward(n));
        let inverse = spec.points.map(|n| planner.plan_fft_inverse(n));
        SpectralOps {
            spec: *spec,
            forward,
            inverse,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Flat index of element `i` of line `line` along `axis`.
    fn line_start_stride(&self, axis: usize, line: usize) -> (usize, usize) {
        let [_, n1, n2] = self.spec.points;
        match axis {
            0 => (line, n1 * n2),
            1 => {
                let (iq, ix) = (line / n2, line % n2);
                (iq * n1 * n2 + ix, n2)
            }
            _ => (line * n2, 1),
        }
    }

    /// The two grid indices not on `axis`, for a line number.
    pub fn line_coordinates(&self, axis: usize, line: usize) -> [usize; 2] {
        let [_, n1, n2] = self.spec.points;
        match axis {
            0 => [line / n2, line % n2],
            1 => [line / n2, line % n2],
            _ => [line / n1, line % n1],
        }
    }

    /// Runs `f(line, values)` on every 1-D line along `axis`.
    pub fn for_each_line<F>(&self, data: &mut [Complex64], axis: usize, f: F)
    where
        F: Fn(usize, &mut [Complex64]) + Sync,
    {
        let n = self.spec.points[axis];
        if axis == 2 {
            data.par_chunks_mut(n).enumerate().for_each(|(l, line)| f(l, line));
            return;
        }
        let lines = data.len() / n;
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        for l in 0..lines {
            let (start, stride) = self.line_start_stride(axis, l);
            for i in 0..n {
                buf[l * n + i] = data[start + i * stride];
            }
        }
        buf.par_chunks_mut(n).enumerate().for_each(|(l, line)| f(l, line));
        for l in 0..lines {
            let (start, stride) = self.line_start_stride(axis, l);
            for i in 0..n {
                data[start + i * stride] = buf[l * n + i];
            }
        }
    }

    /// Forward FFT along `axis`, multiply bin `j` of line `l` by `m(l, j)`,
    /// inverse FFT (normalized).
    pub fn apply_multiplier<M>(&self, data: &mut [Complex64], axis: usize, m: M)
    where
        M: Fn(usize, usize) -> Complex64 + Sync,
    {
        let n = self.spec.points[axis];
        let scale = 1.0 / n as f64;
        let fwd = &self.forward[axis];
        let inv = &self.inverse[axis];
        self.for_each_line(data, axis, |l, line| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len()];
            fwd.process_with_scratch(line, &mut scratch);
            for (j, v) in line.iter_mut().enumerate() {
                *v *= m(l, j) * scale;
            }
            inv.process_with_scratch(line, &mut scratch);
        });
    }

    /// Unnormalized forward FFT along `axis`.
    pub fn forward_transform(&self, data: &mut [Complex64], axis: usize) {
        let fwd = &self.forward[axis];
        self.for_each_line(data, axis, |_, line| fwd.process(line));
    }

    /// Spectral `d/dy` along `axis`; the Nyquist bin is zeroed.
    pub fn derivative(&self, data: &[Complex64], axis: usize) -> Vec<Complex64> {
        let mut out = data.to_vec();
        let n = self.spec.points[axis];
        let spec = self.spec;
        self.apply_multiplier(&mut out, axis, |_, j| {
            if j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, spec.wavenumber(axis, j))
            }
        });
        out
    }

    pub fn derivative_real(&self, data: &[f64], axis: usize) -> Vec<f64> {
        let c: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.derivative(&c, axis).into_iter().map(|v| v.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field(spec: &GridSpec) -> Vec<Complex64> {
        (0..spec.len())
            .map(|f| {
                let [i, j, k] = spec.multi_index(f);
                let (q, qp, x) = (
                    spec.coordinate(0, i),
                    spec.coordinate(1, j),
                    spec.coordinate(2, k),
                );
                Complex64::new((-(q * q + 2.0 * qp * qp + 0.5 * (x - 0.3).powi(2))).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn derivative_matches_analytic_on_every_axis() {
        let spec = GridSpec::new([64, 64, 64], [6.0, 5.0, 9.0], 1.0).unwrap();
        let ops = SpectralOps::new(&spec);
        let f = gaussian_field(&spec);
        let coef = [-2.0, -4.0, -1.0];
        for axis in 0..3 {
            let d = ops.derivative(&f, axis);
            let mut err: f64 = 0.0;
            for (flat, v) in d.iter().enumerate() {
                let idx = spec.multi_index(flat);
                let y = spec.coordinate(axis, idx[axis]) - if axis == 2 { 0.3 } else { 0.0 };
                let exact = coef[axis] * y * f[flat].re;
                err = err.max((v.re - exact).abs() + v.im.abs());
            }
            assert!(err < 1e-10, "axis {axis}: {err}");
        }
    }

    #[test]
    fn fixed_sum_is_thread_independent() {
        let n = 100_003;
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3;
        let a = fixed_order_sum(n, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| fixed_order_sum(n, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
