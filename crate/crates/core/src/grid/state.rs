use std::io::{Read, Write};

use num_complex::Complex64;

use super::spec::GridSpec;
use super::spectral::fixed_order_sum;
use crate::gaussian::ModeParams;
use crate::{Error, Result};

/// Minimum ratio between each half-width and the largest initial position
/// standard deviation, and between each Nyquist wavenumber and the largest
/// excursion `|tilt| + 8 sigma_p / hbar` of that axis.
pub const ALIASING_GUARD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub spec: GridSpec,
    pub amplitudes: Vec<Complex64>,
}

impl GridState {
    pub fn new(spec: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                spec.len(),
                amplitudes.len()
            )));
        }
        Ok(GridState { spec, amplitudes })
    }

    /// `sum |psi|^2 dV`.
    pub fn norm(&self) -> f64 {
        let a = &self.amplitudes;
        fixed_order_sum(a.len(), |i| a[i].norm_sqr()) * self.spec.cell_volume()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiply by a global phase `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        GridState {
            spec: self.spec,
            amplitudes: self.amplitudes.iter().map(|a| a * w).collect(),
        }
    }

    /// Flat binary dump: three `u64` sizes, three `f64` half-widths, then
    /// interleaved `re, im` pairs in row-major order, all little-endian.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        for n in self.spec.points {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for l in self.spec.half_widths {
            w.write_all(&l.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(16 * self.amplitudes.len());
        for a in &self.amplitudes {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Inverse of [`GridState::write_dump`]; `hbar` is not part of the format.
    pub fn read_dump<R: Read>(mut r: R, hbar: f64) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut points = [0usize; 3];
        for p in &mut points {
            r.read_exact(&mut word)?;
            *p = usize::try_from(u64::from_le_bytes(word))
                .map_err(|_| Error::InvalidArgument("axis size overflows usize".into()))?;
        }
        let mut half_widths = [0.0; 3];
        for l in &mut half_widths {
            r.read_exact(&mut word)?;
            *l = f64::from_le_bytes(word);
        }
        let spec = GridSpec::new(points, half_widths, hbar)?;
        let mut raw = vec![0u8; 16 * spec.len()];
        r.read_exact(&mut raw)?;
        let amplitudes = raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(GridState { spec, amplitudes })
    }
}

fn mode_profile(spec: &GridSpec, axis: usize, p: &ModeParams) -> Vec<Complex64> {
    let hbar = spec.hbar;
    let chirp = p.chirp();
    let mut v: Vec<Complex64> = spec
        .coordinates(axis)
        .into_iter()
        .map(|y| {
            let d = y - p.mean;
            let phase = p.tilt * y + chirp * d * d / (2.0 * hbar);
            Complex64::from_polar((-d * d / (4.0 * p.width * p.width)).exp(), phase)
        })
        .collect();
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>() * spec.spacing(axis);
    let s = norm.sqrt().recip();
    v.iter_mut().for_each(|a| *a *= s);
    v
}

/// Normalized product `psi_Q(q) psi_Q'(q') psi_C(x)` of the Gaussians
/// described by `modes` (see [`ModeParams`]).
pub fn init_product_gaussian(spec: &GridSpec, modes: &[ModeParams; 3]) -> Result<GridState> {
    let widest = modes.iter().map(|m| m.width).fold(0.0, f64::max);
    for (axis, m) in modes.iter().enumerate() {
        if !(m.width > 0.0) {
            return Err(Error::InvalidArgument(format!("axis {axis}: width must be positive")));
        }
        let required = ALIASING_GUARD * widest;
        if spec.half_widths[axis] < required {
            return Err(Error::DomainTooSmall {
                axis,
                half_width: spec.half_widths[axis],
                required,
            });
        }
        let sigma_k = m.momentum_variance(spec.hbar).sqrt() / spec.hbar;
        let needed = m.tilt.abs() + ALIASING_GUARD * sigma_k;
        if spec.max_wavenumber(axis) < needed {
            return Err(Error::Underresolved {
                axis,
                max_wavenumber: spec.max_wavenumber(axis),
                required: needed,
            });
        }
    }
    let profiles: Vec<Vec<Complex64>> = (0..3).map(|a| mode_profile(spec, a, &modes[a])).collect();
    let [_, n1, n2] = spec.points;
    let amplitudes = (0..spec.len())
        .map(|f| {
            let ix = f % n2;
            let iqp = (f / n2) % n1;
            let iq = f / (n1 * n2);
            profiles[0][iq] * profiles[1][iqp] * profiles[2][ix]
        })
        .collect();
    GridState::new(*spec, amplitudes)
}
