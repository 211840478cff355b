use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Q,
    QPrime,
    X,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Q, Axis::QPrime, Axis::X];

    pub fn index(self) -> usize {
        match self {
            Axis::Q => 0,
            Axis::QPrime => 1,
            Axis::X => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Q => "q",
            Axis::QPrime => "q'",
            Axis::X => "x",
        }
    }
}

/// Uniform grid on `[-L, L)` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: [usize; 3],
    pub half_widths: [f64; 3],
    pub hbar: f64,
}

pub const MIN_POINTS: usize = 32;

impl GridSpec {
    pub fn new(points: [usize; 3], half_widths: [f64; 3], hbar: f64) -> Result<Self> {
        for (a, &n) in points.iter().enumerate() {
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!(
                    "axis {a}: point count {n} must be a power of two >= {MIN_POINTS}"
                )));
            }
        }
        for (a, &l) in half_widths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidArgument(format!("axis {a}: half-width must be positive")));
            }
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument("hbar must be positive".into()));
        }
        Ok(GridSpec {
            points,
            half_widths,
            hbar,
        })
    }

    /// 64^3 points, half-width 8 on every axis, `hbar = 1`.
    pub fn default_cube() -> Self {
        GridSpec {
            points: [64; 3],
            half_widths: [8.0; 3],
            hbar: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..3).map(|a| self.spacing(a)).product()
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        -self.half_widths[axis] + i as f64 * self.spacing(axis)
    }

    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.coordinate(axis, i)).collect()
    }

    /// Angular wavenumber of FFT bin `j` (Nyquist bin mapped to the negative edge).
    pub fn wavenumber(&self, axis: usize, j: usize) -> f64 {
        let n = self.points[axis];
        let dk = std::f64::consts::PI / self.half_widths[axis];
        if j < n / 2 {
            j as f64 * dk
        } else {
            (j as f64 - n as f64) * dk
        }
    }

    pub fn max_wavenumber(&self, axis: usize) -> f64 {
        std::f64::consts::PI / self.spacing(axis)
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.points[1] + idx[1]) * self.points[2] + idx[2]
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let ix = flat % self.points[2];
        let rest = flat / self.points[2];
        [rest / self.points[1], rest % self.points[1], ix]
    }
}
