use nalgebra::DMatrix;

/// Which `q`-type coordinate the `k` coupling acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `g1 p x + g2 q' k`: pairwise `Q-C` and `C-Q'` coupling.
    #[default]
    Pairwise,
    /// `g1 p x + g2 q k`: both couplings act on `Q`, leaving `Q'` uncoupled.
    SingleProbe,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Pairwise => "pairwise",
            Variant::SingleProbe => "single_probe",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "pairwise" => Some(Variant::Pairwise),
            "single_probe" => Some(Variant::SingleProbe),
            _ => None,
        }
    }

    /// Phase-space index of the coordinate multiplying `k` in the second term.
    pub(crate) fn k_partner(self) -> usize {
        match self {
            Variant::Pairwise => 2,
            Variant::SingleProbe => 0,
        }
    }
}

/// `H = 1/2 r^T G r` for the 3-mode coupling Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub gmatrix: DMatrix<f64>,
    pub g1: f64,
    pub g2: f64,
    pub variant: Variant,
}

pub fn build_hamiltonian(g1: f64, g2: f64, variant: Variant) -> QuadraticHamiltonian {
    let mut g = DMatrix::zeros(6, 6);
    // g1 p x
    g[(1, 4)] = g1;
    g[(4, 1)] = g1;
    // g2 (q' or q) k
    let j = variant.k_partner();
    g[(j, 5)] = g2;
    g[(5, j)] = g2;
    QuadraticHamiltonian {
        gmatrix: g,
        g1,
        g2,
        variant,
    }
}

impl QuadraticHamiltonian {
    /// Classical value `1/2 r^T G r` at a phase-space point.
    pub fn energy(&self, r: &nalgebra::DVector<f64>) -> f64 {
        0.5 * r.dot(&(&self.gmatrix * r))
    }
}
