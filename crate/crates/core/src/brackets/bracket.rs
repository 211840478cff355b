use super::functional::{functional_gradients, quadrature, FunctionalGradient};
use super::observable::{Kind, ObservableSpec};
use crate::grid::GridState;
use crate::{Error, Mode, Result};

/// Integrand of the hybrid bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BracketForm {
    /// `dA/dP dB/dS - dA/dS dB/dP`; reproduces the Poisson and commutator
    /// identities.
    #[default]
    Standard,
    /// The same integrand multiplied by `P`.
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketResult {
    pub value: f64,
    /// `|full - half-resolution|` of the quadrature.
    pub quadrature_error_estimate: f64,
    /// Fraction of grid points outside the support mask.
    pub masked_fraction: f64,
}

pub fn hybrid_bracket(state: &GridState, a: &ObservableSpec, b: &ObservableSpec) -> Result<BracketResult> {
    hybrid_bracket_with(state, a, b, BracketForm::Standard)
}

pub fn hybrid_bracket_with(
    state: &GridState,
    a: &ObservableSpec,
    b: &ObservableSpec,
    form: BracketForm,
) -> Result<BracketResult> {
    let ga = functional_gradients(state, a)?;
    let gb = functional_gradients(state, b)?;
    let density = (form == BracketForm::Verbatim).then(|| state.density());
    Ok(bracket_from_gradients(&ga, &gb, density.as_deref()))
}

/// Bracket of two precomputed gradients; `density` selects the verbatim
/// integrand.
pub fn bracket_from_gradients(
    a: &FunctionalGradient,
    b: &FunctionalGradient,
    density: Option<&[f64]>,
) -> BracketResult {
    let field: Vec<f64> = (0..a.d_dp.len())
        .map(|i| {
            let v = a.d_dp[i] * b.d_ds[i] - a.d_ds[i] * b.d_dp[i];
            density.map_or(v, |p| v * p[i])
        })
        .collect();
    let (value, quadrature_error_estimate) = quadrature(&a.spec, &field);
    BracketResult {
        value,
        quadrature_error_estimate,
        masked_fraction: a.masked_fraction(),
    }
}

/// Cross-sector bracket `{Q_M, C_f}` for `M` acting on a single probe.
pub fn separability_probe(state: &GridState, m: &ObservableSpec, f: &ObservableSpec) -> Result<BracketResult> {
    if m.kind() != Kind::Quantum {
        return Err(Error::KindMismatch { expected: "quantum" });
    }
    if f.kind() != Kind::Classical {
        return Err(Error::KindMismatch { expected: "classical" });
    }
    let support = m.mode_support();
    if support.contains(&Mode::C) {
        return Err(Error::SupportOverlap(Mode::C));
    }
    if support.len() > 1 {
        return Err(Error::InvalidArgument(
            "the quantum observable must act on a single probe".into(),
        ));
    }
    hybrid_bracket(state, m, f)
}

/// `(E_M, E_M', E_{M M'})` for observables on disjoint subsystems.
pub fn factorization_probe(
    state: &GridState,
    m: &ObservableSpec,
    m_prime: &ObservableSpec,
) -> Result<(f64, f64, f64)> {
    for s in [m, m_prime] {
        if s.kind() != Kind::Quantum {
            return Err(Error::KindMismatch { expected: "quantum" });
        }
    }
    if let Some(&mode) = m.mode_support().intersection(&m_prime.mode_support()).next() {
        return Err(Error::SupportOverlap(mode));
    }
    // Disjoint supports commute, so the joint Weyl symbol is the product.
    let joint = ObservableSpec::quantum(&m.symbol().mul(&m_prime.symbol()))?;
    let q = |s: &ObservableSpec| super::functional::quantum_functional(state, s);
    Ok((q(m)?, q(m_prime)?, q(&joint)?))
}
