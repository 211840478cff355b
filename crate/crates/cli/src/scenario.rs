use hybrid_core::brackets::hybrid_bracket;
use hybrid_core::gaussian::{
    build_hamiltonian, evolve_gaussian, logarithmic_negativity, mediator_moment_inversion, optimize_chsh,
    simulate_probe_series, witness_expectation, MediatorEstimate, PhaseSpaceState, QuadraticHamiltonian,
};
use hybrid_core::grid::{grid_moments, init_product_gaussian, split_step_evolve, GridMoments, GridState};
use hybrid_core::Mode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::config::{ConfigError, Diagnostic, ScenarioConfig};
use crate::report::ScenarioReport;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] hybrid_core::Error),
    #[error("non-finite value in column `{column}` at t = {t}")]
    NonFinite { column: String, t: f64 },
}

impl RunError {
    /// 2 for anything the user can fix in the config, 3 for numerical guards.
    pub fn exit_code(&self) -> i32 {
        use hybrid_core::Error as E;
        match self {
            RunError::NonFinite { .. } => 3,
            RunError::Core(
                E::Stability { .. }
                | E::DomainTooSmall { .. }
                | E::Underresolved { .. }
                | E::NonPhysical(_)
                | E::Asymmetric(_)
                | E::NonHermitian(_),
            ) => 3,
            _ => 2,
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

#[derive(Debug)]
pub struct ScenarioRun {
    pub report: ScenarioReport,
    /// Final grid state, present when the grid backend was needed.
    pub grid: Option<GridState>,
}

fn hamiltonian(cfg: &ScenarioConfig) -> QuadraticHamiltonian {
    build_hamiltonian(cfg.g1, cfg.g2, cfg.variant)
}

fn initial_gaussian(cfg: &ScenarioConfig) -> RunResult<PhaseSpaceState> {
    Ok(PhaseSpaceState::product(&cfg.modes, cfg.grid.hbar)?)
}

/// Step counts of the sampled rows: every `stride` steps, plus the last.
fn sample_steps(cfg: &ScenarioConfig) -> Vec<usize> {
    let total = (cfg.total_time / cfg.dt).round() as usize;
    let mut steps: Vec<usize> = (0..=total).step_by(cfg.stride).collect();
    if steps.last() != Some(&total) {
        steps.push(total);
    }
    steps
}

fn header(cfg: &ScenarioConfig, command: &str) -> Vec<String> {
    let g = &cfg.grid;
    vec![
        format!("hybridlab {}", env!("CARGO_PKG_VERSION")),
        format!("command: {command}"),
        format!(
            "grid: {}x{}x{} points, half-widths {}, {}, {}, hbar {}",
            g.points[0], g.points[1], g.points[2], g.half_widths[0], g.half_widths[1], g.half_widths[2], g.hbar
        ),
    ]
}

fn echo(meta: &mut Vec<String>, cfg: &ScenarioConfig) {
    meta.extend(cfg.to_string().lines().map(|l| format!("config: {l}")));
}

fn check_finite(columns: &[String], row: &[f64]) -> RunResult<()> {
    match row.iter().position(|v| !v.is_finite()) {
        Some(j) => Err(RunError::NonFinite {
            column: columns[j].clone(),
            t: row[0],
        }),
        None => Ok(()),
    }
}

/// Evolves both backends over the sample times and evaluates the requested
/// diagnostics at each.
pub fn run_scenario(cfg: &ScenarioConfig, command: &str) -> RunResult<ScenarioRun> {
    let h = hamiltonian(cfg);
    let g0 = initial_gaussian(cfg)?;
    let on = |d: Diagnostic| cfg.diagnostics.contains(&d);
    let need_grid = on(Diagnostic::Brackets) || on(Diagnostic::Validate) || cfg.grid_dump.is_some();
    let mut grid = if need_grid {
        Some(init_product_gaussian(&cfg.grid, &cfg.modes)?)
    } else {
        None
    };

    let mut columns = vec!["t".to_string()];
    if on(Diagnostic::Negativity) {
        columns.push("log_negativity".into());
    }
    if on(Diagnostic::Witness) {
        columns.push("witness".into());
    }
    if on(Diagnostic::Chsh) {
        columns.push("chsh_opt".into());
    }
    let mut meta = header(cfg, command);
    if on(Diagnostic::Brackets) {
        for (i, (a, b)) in cfg.bracket_pairs.iter().enumerate() {
            columns.push(format!("bracket_{}", i + 1));
            columns.push(format!("bracket_{}_err", i + 1));
            meta.push(format!("bracket_{} = {{{a}, {b}}}", i + 1));
        }
    }
    if on(Diagnostic::Validate) {
        columns.push("moment_residual".into());
    }

    let mut rows = Vec::new();
    let mut residual: f64 = 0.0;
    let mut masked: f64 = 0.0;
    let mut done = 0;
    for n in sample_steps(cfg) {
        let t = n as f64 * cfg.dt;
        if let Some(state) = &mut grid {
            if n > done {
                *state = split_step_evolve(state, &h, cfg.dt, n - done)?;
                done = n;
            }
        }
        let gauss = evolve_gaussian(&g0, &h, t)?;
        let mut row = vec![t];
        if on(Diagnostic::Negativity) {
            row.push(logarithmic_negativity(&gauss, &[Mode::Q], &[Mode::QPrime])?);
        }
        if on(Diagnostic::Witness) {
            row.push(witness_expectation(&gauss)?);
        }
        if on(Diagnostic::Chsh) {
            row.push(optimize_chsh(&gauss.reduce_modes(&[Mode::Q, Mode::QPrime])?)?.0);
        }
        if let Some(state) = &grid {
            if on(Diagnostic::Brackets) {
                for (a, b) in &cfg.bracket_pairs {
                    let r = hybrid_bracket(state, a, b)?;
                    masked = masked.max(r.masked_fraction);
                    row.push(r.value);
                    row.push(r.quadrature_error_estimate);
                }
            }
            if on(Diagnostic::Validate) {
                residual = residual.max(grid_moments(state).max_discrepancy(gauss.means(), gauss.covariance()));
                row.push(residual);
            }
        }
        check_finite(&columns, &row)?;
        rows.push(row);
    }

    if on(Diagnostic::Brackets) {
        meta.push(format!("max masked fraction: {masked}"));
    }
    echo(&mut meta, cfg);
    Ok(ScenarioRun {
        report: ScenarioReport {
            metadata: meta,
            columns,
            rows,
        },
        grid,
    })
}

#[derive(Debug, Clone)]
pub struct ValidationSummary {
    pub report: ScenarioReport,
    /// Max over sample times of the 27-moment discrepancy.
    pub max_residual: f64,
    /// Max moment change between the dt and dt/2 runs at the final time.
    pub halving_difference: f64,
    /// `|m_dt - m_dt/2| / |m_dt/2 - m_dt/4|`; about 4 for a second-order
    /// scheme, `None` when both differences sit at roundoff.
    pub convergence_ratio: Option<f64>,
}

fn moment_gap(a: &GridMoments, b: &GridMoments) -> f64 {
    a.max_discrepancy(&b.means, &b.covariance)
}

/// Below this the dt-halving differences carry no signal.
const ROUNDOFF_FLOOR: f64 = 1e-14;

pub fn validate_backends(cfg: &ScenarioConfig) -> RunResult<ValidationSummary> {
    let h = hamiltonian(cfg);
    let g0 = initial_gaussian(cfg)?;
    let psi0 = init_product_gaussian(&cfg.grid, &cfg.modes)?;
    let columns: Vec<String> = ["t", "moment_discrepancy", "moment_residual"].map(String::from).to_vec();
    let mut rows = Vec::new();
    let mut state = psi0.clone();
    let mut done = 0;
    let mut max_residual: f64 = 0.0;
    for n in sample_steps(cfg) {
        let t = n as f64 * cfg.dt;
        if n > done {
            state = split_step_evolve(&state, &h, cfg.dt, n - done)?;
            done = n;
        }
        let gauss = evolve_gaussian(&g0, &h, t)?;
        let d = grid_moments(&state).max_discrepancy(gauss.means(), gauss.covariance());
        max_residual = max_residual.max(d);
        let row = vec![t, d, max_residual];
        check_finite(&columns, &row)?;
        rows.push(row);
    }

    let steps = done;
    let (halving_difference, convergence_ratio) = if steps == 0 {
        (0.0, None)
    } else {
        let coarse = grid_moments(&state);
        let half = grid_moments(&split_step_evolve(&psi0, &h, cfg.dt / 2.0, 2 * steps)?);
        let quarter = grid_moments(&split_step_evolve(&psi0, &h, cfg.dt / 4.0, 4 * steps)?);
        let (d1, d2) = (moment_gap(&coarse, &half), moment_gap(&half, &quarter));
        (d1, (d2 > ROUNDOFF_FLOOR).then(|| d1 / d2))
    };

    let mut meta = header(cfg, "validate");
    meta.push(format!("max moment residual: {max_residual}"));
    meta.push(format!("dt-halving difference: {halving_difference}"));
    meta.push(match convergence_ratio {
        Some(r) => format!("dt-halving ratio: {r} (order {})", r.log2()),
        None => "dt-halving ratio: n/a (differences at roundoff)".into(),
    });
    echo(&mut meta, cfg);
    Ok(ValidationSummary {
        report: ScenarioReport {
            metadata: meta,
            columns,
            rows,
        },
        max_residual,
        halving_difference,
        convergence_ratio,
    })
}

/// Mediator moments `(<x>, <k>, Var x, Var k, Cov(x, k))` of a state.
pub fn mediator_moments(state: &PhaseSpaceState) -> [f64; 5] {
    let (m, v) = (state.means(), state.covariance());
    [m[4], m[5], v[(4, 4)], v[(5, 5)], v[(4, 5)]]
}

fn estimate_moments(e: &MediatorEstimate) -> [f64; 5] {
    [e.mean_x, e.mean_k, e.var_x, e.var_k, e.cov_xk]
}

pub const MEDIATOR_LABELS: [&str; 5] = ["<x>", "<k>", "Var x", "Var k", "Cov(x,k)"];

#[derive(Debug, Clone)]
pub struct TomographyReport {
    pub planted: [f64; 5],
    pub estimate: MediatorEstimate,
    /// Probe moment series actually inverted (noise included).
    pub report: ScenarioReport,
}

impl TomographyReport {
    pub fn recovered(&self) -> [f64; 5] {
        estimate_moments(&self.estimate)
    }

    pub fn table(&self) -> Vec<String> {
        let mut lines = vec![format!("{:<9} {:>24} {:>24} {:>10}", "quantity", "planted", "recovered", "abs error")];
        for ((label, p), r) in MEDIATOR_LABELS.iter().zip(self.planted).zip(self.recovered()) {
            lines.push(format!("{label:<9} {p:>24.16e} {r:>24.16e} {:>10.3e}", (r - p).abs()));
        }
        lines
    }
}

const PROBE_COLUMNS: [&str; 14] = [
    "q", "p", "qp", "pp", "var_q", "cov_q_p", "cov_q_qp", "cov_q_pp", "var_p", "cov_p_qp", "cov_p_pp",
    "var_qp", "cov_qp_pp", "var_pp",
];

/// Forward-simulates the probe moments, adds seeded Gaussian noise, and
/// inverts using the probe series only.
pub fn tomography_demo(cfg: &ScenarioConfig) -> RunResult<TomographyReport> {
    let h = hamiltonian(cfg);
    let g0 = initial_gaussian(cfg)?;
    let mut series = simulate_probe_series(&g0, &h, &cfg.tomography.times)?;
    if cfg.tomography.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.tomography.seed);
        let normal = Normal::new(0.0, cfg.tomography.noise).expect("validated noise");
        for s in &mut series {
            for m in &mut s.means {
                *m += rng.sample(normal);
            }
            for i in 0..4 {
                for j in i..4 {
                    let e = rng.sample(normal);
                    s.covariance[i][j] += e;
                    if i != j {
                        s.covariance[j][i] += e;
                    }
                }
            }
        }
    }
    let estimate = mediator_moment_inversion(&series, &h)?;

    let mut columns = vec!["t".to_string()];
    columns.extend(PROBE_COLUMNS.map(String::from));
    let rows: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            let mut row = vec![s.t];
            row.extend(s.means);
            for i in 0..4 {
                row.extend(&s.covariance[i][i..]);
            }
            row
        })
        .collect();
    let planted = mediator_moments(&g0);
    let mut out = TomographyReport {
        planted,
        estimate,
        report: ScenarioReport {
            metadata: header(cfg, "tomography"),
            columns,
            rows,
        },
    };
    let table = out.table();
    out.report.metadata.extend(table);
    out.report.metadata.push(format!("least-squares residual: {}", estimate.residual));
    echo(&mut out.report.metadata, cfg);
    for row in &out.report.rows {
        check_finite(&out.report.columns, row)?;
    }
    Ok(out)
}
