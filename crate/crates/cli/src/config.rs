//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! [coupling]      g1, g2, variant (pairwise | single_probe)
//! [time]          total, dt, stride (steps between rows)
//! [grid]          points, half_widths (one value or three), hbar
//! [mode.q]        mean, width, tilt, correlation
//! [mode.qprime]   same keys
//! [mode.c]        same keys; correlation is the planted <xk>
//! [diagnostics]   enabled (comma list), brackets (`A | B` pairs, `;`-separated)
//! [tomography]    times (comma list), noise, seed
//! [output]        path, grid_dump
//! ```
//!
//! Every key is optional; unknown sections and keys are rejected.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hybrid_core::brackets::ObservableSpec;
use hybrid_core::gaussian::{ModeParams, Variant};
use hybrid_core::grid::GridSpec;
use hybrid_core::Mode;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config line {line}: {msg}")]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, msg: msg.into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Diagnostic {
    Negativity,
    Witness,
    Chsh,
    Brackets,
    Validate,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 5] = [
        Diagnostic::Negativity,
        Diagnostic::Witness,
        Diagnostic::Chsh,
        Diagnostic::Brackets,
        Diagnostic::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Diagnostic::Negativity => "negativity",
            Diagnostic::Witness => "witness",
            Diagnostic::Chsh => "chsh",
            Diagnostic::Brackets => "brackets",
            Diagnostic::Validate => "validate",
        }
    }

    fn parse(s: &str) -> Option<Diagnostic> {
        Diagnostic::ALL.into_iter().find(|d| d.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    pub times: Vec<f64>,
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub g1: f64,
    pub g2: f64,
    pub variant: Variant,
    pub total_time: f64,
    pub dt: f64,
    pub stride: usize,
    pub grid: GridSpec,
    pub modes: [ModeParams; 3],
    pub diagnostics: BTreeSet<Diagnostic>,
    pub bracket_pairs: Vec<(ObservableSpec, ObservableSpec)>,
    pub tomography: TomographyConfig,
    pub output_path: Option<PathBuf>,
    pub grid_dump: Option<PathBuf>,
}

const MODE_SECTIONS: [(&str, Mode); 3] = [("mode.q", Mode::Q), ("mode.qprime", Mode::QPrime), ("mode.c", Mode::C)];

const KEYS: [(&str, &[&str]); 9] = [
    ("coupling", &["g1", "g2", "variant"]),
    ("time", &["total", "dt", "stride"]),
    ("grid", &["points", "half_widths", "hbar"]),
    ("mode.q", &["mean", "width", "tilt", "correlation"]),
    ("mode.qprime", &["mean", "width", "tilt", "correlation"]),
    ("mode.c", &["mean", "width", "tilt", "correlation"]),
    ("diagnostics", &["enabled", "brackets"]),
    ("tomography", &["times", "noise", "seed"]),
    ("output", &["path", "grid_dump"]),
];

/// Steps must tile `total` to this relative accuracy.
const STEP_TOL: f64 = 1e-9;

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            g1: 1.0,
            g2: 1.0,
            variant: Variant::Pairwise,
            total_time: 2.0,
            dt: 1.0 / 64.0,
            stride: 8,
            grid: GridSpec::default_cube(),
            modes: [ModeParams::vacuum(1.0); 3],
            diagnostics: [Diagnostic::Negativity, Diagnostic::Witness].into(),
            bracket_pairs: Vec::new(),
            tomography: TomographyConfig {
                times: (1..=20).map(|i| 0.1 * i as f64).collect(),
                noise: 0.0,
                seed: 0,
            },
            output_path: None,
            grid_dump: None,
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn number<T: FromStr>(e: &Entry, what: &str) -> Result<T, ConfigError> {
    e.value
        .parse()
        .or_else(|_| err(e.line, format!("{what}: cannot parse `{}`", e.value)))
}

fn list<T: FromStr>(e: &Entry, what: &str) -> Result<Vec<T>, ConfigError> {
    e.value
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .or_else(|_| err(e.line, format!("{what}: cannot parse `{}`", s.trim())))
        })
        .collect()
}

fn triple<T: FromStr + Copy>(e: &Entry, what: &str) -> Result<[T; 3], ConfigError> {
    match list(e, what)?.as_slice() {
        &[v] => Ok([v; 3]),
        &[a, b, c] => Ok([a, b, c]),
        _ => err(e.line, format!("{what}: expected one value or three")),
    }
}

fn parse_pair(text: &str, line: usize) -> Result<(ObservableSpec, ObservableSpec), ConfigError> {
    let Some((a, b)) = text.split_once('|') else {
        return err(line, format!("bracket pair `{text}` must read `A | B`"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<ObservableSpec>()
            .or_else(|e| err(line, format!("observable `{}`: {e}", s.trim())))
    };
    Ok((parse(a)?, parse(b)?))
}

impl FromStr for ScenarioConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let allowed: HashMap<&str, &[&str]> = KEYS.into_iter().collect();
        let mut entries: HashMap<(String, String), Entry> = HashMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return err(line, "unterminated section header");
                };
                let name = name.trim();
                if !allowed.contains_key(name) {
                    return err(line, format!("unknown section [{name}]"));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, format!("expected `key = value`, got `{content}`"));
            };
            let key = key.trim();
            let Some(sec) = &section else {
                return err(line, format!("key `{key}` appears before any section"));
            };
            if !allowed[sec.as_str()].contains(&key) {
                return err(line, format!("unknown key `{key}` in [{sec}]"));
            }
            let slot = (sec.clone(), key.to_string());
            if let Some(prev) = entries.get(&slot) {
                return err(line, format!("duplicate key `{key}` in [{sec}] (first on line {})", prev.line));
            }
            entries.insert(
                slot,
                Entry {
                    line,
                    value: value.trim().to_string(),
                },
            );
        }
        let get = |sec: &str, key: &str| entries.get(&(sec.to_string(), key.to_string()));

        let mut cfg = ScenarioConfig::default();
        if let Some(e) = get("coupling", "g1") {
            cfg.g1 = number(e, "g1")?;
        }
        if let Some(e) = get("coupling", "g2") {
            cfg.g2 = number(e, "g2")?;
        }
        if let Some(e) = get("coupling", "variant") {
            cfg.variant = Variant::parse(&e.value)
                .map_or_else(|| err(e.line, format!("unknown variant `{}` (pairwise | single_probe)", e.value)), Ok)?;
        }
        if let Some(e) = get("time", "total") {
            cfg.total_time = number(e, "total")?;
        }
        if let Some(e) = get("time", "dt") {
            cfg.dt = number(e, "dt")?;
        }
        if let Some(e) = get("time", "stride") {
            cfg.stride = number(e, "stride")?;
        }

        let mut points = cfg.grid.points;
        let mut half_widths = cfg.grid.half_widths;
        let mut hbar = cfg.grid.hbar;
        if let Some(e) = get("grid", "points") {
            points = triple(e, "points")?;
        }
        if let Some(e) = get("grid", "half_widths") {
            half_widths = triple(e, "half_widths")?;
        }
        if let Some(e) = get("grid", "hbar") {
            hbar = number(e, "hbar")?;
        }
        let grid_line = ["points", "half_widths", "hbar"]
            .iter()
            .filter_map(|k| get("grid", k).map(|e| e.line))
            .min()
            .unwrap_or(0);
        cfg.grid = GridSpec::new(points, half_widths, hbar).or_else(|e| err(grid_line, format!("grid: {e}")))?;

        for (sec, mode) in MODE_SECTIONS {
            let mut m = ModeParams::vacuum(hbar);
            if let Some(e) = get(sec, "mean") {
                m.mean = number(e, "mean")?;
            }
            if let Some(e) = get(sec, "width") {
                m.width = number(e, "width")?;
                if !(m.width > 0.0 && m.width.is_finite()) {
                    return err(e.line, "width must be positive");
                }
            }
            if let Some(e) = get(sec, "tilt") {
                m.tilt = number(e, "tilt")?;
            }
            if let Some(e) = get(sec, "correlation") {
                m.correlation = number(e, "correlation")?;
            }
            cfg.modes[mode.index()] = m;
        }

        if let Some(e) = get("diagnostics", "enabled") {
            cfg.diagnostics = BTreeSet::new();
            for name in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let d = Diagnostic::parse(name).map_or_else(|| err(e.line, format!("unknown diagnostic `{name}`")), Ok)?;
                cfg.diagnostics.insert(d);
            }
        }
        if let Some(e) = get("diagnostics", "brackets") {
            cfg.bracket_pairs = e
                .value
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|p| parse_pair(p, e.line))
                .collect::<Result<_, _>>()?;
        }
        if cfg.diagnostics.contains(&Diagnostic::Brackets) && cfg.bracket_pairs.is_empty() {
            let line = get("diagnostics", "enabled").map_or(0, |e| e.line);
            return err(line, "diagnostic `brackets` needs at least one pair in `brackets`");
        }

        if let Some(e) = get("tomography", "times") {
            cfg.tomography.times = list(e, "times")?;
            let t = &cfg.tomography.times;
            if !t.iter().all(|t| t.is_finite() && *t >= 0.0) || t.windows(2).any(|w| w[1] <= w[0]) {
                return err(e.line, "times must be finite, non-negative and strictly increasing");
            }
        }
        if let Some(e) = get("tomography", "noise") {
            cfg.tomography.noise = number(e, "noise")?;
            if !(cfg.tomography.noise >= 0.0 && cfg.tomography.noise.is_finite()) {
                return err(e.line, "noise must be a finite non-negative standard deviation");
            }
        }
        if let Some(e) = get("tomography", "seed") {
            cfg.tomography.seed = number(e, "seed")?;
        }
        if let Some(e) = get("output", "path") {
            cfg.output_path = Some(PathBuf::from(&e.value));
        }
        if let Some(e) = get("output", "grid_dump") {
            cfg.grid_dump = Some(PathBuf::from(&e.value));
        }

        let line_of = |sec: &str, key: &str| get(sec, key).map_or(0, |e| e.line);
        for (v, key) in [(cfg.g1, "g1"), (cfg.g2, "g2")] {
            if !v.is_finite() {
                return err(line_of("coupling", key), format!("{key} must be finite"));
            }
        }
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return err(line_of("time", "dt"), "dt must be positive");
        }
        if !(cfg.total_time >= 0.0 && cfg.total_time.is_finite()) {
            return err(line_of("time", "total"), "total must be non-negative");
        }
        if cfg.total_time > 0.0 {
            if cfg.dt > cfg.total_time {
                return err(line_of("time", "dt"), "dt exceeds total");
            }
            let n = cfg.total_time / cfg.dt;
            if (n - n.round()).abs() > STEP_TOL * n {
                return err(line_of("time", "dt"), format!("dt does not divide total ({n} steps)"));
            }
        }
        if cfg.stride == 0 {
            return err(line_of("time", "stride"), "stride must be at least 1");
        }
        Ok(cfg)
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; parsing it gives back an equal config.
impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[coupling]")?;
        writeln!(f, "g1 = {}", self.g1)?;
        writeln!(f, "g2 = {}", self.g2)?;
        writeln!(f, "variant = {}", self.variant.name())?;
        writeln!(f, "[time]")?;
        writeln!(f, "total = {}", self.total_time)?;
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "stride = {}", self.stride)?;
        writeln!(f, "[grid]")?;
        writeln!(f, "points = {}", join(&self.grid.points))?;
        writeln!(f, "half_widths = {}", join(&self.grid.half_widths))?;
        writeln!(f, "hbar = {}", self.grid.hbar)?;
        for (sec, mode) in MODE_SECTIONS {
            let m = &self.modes[mode.index()];
            writeln!(f, "[{sec}]")?;
            writeln!(f, "mean = {}", m.mean)?;
            writeln!(f, "width = {}", m.width)?;
            writeln!(f, "tilt = {}", m.tilt)?;
            writeln!(f, "correlation = {}", m.correlation)?;
        }
        writeln!(f, "[diagnostics]")?;
        let names: Vec<_> = self.diagnostics.iter().map(|d| d.name()).collect();
        writeln!(f, "enabled = {}", join(&names))?;
        let pairs: Vec<_> = self.bracket_pairs.iter().map(|(a, b)| format!("{a} | {b}")).collect();
        writeln!(f, "brackets = {}", pairs.join("; "))?;
        writeln!(f, "[tomography]")?;
        writeln!(f, "times = {}", join(&self.tomography.times))?;
        writeln!(f, "noise = {}", self.tomography.noise)?;
        writeln!(f, "seed = {}", self.tomography.seed)?;
        writeln!(f, "[output]")?;
        if let Some(p) = &self.output_path {
            writeln!(f, "path = {}", p.display())?;
        }
        if let Some(p) = &self.grid_dump {
            writeln!(f, "grid_dump = {}", p.display())?;
        }
        Ok(())
    }
}
