//! JSON-configured scenarios behind the `twophoton` binary.
//!
//! A run writes `<scenario>.csv` (plus extra files for `montecarlo`) and a
//! `manifest.json` with the resolved configuration, SHA-256 checksums of every
//! emitted file and a short numeric summary. Nothing time-dependent is
//! recorded, so identical inputs regenerate identical bytes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::ensemble::{
    averaged_tau_marginals, dip_half_width, total_coincidence_vs_delay_with, Axis, Curve, Ensemble,
    GaussianFamily, PulseFamily, ShapedFamily, DEFAULT_DETUNING_NODES,
};
use crate::error::Error;
use crate::gaussian::{p_2hnu, p_2hnu_dephased, p_inh_delayed, p_total, PhotonPairConfig};
use crate::interference::{port_pair_probabilities, port_pair_probabilities_quadrature};
use crate::montecarlo::{coincidence_histogram, estimate_total_coincidence, run_experiment};
use crate::numeric::fmt_f64;
use crate::wavepacket::{make_gaussian_mode, overlap, read_mode_csv, ModeFunction, TimeGrid};

pub const TOOL_NAME: &str = "twophoton";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Fig2Surface,
    Fig3Dip,
    Fig4Surface,
    BeatCurve,
    Montecarlo,
    CustomModes,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Fig2Surface => "fig2-surface",
            ScenarioKind::Fig3Dip => "fig3-dip",
            ScenarioKind::Fig4Surface => "fig4-surface",
            ScenarioKind::BeatCurve => "beat-curve",
            ScenarioKind::Montecarlo => "montecarlo",
            ScenarioKind::CustomModes => "custom-modes",
        }
    }
}

/// `n` evenly spaced points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    pub const fn new(min: f64, max: f64, n: usize) -> Self {
        Range { min, max, n }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.max } else { self.min + i as f64 * step })
            .collect()
    }

    fn issues(&self, field: &str, out: &mut Vec<String>) {
        if !self.min.is_finite() || !self.max.is_finite() {
            out.push(format!("{field}: bounds must be finite"));
        } else if self.n == 0 {
            out.push(format!("{field}: range is empty (n = 0)"));
        } else if self.min > self.max {
            out.push(format!("{field}: range is empty (min {} > max {})", self.min, self.max));
        } else if self.n > 1 && self.min == self.max {
            out.push(format!("{field}: {} points need min < max", self.n));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

impl Default for TimeGridSpec {
    fn default() -> Self {
        let g = TimeGrid::canonical();
        TimeGridSpec {
            t_min: g.t_min(),
            t_max: g.t_max(),
            n_points: g.len(),
        }
    }
}

impl TimeGridSpec {
    pub fn build(&self) -> crate::Result<TimeGrid> {
        TimeGrid::new(self.t_min, self.t_max, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub time: TimeGridSpec,
    pub tau: Range,
    pub delta_tau: Range,
    pub delta_omega: Range,
    /// Detunings `Δ` of the fig2 panels.
    pub deltas: Vec<f64>,
    /// Inhomogeneous widths of the fig3 curves.
    pub delta_omegas: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            time: TimeGridSpec::default(),
            tau: Range::new(-4.0, 4.0, 161),
            delta_tau: Range::new(-3.0, 3.0, 61),
            delta_omega: Range::new(0.0, 6.0, 31),
            deltas: vec![0.0, PI / 2.0, 3.0 * PI],
            delta_omegas: vec![1.0, 2.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSettings {
    pub n_pairs: usize,
    pub bin_width: f64,
    /// Largest `|τ|` histogrammed.
    pub range: f64,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        MonteCarloSettings {
            n_pairs: 1_000_000,
            bin_width: 0.05,
            range: 3.0,
        }
    }
}

/// Where a custom mode comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSource {
    /// A `t,re,im` file, relative to the configuration file.
    Csv(PathBuf),
    /// A Fourier-limited Gaussian sampled on `grids.time`.
    Gaussian { center: f64, carrier: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePair {
    pub mode1: ModeSource,
    pub mode2: ModeSource,
}

fn default_nodes() -> usize {
    DEFAULT_DETUNING_NODES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub parameters: PhotonPairConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub montecarlo: MonteCarloSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModePair>,
    /// Use sampled modes and numeric quadrature instead of closed forms.
    #[serde(default)]
    pub numeric: bool,
    #[serde(default = "default_nodes")]
    pub detuning_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Every violated invariant, as human-readable lines naming the field.
    /// `base` resolves relative mode paths.
    pub fn issues(&self, base: &Path) -> Vec<String> {
        let mut out = Vec::new();
        let p = &self.parameters;
        for (field, v) in [
            ("parameters.delta_tau", p.delta_tau),
            ("parameters.delta", p.delta),
            ("parameters.omega_mean", p.omega_mean),
            ("parameters.delta_omega", p.delta_omega),
        ] {
            if !v.is_finite() {
                out.push(format!("{field}: must be finite, got {v}"));
            }
        }
        if p.delta_omega < 0.0 {
            out.push(format!("parameters.delta_omega: must be >= 0, got {}", p.delta_omega));
        }
        let g = &self.grids;
        if let Err(e) = g.time.build() {
            out.push(format!("grids.time: {e}"));
        }
        g.tau.issues("grids.tau", &mut out);
        g.delta_tau.issues("grids.delta_tau", &mut out);
        g.delta_omega.issues("grids.delta_omega", &mut out);
        if g.delta_omega.min < 0.0 {
            out.push(format!("grids.delta_omega: widths must be >= 0, got min {}", g.delta_omega.min));
        }
        if g.deltas.is_empty() {
            out.push("grids.deltas: list is empty".to_string());
        }
        if g.deltas.iter().any(|d| !d.is_finite()) {
            out.push("grids.deltas: values must be finite".to_string());
        }
        if g.delta_omegas.is_empty() {
            out.push("grids.delta_omegas: list is empty".to_string());
        }
        if g.delta_omegas.iter().any(|w| !w.is_finite() || *w < 0.0) {
            out.push("grids.delta_omegas: values must be finite and >= 0".to_string());
        }
        let mc = &self.montecarlo;
        if mc.n_pairs == 0 {
            out.push("montecarlo.n_pairs: must be >= 1".to_string());
        }
        if !(mc.bin_width > 0.0 && mc.bin_width.is_finite()) {
            out.push(format!("montecarlo.bin_width: must be > 0, got {}", mc.bin_width));
        }
        if !(mc.range > 0.0 && mc.range.is_finite()) {
            out.push(format!("montecarlo.range: histogram range is empty ({})", mc.range));
        }
        if self.detuning_nodes == 0 {
            out.push("detuning_nodes: must be >= 1".to_string());
        }
        if self.scenario == ScenarioKind::CustomModes {
            match &self.modes {
                None => out.push("modes: required for custom-modes".to_string()),
                Some(pair) => {
                    for (field, src) in [("modes.mode1", &pair.mode1), ("modes.mode2", &pair.mode2)] {
                        match src {
                            ModeSource::Csv(path) => {
                                let full = base.join(path);
                                if !full.is_file() {
                                    out.push(format!("{field}: file {} not found", full.display()));
                                }
                            }
                            ModeSource::Gaussian { center, carrier } => {
                                if !center.is_finite() || !carrier.is_finite() {
                                    out.push(format!("{field}: center and carrier must be finite"));
                                }
                            }
                        }
                    }
                }
            }
        }
        if let Some(dir) = &self.output {
            if dir.is_file() {
                out.push(format!("output: {} is a file, not a directory", dir.display()));
            }
        }
        out
    }

    fn ensemble(&self, delta_omega: f64) -> crate::Result<Ensemble> {
        Ensemble::new(self.parameters.delta_tau, delta_omega)?
            .with_mean(self.parameters.delta)?
            .with_nodes(self.detuning_nodes)
    }

    fn gaussian_family(&self) -> crate::Result<GaussianFamily> {
        Ok(GaussianFamily {
            omega_mean: self.parameters.omega_mean,
            grid: if self.numeric { Some(self.grids.time.build()?) } else { None },
        })
    }
}

/// Failure of a CLI command, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read configuration {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse configuration {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("configuration has {} issue(s):\n{}", .0.len(), .0.join("\n"))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Failed(#[from] Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Read { .. } | RunError::Parse { .. } => 2,
            RunError::Invalid(_) => 3,
            RunError::Failed(Error::QuadratureNotConverged { .. }) => 4,
            RunError::Failed(_) => 1,
        }
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_json(&text).map_err(|source| RunError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Parses and checks a configuration file, returning the list of issues.
pub fn validate(path: &Path) -> Result<Vec<String>, RunError> {
    let cfg = load_config(path)?;
    Ok(cfg.issues(&config_dir(path)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config: ScenarioConfig,
    pub files: Vec<FileRecord>,
    pub summary: Value,
}

/// Outputs of a scenario before they are written.
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    summary: Value,
}

/// Runs the configuration file at `path`, writing into `out` (or the
/// configured `output`, or `output/<scenario>`).
pub fn run(path: &Path, out: Option<&Path>) -> Result<Manifest, RunError> {
    let cfg = load_config(path)?;
    let issues = cfg.issues(&config_dir(path));
    if !issues.is_empty() {
        return Err(RunError::Invalid(issues));
    }
    let dir = match (out, &cfg.output) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => d.clone(),
        (None, None) => Path::new("output").join(cfg.scenario.name()),
    };
    let manifest = run_config(&cfg, &config_dir(path), &dir)?;
    Ok(manifest)
}

/// Runs an already parsed configuration. `base` resolves relative mode paths.
pub fn run_config(cfg: &ScenarioConfig, base: &Path, dir: &Path) -> Result<Manifest, RunError> {
    let issues = cfg.issues(base);
    if !issues.is_empty() {
        return Err(RunError::Invalid(issues));
    }
    let artifacts = match cfg.scenario {
        ScenarioKind::Fig2Surface => fig2_surface(cfg)?,
        ScenarioKind::Fig3Dip => fig3_dip(cfg)?,
        ScenarioKind::Fig4Surface => fig4_surface(cfg)?,
        ScenarioKind::BeatCurve => beat_curve(cfg)?,
        ScenarioKind::Montecarlo => montecarlo(cfg)?,
        ScenarioKind::CustomModes => custom_modes(cfg, base)?,
    };
    fs::create_dir_all(dir).map_err(Error::from)?;
    let mut files = Vec::new();
    for (name, bytes) in &artifacts.files {
        fs::write(dir.join(name), bytes).map_err(Error::from)?;
        files.push(FileRecord {
            name: name.clone(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = Manifest {
        tool: TOOL_NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: cfg.scenario.name().to_string(),
        config: cfg.clone(),
        files,
        summary: artifacts.summary,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text).map_err(Error::from)?;
    Ok(manifest)
}

/// Columnar CSV with a header row and 17-significant-digit values.
struct Table {
    text: String,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        let mut text = columns.join(",");
        text.push('\n');
        Table { text }
    }

    fn row(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            let _ = write!(self.text, "{}", fmt_f64(*v));
        }
        self.text.push('\n');
    }

    fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

fn csv_name(kind: ScenarioKind) -> String {
    format!("{}.csv", kind.name())
}

/// Coherent and dephased `τ` marginals of one Gaussian configuration. Closed
/// forms exist for a fixed detuning or a zero-mean detuning spread; anything
/// else, or `numeric: true`, goes through quadrature.
fn gaussian_marginals(
    cfg: &ScenarioConfig,
    pair: &PhotonPairConfig,
    taus: &[f64],
) -> crate::Result<Vec<(f64, f64)>> {
    if cfg.numeric || (pair.delta_omega != 0.0 && pair.delta != 0.0) {
        return numeric_marginals(cfg, pair, taus);
    }
    Ok(taus
        .iter()
        .map(|&t| {
            let coherent = if pair.delta_omega == 0.0 {
                p_2hnu(t, pair)
            } else {
                p_inh_delayed(t, pair.delta_tau, pair.delta_omega)
            };
            (coherent, p_2hnu_dephased(t, pair.delta_tau))
        })
        .collect())
}

fn numeric_marginals(
    cfg: &ScenarioConfig,
    pair: &PhotonPairConfig,
    taus: &[f64],
) -> crate::Result<Vec<(f64, f64)>> {
    let family = cfg.gaussian_family()?;
    let ensemble = Ensemble::new(pair.delta_tau, pair.delta_omega)?
        .with_mean(pair.delta)?
        .with_nodes(cfg.detuning_nodes)?;
    Ok(averaged_tau_marginals(&family, &ensemble, taus)?
        .into_iter()
        .map(|m| (m.coherent, m.dephased))
        .collect())
}

fn fig2_surface(cfg: &ScenarioConfig) -> crate::Result<Artifacts> {
    let taus = cfg.grids.tau.points();
    let dts = cfg.grids.delta_tau.points();
    let mut table = Table::new(&["delta [1/delta_t]", "delta_tau [delta_t]", "tau [delta_t]", "p_2hnu [1/delta_t]"]);
    let mut panels = Vec::new();
    for &delta in &cfg.grids.deltas {
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        let mut tau_zero_max = 0.0f64;
        // Row of the smallest nonzero |δτ|: position of its maximum over τ > 0.
        let ridge_row = dts
            .iter()
            .copied()
            .filter(|d| *d != 0.0)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()));
        let mut ridge_tau = None;
        for &dt in &dts {
            let pair = PhotonPairConfig::new(dt, delta, cfg.parameters.omega_mean, 0.0)?;
            let values = gaussian_marginals(cfg, &pair, &taus)?;
            let mut row_best = (f64::NEG_INFINITY, 0.0);
            for (&tau, &(v, _)) in taus.iter().zip(&values) {
                table.row(&[delta, dt, tau, v]);
                if v > best.0 {
                    best = (v, dt, tau);
                }
                if tau == 0.0 {
                    tau_zero_max = tau_zero_max.max(v.abs());
                }
                if tau > 0.0 && v > row_best.0 {
                    row_best = (v, tau);
                }
            }
            if Some(dt) == ridge_row {
                ridge_tau = Some(row_best.1);
            }
        }
        panels.push(json!({
            "delta": delta,
            "max": best.0,
            "argmax_delta_tau": best.1,
            "argmax_tau": best.2,
            "tau_zero_max_abs": tau_zero_max,
            "ridge_delta_tau": ridge_row,
            "ridge_tau": ridge_tau,
        }));
    }
    Ok(Artifacts {
        files: vec![(csv_name(cfg.scenario), table.into_bytes())],
        summary: json!({ "panels": panels }),
    })
}

fn fig3_dip(cfg: &ScenarioConfig) -> crate::Result<Artifacts> {
    let taus = cfg.grids.tau.points();
    let mut table = Table::new(&[
        "delta_omega [1/delta_t]",
        "tau [delta_t]",
        "p_inh [1/delta_t]",
        "dephased [1/delta_t]",
    ]);
    let mut curves = Vec::new();
    for &w in &cfg.grids.delta_omegas {
        let pair = PhotonPairConfig::new(cfg.parameters.delta_tau, cfg.parameters.delta, cfg.parameters.omega_mean, w)?;
        let values = gaussian_marginals(cfg, &pair, &taus)?;
        let mut depth = Vec::with_capacity(taus.len());
        let mut at_zero = None;
        for (&tau, &(v, reference)) in taus.iter().zip(&values) {
            table.row(&[w, tau, v, reference]);
            depth.push(if reference > 0.0 { 1.0 - v / reference } else { 0.0 });
            if tau == 0.0 {
                at_zero = Some(v);
            }
        }
        curves.push(json!({
            "delta_omega": w,
            "value_at_tau_zero": at_zero,
            "dip_half_width": dip_half_width(&taus, &depth),
            "expected_half_width": if w > 0.0 { Some(2.0 / w) } else { None },
        }));
    }
    Ok(Artifacts {
        files: vec![(csv_name(cfg.scenario), table.into_bytes())],
        summary: json!({ "curves": curves }),
    })
}

fn fig4_surface(cfg: &ScenarioConfig) -> crate::Result<Artifacts> {
    let dts = cfg.grids.delta_tau.points();
    let widths = cfg.grids.delta_omega.points();
    let mut table = Table::new(&["delta_omega [1/delta_t]", "delta_tau [delta_t]", "p_total"]);
    let mut min = (f64::INFINITY, 0.0, 0.0);
    let mut max = f64::NEG_INFINITY;
    let family = cfg.gaussian_family()?;
    for &w in &widths {
        let values: Vec<f64> = if cfg.numeric {
            total_coincidence_vs_delay_with(&family, &cfg.ensemble(w)?, &dts)?.y().to_vec()
        } else {
            dts.iter().map(|&dt| p_total(dt, w)).collect()
        };
        for (&dt, &v) in dts.iter().zip(&values) {
            table.row(&[w, dt, v]);
            if v < min.0 {
                min = (v, dt, w);
            }
            max = max.max(v);
        }
    }
    Ok(Artifacts {
        files: vec![(csv_name(cfg.scenario), table.into_bytes())],
        summary: json!({
            "min": min.0,
            "argmin_delta_tau": min.1,
            "argmin_delta_omega": min.2,
            "max": max,
            "asymptote": 0.5,
        }),
    })
}

fn beat_curve(cfg: &ScenarioConfig) -> crate::Result<Artifacts> {
    let taus = cfg.grids.tau.points();
    let values = gaussian_marginals(cfg, &cfg.parameters, &taus)?;
    let mut table = Table::new(&["tau [delta_t]", "p_2hnu [1/delta_t]", "dephased [1/delta_t]"]);
    for (&tau, &(v, reference)) in taus.iter().zip(&values) {
        table.row(&[tau, v, reference]);
    }
    let zeros = if taus.len() >= 3 {
        Curve::new(
            taus.clone(),
            values.iter().map(|v| v.0).collect(),
            Axis::new("tau", "delta_t"),
            Axis::new("p_2hnu", "1/delta_t"),
        )?
        .near_zeros(1e-4)
    } else {
        Vec::new()
    };
    let period = (zeros.len() >= 2).then(|| (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64);
    let delta = cfg.parameters.delta;
    Ok(Artifacts {
        files: vec![(csv_name(cfg.scenario), table.into_bytes())],
        summary: json!({
            "zeros": zeros,
            "period": period,
            "expected_period": (delta != 0.0).then(|| 2.0 * PI / delta.abs()),
        }),
    })
}

fn montecarlo(cfg: &ScenarioConfig) -> crate::Result<Artifacts> {
    let family = cfg.gaussian_family()?;
    let mc = &cfg.montecarlo;
    let log = run_experiment(&cfg.parameters, &family, mc.n_pairs, cfg.seed)?;
    let mut events = Vec::new();
    log.write_csv(&mut events)?;
    let mut sidecar = Vec::new();
    log.write_sidecar(&mut sidecar)?;
    let hist = coincidence_histogram(&log, mc.bin_width, mc.range)?;
    let mut hist_csv = Vec::new();
    hist.write_csv(&mut hist_csv)?;
    let estimate = if log.n_pairs() >= crate::montecarlo::MIN_EVENTS_FOR_ESTIMATE {
        Some(estimate_total_coincidence(&log)?)
    } else {
        None
    };
    let p = &cfg.parameters;
    let expected = (p.delta == 0.0 || p.delta_omega == 0.0).then(|| {
        if p.delta_omega == 0.0 {
            let c2 = (-p.delta_tau * p.delta_tau - p.delta * p.delta / 4.0).exp();
            0.5 * (1.0 - c2)
        } else {
            p_total(p.delta_tau, p.delta_omega)
        }
    });
    Ok(Artifacts {
        files: vec![
            (csv_name(cfg.scenario), events),
            ("montecarlo.json".to_string(), sidecar),
            ("montecarlo_histogram.csv".to_string(), hist_csv),
        ],
        summary: json!({
            "n_pairs": log.n_pairs(),
            "seed": cfg.seed,
            "opposite_port_events": hist.opposite.iter().sum::<u64>(),
            "out_of_range": hist.out_of_range,
            "total_coincidence": estimate,
            "expected_total_coincidence": expected,
        }),
    })
}

fn load_mode(src: &ModeSource, base: &Path, grid: &TimeGrid) -> crate::Result<ModeFunction> {
    match src {
        ModeSource::Csv(path) => read_mode_csv(BufReader::new(fs::File::open(base.join(path))?)),
        ModeSource::Gaussian { center, carrier } => make_gaussian_mode(*center, *carrier, Some(grid)),
    }
}

fn custom_modes(cfg: &ScenarioConfig, base: &Path) -> crate::Result<Artifacts> {
    let pair = cfg.modes.as_ref().ok_or_else(|| Error::invalid("modes", "required"))?;
    let grid = cfg.grids.time.build()?;
    let m1 = load_mode(&pair.mode1, base, &grid)?;
    let m2 = load_mode(&pair.mode2, base, &grid)?;
    let family = ShapedFamily::new(m1.clone(), m2.clone());
    let taus = cfg.grids.tau.points();
    let marginals = averaged_tau_marginals(&family as &dyn PulseFamily, &cfg.ensemble(cfg.parameters.delta_omega)?, &taus)?;
    let mut table = Table::new(&["tau [delta_t]", "coincidence_density [1/delta_t]", "dephased [1/delta_t]"]);
    for (&tau, m) in taus.iter().zip(&marginals) {
        table.row(&[tau, m.coherent, m.dephased]);
    }
    let probs = port_pair_probabilities(&m1, &m2)?;
    let quad = port_pair_probabilities_quadrature(&m1, &m2)?;
    let c = overlap(&m1, &m2)?;
    let mut extras = BTreeMap::new();
    if cfg.parameters.delta_tau != 0.0 || cfg.parameters.delta != 0.0 || cfg.parameters.delta_omega != 0.0 {
        let total = total_coincidence_vs_delay_with(
            &family,
            &cfg.ensemble(cfg.parameters.delta_omega)?,
            &[cfg.parameters.delta_tau],
        )?;
        extras.insert("ensemble_total_coincidence", total.y()[0]);
    }
    Ok(Artifacts {
        files: vec![(csv_name(cfg.scenario), table.into_bytes())],
        summary: json!({
            "overlap_abs_sq": c.norm_sqr(),
            "port_pairs": probs,
            "port_pairs_quadrature": quad,
            "extras": extras,
        }),
    })
}
