//! Sweep runners that turn an [`ExperimentSpec`] into CSV tables plus a JSON
//! metadata sidecar, and gnuplot scripts for the resulting tables.
//!
//! Every (sweep point, realization) pair is an independent job executed on
//! the rayon pool. Results are reduced in job order and rows are sorted by
//! key before formatting, so the output bytes do not depend on scheduling.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::benchmarks::{iid_drive, ising_series, mackey_glass_series, narma, IsingParams, MgParams, NarmaParams};
use crate::readout::{memory_capacity, WindowedReadout, DEFAULT_MAX_DELAY, DEFAULT_RIDGE};
use crate::reservoir::{Reservoir, ReservoirConfig, RunTrace, ShotMode};
use crate::seeding::{rng_from_seed, RunSeeds};
use crate::{Error, MeshLayout, MziRole, Result, Windows};

pub const SCHEMA_VERSION: u32 = 1;

pub const MC_PROFILE_HEADER: &str = "alpha_fb,tau,mc_mean";
pub const MC_TOTAL_HEADER: &str = "alpha_fb,mc_tot_mean";
pub const FORECAST_HEADER: &str = "task,alpha_fb,horizon_or_order,nmse_mean";
pub const SHOT_NOISE_HEADER: &str = "alpha_in,alpha_fb,n_m,mc_tot_mean,mc_tot_exact";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MemoryCapacity,
    Forecast,
    ShotNoise,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::MemoryCapacity => "memory-capacity",
            ExperimentKind::Forecast => "forecast",
            ExperimentKind::ShotNoise => "shot-noise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecastTask {
    Mg,
    Narma,
    Ising,
}

impl ForecastTask {
    pub fn as_str(self) -> &'static str {
        match self {
            ForecastTask::Mg => "mg",
            ForecastTask::Narma => "narma",
            ForecastTask::Ising => "ising",
        }
    }
}

impl FromStr for ForecastTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mg" => Ok(ForecastTask::Mg),
            "narma" => Ok(ForecastTask::Narma),
            "ising" => Ok(ForecastTask::Ising),
            other => Err(Error::InvalidParameter(format!(
                "unknown forecast task `{other}` (expected mg, narma or ising)"
            ))),
        }
    }
}

/// Reservoir settings shared by every point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReservoirSettings {
    pub modes: usize,
    pub photons: usize,
    pub eta_eff: f64,
    pub washout: usize,
    pub train_len: usize,
    pub test_len: usize,
    pub ridge: f64,
    pub max_delay: usize,
}

impl Default for ReservoirSettings {
    fn default() -> Self {
        let base = ReservoirConfig::<f64>::default();
        Self {
            modes: base.modes,
            photons: base.photons,
            eta_eff: base.eta_eff,
            washout: base.washout,
            train_len: base.train_len,
            test_len: base.test_len,
            ridge: DEFAULT_RIDGE,
            max_delay: DEFAULT_MAX_DELAY,
        }
    }
}

impl ReservoirSettings {
    pub fn windows(&self) -> Windows {
        Windows::new(self.washout, self.train_len, self.test_len)
    }
}

/// Full description of one experiment. Serialized verbatim into the
/// metadata sidecar and hashed for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    /// Only read for [`ExperimentKind::Forecast`].
    pub task: ForecastTask,
    pub reservoir: ReservoirSettings,
    pub alpha_fb: Vec<f64>,
    pub alpha_in: Vec<f64>,
    /// Expectation-value coincidences for memory-capacity and forecast runs.
    pub exact: bool,
    /// Measurement budgets: the sweep axis for shot-noise runs, otherwise a
    /// single budget used when `exact` is off.
    pub shots: Vec<u64>,
    pub horizons: Vec<usize>,
    pub narma_orders: Vec<usize>,
    /// `None` picks the per-task default (20 for NARMA, 30 otherwise).
    pub realizations: Option<usize>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: ExperimentKind::MemoryCapacity,
            task: ForecastTask::Mg,
            reservoir: ReservoirSettings::default(),
            alpha_fb: vec![1.5, 2.2, 2.4, 3.2, 4.6],
            alpha_in: vec![0.001],
            exact: true,
            shots: vec![100, 1_000, 10_000, 100_000, 1_000_000],
            horizons: vec![1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20],
            narma_orders: (2..=10).collect(),
            realizations: None,
            master_seed: 0,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentSpec {
    /// Defaults tuned to the given experiment kind.
    pub fn for_kind(kind: ExperimentKind) -> Self {
        let mut spec = Self {
            kind,
            ..Self::default()
        };
        if kind == ExperimentKind::ShotNoise {
            spec.alpha_in = vec![0.001, 0.1];
        }
        spec
    }

    pub fn realization_count(&self) -> usize {
        self.realizations.unwrap_or(match (self.kind, self.task) {
            (ExperimentKind::Forecast, ForecastTask::Narma) => 20,
            _ => 30,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.realization_count() == 0 {
            return bad("realization count must be at least 1".into());
        }
        if self.alpha_fb.is_empty() || self.alpha_in.is_empty() {
            return bad("alpha_fb and alpha_in lists must be non-empty".into());
        }
        if self.alpha_fb.iter().chain(&self.alpha_in).any(|a| !a.is_finite()) {
            return bad("gains must be finite".into());
        }
        if self.shots.contains(&0) {
            return bad("shot budgets must be at least 1".into());
        }
        if !(self.reservoir.ridge > 0.0) {
            return bad("ridge parameter must be positive".into());
        }
        match self.kind {
            ExperimentKind::MemoryCapacity | ExperimentKind::Forecast => {
                if self.alpha_in.len() != 1 {
                    return bad(format!("{} takes a single alpha_in value", self.kind.as_str()));
                }
                if !self.exact && self.shots.len() != 1 {
                    return bad("finite-shot runs take a single shot budget".into());
                }
            }
            ExperimentKind::ShotNoise => {
                if self.shots.is_empty() {
                    return bad("shot-noise sweep needs at least one budget".into());
                }
            }
        }
        match self.kind {
            ExperimentKind::MemoryCapacity | ExperimentKind::ShotNoise => {
                if self.reservoir.max_delay == 0 {
                    return bad("max_delay must be at least 1".into());
                }
            }
            ExperimentKind::Forecast => {
                let list = self.axis();
                if list.is_empty() {
                    return bad("forecast sweep needs at least one horizon or order".into());
                }
                if self.task == ForecastTask::Narma && list.contains(&0) {
                    return bad("NARMA order must be at least 1".into());
                }
            }
        }
        self.config(self.alpha_in[0], self.alpha_fb[0], ShotMode::Exact, RunSeeds::default())
            .validate()?;
        MeshLayout::build_default(self.reservoir.modes, self.reservoir.photons).map(|_| ())
    }

    /// Horizons or NARMA orders, depending on the task.
    fn axis(&self) -> &[usize] {
        match self.task {
            ForecastTask::Narma => &self.narma_orders,
            _ => &self.horizons,
        }
    }

    fn shot_mode(&self) -> ShotMode {
        if self.exact {
            ShotMode::Exact
        } else {
            ShotMode::Finite(self.shots[0])
        }
    }

    pub fn config(&self, alpha_in: f64, alpha_fb: f64, shots: ShotMode, seeds: RunSeeds) -> ReservoirConfig<f64> {
        let r = &self.reservoir;
        ReservoirConfig {
            modes: r.modes,
            photons: r.photons,
            alpha_in,
            alpha_fb,
            eta_eff: r.eta_eff,
            shots,
            washout: r.washout,
            train_len: r.train_len,
            test_len: r.test_len,
            seeds,
            ..ReservoirConfig::default()
        }
    }

    pub fn seeds(&self, realization: usize) -> RunSeeds {
        RunSeeds::derive(self.master_seed, realization as u64)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn run(&self) -> Result<ExperimentOutput> {
        match self.kind {
            ExperimentKind::MemoryCapacity => run_memory_capacity(self),
            ExperimentKind::Forecast => run_forecast(self),
            ExperimentKind::ShotNoise => run_shot_noise(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutSummary {
    pub modes: usize,
    pub photons: usize,
    pub layers: usize,
    pub wedge_depth: usize,
    pub central_block: [usize; 2],
    pub r_fb: usize,
    pub static_mzis: usize,
}

impl LayoutSummary {
    fn new(layout: &MeshLayout, photons: usize) -> Self {
        Self {
            modes: layout.modes(),
            photons,
            layers: layout.layers(),
            wedge_depth: layout.wedge_depth(),
            central_block: [*layout.central_block().start(), *layout.central_block().end()],
            r_fb: layout.wedge_size(),
            static_mzis: layout.count_role(MziRole::Static),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizationSeeds {
    pub index: usize,
    pub seeds: RunSeeds,
}

/// A realization excluded from a mean, e.g. a diverging NARMA target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub alpha_fb: f64,
    pub horizon_or_order: usize,
    pub realization: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub library_version: String,
    pub spec_sha256: String,
    pub spec: ExperimentSpec,
    pub layout: LayoutSummary,
    pub realizations: Vec<RealizationSeeds>,
    pub failures: Vec<Failure>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub files: Vec<OutputFile>,
    pub metadata: Metadata,
}

impl ExperimentOutput {
    fn new(spec: &ExperimentSpec, files: Vec<OutputFile>, failures: Vec<Failure>) -> Result<Self> {
        let layout = MeshLayout::build_default(spec.reservoir.modes, spec.reservoir.photons)?;
        let metadata = Metadata {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            spec_sha256: spec.hash(),
            spec: spec.clone(),
            layout: LayoutSummary::new(&layout, spec.reservoir.photons),
            realizations: (0..spec.realization_count())
                .map(|index| RealizationSeeds {
                    index,
                    seeds: spec.seeds(index),
                })
                .collect(),
            failures,
            files: files.iter().map(|f| f.name.clone()).collect(),
        };
        Ok(Self { files, metadata })
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn metadata_name(&self) -> String {
        let spec = &self.metadata.spec;
        match spec.kind {
            ExperimentKind::Forecast => format!("forecast_{}.meta.json", spec.task.as_str()),
            kind => format!("{}.meta.json", kind.as_str().replace('-', "_")),
        }
    }

    /// Write every table and the sidecar into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len() + 1);
        let meta = serde_json::to_string_pretty(&self.metadata).expect("metadata serializes") + "\n";
        for (name, contents) in self
            .files
            .iter()
            .map(|f| (f.name.clone(), f.contents.as_str()))
            .chain([(self.metadata_name(), meta.as_str())])
        {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Rows keyed by numbers, sorted before being joined under `header`.
struct Table {
    header: &'static str,
    rows: Vec<(Vec<f64>, String)>,
}

impl Table {
    fn new(header: &'static str) -> Self {
        Self { header, rows: Vec::new() }
    }

    fn push(&mut self, key: Vec<f64>, row: String) {
        self.rows.push((key, row));
    }

    fn into_file(mut self, name: impl Into<String>) -> OutputFile {
        self.rows.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        });
        let mut contents = String::from(self.header);
        contents.push('\n');
        for (_, row) in self.rows {
            contents.push_str(&row);
            contents.push('\n');
        }
        OutputFile {
            name: name.into(),
            contents,
        }
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn drive_reservoir(config: ReservoirConfig<f64>, drive: &[f64]) -> Result<RunTrace<f64>> {
    Reservoir::new(config)?.run(drive)
}

/// Clipped capacity profile of one realization driven by i.i.d. `[0, 1]`
/// inputs.
fn capacity_run(spec: &ExperimentSpec, alpha_in: f64, alpha_fb: f64, shots: ShotMode, r: usize) -> Result<Vec<f64>> {
    let seeds = spec.seeds(r);
    let config = spec.config(alpha_in, alpha_fb, shots, seeds);
    let drive = iid_drive(config.total_steps(), 0.0, 1.0, &mut rng_from_seed(seeds.drive))?;
    let trace = drive_reservoir(config, &drive)?;
    let profile = memory_capacity(&trace, spec.reservoir.windows(), spec.reservoir.max_delay, spec.reservoir.ridge)?;
    Ok(profile.clipped)
}

/// Memory-capacity sweep over `alpha_fb`. Produces `mc_profile.csv`
/// (mean `MC(tau)` per gain) and `mc_total.csv` (mean `MC_tot` per gain).
pub fn run_memory_capacity(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let n_real = spec.realization_count();
    let alpha_in = spec.alpha_in[0];
    let jobs: Vec<(usize, usize)> = (0..spec.alpha_fb.len())
        .flat_map(|g| (0..n_real).map(move |r| (g, r)))
        .collect();
    let profiles = jobs
        .par_iter()
        .map(|&(g, r)| capacity_run(spec, alpha_in, spec.alpha_fb[g], spec.shot_mode(), r))
        .collect::<Result<Vec<_>>>()?;

    let mut per_tau = Table::new(MC_PROFILE_HEADER);
    let mut totals = Table::new(MC_TOTAL_HEADER);
    for (g, &alpha_fb) in spec.alpha_fb.iter().enumerate() {
        let runs = &profiles[g * n_real..(g + 1) * n_real];
        for tau in 1..=spec.reservoir.max_delay {
            let m = mean(runs.iter().map(|p| p[tau - 1]));
            per_tau.push(vec![alpha_fb, tau as f64], format!("{alpha_fb},{tau},{m}"));
        }
        let total = mean(runs.iter().map(|p| p.iter().sum::<f64>()));
        totals.push(vec![alpha_fb], format!("{alpha_fb},{total}"));
    }
    ExperimentOutput::new(
        spec,
        vec![per_tau.into_file("mc_profile.csv"), totals.into_file("mc_total.csv")],
        Vec::new(),
    )
}

/// Forecasting sweep for one task over `alpha_fb` and the horizon (MG,
/// Ising) or order (NARMA) axis. Produces `forecast_<task>.csv`.
pub fn run_forecast(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let n_real = spec.realization_count();
    let axis = spec.axis().to_vec();
    let alpha_in = spec.alpha_in[0];
    let total = spec.config(alpha_in, 0.0, ShotMode::Exact, RunSeeds::default()).total_steps();
    let windows = spec.reservoir.windows();
    let beta = spec.reservoir.ridge;

    // Deterministic tasks share one series across all realizations.
    let max_h = axis.iter().copied().max().unwrap_or(0);
    let shared = match spec.task {
        ForecastTask::Mg => Some(mackey_glass_series(&MgParams::default(), total + max_h)?),
        ForecastTask::Ising => Some(ising_series(&IsingParams::default(), total + max_h)?),
        ForecastTask::Narma => None,
    };

    let jobs: Vec<(usize, usize)> = (0..spec.alpha_fb.len())
        .flat_map(|g| (0..n_real).map(move |r| (g, r)))
        .collect();
    let scores = jobs
        .par_iter()
        .map(|&(g, r)| -> Result<Vec<Result<f64>>> {
            let seeds = spec.seeds(r);
            let config = spec.config(alpha_in, spec.alpha_fb[g], spec.shot_mode(), seeds);
            let drive = match &shared {
                Some(series) => series[..total].to_vec(),
                None => iid_drive(total, 0.0, 0.5, &mut rng_from_seed(seeds.drive))?,
            };
            let trace = drive_reservoir(config, &drive)?;
            let readout = WindowedReadout::new(trace.features.view(), windows, beta)?;
            Ok(axis
                .iter()
                .map(|&h| match &shared {
                    Some(series) => readout.test_nmse(|k| series[k + h]),
                    None => {
                        let target = narma(&NarmaParams::new(h), &drive)?;
                        readout.test_nmse(|k| target[k])
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(FORECAST_HEADER);
    let mut failures = Vec::new();
    let task = spec.task.as_str();
    for (g, &alpha_fb) in spec.alpha_fb.iter().enumerate() {
        for (i, &h) in axis.iter().enumerate() {
            let mut ok = Vec::with_capacity(n_real);
            for r in 0..n_real {
                match &scores[g * n_real + r][i] {
                    Ok(v) => ok.push(*v),
                    Err(e @ Error::Instability { .. }) => failures.push(Failure {
                        alpha_fb,
                        horizon_or_order: h,
                        realization: r,
                        reason: e.to_string(),
                    }),
                    Err(e) => return Err(Error::Numeric(format!("alpha_fb {alpha_fb}, axis {h}: {e}"))),
                }
            }
            let m = mean(ok);
            table.push(vec![alpha_fb, h as f64], format!("{task},{alpha_fb},{h},{m}"));
        }
    }
    ExperimentOutput::new(spec, vec![table.into_file(format!("forecast_{task}.csv"))], failures)
}

/// Finite-measurement study over `alpha_in x alpha_fb x shots`, with the
/// exact-mode capacity of the same realizations as a reference column.
/// Produces `shot_noise.csv`.
pub fn run_shot_noise(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let n_real = spec.realization_count();
    // Budget slot `None` is the exact reference.
    let budgets: Vec<Option<u64>> = spec.shots.iter().copied().map(Some).chain([None]).collect();
    let mut jobs = Vec::new();
    for (i, &a_in) in spec.alpha_in.iter().enumerate() {
        for (g, &a_fb) in spec.alpha_fb.iter().enumerate() {
            for (b, budget) in budgets.iter().enumerate() {
                for r in 0..n_real {
                    jobs.push(((i, g, b), a_in, a_fb, *budget, r));
                }
            }
        }
    }
    let totals = jobs
        .par_iter()
        .map(|&(_, a_in, a_fb, budget, r)| {
            let mode = budget.map_or(ShotMode::Exact, ShotMode::Finite);
            capacity_run(spec, a_in, a_fb, mode, r).map(|p| p.iter().sum::<f64>())
        })
        .collect::<Result<Vec<_>>>()?;

    let n_b = budgets.len();
    let block = |i: usize, g: usize, b: usize| {
        let start = ((i * spec.alpha_fb.len() + g) * n_b + b) * n_real;
        mean(totals[start..start + n_real].iter().copied())
    };
    let mut table = Table::new(SHOT_NOISE_HEADER);
    for (i, &a_in) in spec.alpha_in.iter().enumerate() {
        for (g, &a_fb) in spec.alpha_fb.iter().enumerate() {
            let exact = block(i, g, n_b - 1);
            for (b, &n_m) in spec.shots.iter().enumerate() {
                let m = block(i, g, b);
                table.push(
                    vec![a_in, a_fb, n_m as f64],
                    format!("{a_in},{a_fb},{n_m},{m},{exact}"),
                );
            }
        }
    }
    ExperimentOutput::new(spec, vec![table.into_file("shot_noise.csv")], Vec::new())
}

struct ParsedCsv {
    header: String,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path) -> Result<ParsedCsv> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is empty", path.display())))?
        .trim()
        .to_string();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(|c| c.trim().to_string()).collect())
        .collect();
    if rows.is_empty() {
        return Err(Error::InvalidParameter(format!("{} has no data rows", path.display())));
    }
    Ok(ParsedCsv { header, rows })
}

/// Distinct values of the key columns, in order of first appearance.
fn distinct(rows: &[Vec<String>], cols: &[usize]) -> Vec<Vec<String>> {
    let mut seen: Vec<Vec<String>> = Vec::new();
    for row in rows {
        let key: Vec<String> = cols.iter().map(|&c| row.get(c).cloned().unwrap_or_default()).collect();
        if !seen.contains(&key) {
            seen.push(key);
        }
    }
    seen
}

fn gnuplot_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn script_for(csv: &Path, parsed: &ParsedCsv) -> Result<String> {
    let data = gnuplot_quote(&csv.display().to_string());
    let png = gnuplot_quote(&csv.with_extension("png").display().to_string());
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output {png}");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set grid");
    let curves = |s: &mut String, cols: &[usize], x: usize, y: usize, label: &[&str]| {
        let keys = distinct(&parsed.rows, cols);
        let clauses: Vec<String> = keys
            .iter()
            .map(|key| {
                let cond = cols
                    .iter()
                    .zip(key)
                    .map(|(c, v)| format!("${}=={v}", c + 1))
                    .collect::<Vec<_>>()
                    .join(" && ");
                let title = label
                    .iter()
                    .zip(key)
                    .map(|(l, v)| format!("{l} = {v}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                format!(
                    "{data} using {}:(({cond}) ? ${} : NaN) with linespoints title {}",
                    x + 1,
                    y + 1,
                    gnuplot_quote(&title)
                )
            })
            .collect();
        let _ = writeln!(s, "plot \\\n    {}", clauses.join(", \\\n    "));
    };
    match parsed.header.as_str() {
        MC_PROFILE_HEADER => {
            let _ = writeln!(s, "set xlabel 'delay tau'\nset ylabel 'MC(tau)'\nset yrange [0:1.05]");
            curves(&mut s, &[0], 1, 2, &["alpha_fb"]);
        }
        MC_TOTAL_HEADER => {
            let _ = writeln!(s, "set xlabel 'alpha_fb'\nset ylabel 'MC_tot'");
            let _ = writeln!(s, "plot {data} using 1:2 with linespoints title 'mean MC_tot'");
        }
        FORECAST_HEADER => {
            let task = &parsed.rows[0][0];
            let axis = if task == "narma" { "NARMA order n" } else { "horizon tau_f" };
            let _ = writeln!(s, "set xlabel '{axis}'\nset ylabel 'test NMSE'\nset logscale y");
            let _ = writeln!(s, "set title {}", gnuplot_quote(task));
            curves(&mut s, &[1], 2, 3, &["alpha_fb"]);
        }
        SHOT_NOISE_HEADER => {
            let _ = writeln!(s, "set xlabel 'measurements N_m'\nset ylabel 'mean MC_tot'\nset logscale x");
            curves(&mut s, &[0, 1], 2, 3, &["alpha_in", "alpha_fb"]);
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "{}: unrecognized header `{other}`",
                csv.display()
            )))
        }
    }
    Ok(s)
}

/// Write one gnuplot script per CSV into `out_dir`. Every input is read and
/// checked first, so a bad file means no scripts are written at all.
pub fn emit_plot_scripts(csvs: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if csvs.is_empty() {
        return Err(Error::InvalidParameter("no CSV files given".into()));
    }
    let scripts = csvs
        .iter()
        .map(|csv| {
            let parsed = read_csv(csv)?;
            let stem = csv
                .file_stem()
                .ok_or_else(|| Error::InvalidParameter(format!("{} has no file name", csv.display())))?;
            let target = out_dir.join(Path::new(stem).with_extension("gp"));
            Ok((target, script_for(csv, &parsed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    scripts
        .into_iter()
        .map(|(path, body)| {
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
