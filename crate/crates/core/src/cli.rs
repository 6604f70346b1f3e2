//! Experiment runner: the sweep grid executor, the formula verification
//! suite, and every artifact this tool writes (CSV, run manifest, JSON
//! reports).
//!
//! One process runs one experiment. Parallelism lives inside the stats
//! estimator; the runner walks grid cells in a fixed order so that row
//! order, per-cell seeds and the CSV bytes are reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{
    sample_circuit, stream_seed, CircuitError, EnsembleSpec, EntanglerPattern, Observable,
    ReplacementMode,
};
use crate::lightcone::{analyze, LightConeError, LightConeReport};
use crate::matkernel::{embed, random_hermitian, QubitIndexSet};
use crate::moments::{
    brute_force_moment, first_moment_single, quadrature_gate_average, second_moment_single,
    FirstMomentExpansion, MomentError,
};
use crate::simulator::{gradient_commutator, gradient_shift, SimError, StateVector};
use crate::stats::{estimate_mode, fit_alpha, predict_weingarten, StatsError, VarianceObservation};

/// Guard rails for a desk-scale tool; dense kernels and the state vector
/// simulator stay comfortable well below these.
pub const MAX_QUBITS: usize = 10;
pub const MAX_DEPTH: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Spec(#[from] CircuitError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    LightCone(#[from] LightConeError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ExpectationSweep,
    VarianceSweep,
    ReplacementSweep,
    ObservableCompare,
    Verify,
    Lightcone,
    Channel,
}

impl ExperimentKind {
    /// The four grid experiments share one executor; the rest are one-shot
    /// reports.
    pub fn is_statistical(self) -> bool {
        matches!(
            self,
            Self::ExpectationSweep
                | Self::VarianceSweep
                | Self::ReplacementSweep
                | Self::ObservableCompare
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::ExpectationSweep => "expectation_sweep",
            Self::VarianceSweep => "variance_sweep",
            Self::ReplacementSweep => "replacement_sweep",
            Self::ObservableCompare => "observable_compare",
            Self::Verify => "verify",
            Self::Lightcone => "lightcone",
            Self::Channel => "channel",
        }
    }

    fn default_output(self) -> &'static str {
        match self {
            Self::ExpectationSweep => "expectation_sweep.csv",
            Self::VarianceSweep => "variance_sweep.csv",
            Self::ReplacementSweep => "replacement_sweep.csv",
            Self::ObservableCompare => "observable_compare.csv",
            Self::Lightcone => "lightcone.json",
            Self::Channel => "channel.json",
            // verify prints its table to stdout and writes nothing
            Self::Verify => "verify.txt",
        }
    }
}

/// One experiment, fully specified. A JSON file holds exactly one of these;
/// missing fields take the desk-scale defaults below, unknown fields are
/// rejected so typos fail loudly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    /// Pauli strings; a single letter broadcasts to every qubit
    pub observables: Vec<String>,
    pub entangler_pattern: EntanglerPattern,
    pub replacement_mode: ReplacementMode,
    /// replacement fractions to sweep; must stay empty when
    /// replacement_mode is none
    pub fractions: Vec<f64>,
    pub samples: usize,
    pub master_seed: u64,
    /// defaults to "<experiment>.csv", or .json for the report experiments
    pub output_path: Option<PathBuf>,
    /// one accumulation pass in sample order instead of chunked reduction
    pub sequential_reduction: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::ExpectationSweep,
            n_list: vec![2, 4],
            d_list: (5usize..=60).step_by(5).collect(),
            observables: vec!["Z".into()],
            entangler_pattern: EntanglerPattern::Brick,
            replacement_mode: ReplacementMode::None,
            fractions: Vec::new(),
            samples: 200,
            master_seed: 7,
            output_path: None,
            sequential_reduction: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_list.is_empty() {
            return config_err("n_list must not be empty");
        }
        if self.d_list.is_empty() {
            return config_err("d_list must not be empty");
        }
        if self.observables.is_empty() {
            return config_err("observables must not be empty");
        }
        for &n in &self.n_list {
            if n == 0 || n > MAX_QUBITS {
                return config_err(format!("n = {n} is outside 1..={MAX_QUBITS}"));
            }
        }
        for &d in &self.d_list {
            if d == 0 || d > MAX_DEPTH {
                return config_err(format!("d = {d} is outside 1..={MAX_DEPTH}"));
            }
        }
        if self.experiment.is_statistical() && self.samples < 2 {
            return config_err(format!("samples = {} but variance needs at least 2", self.samples));
        }
        match self.replacement_mode {
            ReplacementMode::None => {
                if !self.fractions.is_empty() {
                    return config_err("fractions given but replacement_mode is none");
                }
            }
            _ => {
                if self.fractions.is_empty() {
                    return config_err("replacement_mode is set but fractions is empty");
                }
                for &f in &self.fractions {
                    if !f.is_finite() || !(0.0..=1.0).contains(&f) {
                        return config_err(format!("replacement fraction {f} is outside [0, 1]"));
                    }
                }
            }
        }
        if self.experiment == ExperimentKind::ReplacementSweep
            && self.replacement_mode == ReplacementMode::None
        {
            return config_err("replacement_sweep needs replacement_mode identity or hadamard");
        }
        for &n in &self.n_list {
            for text in &self.observables {
                resolve_observable(text, n)?;
            }
        }
        Ok(())
    }

    pub fn resolved_output_path(&self) -> PathBuf {
        self.output_path
            .clone()
            .unwrap_or_else(|| PathBuf::from(self.experiment.default_output()))
    }
}

/// A string from the observables list, pinned to a qubit count. Full-length
/// Pauli strings pass through; a single letter broadcasts, so "Z" at n = 4
/// means "ZZZZ".
pub fn resolve_observable(text: &str, n: usize) -> Result<Observable, CliError> {
    let letters = text.chars().count();
    let expanded;
    let s = if letters == n {
        text
    } else if letters == 1 {
        expanded = text.repeat(n);
        &expanded
    } else {
        return config_err(format!("observable {text:?} has {letters} factors, needs 1 or {n}"));
    };
    Observable::parse(s).map_err(|e| CliError::Config(format!("observable {text:?}: {e}")))
}

/// Reads a config, or falls back to the defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_config(&text)
}

/// Accepts either a bare config object or a run manifest (the object
/// written next to every CSV), so `--config run.manifest.json` re-runs the
/// sweep that produced it.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let body = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(body).map_err(|e| CliError::Config(format!("bad config: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Completed,
    VerifyFailed,
    /// interrupted mid-sweep; the partial CSV carries a TRUNCATED marker
    Truncated,
}

impl RunOutcome {
    /// 0 and 1 per the run contract; 130 mirrors the shell convention for a
    /// SIGINT exit
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Completed => 0,
            Self::VerifyFailed => 1,
            Self::Truncated => 130,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    run_with_interrupt(config, &AtomicBool::new(false))
}

/// Entry point behind the binary. `stop` is polled between grid cells; the
/// caller owns the flag so tests can trip it without raising a signal.
pub fn run_with_interrupt(
    config: &ExperimentConfig,
    stop: &AtomicBool,
) -> Result<RunOutcome, CliError> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Verify => Ok(run_verify()),
        ExperimentKind::Lightcone => run_lightcone(config),
        ExperimentKind::Channel => run_channel(config),
        _ => run_sweep(config, stop),
    }
}

pub const CSV_HEADER: &str = "n,d,observable,entangler,replacement_mode,fraction,samples,seed,m_effective,mean_grad,stderr_mean,var_grad,stderr_var,pred_eq6,pred_eq12_alpha,alpha_used";

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub n: usize,
    pub d: usize,
    pub observable: String,
    pub entangler: EntanglerPattern,
    pub replacement_mode: ReplacementMode,
    pub fraction: f64,
    pub samples: usize,
    /// per-cell seed, enough to regenerate this row's ensemble alone
    pub seed: u64,
    pub m_effective: f64,
    pub mean_grad: f64,
    pub stderr_mean: f64,
    pub var_grad: f64,
    pub stderr_var: f64,
    pub pred_eq6: f64,
    pub pred_eq12_alpha: f64,
    pub alpha_used: f64,
}

/// 17 significant digits, enough to reparse any f64 to the same bits.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn pattern_label(p: EntanglerPattern) -> &'static str {
    match p {
        EntanglerPattern::Brick => "brick",
        EntanglerPattern::Ring => "ring",
        EntanglerPattern::Ladder => "ladder",
        EntanglerPattern::None => "none",
    }
}

fn mode_label(m: ReplacementMode) -> &'static str {
    match m {
        ReplacementMode::None => "none",
        ReplacementMode::Identity => "identity",
        ReplacementMode::Hadamard => "hadamard",
    }
}

pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut text = String::with_capacity(64 + 256 * rows.len());
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.d,
            r.observable,
            pattern_label(r.entangler),
            mode_label(r.replacement_mode),
            sci(r.fraction),
            r.samples,
            r.seed,
            sci(r.m_effective),
            sci(r.mean_grad),
            sci(r.stderr_mean),
            sci(r.var_grad),
            sci(r.stderr_var),
            sci(r.pred_eq6),
            sci(r.pred_eq12_alpha),
            sci(r.alpha_used)
        );
    }
    text
}

pub fn emit_csv(rows: &[CsvRow], path: &Path) -> Result<(), CliError> {
    write_text(path, &render_csv(rows))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct Manifest {
    config: ExperimentConfig,
    seed: u64,
    version: String,
    started: u64,
    elapsed_s: f64,
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn write_manifest(
    config: &ExperimentConfig,
    out: &Path,
    started: u64,
    elapsed_s: f64,
) -> Result<(), CliError> {
    let mut echo = config.clone();
    echo.output_path = Some(out.to_path_buf());
    let manifest = Manifest {
        seed: echo.master_seed,
        config: echo,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        elapsed_s,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is plain data");
    write_text(&manifest_path(out), &(text + "\n"))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone)]
struct GridCell {
    n: usize,
    d: usize,
    key: String,
    observable: Observable,
    fraction: f64,
}

/// Flattens the config lists into cells, sorted by (n, d, observable,
/// fraction) with duplicates dropped. The cell's position in this order is
/// its seed stream index, so the same config always reproduces the same
/// ensembles no matter how the lists were typed.
fn build_grid(config: &ExperimentConfig) -> Result<Vec<GridCell>, CliError> {
    let mut ns = config.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut ds = config.d_list.clone();
    ds.sort_unstable();
    ds.dedup();
    let mut fractions = if config.replacement_mode == ReplacementMode::None {
        vec![0.0]
    } else {
        config.fractions.clone()
    };
    fractions.sort_by(|a, b| a.partial_cmp(b).expect("fractions were validated finite"));
    fractions.dedup();

    let mut cells = Vec::new();
    for &n in &ns {
        let mut observables: Vec<(String, Observable)> = Vec::new();
        for text in &config.observables {
            let o = resolve_observable(text, n)?;
            let key = o.to_string();
            if !observables.iter().any(|(k, _)| *k == key) {
                observables.push((key, o));
            }
        }
        observables.sort_by(|a, b| a.0.cmp(&b.0));
        for &d in &ds {
            for (key, o) in &observables {
                for &fraction in &fractions {
                    cells.push(GridCell {
                        n,
                        d,
                        key: key.clone(),
                        observable: o.clone(),
                        fraction,
                    });
                }
            }
        }
    }
    Ok(cells)
}

/// Ensemble-average effective rotation count. Without replacement the cone
/// is a function of the topology alone, so one draw settles it.
fn mean_effective_count(spec: &EnsembleSpec, o: &Observable) -> Result<f64, CliError> {
    let structural =
        spec.replacement_mode == ReplacementMode::None || spec.replacement_fraction == 0.0;
    let draws = if structural { 1 } else { spec.samples };
    let mut sum = 0usize;
    for index in 0..draws {
        sum += analyze(&sample_circuit(spec, index), o)?.m;
    }
    Ok(sum as f64 / draws as f64)
}

fn direct_prediction(alpha: f64, n: usize, d: usize, m: f64) -> f64 {
    (alpha - 1.0) * m / (2.0f64.powi(3 * n as i32 + 1) * (n * d) as f64)
}

/// One proportionality constant for the whole sweep, fitted from its own
/// rows. NaN when the grid has too little spread to pin it down.
fn fit_sweep_alpha(rows: &[CsvRow]) -> f64 {
    let observations: Vec<VarianceObservation> = rows
        .iter()
        .filter(|r| r.var_grad > 0.0 && r.m_effective > 0.0)
        .map(|r| VarianceObservation {
            n: r.n,
            d: r.d,
            m: r.m_effective,
            variance: r.var_grad,
        })
        .collect();
    match fit_alpha(&observations) {
        Ok(fit) => fit.alpha,
        Err(_) => f64::NAN,
    }
}

fn run_sweep(config: &ExperimentConfig, stop: &AtomicBool) -> Result<RunOutcome, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    let grid = build_grid(config)?;
    let total = grid.len();
    let mut rows: Vec<CsvRow> = Vec::with_capacity(total);
    let mut truncated = false;

    for (ordinal, cell) in grid.iter().enumerate() {
        if stop.load(Ordering::Relaxed) {
            truncated = true;
            break;
        }
        let seed = stream_seed(config.master_seed, ordinal as u64);
        let spec = EnsembleSpec {
            n: cell.n,
            d: cell.d,
            entangler_pattern: config.entangler_pattern,
            observable: cell.observable.clone(),
            replacement_mode: config.replacement_mode,
            replacement_fraction: cell.fraction,
            samples: config.samples,
            master_seed: seed,
        };
        let stats = estimate_mode(&spec, &StateVector::zero_state(cell.n), config.sequential_reduction)?;
        let m_effective = mean_effective_count(&spec, &cell.observable)?;
        let pred_eq6 = predict_weingarten(cell.n, cell.observable.trace_of_square(), 1.0)?.value;
        eprintln!(
            "[{}/{}] n={} d={} o={} f={} var={:.3e}",
            ordinal + 1,
            total,
            cell.n,
            cell.d,
            cell.key,
            cell.fraction,
            stats.variance()
        );
        rows.push(CsvRow {
            n: cell.n,
            d: cell.d,
            observable: cell.key.clone(),
            entangler: config.entangler_pattern,
            replacement_mode: config.replacement_mode,
            fraction: cell.fraction,
            samples: config.samples,
            seed,
            m_effective,
            mean_grad: stats.mean(),
            stderr_mean: stats.stderr_mean(),
            var_grad: stats.variance(),
            stderr_var: stats.stderr_variance(),
            pred_eq6,
            // filled in below once the whole sweep is available to the fit
            pred_eq12_alpha: f64::NAN,
            alpha_used: f64::NAN,
        });
    }

    let alpha = fit_sweep_alpha(&rows);
    for r in rows.iter_mut() {
        r.alpha_used = alpha;
        r.pred_eq12_alpha = direct_prediction(alpha, r.n, r.d, r.m_effective);
    }

    let out = config.resolved_output_path();
    let mut text = render_csv(&rows);
    if truncated {
        text.push_str("# TRUNCATED\n");
    }
    write_text(&out, &text)?;
    write_manifest(config, &out, started, clock.elapsed().as_secs_f64())?;

    if truncated {
        println!("interrupted after {} of {} cells, partial CSV at {}", rows.len(), total, out.display());
        Ok(RunOutcome::Truncated)
    } else {
        println!("wrote {} rows to {}", rows.len(), out.display());
        Ok(RunOutcome::Completed)
    }
}

/// Ensemble matching the first entry of every grid axis; what `sample`
/// emits and what the one-shot report experiments inspect.
pub fn sample_spec(config: &ExperimentConfig) -> Result<EnsembleSpec, CliError> {
    config.validate()?;
    let n = config.n_list[0];
    let observable = resolve_observable(&config.observables[0], n)?;
    let replacement_fraction = if config.replacement_mode == ReplacementMode::None {
        0.0
    } else {
        config.fractions[0]
    };
    Ok(EnsembleSpec {
        n,
        d: config.d_list[0],
        entangler_pattern: config.entangler_pattern,
        observable,
        replacement_mode: config.replacement_mode,
        replacement_fraction,
        samples: config.samples,
        master_seed: config.master_seed,
    })
}

#[derive(Serialize)]
struct LightConeArtifact {
    n: usize,
    d: usize,
    observable: String,
    entangler: EntanglerPattern,
    replacement_mode: ReplacementMode,
    report: LightConeReport,
}

fn run_lightcone(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    let spec = sample_spec(config)?;
    let c = sample_circuit(&spec, 0);
    let report = analyze(&c, &spec.observable)?;

    let mut header = String::from("layer  ");
    for li in 0..spec.d {
        let _ = write!(header, " {:>2}", li + 1);
    }
    println!("{header}");
    for q in 0..spec.n {
        let mut line = format!("qubit {q}");
        for li in 0..spec.d {
            let mark = if report.is_effective(li, q) { 'o' } else { '.' };
            let _ = write!(line, "  {mark}");
        }
        println!("{line}");
    }
    println!(
        "effective m = {} of {} slots (m/(nd) = {:.4})",
        report.m,
        spec.n * spec.d,
        report.m_over_nd
    );

    let artifact = LightConeArtifact {
        n: spec.n,
        d: spec.d,
        observable: spec.observable.to_string(),
        entangler: spec.entangler_pattern,
        replacement_mode: spec.replacement_mode,
        report,
    };
    let out = config.resolved_output_path();
    let text = serde_json::to_string_pretty(&artifact).expect("report is plain data");
    write_text(&out, &(text + "\n"))?;
    write_manifest(config, &out, started, clock.elapsed().as_secs_f64())?;
    Ok(RunOutcome::Completed)
}

#[derive(Serialize)]
struct ChannelRow {
    d: usize,
    size: usize,
    exact: f64,
    closed_form: f64,
    abs_gap: f64,
}

#[derive(Serialize)]
struct ChannelArtifact {
    n: usize,
    rows: Vec<ChannelRow>,
}

/// Tabulates the depth-d averaged-layer coefficients, exact composition
/// against the closed form, one row per traced-subset size. Both expansions
/// are symmetric under qubit relabeling, so one representative per size
/// tells the whole story.
fn run_channel(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let started = unix_now();
    let clock = Instant::now();
    let n = config.n_list[0];
    let mut ds = config.d_list.clone();
    ds.sort_unstable();
    ds.dedup();

    let mut rows = Vec::new();
    println!("{:>5} {:>7} {:>25} {:>25} {:>10}", "d", "|sigma|", "exact", "closed form", "|gap|");
    for &d in &ds {
        let exact = FirstMomentExpansion::<f64>::exact(n, d);
        let closed = FirstMomentExpansion::<f64>::closed_form(n, d);
        for size in 0..=n {
            let representative = QubitIndexSet::from_bitmask((1usize << size) - 1, n);
            let e = exact.coefficient(&representative);
            let c = closed.coefficient(&representative);
            let abs_gap = (e - c).abs();
            println!("{d:>5} {size:>7} {:>25} {:>25} {abs_gap:>10.3e}", sci(e), sci(c));
            rows.push(ChannelRow { d, size, exact: e, closed_form: c, abs_gap });
        }
    }

    let artifact = ChannelArtifact { n, rows };
    let out = config.resolved_output_path();
    let text = serde_json::to_string_pretty(&artifact).expect("rows are plain data");
    write_text(&out, &(text + "\n"))?;
    write_manifest(config, &out, started, clock.elapsed().as_secs_f64())?;
    Ok(RunOutcome::Completed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// a documented, intentional mismatch; never counts as failure
    ExpectedDivergence,
}

impl CheckStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::ExpectedDivergence => "EXPECTED-DIVERGENCE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

fn threshold_check(name: &'static str, worst: f64, limit: f64, what: &str) -> CheckResult {
    let status = if worst <= limit { CheckStatus::Pass } else { CheckStatus::Fail };
    CheckResult { name, status, detail: format!("{what} {worst:.2e} (limit {limit:.0e})") }
}

fn check_single_gate_average() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let a = random_hermitian::<f64>(&mut rng, 1 << n);
        let j = trial % n;
        let site = QubitIndexSet::single(j);
        let averaged = quadrature_gate_average::<f64, _>(|g| {
            let w = embed(g, &site, n).expect("gate site is in range");
            &(&w.adjoint() * &a) * &w
        });
        let direct = first_moment_single(&a, j, n).expect("dimensions match");
        worst = worst.max(averaged.max_abs_diff(&direct));
    }
    threshold_check(
        "single gate average matches quadrature",
        worst,
        1e-12,
        "max |delta| over 100 draws",
    )
}

fn check_depth_channel_is_unital() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for d in 1..=10 {
            let expansion = FirstMomentExpansion::<f64>::exact(n, d);
            worst = worst.max((expansion.unitality_weight() - 1.0).abs());
            let a = random_hermitian::<f64>(&mut rng, 1 << n);
            let mapped = expansion.apply(&a).expect("dimensions match");
            worst = worst.max((mapped.trace() - a.trace()).norm());
        }
    }
    threshold_check(
        "depth composition stays unital and trace preserving",
        worst,
        1e-12,
        "max deviation over n<=4, d<=10",
    )
}

fn check_closed_form_agreement() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for d in [1, 2] {
            let exact = FirstMomentExpansion::<f64>::exact(n, d);
            let closed = FirstMomentExpansion::<f64>::closed_form(n, d);
            for (sigma, coefficient) in exact.coefficients() {
                worst = worst.max((coefficient - closed.coefficient(&sigma)).abs());
            }
        }
    }
    threshold_check(
        "closed form matches composition at depth 1 and 2",
        worst,
        1e-12,
        "max coefficient gap",
    )
}

fn check_closed_form_divergence() -> CheckResult {
    let name = "closed form past depth 2, documented gap";
    let exact = FirstMomentExpansion::<f64>::exact(1, 3);
    let closed = FirstMomentExpansion::<f64>::closed_form(1, 3);
    let full = QubitIndexSet::single(0);
    let e = exact.coefficient(&full);
    let c = closed.coefficient(&full);
    // the two routes disagree here by exactly 1/9 and that is the point:
    // the closed form stops being exact at depth 3
    let pinned = (e - 13.0 / 27.0).abs() <= 1e-12 && (c - 16.0 / 27.0).abs() <= 1e-12;
    CheckResult {
        name,
        status: if pinned { CheckStatus::ExpectedDivergence } else { CheckStatus::Fail },
        detail: format!(
            "trace-refill coefficient at n=1, d=3: closed form {c:.6} vs exact {e:.6}, gap {:.6}",
            (c - e).abs()
        ),
    }
}

fn check_remainder_traceless() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let a = random_hermitian::<f64>(&mut rng, 2);
        let b = random_hermitian::<f64>(&mut rng, 2);
        let c = random_hermitian::<f64>(&mut rng, 2);
        let (_, parts) = second_moment_single(&a, &b, &c, 0, 1).expect("dimensions match");
        worst = worst.max(parts.epsilon_part.trace().norm());
    }
    threshold_check(
        "second moment remainder is traceless",
        worst,
        1e-10,
        "max |trace| over 25 triples",
    )
}

fn check_grid_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let a = random_hermitian::<f64>(&mut rng, 2);
        let b = random_hermitian::<f64>(&mut rng, 2);
        let c = random_hermitian::<f64>(&mut rng, 2);
        let (single, _) = second_moment_single(&a, &b, &c, 0, 1).expect("dimensions match");
        let brute = brute_force_moment(1, 1, &a, &b, &c).expect("one slot is under the grid cap");
        worst = worst.max(single.max_abs_diff(&brute));
    }
    threshold_check(
        "second moment matches the grid oracle",
        worst,
        1e-12,
        "max |delta| over 5 triples",
    )
}

fn check_gradient_routes() -> CheckResult {
    let name = "gradient routes agree";
    let patterns = [
        EntanglerPattern::Brick,
        EntanglerPattern::Ring,
        EntanglerPattern::Ladder,
        EntanglerPattern::None,
    ];
    let mut worst = 0.0f64;
    for k in 0..20usize {
        let n = 1 + k % 4;
        let d = 1 + (k / 4) % 4;
        let spec = EnsembleSpec {
            n,
            d,
            entangler_pattern: patterns[k % patterns.len()],
            observable: Observable::all_z(n),
            replacement_mode: ReplacementMode::None,
            replacement_fraction: 0.0,
            samples: 2,
            master_seed: 900 + k as u64,
        };
        let c = sample_circuit(&spec, 0);
        let init = StateVector::<f64>::zero_state(n);
        match (gradient_shift(&c, &spec.observable, &init), gradient_commutator(&c, &spec.observable, &init)) {
            (Ok(shift), Ok(commutator)) => {
                for (s, g) in shift.iter().zip(&commutator) {
                    worst = worst.max((s - g).abs());
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                return CheckResult {
                    name,
                    status: CheckStatus::Fail,
                    detail: format!("route failed: {e}"),
                };
            }
        }
    }
    threshold_check(name, worst, 1e-10, "max |delta| over 20 circuits")
}

/// The full cross-check battery, pure so callers can inspect statuses.
pub fn verify_suite() -> Vec<CheckResult> {
    vec![
        check_single_gate_average(),
        check_depth_channel_is_unital(),
        check_closed_form_agreement(),
        check_closed_form_divergence(),
        check_remainder_traceless(),
        check_grid_oracle(),
        check_gradient_routes(),
    ]
}

fn run_verify() -> RunOutcome {
    let checks = verify_suite();
    let mut passed = 0;
    let mut failed = 0;
    let mut divergent = 0;
    for check in &checks {
        match check.status {
            CheckStatus::Pass => passed += 1,
            CheckStatus::Fail => failed += 1,
            CheckStatus::ExpectedDivergence => divergent += 1,
        }
        println!("{:<19}  {:<52}  {}", check.status.label(), check.name, check.detail);
    }
    println!("{passed} passed, {failed} failed, {divergent} expected divergence");
    if failed > 0 {
        RunOutcome::VerifyFailed
    } else {
        RunOutcome::Completed
    }
}
