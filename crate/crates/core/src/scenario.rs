//! Configuration-driven scenarios: evolve a state, instrument every sample
//! with an [`EntropyReport`], check the closed-form oracles and write CSV.

use std::f64::consts::FRAC_PI_2;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_report, EntropyReport, EUR_BOUND};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::propagator::{evolve, Potential, Trajectory};
use crate::states::{make_state, sj_bounds, squeezed_joint_entropy, SjBounds, StateSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Column header of the entropy time-series CSV.
pub const CSV_HEADER: &str = "t,S_q,S_p,S_J,dX,dP,power_product,eur_slack,heisenberg_slack";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 1024,
            x_min: -12.0,
            x_max: 12.0,
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}

fn default_sample_every() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    #[serde(alias = "coherent_constant_SJ")]
    CoherentConstantSj,
    #[serde(alias = "squeezed_SJ_curve")]
    SqueezedSjCurve,
    SjBounds,
    EurChain,
    FreeMonotone,
    CatPeriodicity,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::CoherentConstantSj => "coherent_constant_sj",
            CheckKind::SqueezedSjCurve => "squeezed_sj_curve",
            CheckKind::SjBounds => "sj_bounds",
            CheckKind::EurChain => "eur_chain",
            CheckKind::FreeMonotone => "free_monotone",
            CheckKind::CatPeriodicity => "cat_periodicity",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckKind::CoherentConstantSj => 1e-5,
            CheckKind::SqueezedSjCurve => 1e-5,
            CheckKind::SjBounds => 1e-4,
            CheckKind::EurChain => 1e-6,
            CheckKind::FreeMonotone => 1e-9,
            CheckKind::CatPeriodicity => 1e-4,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub check: CheckKind,
    pub tolerance: Option<f64>,
}

impl CheckSpec {
    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or_else(|| self.check.default_tolerance())
    }
}

fn default_precision() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv_path: Option<PathBuf>,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            csv_path: None,
            precision: default_precision(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub grid: GridConfig,
    pub state: StateSpec,
    pub potential: Potential,
    pub time: TimeConfig,
    #[serde(default)]
    pub verify: Vec<CheckSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<string>"),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: ScenarioConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.x_min, self.grid.x_max)
    }

    /// Final time actually reached by the stepper.
    pub fn t_final(&self) -> f64 {
        (self.time.t_end / self.time.dt).round() * self.time.dt
    }

    /// Structural validation plus check/scenario compatibility.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        self.build_grid()?;
        self.state.validate()?;
        self.potential.validate()?;
        let TimeConfig {
            dt,
            t_end,
            sample_every,
        } = self.time;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be nonnegative, got {t_end}"
            )));
        }
        if sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        for check in &self.verify {
            let tol = check.tolerance();
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::Config(format!(
                    "{}: tolerance must be nonnegative, got {tol}",
                    check.check
                )));
            }
            self.check_compatible(check.check)?;
        }
        Ok(())
    }

    fn check_compatible(&self, check: CheckKind) -> Result<()> {
        let incompatible = |why: &str| {
            Err(Error::Config(format!(
                "check {check} is incompatible with scenario '{}': {why}",
                self.name
            )))
        };
        let gaussian = self.state.gaussian_parameters();
        let unit_harmonic = self.potential.is_unit_harmonic();
        match check {
            CheckKind::CoherentConstantSj => {
                if !matches!(gaussian, Some((_, _, g)) if g == 1.0) {
                    return incompatible("requires a coherent (γ = 1) state");
                }
                if !unit_harmonic {
                    return incompatible("requires the harmonic potential with m = ω = 1");
                }
            }
            CheckKind::SqueezedSjCurve | CheckKind::SjBounds => {
                if !matches!(gaussian, Some((x0, p0, _)) if x0 == 0.0 && p0 == 0.0) {
                    return incompatible("requires a centred squeezed state");
                }
                if !unit_harmonic {
                    return incompatible("requires the harmonic potential with m = ω = 1");
                }
                if check == CheckKind::SjBounds && self.t_final() < FRAC_PI_2 {
                    return incompatible("trajectory must cover one S_J period (π/2)");
                }
            }
            CheckKind::EurChain => {}
            CheckKind::FreeMonotone => {
                if !matches!(self.potential, Potential::Free { .. }) {
                    return incompatible("requires the free potential");
                }
                if gaussian.is_none() {
                    return incompatible("requires a Gaussian initial state");
                }
            }
            CheckKind::CatPeriodicity => {
                if !matches!(self.state, StateSpec::Cat { .. }) {
                    return incompatible("requires a cat state");
                }
                let Some(period) = self.potential.period() else {
                    return incompatible("requires a harmonic potential");
                };
                if self.t_final() < 2.0 * period - self.time.dt {
                    return incompatible("trajectory must span two oscillator periods");
                }
            }
        }
        Ok(())
    }
}

/// Result of one oracle check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationOutcome {
    pub check: CheckKind,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Time of the worst deviation.
    pub locus: Option<f64>,
}

impl VerificationOutcome {
    fn new(check: CheckKind, deviation: f64, tolerance: f64, locus: Option<f64>) -> Self {
        VerificationOutcome {
            check,
            deviation,
            tolerance,
            // NaN deviations fail
            passed: deviation <= tolerance,
            locus,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub reports: Vec<EntropyReport>,
    pub outcomes: Vec<VerificationOutcome>,
    pub max_edge_amplitude: f64,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn sj_range(&self) -> (f64, f64) {
        self.reports
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.s_j), hi.max(r.s_j))
            })
    }
}

/// Evolves the configured state and reports entropies at every sample.
pub fn simulate(cfg: &ScenarioConfig) -> Result<(Trajectory, Vec<EntropyReport>)> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let wf0 = make_state(&cfg.state, &grid)?;
    let traj = evolve(
        &wf0,
        &cfg.potential,
        cfg.time.dt,
        cfg.time.t_end,
        cfg.time.sample_every,
    )?;
    let reports = traj
        .times
        .par_iter()
        .zip(traj.states.par_iter())
        .map(|(&t, wf)| entropy_report(wf, t).map_err(|e| e.at_time(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok((traj, reports))
}

/// Evaluates every check requested by `cfg` against a report series.
pub fn verify(cfg: &ScenarioConfig, reports: &[EntropyReport]) -> Result<Vec<VerificationOutcome>> {
    if reports.is_empty() {
        return Err(Error::Contract("no samples to verify".into()));
    }
    cfg.verify
        .iter()
        .map(|spec| evaluate_check(cfg, spec, reports))
        .collect()
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let (traj, reports) = simulate(cfg)?;
    let outcomes = verify(cfg, &reports)?;
    Ok(ScenarioRun {
        reports,
        outcomes,
        max_edge_amplitude: traj.max_edge_amplitude,
    })
}

/// Largest value of `f` over the reports, with the time where it occurs.
fn worst(reports: &[EntropyReport], f: impl Fn(&EntropyReport) -> f64) -> (f64, Option<f64>) {
    reports.iter().fold((0.0, None), |(dev, at), r| {
        let d = f(r);
        if d > dev || d.is_nan() {
            (d, Some(r.t))
        } else {
            (dev, at)
        }
    })
}

fn evaluate_check(
    cfg: &ScenarioConfig,
    spec: &CheckSpec,
    reports: &[EntropyReport],
) -> Result<VerificationOutcome> {
    let tol = spec.tolerance();
    let outcome =
        |(dev, locus): (f64, Option<f64>)| VerificationOutcome::new(spec.check, dev, tol, locus);
    Ok(match spec.check {
        CheckKind::CoherentConstantSj => outcome(worst(reports, |r| (r.s_j - EUR_BOUND).abs())),
        CheckKind::SqueezedSjCurve => {
            let gamma = squeezed_gamma(&cfg.state)?;
            let expected = reports
                .iter()
                .map(|r| squeezed_joint_entropy(gamma, r.t))
                .collect::<Result<Vec<_>>>()?;
            let (mut dev, mut at) = (0.0, None);
            for (r, e) in reports.iter().zip(expected) {
                let d = (r.s_j - e).abs();
                if d > dev || d.is_nan() {
                    (dev, at) = (d, Some(r.t));
                }
            }
            outcome((dev, at))
        }
        CheckKind::SjBounds => {
            let bounds = sj_bounds(squeezed_gamma(&cfg.state)?)?;
            outcome(bounds_deviation(reports, bounds))
        }
        CheckKind::EurChain => outcome(worst(reports, |r| {
            0.0f64
                .max(-r.eur_slack)
                .max(-r.heisenberg_slack)
                .max(1.0 - r.power_product)
        })),
        CheckKind::FreeMonotone => {
            let (mut dev, mut at) = (0.0, None);
            for w in reports.windows(2) {
                let drop = w[0].s_j - w[1].s_j;
                if drop > dev || drop.is_nan() {
                    (dev, at) = (drop, Some(w[1].t));
                }
            }
            outcome((dev, at))
        }
        CheckKind::CatPeriodicity => {
            let period = cfg
                .potential
                .period()
                .expect("validated harmonic potential");
            outcome(periodicity_deviation(reports, period)?)
        }
    })
}

fn squeezed_gamma(state: &StateSpec) -> Result<f64> {
    state
        .gaussian_parameters()
        .map(|(_, _, g)| g)
        .ok_or_else(|| Error::Config("squeezed checks require a Gaussian state".into()))
}

fn bounds_deviation(reports: &[EntropyReport], bounds: SjBounds) -> (f64, Option<f64>) {
    let lo = reports.iter().min_by(|a, b| a.s_j.total_cmp(&b.s_j));
    let hi = reports.iter().max_by(|a, b| a.s_j.total_cmp(&b.s_j));
    match (lo, hi) {
        (Some(lo), Some(hi)) => {
            let dlo = (lo.s_j - bounds.min).abs();
            let dhi = (hi.s_j - bounds.max).abs();
            if dhi >= dlo {
                (dhi, Some(hi.t))
            } else {
                (dlo, Some(lo.t))
            }
        }
        _ => (f64::NAN, None),
    }
}

/// Four-point Lagrange interpolation of `S_J` at time `tau`.
fn interpolate_sj(reports: &[EntropyReport], tau: f64) -> f64 {
    let n = reports.len();
    let i = reports.partition_point(|r| r.t <= tau).saturating_sub(1);
    if reports[i].t == tau || n < 4 {
        return reports[i.min(n - 1)].s_j;
    }
    let start = i.saturating_sub(1).min(n - 4);
    let nodes = &reports[start..start + 4];
    nodes
        .iter()
        .enumerate()
        .map(|(a, ra)| {
            let weight: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, rb)| (tau - rb.t) / (ra.t - rb.t))
                .product();
            weight * ra.s_j
        })
        .sum()
}

/// `max |S_J(t) − S_J(t + T)|` over samples `t ∈ [0, T]`.
fn periodicity_deviation(reports: &[EntropyReport], period: f64) -> Result<(f64, Option<f64>)> {
    let t_last = reports.last().map_or(0.0, |r| r.t);
    let (mut dev, mut at) = (0.0, None);
    let mut compared = 0usize;
    for r in reports.iter().take_while(|r| r.t <= period) {
        let tau = r.t + period;
        if tau > t_last {
            break;
        }
        compared += 1;
        let d = (r.s_j - interpolate_sj(reports, tau)).abs();
        if d > dev || d.is_nan() {
            (dev, at) = (d, Some(r.t));
        }
    }
    if compared < 2 {
        return Err(Error::Config(
            "periodicity check needs samples spanning more than one period".into(),
        ));
    }
    Ok((dev, at))
}

/// Renders the report series as CSV text with fixed decimal precision.
pub fn format_csv(series: &[EntropyReport], precision: usize) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Contract(
            "cannot emit CSV for an empty series".into(),
        ));
    }
    let mut out = String::with_capacity(series.len() * (9 * (precision + 4)) + CSV_HEADER.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in series {
        let fields = [
            r.t,
            r.s_q,
            r.s_p,
            r.s_j,
            r.delta_x,
            r.delta_p,
            r.power_product,
            r.eur_slack,
            r.heisenberg_slack,
        ];
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:.precision$}").expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(series: &[EntropyReport], path: impl AsRef<Path>, precision: usize) -> Result<()> {
    let path = path.as_ref();
    let text = format_csv(series, precision)?;
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::write(path, text).map_err(io_err)
}

/// State parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Gamma,
    Q0,
    P0,
    RelativePhase,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Q0 => "q0",
            SweepParam::P0 => "p0",
            SweepParam::RelativePhase => "relative_phase",
        }
    }

    /// Copy of `cfg` with the parameter replaced; errors if the state has no
    /// such parameter.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut out = cfg.clone();
        let slot = match (self, &mut out.state) {
            (SweepParam::Gamma, StateSpec::Gaussian { gamma, .. })
            | (SweepParam::Gamma, StateSpec::Squeezed { gamma }) => gamma,
            (SweepParam::Q0, StateSpec::Gaussian { x0: q0, .. })
            | (SweepParam::Q0, StateSpec::Coherent { q0, .. })
            | (SweepParam::Q0, StateSpec::Cat { q0, .. }) => q0,
            (SweepParam::P0, StateSpec::Gaussian { p0, .. })
            | (SweepParam::P0, StateSpec::Coherent { p0, .. })
            | (SweepParam::P0, StateSpec::Cat { p0, .. }) => p0,
            (SweepParam::RelativePhase, StateSpec::Cat { relative_phase, .. }) => relative_phase,
            (param, state) => {
                return Err(Error::Config(format!(
                    "state {state:?} has no parameter '{}'",
                    param.name()
                )))
            }
        };
        *slot = value;
        out.name = format!("{}_{}_{}", cfg.name, self.name(), value);
        if let Some(path) = &cfg.output.csv_path {
            out.output.csv_path = Some(sweep_csv_path(path, self, value));
        }
        out.validate()?;
        Ok(out)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" | "γ" => Ok(SweepParam::Gamma),
            "q0" => Ok(SweepParam::Q0),
            "p0" => Ok(SweepParam::P0),
            "relative_phase" | "phase" => Ok(SweepParam::RelativePhase),
            other => Err(Error::Config(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

/// `dir/stem.csv` → `dir/stem_gamma_2.csv`
pub fn sweep_csv_path(base: &Path, param: SweepParam, value: f64) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let ext = base
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{}_{value}.{ext}", param.name()))
}

#[derive(Debug, Clone)]
pub struct SweepMember {
    pub value: f64,
    pub config: ScenarioConfig,
    pub run: ScenarioRun,
    /// Closed-form S_J range when the member is a squeezed state under the
    /// unit oscillator.
    pub bounds: Option<SjBounds>,
}

/// Runs one scenario per parameter value, concurrently.
pub fn sweep(cfg: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepMember>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| param.apply(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    configs
        .into_par_iter()
        .zip(values.par_iter())
        .map(|(config, &value)| {
            let run = run_scenario(&config)?;
            let bounds = match config.state.gaussian_parameters() {
                Some((x0, p0, gamma))
                    if x0 == 0.0 && p0 == 0.0 && config.potential.is_unit_harmonic() =>
                {
                    Some(sj_bounds(gamma)?)
                }
                _ => None,
            };
            Ok(SweepMember {
                value,
                config,
                run,
                bounds,
            })
        })
        .collect()
}

/// Plain-text table of verification outcomes.
pub fn format_outcomes(name: &str, outcomes: &[VerificationOutcome]) -> String {
    let mut out = format!("scenario: {name}\n");
    writeln!(
        out,
        "{:<22} {:>12} {:>12} {:>10}  status",
        "check", "deviation", "tolerance", "locus"
    )
    .unwrap();
    for o in outcomes {
        let locus = o
            .locus
            .map_or_else(|| "-".to_string(), |t| format!("{t:.4}"));
        writeln!(
            out,
            "{:<22} {:>12.3e} {:>12.3e} {:>10}  {}",
            o.check.name(),
            o.deviation,
            o.tolerance,
            locus,
            if o.passed { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    out
}

/// Summary of a sweep: observed S_J range against the closed-form bounds.
pub fn format_sweep_summary(param: SweepParam, members: &[SweepMember]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>10} {:>12} {:>12} {:>12} {:>12}  checks",
        param.name(),
        "S_J_min",
        "S_J_max",
        "bound_min",
        "bound_max"
    )
    .unwrap();
    for m in members {
        let (lo, hi) = m.run.sj_range();
        let (blo, bhi) = m.bounds.map_or_else(
            || ("-".to_string(), "-".to_string()),
            |b| (format!("{:.7}", b.min), format!("{:.7}", b.max)),
        );
        writeln!(
            out,
            "{:>10} {:>12.7} {:>12.7} {:>12} {:>12}  {}",
            m.value,
            lo,
            hi,
            blo,
            bhi,
            if m.run.passed() { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    out
}
