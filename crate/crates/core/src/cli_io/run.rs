//! Run orchestration: scenario → scales → coefficients → time step →
//! simulation, with every derived number written to a manifest.
//!
//! Output directory layout:
//!
//! ```text
//! trajectory.csv     step,time_s,theta_rad,eta_m
//! coefficients.txt   A, B, C, D₀ and ratios
//! diagnostics.txt    flow-regime report
//! manifest.txt       every solver input; `replay_manifest` reruns from it
//! comparison.txt     only when the IC came from a measured profile
//! last_good.csv      only after a blow-up
//! ```

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::output::{coefficients_text, diagnostics_text, CsvTrajectoryWriter};
use super::profile::{compare_profiles, load_measured_profile, MeasuredProfile, ProfileUnits};
use super::{load_scenario, IoError, KeyValues};
use crate::coefficients::{compute_coefficients_at, KdvCoefficients};
use crate::diagnostics::diagnose;
use crate::scenario::{derive_scales, DerivedScales, LabCase, Scenario};
use crate::solver::{
    courant_dt, gaussian_initial_condition, implied_courant, simulate, ForcingMode, RingGrid,
    SolverError, StepParams, WaveState,
};

/// Nonlinear weight of the stabilised preset.
pub const STABILIZED_WEIGHT_NONLINEAR: f64 = 0.01;
/// Dispersive weight of the stabilised preset.
pub const STABILIZED_WEIGHT_DISPERSIVE: f64 = 0.001;
/// Grid size of the stabilised far-field run.
pub const STABILIZED_POINTS: usize = 70;
/// Time step of the stabilised far-field run (s).
pub const STABILIZED_DT: f64 = 0.00176;
/// Gaussian width used when none is given (rad).
pub const DEFAULT_IC_WIDTH: f64 = 0.3;

const MANIFEST_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{stage}: {message}")]
    Validation {
        stage: &'static str,
        message: String,
    },
    #[error("{stage}: {source}")]
    Io {
        stage: &'static str,
        #[source]
        source: IoError,
    },
    #[error("numerical blow-up at step {step}: {reason} (last good snapshot: {})", last_good.display())]
    BlowUp {
        step: u64,
        reason: String,
        last_good: PathBuf,
    },
}

impl RunError {
    /// 2 for invalid input, 3 for numerical blow-up, 1 for filesystem trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation { .. } => 2,
            RunError::BlowUp { .. } => 3,
            RunError::Io { source, .. } if source.is_validation() => 2,
            RunError::Io { .. } => 1,
        }
    }

    fn validation(stage: &'static str, e: impl std::fmt::Display) -> Self {
        RunError::Validation {
            stage,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    File(PathBuf),
    Lab(LabCase),
    Inline(Scenario),
}

impl ScenarioSource {
    pub fn load(&self) -> Result<Scenario, IoError> {
        match self {
            ScenarioSource::File(p) => load_scenario(p),
            ScenarioSource::Lab(c) => Ok(Scenario::laboratory_case(*c)),
            ScenarioSource::Inline(s) => Ok(*s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `amplitude · exp(−((θ − avg)/st)²)`; amplitude defaults to the
    /// scenario's measured amplitude.
    Gaussian {
        amplitude: Option<f64>,
        avg: f64,
        st: f64,
    },
    /// Gaussian seeded from the moments and peak of a measured profile.
    Measured { path: PathBuf, units: ProfileUnits },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    pub grid_points: usize,
    /// `(origin, length)` of a periodic sub-arc; full ring when `None`.
    pub arc: Option<(f64, f64)>,
    pub courant: f64,
    /// Explicit time step; its implied Courant number must lie in (0, 1].
    pub dt: Option<f64>,
    pub weight_nonlinear: f64,
    pub weight_dispersive: f64,
    pub forcing_mode: ForcingMode,
    pub n_steps: u64,
    pub stride: u64,
    pub out_dir: PathBuf,
    pub initial: InitialCondition,
    /// Radius for r-dependent coefficient factors; `r_max` when `None`.
    pub r_eval: Option<f64>,
}

impl RunConfig {
    pub fn new(scenario: ScenarioSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            scenario,
            grid_points: 256,
            arc: None,
            courant: 0.01,
            dt: None,
            weight_nonlinear: 1.0,
            weight_dispersive: 1.0,
            forcing_mode: ForcingMode::FullSin,
            n_steps: 1000,
            stride: 100,
            out_dir: out_dir.into(),
            initial: InitialCondition::Gaussian {
                amplitude: None,
                avg: 0.0,
                st: DEFAULT_IC_WIDTH,
            },
            r_eval: None,
        }
    }

    /// Far-field stabilised run: weights 0.01 / 0.001, 70 nodes, Δt = 1.76 ms.
    pub fn stabilized(mut self) -> Self {
        self.weight_nonlinear = STABILIZED_WEIGHT_NONLINEAR;
        self.weight_dispersive = STABILIZED_WEIGHT_DISPERSIVE;
        self.grid_points = STABILIZED_POINTS;
        self.dt = Some(STABILIZED_DT);
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub trajectory: PathBuf,
    pub manifest: PathBuf,
    pub scales: Option<DerivedScales>,
    pub params: StepParams,
    pub initial: WaveState,
    pub final_state: WaveState,
}

/// Everything the solver consumes; written to and read from the manifest.
#[derive(Debug, Clone, PartialEq)]
struct SolverInputs {
    n_points: usize,
    origin: f64,
    length: f64,
    params: StepParams,
    ic_amplitude: f64,
    ic_avg: f64,
    ic_st: f64,
    n_steps: u64,
    stride: u64,
}

impl SolverInputs {
    fn grid(&self) -> Result<Arc<RingGrid>, SolverError> {
        RingGrid::periodic(self.n_points, self.origin, self.length).map(Arc::new)
    }
}

pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    let scenario = config.scenario.load().map_err(|e| RunError::Io {
        stage: "scenario",
        source: e,
    })?;
    let scales = derive_scales(&scenario).map_err(|e| RunError::validation("scales", e))?;
    let r_eval = config.r_eval.unwrap_or(scenario.geometry.r_max);
    let coeffs = compute_coefficients_at(&scenario, &scales, r_eval)
        .map_err(|e| RunError::validation("coefficients", e))?;

    let (origin, length) = config.arc.unwrap_or((0.0, std::f64::consts::TAU));
    let grid = RingGrid::periodic(config.grid_points, origin, length)
        .map_err(|e| RunError::validation("grid", e))?;
    let (g, depth) = (scenario.fluid.g, scales.mean_depth);
    let (dt, courant) = match config.dt {
        None => {
            let dt = courant_dt(
                config.courant,
                grid.d_theta,
                &scenario.geometry,
                scenario.omega,
                depth,
                g,
            )
            .map_err(|e| RunError::validation("time step", e))?;
            (dt, config.courant)
        }
        Some(dt) => (
            dt,
            implied_courant(
                dt,
                grid.d_theta,
                &scenario.geometry,
                scenario.omega,
                depth,
                g,
            ),
        ),
    };
    let params = StepParams::new(
        coeffs,
        dt,
        config.weight_nonlinear,
        config.weight_dispersive,
        config.forcing_mode,
        courant,
    )
    .map_err(|e| RunError::validation("time step", e))?;

    let measured = match &config.initial {
        InitialCondition::Measured { path, units } => Some(
            load_measured_profile(path, *units, scenario.geometry.r_max).map_err(|e| {
                RunError::Io {
                    stage: "initial condition",
                    source: e,
                }
            })?,
        ),
        InitialCondition::Gaussian { .. } => None,
    };
    let (ic_amplitude, ic_avg, ic_st) = match (&config.initial, &measured) {
        (InitialCondition::Gaussian { amplitude, avg, st }, _) => {
            let a = amplitude.or(scenario.measured_amplitude).ok_or_else(|| {
                RunError::validation(
                    "initial condition",
                    "no amplitude given and the scenario has none",
                )
            })?;
            (a, *avg, *st)
        }
        (_, Some(profile)) => {
            let (avg, st) = profile
                .gaussian_moments()
                .map_err(|e| RunError::validation("initial condition", e))?;
            (profile.max_elevation(), avg, st)
        }
        _ => unreachable!("measured profile loaded above"),
    };

    let inputs = SolverInputs {
        n_points: grid.n_points,
        origin,
        length,
        params,
        ic_amplitude,
        ic_avg,
        ic_st,
        n_steps: config.n_steps,
        stride: config.stride,
    };
    let extra = derived_section(&scenario, &scales, &coeffs);
    let mut reports = Vec::new();
    if let Ok(d) = diagnose(&scenario, &scales, None) {
        reports.push(("diagnostics.txt", diagnostics_text(&scenario, &scales, &d)));
    }
    execute(
        &inputs,
        &config.out_dir,
        Some(scales),
        &extra,
        &reports,
        measured.as_ref(),
    )
}

/// Rerun the simulation described by a manifest into `out_dir`.
pub fn replay_manifest(manifest: &Path, out_dir: &Path) -> Result<RunSummary, RunError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| RunError::Io {
        stage: "manifest",
        source: IoError::io(manifest, e),
    })?;
    let inputs = parse_manifest(&text).map_err(|e| RunError::Io {
        stage: "manifest",
        source: e,
    })?;
    // Informational lines carry over verbatim, in their original order.
    let mut extra = String::new();
    for line in text
        .lines()
        .filter(|l| l.trim_start().starts_with("derived."))
    {
        extra.push_str(line);
        extra.push('\n');
    }
    execute(&inputs, out_dir, None, &extra, &[], None)
}

/// Run independent configurations concurrently, one thread each.
pub fn sweep(configs: &[RunConfig]) -> Vec<Result<RunSummary, RunError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::Io {
        stage: "output",
        source: IoError::io(path, e),
    })
}

fn execute(
    inputs: &SolverInputs,
    out_dir: &Path,
    scales: Option<DerivedScales>,
    extra: &str,
    reports: &[(&str, String)],
    measured: Option<&MeasuredProfile>,
) -> Result<RunSummary, RunError> {
    let io_err = |path: &Path, e: std::io::Error| RunError::Io {
        stage: "output",
        source: IoError::io(path, e),
    };
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;

    let grid = inputs.grid().map_err(|e| RunError::validation("grid", e))?;
    let ic = gaussian_initial_condition(grid, inputs.ic_amplitude, inputs.ic_avg, inputs.ic_st)
        .map_err(|e| RunError::validation("initial condition", e))?;

    let trajectory = out_dir.join("trajectory.csv");
    let manifest = out_dir.join("manifest.txt");
    write_file(
        &out_dir.join("coefficients.txt"),
        &coefficients_text(&inputs.params.coeffs),
    )?;
    for (name, text) in reports {
        write_file(&out_dir.join(name), text)?;
    }

    let file = File::create(&trajectory).map_err(|e| io_err(&trajectory, e))?;
    let mut sink =
        CsvTrajectoryWriter::new(BufWriter::new(file)).map_err(|e| io_err(&trajectory, e))?;
    let result = simulate(
        &ic,
        &inputs.params,
        inputs.n_steps,
        inputs.stride,
        &mut sink,
    );
    sink.into_inner().map_err(|e| io_err(&trajectory, e))?;

    match result {
        Ok(final_state) => {
            write_file(&manifest, &manifest_text(inputs, None, extra))?;
            if let Some(profile) = measured {
                write_file(
                    &out_dir.join("comparison.txt"),
                    &comparison_text(&ic, &final_state, profile)?,
                )?;
            }
            Ok(RunSummary {
                out_dir: out_dir.to_path_buf(),
                trajectory,
                manifest,
                scales,
                params: inputs.params,
                initial: ic,
                final_state,
            })
        }
        Err(SolverError::BlowUp {
            step,
            reason,
            last_good,
        }) => {
            let last = out_dir.join("last_good.csv");
            let file = File::create(&last).map_err(|e| io_err(&last, e))?;
            let mut w =
                CsvTrajectoryWriter::new(BufWriter::new(file)).map_err(|e| io_err(&last, e))?;
            crate::solver::SnapshotSink::record(&mut w, &last_good)
                .map_err(|e| io_err(&last, e))?;
            w.into_inner().map_err(|e| io_err(&last, e))?;
            write_file(&manifest, &manifest_text(inputs, Some(step), extra))?;
            Err(RunError::BlowUp {
                step,
                reason,
                last_good: last,
            })
        }
        Err(SolverError::Sink(e)) => Err(io_err(&trajectory, e)),
        Err(e) => Err(RunError::validation("simulate", e)),
    }
}

fn comparison_text(
    ic: &WaveState,
    last: &WaveState,
    profile: &MeasuredProfile,
) -> Result<String, RunError> {
    let mut s = String::new();
    for (label, state) in [("initial", ic), ("final", last)] {
        let c = compare_profiles(state, profile).map_err(|e| RunError::validation("compare", e))?;
        let _ = writeln!(s, "{label}.time_s = {}", state.time);
        let _ = writeln!(s, "{label}.l2_m = {}", c.l2);
        let _ = writeln!(s, "{label}.linf_m = {}", c.linf);
        let _ = writeln!(s, "{label}.amplitude_err = {}", c.amplitude_err);
        let _ = writeln!(s, "{label}.n_compared = {}", c.n_compared);
    }
    Ok(s)
}

fn derived_section(
    scenario: &Scenario,
    scales: &DerivedScales,
    coeffs: &KdvCoefficients,
) -> String {
    let mut s = String::new();
    let diag = diagnose(scenario, scales, None).ok();
    let mut kv = |k: &str, v: f64| {
        let _ = writeln!(s, "derived.{k} = {v}");
    };
    kv("volume_m3", scenario.volume);
    kv("tau", scenario.tilt_tau);
    kv("mean_depth_m", scales.mean_depth);
    kv("lambda_m", scales.lambda);
    kv("long_wave_speed_m_s", scales.long_wave_speed);
    kv("sigma", scales.sigma);
    kv("epsilon", scales.epsilon);
    kv("solid_body_speed_m_s", scales.solid_body_speed);
    kv("a_over_c", coeffs.a_disp / coeffs.c_time);
    kv("b_over_c", coeffs.b_nonlin / coeffs.c_time);
    if let Some(d) = diag {
        kv("reynolds", d.reynolds);
        kv("froude", d.froude);
        kv("ekman", d.ekman);
        kv("rossby_reported_variant", d.rossby_reported_variant);
    }
    s
}

fn manifest_text(inputs: &SolverInputs, blow_up_step: Option<u64>, extra: &str) -> String {
    let p = &inputs.params;
    let c = &p.coeffs;
    let d_theta = inputs.length / inputs.n_points as f64;
    let mut s = String::from("# kelvin-kdv run manifest\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("manifest_version", MANIFEST_VERSION.to_string());
    kv(
        "status",
        if blow_up_step.is_some() {
            "blow_up"
        } else {
            "ok"
        }
        .into(),
    );
    if let Some(step) = blow_up_step {
        kv("blow_up_step", step.to_string());
    }
    kv("grid.n_points", inputs.n_points.to_string());
    kv("grid.origin_rad", inputs.origin.to_string());
    kv("grid.length_rad", inputs.length.to_string());
    kv("grid.d_theta_rad", d_theta.to_string());
    kv("coeff.a_disp", c.a_disp.to_string());
    kv("coeff.b_nonlin", c.b_nonlin.to_string());
    kv("coeff.c_time", c.c_time.to_string());
    kv("coeff.d_forcing_amp", c.d_forcing_amp.to_string());
    kv("coeff.omega_rad_s", c.omega.to_string());
    kv("coeff.r_eval_m", c.r_eval.to_string());
    kv("step.dt_s", p.dt.to_string());
    kv("step.courant", p.courant.to_string());
    kv("step.weight_nonlinear", p.weight_nonlinear.to_string());
    kv("step.weight_dispersive", p.weight_dispersive.to_string());
    kv("step.forcing_mode", p.forcing_mode.as_str().into());
    kv("ic.amplitude_m", inputs.ic_amplitude.to_string());
    kv("ic.avg_rad", inputs.ic_avg.to_string());
    kv("ic.st_rad", inputs.ic_st.to_string());
    kv("run.n_steps", inputs.n_steps.to_string());
    kv("run.stride", inputs.stride.to_string());
    s.push_str(extra);
    s
}

fn parse_manifest(text: &str) -> Result<SolverInputs, IoError> {
    let kv = KeyValues::parse(text)?;
    const SOLVER_KEYS: [&str; 20] = [
        "grid.n_points",
        "grid.origin_rad",
        "grid.length_rad",
        "coeff.a_disp",
        "coeff.b_nonlin",
        "coeff.c_time",
        "coeff.d_forcing_amp",
        "coeff.omega_rad_s",
        "coeff.r_eval_m",
        "step.dt_s",
        "step.courant",
        "step.weight_nonlinear",
        "step.weight_dispersive",
        "step.forcing_mode",
        "ic.amplitude_m",
        "ic.avg_rad",
        "ic.st_rad",
        "run.n_steps",
        "run.stride",
        "manifest_version",
    ];
    kv.reject_unknown(|k| {
        SOLVER_KEYS.contains(&k)
            || k.starts_with("derived.")
            || matches!(k, "status" | "blow_up_step" | "grid.d_theta_rad")
    })?;
    kv.require_all(&SOLVER_KEYS)?;
    let version = kv.u64("manifest_version")?;
    if version != MANIFEST_VERSION {
        return Err(IoError::BadValue {
            key: "manifest_version".into(),
            value: version.to_string(),
        });
    }
    let mode_str = kv.get("step.forcing_mode").unwrap_or_default();
    let forcing_mode = ForcingMode::parse(mode_str).ok_or_else(|| IoError::BadValue {
        key: "step.forcing_mode".into(),
        value: mode_str.into(),
    })?;
    let coeffs = KdvCoefficients {
        a_disp: kv.f64("coeff.a_disp")?,
        b_nonlin: kv.f64("coeff.b_nonlin")?,
        c_time: kv.f64("coeff.c_time")?,
        d_forcing_amp: kv.f64("coeff.d_forcing_amp")?,
        omega: kv.f64("coeff.omega_rad_s")?,
        r_eval: kv.f64("coeff.r_eval_m")?,
    };
    let params = StepParams::new(
        coeffs,
        kv.f64("step.dt_s")?,
        kv.f64("step.weight_nonlinear")?,
        kv.f64("step.weight_dispersive")?,
        forcing_mode,
        kv.f64("step.courant")?,
    )
    .map_err(|e| IoError::BadValue {
        key: "step".into(),
        value: e.to_string(),
    })?;
    Ok(SolverInputs {
        n_points: kv.u64("grid.n_points")? as usize,
        origin: kv.f64("grid.origin_rad")?,
        length: kv.f64("grid.length_rad")?,
        params,
        ic_amplitude: kv.f64("ic.amplitude_m")?,
        ic_avg: kv.f64("ic.avg_rad")?,
        ic_st: kv.f64("ic.st_rad")?,
        n_steps: kv.u64("run.n_steps")?,
        stride: kv.u64("run.stride")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> RunConfig {
        let mut c = RunConfig::new(ScenarioSource::Lab(LabCase::V12000), dir).stabilized();
        c.n_steps = 40;
        c.stride = 10;
        c
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&small_config(dir.path())).unwrap();
        let text = std::fs::read_to_string(&summary.manifest).unwrap();
        let inputs = parse_manifest(&text).unwrap();
        assert_eq!(inputs.params, summary.params);
        assert_eq!(inputs.n_points, STABILIZED_POINTS);
        assert!(text.contains("derived.sigma = "));
    }

    #[test]
    fn manifest_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&small_config(dir.path())).unwrap();
        let text = std::fs::read_to_string(&summary.manifest).unwrap() + "mystery = 1\n";
        assert!(matches!(
            parse_manifest(&text),
            Err(IoError::UnknownKeys(_))
        ));
    }

    #[test]
    fn missing_amplitude_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut sc = Scenario::laboratory_case(LabCase::V10000);
        sc.measured_amplitude = None;
        let c = RunConfig::new(ScenarioSource::Inline(sc), dir.path());
        let err = run(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().starts_with("initial condition"));
    }

    #[test]
    fn implied_courant_above_one_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.dt = Some(0.02);
        let err = run(&c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn faithful_weights_blow_up_with_exit_three() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new(ScenarioSource::Lab(LabCase::V10000), dir.path());
        c.n_steps = 100_000;
        match run(&c) {
            Err(e @ RunError::BlowUp { .. }) => {
                assert_eq!(e.exit_code(), 3);
                assert!(dir.path().join("last_good.csv").exists());
                let m = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
                assert!(m.contains("status = blow_up"));
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn measured_profile_initial_condition() {
        let dir = tempfile::tempdir().unwrap();
        let prof = dir.path().join("clip.txt");
        let mut text = String::from("# s_mm eta_mm\n");
        for i in -40..=40 {
            let s = i as f64 * 2.0;
            let theta = s * 1e-3 / 0.223;
            let _ = writeln!(text, "{s} {}", 88.6 * (-(theta / 0.25f64).powi(2)).exp());
        }
        std::fs::write(&prof, text).unwrap();
        let mut c = small_config(&dir.path().join("out"));
        c.initial = InitialCondition::Measured {
            path: prof,
            units: ProfileUnits::MmArcMm,
        };
        let s = run(&c).unwrap();
        assert!((s.initial.max_abs() - 0.0886).abs() < 1e-3);
        let cmp = std::fs::read_to_string(dir.path().join("out/comparison.txt")).unwrap();
        assert!(cmp.contains("initial.linf_m"));
    }
}
