use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kelvin_kdv::analytic::{
    fit_radial_decay, radial_decay_profile, radial_wavenumber, rossby_radius, RadialDecayFit,
    Sech2Wave,
};
use kelvin_kdv::cli_io::output::{
    coefficients_text, columns_csv, diagnostics_csv_row, diagnostics_text, DIAGNOSTICS_CSV_HEADER,
};
use kelvin_kdv::cli_io::profile::parse_two_columns;
use kelvin_kdv::cli_io::run::{
    STABILIZED_DT, STABILIZED_POINTS, STABILIZED_WEIGHT_DISPERSIVE, STABILIZED_WEIGHT_NONLINEAR,
};
use kelvin_kdv::cli_io::{
    compare_profiles, emit_plot_script, load_measured_profile, read_trajectory, replay_manifest,
    run, sweep, InitialCondition, IoError, MeasuredProfile, PlotKind, ProfileUnits, RunConfig,
    RunError, ScenarioSource,
};
use kelvin_kdv::coefficients::compute_coefficients_at;
use kelvin_kdv::diagnostics::diagnose;
use kelvin_kdv::{derive_scales, dispersion_relation, ForcingMode, LabCase, Scenario};

#[derive(Parser)]
#[command(
    name = "kelvin-kdv",
    version,
    about = "Forced KdV model of a Kelvin solitary wave in a precessing annulus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write trajectory, reports and manifest.
    Simulate(SimulateArgs),
    /// Rerun a previous simulation from its manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print KdV coefficients and the sampled dispersion curve.
    Coeffs(CoeffsArgs),
    /// Sample the sech² profile or the radial decay curve.
    Analytic(AnalyticArgs),
    /// Flow-regime report for one or more scenarios.
    Diagnose(DiagnoseArgs),
    /// Compare a trajectory snapshot against a measured profile.
    Compare(CompareArgs),
    /// Run several scenarios in parallel, one output directory each.
    Sweep(SweepArgs),
    /// Write a matplotlib script for a CSV produced by this tool.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario file (key = value).
    #[arg(long, conflicts_with = "case")]
    scenario: Option<PathBuf>,
    /// Laboratory preset by fill volume in ml: 10000, 12000 or 14000.
    #[arg(long)]
    case: Option<u32>,
}

impl ScenarioArgs {
    fn source(&self) -> Result<ScenarioSource> {
        match (&self.scenario, self.case) {
            (Some(p), _) => Ok(ScenarioSource::File(p.clone())),
            (None, Some(ml)) => lab_case(ml).map(ScenarioSource::Lab),
            (None, None) => bail!(Validation("one of --scenario or --case is required".into())),
        }
    }

    fn load(&self) -> Result<Scenario> {
        Ok(self.source()?.load()?)
    }
}

fn lab_case(ml: u32) -> Result<LabCase> {
    LabCase::from_millilitres(ml)
        .ok_or_else(|| anyhow!(Validation(format!("unknown laboratory case {ml} ml"))))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Forcing {
    Full,
    Approx,
    Off,
}

impl From<Forcing> for ForcingMode {
    fn from(f: Forcing) -> Self {
        match f {
            Forcing::Full => ForcingMode::FullSin,
            Forcing::Approx => ForcingMode::EtaThetaApprox,
            Forcing::Off => ForcingMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Units {
    #[value(name = "rad_m")]
    RadM,
    #[value(name = "mm_arc_mm")]
    MmArcMm,
}

impl From<Units> for ProfileUnits {
    fn from(u: Units) -> Self {
        match u {
            Units::RadM => ProfileUnits::RadM,
            Units::MmArcMm => ProfileUnits::MmArcMm,
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Number of ring nodes.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Courant number C_r in (0, 1].
    #[arg(long, default_value_t = 0.01)]
    courant: f64,
    /// Explicit time step (s); overrides --courant.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// Emit a snapshot every this many steps.
    #[arg(long, default_value_t = 100)]
    stride: u64,
    /// Weights 0.01 / 0.001 with 70 nodes and Δt = 1.76 ms unless overridden.
    #[arg(long = "paper-stabilized", visible_alias = "stabilized")]
    stabilized: bool,
    #[arg(long)]
    weight_nonlinear: Option<f64>,
    #[arg(long)]
    weight_dispersive: Option<f64>,
    #[arg(long, value_enum, default_value_t = Forcing::Full)]
    forcing: Forcing,
    /// Gaussian IC amplitude (m); defaults to the scenario amplitude.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Gaussian IC centre (rad).
    #[arg(long, default_value_t = 0.0)]
    avg: f64,
    /// Gaussian IC width (rad).
    #[arg(long, default_value_t = kelvin_kdv::cli_io::run::DEFAULT_IC_WIDTH)]
    st: f64,
    /// Seed the Gaussian IC from a measured profile instead.
    #[arg(long, conflicts_with_all = ["amplitude"])]
    profile: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Units::MmArcMm)]
    units: Units,
    /// Radius (m) for the r-dependent coefficient factors.
    #[arg(long)]
    r_eval: Option<f64>,
    /// Simulate a periodic sub-arc `origin,length` (rad) instead of the ring.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    arc: Option<Vec<f64>>,
}

impl SolverArgs {
    fn config(&self, scenario: ScenarioSource, out: PathBuf) -> RunConfig {
        let mut c = RunConfig::new(scenario, out);
        c.courant = self.courant;
        if self.stabilized {
            c.weight_nonlinear = STABILIZED_WEIGHT_NONLINEAR;
            c.weight_dispersive = STABILIZED_WEIGHT_DISPERSIVE;
            c.grid_points = STABILIZED_POINTS;
            if self.dt.is_none() {
                c.dt = Some(STABILIZED_DT);
            }
        }
        if let Some(n) = self.grid_points {
            c.grid_points = n;
        }
        if self.dt.is_some() {
            c.dt = self.dt;
        }
        if let Some(w) = self.weight_nonlinear {
            c.weight_nonlinear = w;
        }
        if let Some(w) = self.weight_dispersive {
            c.weight_dispersive = w;
        }
        c.forcing_mode = self.forcing.into();
        c.n_steps = self.steps;
        c.stride = self.stride;
        c.r_eval = self.r_eval;
        c.arc = self.arc.as_ref().map(|v| (v[0], v[1]));
        c.initial = match &self.profile {
            Some(path) => InitialCondition::Measured {
                path: path.clone(),
                units: self.units.into(),
            },
            None => InitialCondition::Gaussian {
                amplitude: self.amplitude,
                avg: self.avg,
                st: self.st,
            },
        };
        c
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Divisor {
    /// Time coefficient C (matches the solver's linear phase speed).
    Time,
    /// Long-wave speed √(g h̄).
    WaveSpeed,
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 0.0)]
    k_min: f64,
    #[arg(long, default_value_t = 10.0)]
    k_max: f64,
    #[arg(long, default_value_t = 11)]
    k_count: usize,
    #[arg(long, value_enum, default_value_t = Divisor::Time)]
    divisor: Divisor,
    #[arg(long)]
    r_eval: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnalyticKind {
    Sech2,
    Radial,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    kind: AnalyticKind,
    /// Number of samples.
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Evaluation time for the sech² profile (s).
    #[arg(long, default_value_t = 0.0)]
    time: f64,
    /// Amplitude A_m (m); defaults to the scenario amplitude.
    #[arg(long)]
    amplitude: Option<f64>,
    /// Radial samples `r_m eta_m` to fit (A_m, B) against.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Scenario files.
    #[arg(long = "scenario")]
    scenarios: Vec<PathBuf>,
    /// Laboratory presets (ml); all three when neither option is given.
    #[arg(long = "case")]
    cases: Vec<u32>,
    /// Measured crest speed (m/s); applies to every scenario listed.
    #[arg(long)]
    c_exp: Option<f64>,
    /// One CSV row per scenario instead of the key-value report.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long)]
    trajectory: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, value_enum, default_value_t = Units::MmArcMm)]
    units: Units,
    /// Snapshot step to compare; the last one when absent.
    #[arg(long)]
    step: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "scenario")]
    scenarios: Vec<PathBuf>,
    /// Laboratory presets (ml); all three when neither option is given.
    #[arg(long = "case")]
    cases: Vec<u32>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Base directory; each run writes to its own subdirectory.
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Plot {
    Snapshot,
    Waterfall,
    Radial,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, value_enum)]
    kind: Plot,
    /// Steps to draw for snapshot plots, comma separated.
    #[arg(long, value_delimiter = ',')]
    steps: Vec<u64>,
    /// Script path; next to the CSV when absent.
    #[arg(long)]
    script: Option<PathBuf>,
}

/// Bad user input that did not come from the library.
#[derive(Debug)]
struct Validation(String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(r) = e.downcast_ref::<RunError>() {
        return r.exit_code() as u8;
    }
    if let Some(io) = e.downcast_ref::<IoError>() {
        return if io.is_validation() { 2 } else { 1 };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 1;
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => {
            let config = a.solver.config(a.scenario.source()?, a.out);
            let s = run(&config)?;
            println!(
                "{} steps to t = {} s in {} (dt = {} s, courant = {})",
                s.final_state.step_index,
                s.final_state.time,
                s.trajectory.display(),
                s.params.dt,
                s.params.courant
            );
            Ok(())
        }
        Command::Replay { manifest, out } => {
            let s = replay_manifest(&manifest, &out)?;
            println!("replayed into {}", s.trajectory.display());
            Ok(())
        }
        Command::Coeffs(a) => coeffs(a),
        Command::Analytic(a) => analytic(a),
        Command::Diagnose(a) => diagnose_cmd(a),
        Command::Compare(a) => compare(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Plot(a) => {
            let kind = match a.kind {
                Plot::Snapshot => PlotKind::Snapshot { steps: a.steps },
                Plot::Waterfall => PlotKind::Waterfall,
                Plot::Radial => PlotKind::Radial,
            };
            let path = emit_plot_script(&a.csv, &kind, a.script.as_deref())?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn coeffs(a: CoeffsArgs) -> Result<()> {
    if a.k_count < 2 || a.k_max.partial_cmp(&a.k_min) != Some(std::cmp::Ordering::Greater) {
        bail!(Validation(
            "k range needs k_max > k_min and at least 2 samples".into()
        ));
    }
    let sc = a.scenario.load()?;
    let scales = derive_scales(&sc).map_err(IoError::from)?;
    let c = compute_coefficients_at(&sc, &scales, a.r_eval.unwrap_or(sc.geometry.r_max))
        .map_err(|e| Validation(e.to_string()))?;
    let divisor = match a.divisor {
        Divisor::Time => c.c_time,
        Divisor::WaveSpeed => scales.long_wave_speed,
    };
    let mut out = std::io::stdout().lock();
    for line in coefficients_text(&c).lines() {
        writeln!(out, "# {line}")?;
    }
    let rows = (0..a.k_count).map(|i| {
        let k = a.k_min + (a.k_max - a.k_min) * i as f64 / (a.k_count - 1) as f64;
        vec![k, dispersion_relation(k, &c, divisor)]
    });
    out.write_all(columns_csv("k,omega", rows).as_bytes())?;
    Ok(())
}

fn analytic(a: AnalyticArgs) -> Result<()> {
    if a.points < 2 {
        bail!(Validation("need at least 2 points".into()));
    }
    let sc = a.scenario.load()?;
    let scales = derive_scales(&sc).map_err(IoError::from)?;
    let amplitude = a
        .amplitude
        .or(sc.measured_amplitude)
        .ok_or_else(|| Validation("no amplitude given and the scenario has none".into()))?;
    let geo = sc.geometry;
    let csv = match a.kind {
        AnalyticKind::Sech2 => {
            let c = compute_coefficients_at(&sc, &scales, geo.r_max)
                .map_err(|e| Validation(e.to_string()))?;
            let wave = Sech2Wave::new(amplitude, &c, scales.solid_body_speed, geo.r_max)
                .map_err(|e| Validation(e.to_string()))?;
            let rows = (0..a.points).map(|i| {
                let theta =
                    -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / a.points as f64;
                vec![theta, wave.eval(theta, a.time)]
            });
            columns_csv("theta_rad,eta_m", rows)
        }
        AnalyticKind::Radial => {
            let m = radial_wavenumber(geo.beta).map_err(|e| Validation(e.to_string()))?;
            let beta1 = rossby_radius(scales.mean_depth, sc.fluid.g, sc.omega)
                .map_err(|e| Validation(e.to_string()))?;
            let radius =
                |i: usize| geo.r_min + (geo.r_max - geo.r_min) * i as f64 / (a.points - 1) as f64;
            match &a.samples {
                None => {
                    let fit = RadialDecayFit {
                        amplitude,
                        wavenumber_m: m,
                        rossby_radius_beta1: beta1,
                        offset_b: 0.0,
                    };
                    columns_csv(
                        "r_m,eta_m",
                        (0..a.points)
                            .map(|i| vec![radius(i), radial_decay_profile(radius(i), &fit)]),
                    )
                }
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| path.display().to_string())?;
                    let samples = parse_two_columns(&text)?;
                    let (fit, rms) = fit_radial_decay(&samples, m, beta1)
                        .map_err(|e| Validation(e.to_string()))?;
                    eprintln!(
                        "A_m = {} m, B = {} m, rms = {} m",
                        fit.amplitude, fit.offset_b, rms
                    );
                    columns_csv(
                        "r_m,eta_m,fit_m",
                        samples
                            .iter()
                            .map(|&(r, y)| vec![r, y, radial_decay_profile(r, &fit)]),
                    )
                }
            }
        }
    };
    write_output(a.out.as_deref(), &csv)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| anyhow!(e).context(p.display().to_string())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn sources(scenarios: &[PathBuf], cases: &[u32]) -> Result<Vec<(String, ScenarioSource)>> {
    let mut out: Vec<(String, ScenarioSource)> = scenarios
        .iter()
        .map(|p| {
            let label = p
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("scenario")
                .to_string();
            (label, ScenarioSource::File(p.clone()))
        })
        .collect();
    for &ml in cases {
        out.push((format!("{ml}ml"), ScenarioSource::Lab(lab_case(ml)?)));
    }
    if out.is_empty() {
        out = LabCase::ALL
            .into_iter()
            .map(|c| (format!("{}ml", c.millilitres()), ScenarioSource::Lab(c)))
            .collect();
    }
    Ok(out)
}

fn diagnose_cmd(a: DiagnoseArgs) -> Result<()> {
    let mut out = std::io::stdout().lock();
    if a.csv {
        writeln!(out, "{DIAGNOSTICS_CSV_HEADER}")?;
    }
    for (i, (label, src)) in sources(&a.scenarios, &a.cases)?.into_iter().enumerate() {
        let sc = src.load()?;
        let scales = derive_scales(&sc).map_err(IoError::from)?;
        let d = diagnose(&sc, &scales, a.c_exp).map_err(|e| Validation(e.to_string()))?;
        if a.csv {
            writeln!(out, "{}", diagnostics_csv_row(&label, &sc, &scales, &d))?;
        } else {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "# {label}")?;
            out.write_all(diagnostics_text(&sc, &scales, &d).as_bytes())?;
        }
    }
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let sc = a.scenario.load()?;
    let snapshots = read_trajectory(&a.trajectory)?;
    let state = match a.step {
        None => snapshots.last(),
        Some(step) => snapshots.iter().find(|s| s.step_index == step),
    }
    .ok_or_else(|| {
        Validation(format!(
            "no matching snapshot in {}",
            a.trajectory.display()
        ))
    })?;
    let profile: MeasuredProfile =
        load_measured_profile(&a.profile, a.units.into(), sc.geometry.r_max)?;
    let c = compare_profiles(state, &profile)?;
    println!("step = {}", state.step_index);
    println!("time_s = {}", state.time);
    println!("l2_m = {}", c.l2);
    println!("linf_m = {}", c.linf);
    println!("amplitude_err = {}", c.amplitude_err);
    println!("n_compared = {}", c.n_compared);
    Ok(())
}

fn sweep_cmd(a: SweepArgs) -> Result<()> {
    let labelled = sources(&a.scenarios, &a.cases)?;
    let configs: Vec<RunConfig> = labelled
        .iter()
        .map(|(label, src)| a.solver.config(src.clone(), a.out.join(label)))
        .collect();
    let results = sweep(&configs);
    let mut worst = None;
    for ((label, _), r) in labelled.iter().zip(results) {
        match r {
            Ok(s) => println!("{label}: ok ({})", s.trajectory.display()),
            Err(e) => {
                println!("{label}: {e}");
                let code = e.exit_code();
                if worst
                    .as_ref()
                    .is_none_or(|w: &RunError| code > w.exit_code())
                {
                    worst = Some(e);
                }
            }
        }
    }
    match worst {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
