//! Trajectory CSV, text reports and generated plot scripts.
//!
//! Every writer here is deterministic: no timestamps, and floats are printed
//! with Rust's shortest round-trip formatting so values parse back exactly.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::IoError;
use crate::coefficients::KdvCoefficients;
use crate::diagnostics::DiagnosticsReport;
use crate::scenario::{DerivedScales, Scenario};
use crate::solver::{RingGrid, SnapshotSink, WaveState};

pub const TRAJECTORY_HEADER: &str = "step,time_s,theta_rad,eta_m";
pub const RADIAL_HEADER: &str = "r_m,eta_m";
pub const PROFILE_HEADER: &str = "theta_rad,eta_m";

/// Streams snapshots as `step,time_s,theta_rad,eta_m` rows.
pub struct CsvTrajectoryWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvTrajectoryWriter<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        Ok(Self { out })
    }

    pub fn into_inner(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> SnapshotSink for CsvTrajectoryWriter<W> {
    fn record(&mut self, state: &WaveState) -> std::io::Result<()> {
        for (theta, eta) in state.grid.theta.iter().zip(&state.eta) {
            writeln!(
                self.out,
                "{},{},{},{}",
                state.step_index, state.time, theta, eta
            )?;
        }
        Ok(())
    }
}

/// Read every snapshot of a trajectory CSV. The grid is rebuilt from the
/// node positions of the first snapshot.
pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<WaveState>, IoError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| IoError::io(path, e))?
        .unwrap_or_default();
    if header.trim() != TRAJECTORY_HEADER {
        return Err(IoError::Csv(format!(
            "expected header `{TRAJECTORY_HEADER}`, got `{header}`"
        )));
    }

    let mut rows: Vec<(u64, f64, f64, f64)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || IoError::Csv(format!("line {}: malformed row `{line}`", i + 2));
        if f.len() != 4 {
            return Err(bad());
        }
        let step = f[0].trim().parse::<u64>().map_err(|_| bad())?;
        let mut nums = [0.0; 3];
        for (slot, s) in nums.iter_mut().zip(&f[1..]) {
            *slot = s.trim().parse::<f64>().map_err(|_| bad())?;
        }
        rows.push((step, nums[0], nums[1], nums[2]));
    }
    if rows.is_empty() {
        return Err(IoError::Csv("trajectory has no rows".into()));
    }

    let first_step = rows[0].0;
    let n = rows.iter().take_while(|r| r.0 == first_step).count();
    if n < 2 || !rows.len().is_multiple_of(n) {
        return Err(IoError::Csv("snapshots have inconsistent sizes".into()));
    }
    let theta0 = rows[0].2;
    let span = rows[n - 1].2 - theta0;
    let grid = Arc::new(
        RingGrid::periodic(n, theta0, span * n as f64 / (n - 1) as f64)
            .map_err(|e| IoError::Csv(e.to_string()))?,
    );
    rows.chunks(n)
        .map(|chunk| {
            if chunk.iter().any(|r| r.0 != chunk[0].0) {
                return Err(IoError::Csv("snapshot rows interleaved".into()));
            }
            Ok(WaveState {
                grid: Arc::clone(&grid),
                eta: chunk.iter().map(|r| r.3).collect(),
                time: chunk[0].1,
                step_index: chunk[0].0,
            })
        })
        .collect()
}

/// `theta_rad,eta_m` or `r_m,eta_m[,fit_m]` style two/three column CSV.
pub fn columns_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn coefficients_text(c: &KdvCoefficients) -> String {
    let mut s = String::new();
    for (k, v) in [
        ("a_disp", c.a_disp),
        ("b_nonlin", c.b_nonlin),
        ("c_time", c.c_time),
        ("d_forcing_amp", c.d_forcing_amp),
        ("omega_rad_s", c.omega),
        ("r_eval_m", c.r_eval),
        ("a_over_c", c.a_disp / c.c_time),
        ("b_over_c", c.b_nonlin / c.c_time),
        ("d_over_c", c.d_forcing_amp / c.c_time),
    ] {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

/// Key–value diagnostics report in a fixed order.
pub fn diagnostics_text(
    scenario: &Scenario,
    scales: &DerivedScales,
    d: &DiagnosticsReport,
) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("volume_m3", scenario.volume.to_string());
    kv("tau", scenario.tilt_tau.to_string());
    kv("omega_rad_s", scenario.omega.to_string());
    kv("mean_depth_m", scales.mean_depth.to_string());
    kv("sigma", scales.sigma.to_string());
    kv("epsilon", scales.epsilon.to_string());
    kv("hydraulic_radius_m", d.hydraulic_radius.to_string());
    kv("wetted_perimeter_m", d.wetted_perimeter.to_string());
    kv("reynolds", d.reynolds.to_string());
    kv("regime", d.regime.as_str().into());
    kv("rossby_printed", d.rossby_printed.to_string());
    kv(
        "rossby_reported_variant",
        d.rossby_reported_variant.to_string(),
    );
    kv("ekman", d.ekman.to_string());
    kv("froude", d.froude.to_string());
    kv("critical", d.critical.as_str().into());
    kv("breaking", d.breaking.to_string());
    kv("c_theoretical_m_s", opt(d.theoretical_speed));
    kv("c_experimental_m_s", opt(d.speed.map(|x| x.experimental)));
    kv(
        "speed_err_vs_experimental",
        opt(d.speed.map(|x| x.rel_err_vs_experimental)),
    );
    kv(
        "speed_err_vs_theoretical",
        opt(d.speed.map(|x| x.rel_err_vs_theoretical)),
    );
    s
}

pub const DIAGNOSTICS_CSV_HEADER: &str = "label,volume_m3,tau,omega_rad_s,mean_depth_m,sigma,epsilon,\
hydraulic_radius_m,reynolds,regime,rossby_printed,rossby_reported_variant,ekman,froude,critical,breaking,\
c_theoretical_m_s,c_experimental_m_s,speed_err_vs_experimental,speed_err_vs_theoretical";

pub fn diagnostics_csv_row(
    label: &str,
    scenario: &Scenario,
    scales: &DerivedScales,
    d: &DiagnosticsReport,
) -> String {
    [
        label.to_string(),
        scenario.volume.to_string(),
        scenario.tilt_tau.to_string(),
        scenario.omega.to_string(),
        scales.mean_depth.to_string(),
        scales.sigma.to_string(),
        scales.epsilon.to_string(),
        d.hydraulic_radius.to_string(),
        d.reynolds.to_string(),
        d.regime.as_str().into(),
        d.rossby_printed.to_string(),
        d.rossby_reported_variant.to_string(),
        d.ekman.to_string(),
        d.froude.to_string(),
        d.critical.as_str().into(),
        d.breaking.to_string(),
        opt(d.theoretical_speed),
        opt(d.speed.map(|x| x.experimental)),
        opt(d.speed.map(|x| x.rel_err_vs_experimental)),
        opt(d.speed.map(|x| x.rel_err_vs_theoretical)),
    ]
    .join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "na".into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotKind {
    /// One curve per listed step; all snapshots when empty.
    Snapshot { steps: Vec<u64> },
    /// Time-offset stacked curves.
    Waterfall,
    /// Radial amplitude samples with an optional fit overlay.
    Radial,
}

impl PlotKind {
    fn name(&self) -> &'static str {
        match self {
            PlotKind::Snapshot { .. } => "snapshot",
            PlotKind::Waterfall => "waterfall",
            PlotKind::Radial => "radial",
        }
    }
}

/// Write a standalone matplotlib script that renders `csv_path`. The script
/// is placed next to the CSV unless `script_path` is given and refers to the
/// CSV relative to its own directory.
pub fn emit_plot_script(
    csv_path: &Path,
    kind: &PlotKind,
    script_path: Option<&Path>,
) -> Result<PathBuf, IoError> {
    let file = std::fs::File::open(csv_path).map_err(|e| IoError::io(csv_path, e))?;
    let mut header = String::new();
    BufReader::new(file)
        .read_line(&mut header)
        .map_err(|e| IoError::io(csv_path, e))?;
    let header = header.trim();
    let ok = match kind {
        PlotKind::Snapshot { .. } | PlotKind::Waterfall => header == TRAJECTORY_HEADER,
        PlotKind::Radial => header == RADIAL_HEADER || header == format!("{RADIAL_HEADER},fit_m"),
    };
    if !ok {
        return Err(IoError::Csv(format!(
            "`{}` has header `{header}`, not usable for a {} plot",
            csv_path.display(),
            kind.name()
        )));
    }

    let stem = csv_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory");
    let script_path = script_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| csv_path.with_file_name(format!("plot_{stem}_{}.py", kind.name())));
    let script_dir = script_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let rel = relative_path(csv_path, &script_dir);
    let png = format!("{stem}_{}.png", kind.name());
    let body = plot_script_text(&rel, &png, kind);
    std::fs::write(&script_path, body).map_err(|e| IoError::io(&script_path, e))?;
    Ok(script_path)
}

fn relative_path(target: &Path, from_dir: &Path) -> String {
    let abs = |p: &Path| std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let target = abs(target);
    let from = abs(if from_dir.as_os_str().is_empty() {
        Path::new(".")
    } else {
        from_dir
    });
    let t: Vec<_> = target.components().collect();
    let f: Vec<_> = from.components().collect();
    let common = t.iter().zip(&f).take_while(|(a, b)| a == b).count();
    let mut parts: Vec<String> = std::iter::repeat_n("..".to_string(), f.len() - common).collect();
    parts.extend(
        t[common..]
            .iter()
            .map(|c| c.as_os_str().to_string_lossy().into_owned()),
    );
    parts.join("/")
}

fn plot_script_text(csv_rel: &str, png: &str, kind: &PlotKind) -> String {
    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    s.push_str("# Generated by kelvin-kdv. Renders the CSV next to this script.\n");
    s.push_str("import csv\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("HERE = os.path.dirname(os.path.abspath(__file__))\n");
    let _ = writeln!(s, "CSV = os.path.join(HERE, {csv_rel:?})");
    let _ = writeln!(s, "PNG = os.path.join(HERE, {png:?})\n");
    const READ_SNAPSHOTS: &str = "snaps = {}\nwith open(CSV) as f:\n    for row in csv.DictReader(f):\n        \
step = int(row[\"step\"])\n        snap = snaps.setdefault(step, {\"t\": float(row[\"time_s\"]), \"theta\": [], \"eta\": []})\n        \
snap[\"theta\"].append(float(row[\"theta_rad\"]))\n        snap[\"eta\"].append(float(row[\"eta_m\"]))\n\n";
    match kind {
        PlotKind::Snapshot { steps } => {
            s.push_str(READ_SNAPSHOTS);
            let list: Vec<String> = steps.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "REQUESTED = [{}]", list.join(", "));
            s.push_str(
                "chosen = [k for k in REQUESTED if k in snaps] if REQUESTED else sorted(snaps)\n\n\
fig, ax = plt.subplots(figsize=(8, 4))\nfor k in chosen:\n    \
ax.plot(snaps[k][\"theta\"], snaps[k][\"eta\"], label=\"step %d, t=%.4g s\" % (k, snaps[k][\"t\"]))\n\
ax.set_xlabel(\"theta [rad]\")\nax.set_ylabel(\"eta [m]\")\nax.legend(fontsize=\"small\")\n",
            );
        }
        PlotKind::Waterfall => {
            s.push_str(READ_SNAPSHOTS);
            s.push_str(
                "keys = sorted(snaps)\npeak = max(max(abs(v) for v in snaps[k][\"eta\"]) for k in keys) or 1.0\n\
offset = 0.5 * peak\n\nfig, ax = plt.subplots(figsize=(8, 6))\nfor j, k in enumerate(keys):\n    \
ax.plot(snaps[k][\"theta\"], [v + j * offset for v in snaps[k][\"eta\"]], color=\"k\", lw=0.8)\n    \
ax.text(snaps[k][\"theta\"][-1], j * offset, \" t=%.3g s\" % snaps[k][\"t\"], fontsize=\"x-small\", va=\"center\")\n\
ax.set_xlabel(\"theta [rad]\")\nax.set_ylabel(\"eta + offset [m]\")\n",
            );
        }
        PlotKind::Radial => {
            s.push_str(
                "r, eta, fit = [], [], []\nwith open(CSV) as f:\n    for row in csv.DictReader(f):\n        \
r.append(float(row[\"r_m\"]))\n        eta.append(float(row[\"eta_m\"]))\n        \
if row.get(\"fit_m\"):\n            fit.append(float(row[\"fit_m\"]))\n\n\
fig, ax = plt.subplots(figsize=(6, 4))\nax.plot(r, eta, \"o\", label=\"amplitude\")\nif fit:\n    \
ax.plot(r, fit, \"--\", label=\"exponential fit\")\nax.set_xlabel(\"r [m]\")\nax.set_ylabel(\"A_r [m]\")\nax.legend()\n",
            );
        }
    }
    s.push_str("fig.tight_layout()\nfig.savefig(PNG, dpi=150)\nprint(PNG)\n");
    s
}
