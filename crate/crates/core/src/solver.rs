//! Explicit finite-difference integration of the forced KdV equation on a
//! periodic azimuthal ring.
//!
//! One step advances every node with forward Euler in time, a five-point
//! central stencil for `η_θθθ` and a three-point central stencil for `η_θ`:
//!
//! ```text
//! η_i' = η_i − Δt (A/C) w_d (η_{i+2} − 2η_{i+1} + 2η_{i−1} − η_{i−2}) / (2Δθ³)
//!            − Δt (B/C) w_n η_i (η_{i+1} − η_{i−1}) / (2Δθ)
//!            − Δt F_i / C
//! ```
//!
//! Indices wrap modulo the number of nodes. Both stencils telescope on the
//! ring, so with `F = 0` the discrete sum of `η` is conserved for any A, B.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coefficients::KdvCoefficients;
use crate::scenario::ChannelGeometry;

/// Smallest ring the five-point stencil can address without aliasing.
pub const MIN_POINTS: usize = 5;
/// A run aborts when `max|η|` exceeds this multiple of the initial maximum.
pub const BLOW_UP_FACTOR: f64 = 1e3;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("grid needs at least {MIN_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("gaussian width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("invalid step parameters: {0}")]
    Params(String),
    #[error("state has {got} samples but the grid has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("numerical blow-up at step {step}: {reason}")]
    BlowUp {
        step: u64,
        reason: String,
        /// The last state that passed the checks.
        last_good: Box<WaveState>,
    },
    #[error("snapshot sink failed: {0}")]
    Sink(#[from] std::io::Error),
}

/// Uniform periodic grid of `n_points` nodes starting at `origin` and
/// covering `length` radians.
#[derive(Debug, Clone, PartialEq)]
pub struct RingGrid {
    pub n_points: usize,
    pub d_theta: f64,
    pub origin: f64,
    pub length: f64,
    pub theta: Vec<f64>,
}

impl RingGrid {
    /// Full annulus `[0, 2π)`.
    pub fn full(n_points: usize) -> Result<Self, SolverError> {
        Self::periodic(n_points, 0.0, TAU)
    }

    /// Periodic grid over `[origin, origin + length)`.
    pub fn periodic(n_points: usize, origin: f64, length: f64) -> Result<Self, SolverError> {
        if n_points < MIN_POINTS {
            return Err(SolverError::TooFewPoints(n_points));
        }
        if !(length.is_finite() && length > 0.0 && origin.is_finite()) {
            return Err(SolverError::Grid(format!(
                "origin {origin}, length {length}"
            )));
        }
        let d_theta = length / n_points as f64;
        let theta = (0..n_points).map(|i| origin + i as f64 * d_theta).collect();
        Ok(Self {
            n_points,
            d_theta,
            origin,
            length,
            theta,
        })
    }

    /// Whether the grid spans the whole annulus.
    pub fn is_full_ring(&self) -> bool {
        (self.length - TAU).abs() < 1e-12
    }

    /// Signed displacement folded into `(−L/2, L/2]`.
    pub fn wrap_offset(&self, d: f64) -> f64 {
        let half = 0.5 * self.length;
        let mut w = (d + half).rem_euclid(self.length) - half;
        if w <= -half {
            w += self.length;
        }
        w
    }
}

/// Surface elevation on a ring at one instant.
#[derive(Clone, PartialEq)]
pub struct WaveState {
    pub grid: Arc<RingGrid>,
    /// Elevation η (m) at each node.
    pub eta: Vec<f64>,
    /// Time (s).
    pub time: f64,
    pub step_index: u64,
}

impl fmt::Debug for WaveState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveState")
            .field("n_points", &self.grid.n_points)
            .field("time", &self.time)
            .field("step_index", &self.step_index)
            .field("max_eta", &self.max_abs())
            .finish()
    }
}

impl WaveState {
    pub fn new(grid: Arc<RingGrid>, eta: Vec<f64>, time: f64) -> Result<Self, SolverError> {
        if eta.len() != grid.n_points {
            return Err(SolverError::LengthMismatch {
                expected: grid.n_points,
                got: eta.len(),
            });
        }
        if eta.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Params(
                "initial state contains non-finite values".into(),
            ));
        }
        Ok(Self {
            grid,
            eta,
            time,
            step_index: 0,
        })
    }

    /// Zero-time state sampled from `f(θ)`.
    pub fn from_fn(grid: Arc<RingGrid>, f: impl Fn(f64) -> f64) -> Result<Self, SolverError> {
        let eta = grid.theta.iter().map(|&t| f(t)).collect();
        Self::new(grid, eta, 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.eta.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.eta.iter().sum::<f64>() / self.eta.len() as f64
    }
}

/// How the `D` term is represented in the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForcingMode {
    /// `D₀ sin(θ − Ω t)`.
    #[default]
    FullSin,
    /// Linearised substitution of the forcing by `η_θ`.
    EtaThetaApprox,
    Off,
}

impl ForcingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForcingMode::FullSin => "full",
            ForcingMode::EtaThetaApprox => "approx",
            ForcingMode::Off => "off",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" | "full_sin" => Some(ForcingMode::FullSin),
            "approx" | "eta_theta_approx" => Some(ForcingMode::EtaThetaApprox),
            "off" => Some(ForcingMode::Off),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub coeffs: KdvCoefficients,
    /// Time step (s).
    pub dt: f64,
    pub weight_nonlinear: f64,
    pub weight_dispersive: f64,
    pub forcing_mode: ForcingMode,
    /// Courant number the time step corresponds to.
    pub courant: f64,
}

impl StepParams {
    pub fn new(
        coeffs: KdvCoefficients,
        dt: f64,
        weight_nonlinear: f64,
        weight_dispersive: f64,
        forcing_mode: ForcingMode,
        courant: f64,
    ) -> Result<Self, SolverError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::Params(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(weight_nonlinear >= 0.0 && weight_dispersive >= 0.0) {
            return Err(SolverError::Params("weights must be non-negative".into()));
        }
        if !(courant > 0.0 && courant <= 1.0) {
            return Err(SolverError::Params(format!(
                "courant number must lie in (0, 1], got {courant}"
            )));
        }
        if coeffs.c_time == 0.0 || !coeffs.c_time.is_finite() {
            return Err(SolverError::Params(
                "time coefficient C must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            coeffs,
            dt,
            weight_nonlinear,
            weight_dispersive,
            forcing_mode,
            courant,
        })
    }
}

/// `amplitude · exp(−((θ − avg)/st)²)` with `θ − avg` folded onto the ring.
pub fn gaussian_initial_condition(
    grid: Arc<RingGrid>,
    amplitude: f64,
    avg: f64,
    st: f64,
) -> Result<WaveState, SolverError> {
    if !(st > 0.0 && st.is_finite()) {
        return Err(SolverError::NonPositiveWidth(st));
    }
    let eta = grid
        .theta
        .iter()
        .map(|&t| {
            let x = grid.wrap_offset(t - avg) / st;
            amplitude * (-x * x).exp()
        })
        .collect();
    WaveState::new(grid, eta, 0.0)
}

fn third_derivative_into(eta: &[f64], d_theta: f64, out: &mut [f64]) {
    let n = eta.len();
    let scale = 1.0 / (2.0 * d_theta * d_theta * d_theta);
    for i in 0..n {
        let p1 = eta[(i + 1) % n];
        let p2 = eta[(i + 2) % n];
        let m1 = eta[(i + n - 1) % n];
        let m2 = eta[(i + n - 2) % n];
        out[i] = (p2 - 2.0 * p1 + 2.0 * m1 - m2) * scale;
    }
}

fn first_derivative_into(eta: &[f64], d_theta: f64, out: &mut [f64]) {
    let n = eta.len();
    let scale = 1.0 / (2.0 * d_theta);
    for i in 0..n {
        out[i] = (eta[(i + 1) % n] - eta[(i + n - 1) % n]) * scale;
    }
}

/// Five-point central approximation of `η_θθθ`.
pub fn third_derivative(state: &WaveState) -> Result<Vec<f64>, SolverError> {
    if state.eta.len() < MIN_POINTS {
        return Err(SolverError::TooFewPoints(state.eta.len()));
    }
    let mut out = vec![0.0; state.eta.len()];
    third_derivative_into(&state.eta, state.grid.d_theta, &mut out);
    Ok(out)
}

/// Three-point central approximation of `η_θ`.
pub fn first_derivative(state: &WaveState) -> Vec<f64> {
    let mut out = vec![0.0; state.eta.len()];
    first_derivative_into(&state.eta, state.grid.d_theta, &mut out);
    out
}

/// `D₀ sin(θ_i − Ω t)` on every node.
pub fn forcing_field(grid: &RingGrid, t: f64, coeffs: &KdvCoefficients) -> Vec<f64> {
    grid.theta
        .iter()
        .map(|&th| coeffs.d_forcing_amp * (th - coeffs.omega * t).sin())
        .collect()
}

fn check_courant(courant: f64) -> Result<(), SolverError> {
    if courant > 0.0 && courant <= 1.0 {
        Ok(())
    } else {
        Err(SolverError::Params(format!(
            "courant number must lie in (0, 1], got {courant}"
        )))
    }
}

/// Time step from the Courant rule `Δt = C_r Δθ r_max / (Ω r_max + √(g h̄))`.
pub fn courant_dt(
    courant: f64,
    d_theta: f64,
    geometry: &ChannelGeometry,
    omega: f64,
    depth: f64,
    g: f64,
) -> Result<f64, SolverError> {
    check_courant(courant)?;
    let speed = omega * geometry.r_max + (g * depth).sqrt();
    if !(speed > 0.0) {
        return Err(SolverError::Params(
            "advective plus wave speed must be positive".into(),
        ));
    }
    Ok(courant * d_theta * geometry.r_max / speed)
}

/// Courant number implied by a given time step; inverse of [`courant_dt`].
pub fn implied_courant(
    dt: f64,
    d_theta: f64,
    geometry: &ChannelGeometry,
    omega: f64,
    depth: f64,
    g: f64,
) -> f64 {
    dt * (omega * geometry.r_max + (g * depth).sqrt()) / (geometry.r_max * d_theta)
}

/// Reusable buffers for the update.
struct Workspace {
    third: Vec<f64>,
    first: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            third: vec![0.0; n],
            first: vec![0.0; n],
        }
    }
}

fn advance(
    grid: &RingGrid,
    eta: &[f64],
    t: f64,
    params: &StepParams,
    ws: &mut Workspace,
    out: &mut [f64],
) {
    let c = &params.coeffs;
    let dt = params.dt;
    third_derivative_into(eta, grid.d_theta, &mut ws.third);
    first_derivative_into(eta, grid.d_theta, &mut ws.first);
    let k_disp = dt * (c.a_disp / c.c_time) * params.weight_dispersive;
    let k_nl = dt * (c.b_nonlin / c.c_time) * params.weight_nonlinear;
    let k_force = dt / c.c_time;
    for i in 0..eta.len() {
        let forcing = match params.forcing_mode {
            ForcingMode::FullSin => c.d_forcing_amp * (grid.theta[i] - c.omega * t).sin(),
            ForcingMode::EtaThetaApprox => ws.first[i],
            ForcingMode::Off => 0.0,
        };
        out[i] = eta[i] - k_disp * ws.third[i] - k_nl * eta[i] * ws.first[i] - k_force * forcing;
    }
}

fn validate_state(state: &WaveState) -> Result<(), SolverError> {
    if state.eta.len() != state.grid.n_points {
        return Err(SolverError::LengthMismatch {
            expected: state.grid.n_points,
            got: state.eta.len(),
        });
    }
    if state.eta.len() < MIN_POINTS {
        return Err(SolverError::TooFewPoints(state.eta.len()));
    }
    Ok(())
}

/// One forward-Euler step.
pub fn step(state: &WaveState, params: &StepParams) -> Result<WaveState, SolverError> {
    validate_state(state)?;
    let mut ws = Workspace::new(state.eta.len());
    let mut next = vec![0.0; state.eta.len()];
    advance(
        &state.grid,
        &state.eta,
        state.time,
        params,
        &mut ws,
        &mut next,
    );
    let step_index = state.step_index + 1;
    if let Some(i) = next.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::BlowUp {
            step: step_index,
            reason: format!("non-finite elevation at node {i}"),
            last_good: Box::new(state.clone()),
        });
    }
    Ok(WaveState {
        grid: Arc::clone(&state.grid),
        eta: next,
        time: state.time + params.dt,
        step_index,
    })
}

/// Receives snapshots emitted by [`simulate`]. Append-only.
pub trait SnapshotSink {
    fn record(&mut self, state: &WaveState) -> std::io::Result<()>;
}

impl SnapshotSink for Vec<WaveState> {
    fn record(&mut self, state: &WaveState) -> std::io::Result<()> {
        self.push(state.clone());
        Ok(())
    }
}

/// Discards every snapshot.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl SnapshotSink for NullSink {
    fn record(&mut self, _state: &WaveState) -> std::io::Result<()> {
        Ok(())
    }
}

/// Applies [`step`] `n_steps` times.
///
/// Snapshots go to `sink` at every step index divisible by `stride`
/// (including the initial state) and once more for the final state if it
/// was not already emitted.
pub fn simulate<S: SnapshotSink + ?Sized>(
    ic: &WaveState,
    params: &StepParams,
    n_steps: u64,
    stride: u64,
    sink: &mut S,
) -> Result<WaveState, SolverError> {
    validate_state(ic)?;
    if stride == 0 {
        return Err(SolverError::Params(
            "snapshot stride must be at least 1".into(),
        ));
    }
    let n = ic.eta.len();
    let initial_max = ic.max_abs();
    let limit = if initial_max > 0.0 {
        BLOW_UP_FACTOR * initial_max
    } else {
        f64::INFINITY
    };

    let mut ws = Workspace::new(n);
    let mut current = ic.clone();
    let mut next = vec![0.0; n];
    let mut last_emitted = None;
    if current.step_index.is_multiple_of(stride) {
        sink.record(&current)?;
        last_emitted = Some(current.step_index);
    }

    for _ in 0..n_steps {
        advance(
            &current.grid,
            &current.eta,
            current.time,
            params,
            &mut ws,
            &mut next,
        );
        let step_index = current.step_index + 1;
        let mut worst = 0.0f64;
        for (i, v) in next.iter().enumerate() {
            if !v.is_finite() {
                return Err(SolverError::BlowUp {
                    step: step_index,
                    reason: format!("non-finite elevation at node {i}"),
                    last_good: Box::new(current),
                });
            }
            worst = worst.max(v.abs());
        }
        if worst > limit {
            return Err(SolverError::BlowUp {
                step: step_index,
                reason: format!("max |eta| = {worst:e} exceeds {BLOW_UP_FACTOR:e} x initial max {initial_max:e}"),
                last_good: Box::new(current),
            });
        }
        std::mem::swap(&mut current.eta, &mut next);
        current.time += params.dt;
        current.step_index = step_index;
        if step_index.is_multiple_of(stride) {
            sink.record(&current)?;
            last_emitted = Some(step_index);
        }
    }
    if last_emitted != Some(current.step_index) {
        sink.record(&current)?;
    }
    Ok(current)
}

/// Fold an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut w = (theta + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w += TAU;
    }
    w
}
