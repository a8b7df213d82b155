//! Flow-regime numbers, the breaking criterion and wave-speed comparison.

use thiserror::Error;

use crate::coefficients::theoretical_wave_speed;
use crate::scenario::{ChannelGeometry, DerivedScales, Scenario};
use crate::solver::WaveState;

/// Reynolds number at or below which the flow is laminar.
pub const LAMINAR_MAX_RE: f64 = 500.0;
/// Reynolds number at or above which the flow is turbulent.
pub const TURBULENT_MIN_RE: f64 = 1000.0;
/// Relative margin below the depth at which a wave counts as breaking.
pub const DEFAULT_BREAKING_MARGIN: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("snapshot times must increase (t_a = {t_a}, t_b = {t_b})")]
    NonIncreasingTime { t_a: f64, t_b: f64 },
    #[error("profile is flat; no unique crest")]
    FlatProfile,
    #[error("snapshots live on different grids")]
    GridMismatch,
    #[error("experimental speed must be nonzero")]
    ZeroSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowRegime {
    Laminar,
    Transitional,
    Turbulent,
}

impl FlowRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlowRegime::Laminar => "laminar",
            FlowRegime::Transitional => "transitional",
            FlowRegime::Turbulent => "turbulent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Sub,
    Super,
}

impl Criticality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criticality::Sub => "sub",
            Criticality::Super => "super",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydraulicRadius {
    /// R_h (m).
    pub radius: f64,
    /// P_w (m).
    pub wetted_perimeter: f64,
}

/// Rectangular cross-section of width `r_max − r_min` filled to `depth`.
pub fn hydraulic_radius(geometry: &ChannelGeometry, depth: f64) -> HydraulicRadius {
    let width = geometry.width();
    let wetted_perimeter = width + 2.0 * depth;
    HydraulicRadius {
        radius: width * depth / wetted_perimeter,
        wetted_perimeter,
    }
}

/// `R_e = Ω R_h² / ν` and its regime.
pub fn reynolds(omega: f64, r_h: f64, nu: f64) -> (f64, FlowRegime) {
    let re = omega * r_h * r_h / nu;
    (re, classify_reynolds(re))
}

pub fn classify_reynolds(re: f64) -> FlowRegime {
    if re <= LAMINAR_MAX_RE {
        FlowRegime::Laminar
    } else if re >= TURBULENT_MIN_RE {
        FlowRegime::Turbulent
    } else {
        FlowRegime::Transitional
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RossbyNumbers {
    /// `Ω₁ / (2(Ω₁ + Ω))` with Ω₁ = τΩ.
    pub printed: f64,
    /// `Ω / (2(Ω₁ + Ω))`; this is the variant that gives 0.492 for the
    /// observed tilts.
    pub reported_variant: f64,
}

pub fn rossby_number(tau: f64, omega: f64) -> RossbyNumbers {
    let precession = tau * omega;
    let denom = 2.0 * (precession + omega);
    RossbyNumbers {
        printed: precession / denom,
        reported_variant: omega / denom,
    }
}

/// `Ek = ν / (Ω R_h²)`.
pub fn ekman(nu: f64, omega: f64, r_h: f64) -> f64 {
    nu / (omega * r_h * r_h)
}

/// `Fr = r_max Ω / √(g h̄)`; supercritical strictly above one.
pub fn froude(geometry: &ChannelGeometry, omega: f64, depth: f64, g: f64) -> (f64, Criticality) {
    let fr = geometry.r_max * omega / (g * depth).sqrt();
    let critical = if fr > 1.0 {
        Criticality::Super
    } else {
        Criticality::Sub
    };
    (fr, critical)
}

/// Russell's criterion with a relative margin: breaking once `A ≥ h̄ (1 − margin)`.
pub fn breaking_check(amplitude: f64, depth: f64) -> bool {
    breaking_check_with_margin(amplitude, depth, DEFAULT_BREAKING_MARGIN)
}

pub fn breaking_check_with_margin(amplitude: f64, depth: f64, margin: f64) -> bool {
    amplitude > 0.0 && amplitude >= depth * (1.0 - margin)
}

/// Sub-cell crest position: three-point parabola through the global maximum.
/// Ties resolve to the lowest index.
pub fn crest_position(state: &WaveState) -> Result<f64, DiagnosticsError> {
    let eta = &state.eta;
    let n = eta.len();
    let (mut imax, mut vmax) = (0usize, eta[0]);
    let mut vmin = eta[0];
    for (i, &v) in eta.iter().enumerate().skip(1) {
        if v > vmax {
            imax = i;
            vmax = v;
        }
        vmin = vmin.min(v);
    }
    if vmax - vmin <= f64::EPSILON * vmax.abs().max(vmin.abs()) {
        return Err(DiagnosticsError::FlatProfile);
    }
    let left = eta[(imax + n - 1) % n];
    let right = eta[(imax + 1) % n];
    let curvature = left - 2.0 * vmax + right;
    let offset = if curvature < 0.0 {
        (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok(state.grid.theta[imax] + offset * state.grid.d_theta)
}

/// Crest speed along the outer wall between two snapshots (m/s).
pub fn crest_speed(a: &WaveState, b: &WaveState, r_max: f64) -> Result<f64, DiagnosticsError> {
    if a.grid.n_points != b.grid.n_points || a.grid.d_theta != b.grid.d_theta {
        return Err(DiagnosticsError::GridMismatch);
    }
    let dt = b.time - a.time;
    if !(dt > 0.0) {
        return Err(DiagnosticsError::NonIncreasingTime {
            t_a: a.time,
            t_b: b.time,
        });
    }
    let shift = a.grid.wrap_offset(crest_position(b)? - crest_position(a)?);
    Ok(r_max * shift / dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedComparison {
    pub theoretical: f64,
    pub experimental: f64,
    /// `|c_th − c_exp| / c_exp`.
    pub rel_err_vs_experimental: f64,
    /// `|c_th − c_exp| / c_th`.
    pub rel_err_vs_theoretical: f64,
}

/// Relative error of a theoretical speed against an experimental one.
pub fn compare_speeds(c_th: f64, c_exp: f64) -> Result<f64, DiagnosticsError> {
    if c_exp == 0.0 {
        return Err(DiagnosticsError::ZeroSpeed);
    }
    Ok((c_th - c_exp).abs() / c_exp.abs())
}

/// Both error conventions.
pub fn speed_comparison(c_th: f64, c_exp: f64) -> Result<SpeedComparison, DiagnosticsError> {
    let rel_err_vs_experimental = compare_speeds(c_th, c_exp)?;
    Ok(SpeedComparison {
        theoretical: c_th,
        experimental: c_exp,
        rel_err_vs_experimental,
        rel_err_vs_theoretical: if c_th == 0.0 {
            f64::INFINITY
        } else {
            (c_th - c_exp).abs() / c_th.abs()
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsReport {
    pub hydraulic_radius: f64,
    pub wetted_perimeter: f64,
    pub reynolds: f64,
    pub regime: FlowRegime,
    pub rossby_printed: f64,
    pub rossby_reported_variant: f64,
    pub ekman: f64,
    pub froude: f64,
    pub critical: Criticality,
    pub breaking: bool,
    /// Present when the scenario carries a measured amplitude.
    pub theoretical_speed: Option<f64>,
    /// Present when an experimental speed was supplied.
    pub speed: Option<SpeedComparison>,
}

/// Full report for one operating point.
pub fn diagnose(
    scenario: &Scenario,
    scales: &DerivedScales,
    experimental_speed: Option<f64>,
) -> Result<DiagnosticsReport, DiagnosticsError> {
    let depth = scales.mean_depth;
    let hr = hydraulic_radius(&scenario.geometry, depth);
    let (re, regime) = reynolds(scenario.omega, hr.radius, scenario.fluid.nu);
    let ro = rossby_number(scenario.tilt_tau, scenario.omega);
    let (fr, critical) = froude(&scenario.geometry, scenario.omega, depth, scenario.fluid.g);
    let theoretical_speed = scenario
        .measured_amplitude
        .map(|a| theoretical_wave_speed(depth, a, scenario.fluid.g));
    let speed = match (theoretical_speed, experimental_speed) {
        (Some(th), Some(exp)) => Some(speed_comparison(th, exp)?),
        _ => None,
    };
    Ok(DiagnosticsReport {
        hydraulic_radius: hr.radius,
        wetted_perimeter: hr.wetted_perimeter,
        reynolds: re,
        regime,
        rossby_printed: ro.printed,
        rossby_reported_variant: ro.reported_variant,
        ekman: ekman(scenario.fluid.nu, scenario.omega, hr.radius),
        froude: fr,
        critical,
        breaking: scenario
            .measured_amplitude
            .is_some_and(|a| breaking_check(a, depth)),
        theoretical_speed,
        speed,
    })
}
