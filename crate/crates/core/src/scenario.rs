//! Channel geometry, operating conditions and the physical scales derived
//! from them.
//!
//! Everything downstream (coefficients, diagnostics, the time step) consumes
//! a [`Scenario`] together with its [`DerivedScales`]. Both are plain value
//! objects: once built they are never mutated.

use std::f64::consts::PI;

use thiserror::Error;

/// Default gravitational acceleration (m/s²).
pub const DEFAULT_G: f64 = 9.81;
/// Default kinematic viscosity of water (m²/s).
pub const DEFAULT_NU: f64 = 1.03e-6;
/// Default water density (kg/m³).
pub const DEFAULT_RHO: f64 = 1000.0;
/// Shallowness threshold used when none is given.
pub const DEFAULT_SHALLOWNESS_THRESHOLD: f64 = 0.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid fluid properties: {0}")]
    Fluid(String),
    #[error("negative water volume {0} m^3")]
    NegativeVolume(f64),
    #[error("channel overfilled: volume {volume} m^3 gives depth {depth} m above wall height {wall_height} m")]
    Overfill {
        volume: f64,
        depth: f64,
        wall_height: f64,
    },
    #[error("invalid operating point: {0}")]
    OperatingPoint(String),
    #[error("mean depth is zero; scales are undefined")]
    ZeroDepth,
    #[error("amplitude must be positive, got {0}")]
    NonPositiveAmplitude(f64),
    #[error("epsilon mode `amplitude_ratio` needs a measured amplitude")]
    MissingAmplitude,
}

/// Annular flume geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    /// Outer radius (m).
    pub r_max: f64,
    /// Inner radius (m).
    pub r_min: f64,
    /// Half the channel width, `(r_max - r_min) / 2` (m).
    pub half_width_b: f64,
    /// Wall height (m).
    pub wall_height: f64,
    /// Elevation of the flume bottom (m).
    pub z0: f64,
    /// Radial ratio `r_min / r_max`.
    pub beta: f64,
    /// Base area `π (r_max² − r_min²)` (m²).
    pub base_area: f64,
}

impl ChannelGeometry {
    pub fn new(r_max: f64, r_min: f64, wall_height: f64, z0: f64) -> Result<Self, ScenarioError> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min < r_max) {
            return Err(ScenarioError::Geometry(format!(
                "need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}"
            )));
        }
        if !(wall_height.is_finite() && wall_height > 0.0) {
            return Err(ScenarioError::Geometry(format!(
                "wall height must be positive, got {wall_height}"
            )));
        }
        if !z0.is_finite() {
            return Err(ScenarioError::Geometry(
                "bottom elevation must be finite".into(),
            ));
        }
        Ok(Self {
            r_max,
            r_min,
            half_width_b: 0.5 * (r_max - r_min),
            wall_height,
            z0,
            beta: r_min / r_max,
            base_area: PI * (r_max * r_max - r_min * r_min),
        })
    }

    /// The laboratory flume: R = 223 mm, βR = 125 mm, wall 260 mm, bottom at 50 mm.
    pub fn laboratory() -> Self {
        Self::new(0.223, 0.125, 0.260, 0.050).expect("laboratory geometry is valid")
    }

    /// Channel width `r_max - r_min` (m).
    pub fn width(&self) -> f64 {
        self.r_max - self.r_min
    }

    /// Largest volume that keeps the mean level at or below the wall top (m³).
    pub fn max_volume(&self) -> f64 {
        self.base_area * self.wall_height
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidProperties {
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Kinematic viscosity (m²/s).
    pub nu: f64,
    /// Density (kg/m³). Not used by the wave model.
    pub rho: f64,
}

impl FluidProperties {
    pub fn new(g: f64, nu: f64, rho: f64) -> Result<Self, ScenarioError> {
        for (name, v) in [("g", g), ("nu", nu), ("rho", rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ScenarioError::Fluid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self { g, nu, rho })
    }
}

impl Default for FluidProperties {
    fn default() -> Self {
        Self {
            g: DEFAULT_G,
            nu: DEFAULT_NU,
            rho: DEFAULT_RHO,
        }
    }
}

/// How the amplitude parameter ε is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonMode {
    /// ε = σ², the closure balancing nonlinearity and dispersion.
    #[default]
    Sigma2,
    /// ε = A / h̄ using the measured amplitude.
    AmplitudeRatio,
}

impl EpsilonMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EpsilonMode::Sigma2 => "sigma2",
            EpsilonMode::AmplitudeRatio => "amplitude_ratio",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sigma2" => Some(EpsilonMode::Sigma2),
            "amplitude_ratio" => Some(EpsilonMode::AmplitudeRatio),
            _ => None,
        }
    }
}

/// Operating point of the flume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub geometry: ChannelGeometry,
    pub fluid: FluidProperties,
    /// Water volume (m³).
    pub volume: f64,
    /// Tangent of the table tilt.
    pub tilt_tau: f64,
    /// Rotation rate of the table (rad/s).
    pub omega: f64,
    /// Precession rate `τ Ω` (rad/s).
    pub precession_rate: f64,
    /// Observed wave amplitude (m), when known.
    pub measured_amplitude: Option<f64>,
    pub epsilon_mode: EpsilonMode,
}

impl Scenario {
    pub fn new(
        geometry: ChannelGeometry,
        fluid: FluidProperties,
        volume: f64,
        tilt_tau: f64,
        omega: f64,
        measured_amplitude: Option<f64>,
        epsilon_mode: EpsilonMode,
    ) -> Result<Self, ScenarioError> {
        // Validates the volume against the walls.
        mean_depth_from_volume(volume, &geometry)?;
        if !(tilt_tau.is_finite() && tilt_tau >= 0.0) {
            return Err(ScenarioError::OperatingPoint(format!(
                "tilt tau must be >= 0, got {tilt_tau}"
            )));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ScenarioError::OperatingPoint(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if let Some(a) = measured_amplitude {
            if !(a.is_finite() && a > 0.0) {
                return Err(ScenarioError::NonPositiveAmplitude(a));
            }
        }
        if epsilon_mode == EpsilonMode::AmplitudeRatio && measured_amplitude.is_none() {
            return Err(ScenarioError::MissingAmplitude);
        }
        Ok(Self {
            geometry,
            fluid,
            volume,
            tilt_tau,
            omega,
            precession_rate: tilt_tau * omega,
            measured_amplitude,
            epsilon_mode,
        })
    }

    /// One of the three observed solitary-wave operating points in the
    /// laboratory flume.
    pub fn laboratory_case(case: LabCase) -> Self {
        let (volume, tau, omega, amplitude) = case.parameters();
        Self::new(
            ChannelGeometry::laboratory(),
            FluidProperties::default(),
            volume,
            tau,
            omega,
            Some(amplitude),
            EpsilonMode::Sigma2,
        )
        .expect("laboratory cases are valid")
    }
}

/// The three water volumes at which a solitary Kelvin wave was observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabCase {
    V10000,
    V12000,
    V14000,
}

impl LabCase {
    pub const ALL: [LabCase; 3] = [LabCase::V10000, LabCase::V12000, LabCase::V14000];

    /// (volume m³, τ, Ω rad/s, amplitude m)
    pub fn parameters(&self) -> (f64, f64, f64, f64) {
        match self {
            LabCase::V10000 => (0.010, 0.0167, 6.84, 0.112),
            LabCase::V12000 => (0.012, 0.0117, 6.018, 0.0886),
            LabCase::V14000 => (0.014, 0.0233, 6.822, 0.1024),
        }
    }

    pub fn millilitres(&self) -> u32 {
        match self {
            LabCase::V10000 => 10000,
            LabCase::V12000 => 12000,
            LabCase::V14000 => 14000,
        }
    }

    pub fn from_millilitres(ml: u32) -> Option<Self> {
        LabCase::ALL.into_iter().find(|c| c.millilitres() == ml)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Mean depth h̄ = H (m).
    pub mean_depth: f64,
    /// Horizontal length scale, the outer periphery 2π r_max (m).
    pub lambda: f64,
    /// Long-wave speed √(g h̄) (m/s).
    pub long_wave_speed: f64,
    /// Shallowness σ = h̄ / λ.
    pub sigma: f64,
    /// Amplitude parameter ε.
    pub epsilon: f64,
    /// Solid-body speed of the outer wall r_max Ω (m/s).
    pub solid_body_speed: f64,
}

/// Mean water depth from the volume constraint `V = h̄ π (r_max² − r_min²)`.
pub fn mean_depth_from_volume(
    volume: f64,
    geometry: &ChannelGeometry,
) -> Result<f64, ScenarioError> {
    if !volume.is_finite() || volume < 0.0 {
        return Err(ScenarioError::NegativeVolume(volume));
    }
    let depth = volume / geometry.base_area;
    if depth > geometry.wall_height {
        return Err(ScenarioError::Overfill {
            volume,
            depth,
            wall_height: geometry.wall_height,
        });
    }
    Ok(depth)
}

/// Inverse of [`mean_depth_from_volume`].
pub fn volume_from_mean_depth(depth: f64, geometry: &ChannelGeometry) -> f64 {
    depth * geometry.base_area
}

pub fn derive_scales(scenario: &Scenario) -> Result<DerivedScales, ScenarioError> {
    let mean_depth = mean_depth_from_volume(scenario.volume, &scenario.geometry)?;
    if mean_depth <= 0.0 {
        return Err(ScenarioError::ZeroDepth);
    }
    let lambda = 2.0 * PI * scenario.geometry.r_max;
    let sigma = mean_depth / lambda;
    let epsilon = match scenario.epsilon_mode {
        EpsilonMode::Sigma2 => sigma * sigma,
        EpsilonMode::AmplitudeRatio => {
            let a = scenario
                .measured_amplitude
                .ok_or(ScenarioError::MissingAmplitude)?;
            a / mean_depth
        }
    };
    Ok(DerivedScales {
        mean_depth,
        lambda,
        long_wave_speed: (scenario.fluid.g * mean_depth).sqrt(),
        sigma,
        epsilon,
        solid_body_speed: scenario.geometry.r_max * scenario.omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimensionalityReport {
    /// h̄² / A (m).
    pub threshold: f64,
    /// `b <= h̄² / A`; transverse effects negligible.
    pub satisfied: bool,
}

/// Width criterion under which the flow can be treated as two-dimensional.
pub fn two_dimensionality_check(
    half_width_b: f64,
    depth: f64,
    amplitude: f64,
) -> Result<TwoDimensionalityReport, ScenarioError> {
    if !(amplitude > 0.0) {
        return Err(ScenarioError::NonPositiveAmplitude(amplitude));
    }
    let threshold = depth * depth / amplitude;
    Ok(TwoDimensionalityReport {
        threshold,
        satisfied: half_width_b <= threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShallownessReport {
    pub sigma: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub fn validate_shallowness(scales: &DerivedScales, threshold: f64) -> ShallownessReport {
    ShallownessReport {
        sigma: scales.sigma,
        threshold,
        passed: scales.sigma < threshold,
    }
}
