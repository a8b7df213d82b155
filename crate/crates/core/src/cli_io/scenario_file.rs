//! Scenario files.
//!
//! ```text
//! r_max_m       = 0.223
//! r_min_m       = 0.125
//! wall_height_m = 0.260
//! z0_m          = 0.050
//! volume_m3     = 0.010
//! tau           = 0.0167
//! omega_rad_s   = 6.84
//! g             = 9.81
//! nu            = 1.03e-6
//! epsilon_mode  = sigma2          # or amplitude_ratio
//! amplitude_m   = 0.112           # optional
//! ```
//!
//! A value may carry its unit as a trailing token (`0.223 m`); any other
//! unit is rejected.

use std::path::Path;

use super::{IoError, KeyValues};
use crate::scenario::{ChannelGeometry, EpsilonMode, FluidProperties, Scenario, DEFAULT_RHO};

/// (key, unit) for every required numeric key.
const NUMERIC_KEYS: [(&str, &str); 9] = [
    ("r_max_m", "m"),
    ("r_min_m", "m"),
    ("wall_height_m", "m"),
    ("z0_m", "m"),
    ("volume_m3", "m3"),
    ("tau", ""),
    ("omega_rad_s", "rad/s"),
    ("g", "m/s2"),
    ("nu", "m2/s"),
];
const EPSILON_KEY: &str = "epsilon_mode";
const AMPLITUDE_KEY: &str = "amplitude_m";

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, IoError> {
    let kv = KeyValues::parse(text)?;
    kv.reject_unknown(|k| {
        k == EPSILON_KEY || k == AMPLITUDE_KEY || NUMERIC_KEYS.iter().any(|(n, _)| *n == k)
    })?;
    let required: Vec<&str> = NUMERIC_KEYS
        .iter()
        .map(|(k, _)| *k)
        .chain(std::iter::once(EPSILON_KEY))
        .collect();
    kv.require_all(&required)?;

    let q = |key: &str| {
        let unit = NUMERIC_KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, u)| *u)
            .unwrap_or("");
        kv.quantity(key, unit)
    };
    let geometry = ChannelGeometry::new(
        q("r_max_m")?,
        q("r_min_m")?,
        q("wall_height_m")?,
        q("z0_m")?,
    )?;
    let fluid = FluidProperties::new(q("g")?, q("nu")?, DEFAULT_RHO)?;
    let mode_str = kv.get(EPSILON_KEY).unwrap_or_default();
    let epsilon_mode = EpsilonMode::parse(mode_str).ok_or_else(|| IoError::BadValue {
        key: EPSILON_KEY.into(),
        value: mode_str.into(),
    })?;
    let amplitude = match kv.get(AMPLITUDE_KEY) {
        Some(_) => Some(kv.quantity(AMPLITUDE_KEY, "m")?),
        None => None,
    };
    Ok(Scenario::new(
        geometry,
        fluid,
        q("volume_m3")?,
        q("tau")?,
        q("omega_rad_s")?,
        amplitude,
        epsilon_mode,
    )?)
}

/// Serialise a scenario in the format [`parse_scenario`] reads.
pub fn scenario_to_text(s: &Scenario) -> String {
    let mut out = String::new();
    let g = &s.geometry;
    for (k, v) in [
        ("r_max_m", g.r_max),
        ("r_min_m", g.r_min),
        ("wall_height_m", g.wall_height),
        ("z0_m", g.z0),
        ("volume_m3", s.volume),
        ("tau", s.tilt_tau),
        ("omega_rad_s", s.omega),
        ("g", s.fluid.g),
        ("nu", s.fluid.nu),
    ] {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out.push_str(&format!("{EPSILON_KEY} = {}\n", s.epsilon_mode.as_str()));
    if let Some(a) = s.measured_amplitude {
        out.push_str(&format!("{AMPLITUDE_KEY} = {a}\n"));
    }
    out
}
