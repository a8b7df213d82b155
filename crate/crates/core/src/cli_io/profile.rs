//! Measured wave profiles and their comparison with simulated states.

use std::path::Path;

use super::IoError;
use crate::solver::{wrap_angle, WaveState, MIN_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileUnits {
    /// θ in radians, η in metres.
    RadM,
    /// Arc length along the outer wall in mm, η in mm.
    MmArcMm,
}

impl ProfileUnits {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rad_m" => Some(ProfileUnits::RadM),
            "mm_arc_mm" => Some(ProfileUnits::MmArcMm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredProfile {
    /// `(θ rad, η m)` with θ strictly increasing. Loaded files are wrapped
    /// into `(−π, π]`.
    pub samples: Vec<(f64, f64)>,
    pub source_units: ProfileUnits,
    pub label: String,
}

impl MeasuredProfile {
    /// Convert raw two-column data to `(rad, m)` and validate it.
    pub fn from_raw(
        raw: &[(f64, f64)],
        units: ProfileUnits,
        r_max: f64,
        label: impl Into<String>,
    ) -> Result<Self, IoError> {
        if raw.len() < MIN_POINTS {
            return Err(IoError::Profile(format!(
                "need at least {MIN_POINTS} samples, got {}",
                raw.len()
            )));
        }
        let samples: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(x, y)| match units {
                ProfileUnits::RadM => (wrap_angle(x), y),
                ProfileUnits::MmArcMm => (wrap_angle(x * 1e-3 / r_max), y * 1e-3),
            })
            .collect();
        if let Some(w) = samples.windows(2).position(|w| !(w[1].0 > w[0].0)) {
            return Err(IoError::Profile(format!(
                "abscissa not strictly increasing after conversion at sample {}",
                w + 1
            )));
        }
        Ok(Self {
            samples,
            source_units: units,
            label: label.into(),
        })
    }

    /// A simulated state viewed as a profile on its own nodes, in ring
    /// coordinates (no wrapping).
    pub fn from_state(state: &WaveState, label: impl Into<String>) -> Self {
        Self {
            samples: state
                .grid
                .theta
                .iter()
                .copied()
                .zip(state.eta.iter().copied())
                .collect(),
            source_units: ProfileUnits::RadM,
            label: label.into(),
        }
    }

    /// Samples expressed back in `(mm of arc, mm)`.
    pub fn to_arc_mm(&self, r_max: f64) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|&(t, e)| (t * r_max * 1e3, e * 1e3))
            .collect()
    }

    /// Gaussian parameters `(avg, st)` for `exp(−((θ − avg)/st)²)`, from the
    /// elevation-weighted first and second moments (negative η ignored).
    pub fn gaussian_moments(&self) -> Result<(f64, f64), IoError> {
        let weight: f64 = self.samples.iter().map(|s| s.1.max(0.0)).sum();
        if !(weight > 0.0) {
            return Err(IoError::Profile(
                "no positive elevation to weight moments".into(),
            ));
        }
        let avg = self
            .samples
            .iter()
            .map(|&(t, e)| t * e.max(0.0))
            .sum::<f64>()
            / weight;
        let var = self
            .samples
            .iter()
            .map(|&(t, e)| (t - avg) * (t - avg) * e.max(0.0))
            .sum::<f64>()
            / weight;
        // Weighted variance of exp(−(x/st)²) is st²/2.
        Ok((avg, (2.0 * var).sqrt()))
    }

    pub fn max_elevation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Parse two numeric columns separated by whitespace or commas.
pub fn parse_two_columns(text: &str) -> Result<Vec<(f64, f64)>, IoError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse::<f64>().ok()).collect();
        match parsed.as_deref() {
            Some([x, y]) if x.is_finite() && y.is_finite() => out.push((*x, *y)),
            _ => {
                return Err(IoError::Syntax {
                    line: idx + 1,
                    message: format!("expected two numeric columns, got `{line}`"),
                })
            }
        }
    }
    Ok(out)
}

pub fn load_measured_profile(
    path: impl AsRef<Path>,
    units: ProfileUnits,
    r_max: f64,
) -> Result<MeasuredProfile, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let raw = parse_two_columns(&text)?;
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("measured");
    MeasuredProfile::from_raw(&raw, units, r_max, label)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileComparison {
    /// RMS difference (m).
    pub l2: f64,
    /// Largest absolute difference (m).
    pub linf: f64,
    /// `|max_sim − max_meas| / max_meas` over the compared arc.
    pub amplitude_err: f64,
    /// Number of measured samples inside the simulated domain.
    pub n_compared: usize,
}

/// Linear interpolation of the simulated state at `theta`, or `None` when
/// `theta` lies outside a sub-arc grid.
fn interpolate(state: &WaveState, theta: f64) -> Option<f64> {
    let grid = &state.grid;
    let n = grid.n_points;
    let mut u = (theta - grid.origin) / grid.d_theta;
    // Snap samples that sit on a node.
    if (u - u.round()).abs() < 1e-9 {
        u = u.round();
    }
    let u = if grid.is_full_ring() {
        u.rem_euclid(n as f64)
    } else {
        if u < -1e-9 || u > (n - 1) as f64 + 1e-9 {
            return None;
        }
        u.clamp(0.0, (n - 1) as f64)
    };
    let i0 = (u.floor() as usize).min(n - 1);
    let frac = u - i0 as f64;
    let i1 = (i0 + 1) % n;
    Some(state.eta[i0] * (1.0 - frac) + state.eta[i1] * frac)
}

pub fn compare_profiles(
    simulated: &WaveState,
    measured: &MeasuredProfile,
) -> Result<ProfileComparison, IoError> {
    let mut sum_sq = 0.0;
    let mut linf = 0.0f64;
    let mut max_sim = f64::NEG_INFINITY;
    let mut max_meas = f64::NEG_INFINITY;
    let mut count = 0usize;
    for &(theta, eta) in &measured.samples {
        let Some(sim) = interpolate(simulated, theta) else {
            continue;
        };
        let d = sim - eta;
        sum_sq += d * d;
        linf = linf.max(d.abs());
        max_sim = max_sim.max(sim);
        max_meas = max_meas.max(eta);
        count += 1;
    }
    if count == 0 {
        return Err(IoError::Profile(
            "measured profile does not overlap the simulated domain".into(),
        ));
    }
    Ok(ProfileComparison {
        l2: (sum_sq / count as f64).sqrt(),
        linf,
        amplitude_err: (max_sim - max_meas).abs() / max_meas.abs(),
        n_compared: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{gaussian_initial_condition, RingGrid};
    use std::sync::Arc;

    fn gaussian_samples(avg: f64, st: f64, amp: f64, n: usize, half_span: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = -half_span + 2.0 * half_span * i as f64 / (n - 1) as f64;
                (t, amp * (-((t - avg) / st).powi(2)).exp())
            })
            .collect()
    }

    #[test]
    fn arc_mm_conversion_centres_on_zero() {
        let raw = [
            (-20.0, 1.0),
            (-10.0, 5.0),
            (0.0, 9.0),
            (10.0, 5.0),
            (20.0, 1.0),
        ];
        let p = MeasuredProfile::from_raw(&raw, ProfileUnits::MmArcMm, 0.223, "clip5").unwrap();
        assert_eq!(p.samples[2].0, 0.0);
        assert!((p.samples[2].1 - 0.009).abs() < 1e-15);
        assert!(p.samples[0].0 < 0.0 && p.samples[4].0 > 0.0);
        assert!((p.samples[3].0 - 0.010 / 0.223).abs() < 1e-15);
    }

    #[test]
    fn rad_m_is_identity() {
        let raw = gaussian_samples(0.1, 0.2, 0.05, 21, 1.0);
        let p = MeasuredProfile::from_raw(&raw, ProfileUnits::RadM, 0.223, "x").unwrap();
        assert_eq!(p.samples, raw);
    }

    #[test]
    fn rejects_short_or_non_monotone() {
        let raw = [(0.0, 1.0), (0.1, 1.0), (0.2, 1.0), (0.3, 1.0)];
        assert!(MeasuredProfile::from_raw(&raw, ProfileUnits::RadM, 0.2, "").is_err());
        let raw = [(0.0, 1.0), (0.1, 1.0), (0.1, 1.0), (0.3, 1.0), (0.4, 1.0)];
        assert!(MeasuredProfile::from_raw(&raw, ProfileUnits::RadM, 0.2, "").is_err());
        // Crossing π wraps to −π and breaks monotonicity.
        let raw = [(2.9, 1.0), (3.0, 1.0), (3.1, 1.0), (3.2, 1.0), (3.3, 1.0)];
        assert!(MeasuredProfile::from_raw(&raw, ProfileUnits::RadM, 0.2, "").is_err());
    }

    #[test]
    fn gaussian_moments_recovered() {
        for (avg, st) in [(0.0, 0.3), (0.25, 0.15), (-0.4, 0.5)] {
            let raw = gaussian_samples(avg, st, 0.09, 801, 2.5);
            let p = MeasuredProfile::from_raw(&raw, ProfileUnits::RadM, 0.223, "g").unwrap();
            let (a, s) = p.gaussian_moments().unwrap();
            assert!((a - avg).abs() <= 0.01 * st, "{a} vs {avg}");
            assert!((s - st).abs() <= 0.01 * st, "{s} vs {st}");
        }
    }

    #[test]
    fn parse_columns() {
        let rows = parse_two_columns("# s_mm eta_mm\n-1.5, 2\n0 3\n\n1.5\t2\n").unwrap();
        assert_eq!(rows, vec![(-1.5, 2.0), (0.0, 3.0), (1.5, 2.0)]);
        assert!(parse_two_columns("1 2 3").is_err());
        assert!(parse_two_columns("a b").is_err());
    }

    #[test]
    fn compare_with_itself_and_offset() {
        let grid = Arc::new(RingGrid::full(128).unwrap());
        let s = gaussian_initial_condition(grid, 0.08, 0.5, 0.3).unwrap();
        let p = MeasuredProfile::from_state(&s, "self");
        let c = compare_profiles(&s, &p).unwrap();
        assert_eq!((c.l2, c.linf, c.amplitude_err), (0.0, 0.0, 0.0));
        assert_eq!(c.n_compared, 128);

        let d = 0.0125;
        let shifted = MeasuredProfile {
            samples: p.samples.iter().map(|&(t, e)| (t, e + d)).collect(),
            ..p.clone()
        };
        let c = compare_profiles(&s, &shifted).unwrap();
        assert!((c.linf - d).abs() < 1e-15);
    }

    #[test]
    fn sub_arc_without_overlap() {
        let grid = Arc::new(RingGrid::periodic(50, 0.0, 0.5).unwrap());
        let s = gaussian_initial_condition(grid, 0.08, 0.2, 0.1).unwrap();
        let raw = gaussian_samples(-1.0, 0.1, 0.08, 11, 0.2);
        let shifted: Vec<_> = raw.iter().map(|&(t, e)| (t - 1.0, e)).collect();
        let p = MeasuredProfile::from_raw(&shifted, ProfileUnits::RadM, 0.223, "").unwrap();
        assert!(compare_profiles(&s, &p).is_err());
    }
}
