//! Closed-form reference profiles: the travelling sech² fit and the
//! exponential decay of the wave amplitude away from the outer wall.

use std::f64::consts::PI;

use thiserror::Error;

use crate::coefficients::KdvCoefficients;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("sech^2 width parameter B*Omega*r_max/(3C) is negative ({0})")]
    NegativeRadicand(f64),
    #[error("radial ratio beta must satisfy 0 <= beta < 1, got {0}")]
    BadBeta(f64),
    #[error("oscillation frequency must be positive, got {0}")]
    ZeroFrequency(f64),
    #[error("radial fit needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("radial fit is singular: all samples share one radius")]
    SingularFit,
}

/// `A_m sech²(κ (θ/2 − c* t / (2C)))` with `κ = √(B Ω r_max / (3C))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sech2Wave {
    pub amplitude: f64,
    /// κ.
    pub kappa: f64,
    /// Crest transport speed c* (m/s).
    pub c_star: f64,
    /// Time coefficient C.
    pub c_time: f64,
}

impl Sech2Wave {
    pub fn new(
        amplitude: f64,
        coeffs: &KdvCoefficients,
        c_star: f64,
        r_max: f64,
    ) -> Result<Self, AnalyticError> {
        let radicand = coeffs.b_nonlin * coeffs.omega * r_max / (3.0 * coeffs.c_time);
        if !(radicand >= 0.0) {
            return Err(AnalyticError::NegativeRadicand(radicand));
        }
        Ok(Self {
            amplitude,
            kappa: radicand.sqrt(),
            c_star,
            c_time: coeffs.c_time,
        })
    }

    pub fn phase_argument(&self, theta: f64, t: f64) -> f64 {
        self.kappa * (0.5 * theta - self.c_star * t / (2.0 * self.c_time))
    }

    pub fn eval(&self, theta: f64, t: f64) -> f64 {
        let s = 1.0 / self.phase_argument(theta, t).cosh();
        self.amplitude * s * s
    }

    /// Crest position `c* t / C` (rad).
    pub fn crest_position(&self, t: f64) -> f64 {
        self.c_star * t / self.c_time
    }

    /// Full width of the profile at half its amplitude (rad).
    pub fn full_width_half_max(&self) -> f64 {
        // sech²(x) = ½  ⇔  x = arcsech(1/√2) = arccosh(√2)
        4.0 * 2f64.sqrt().acosh() / self.kappa
    }
}

/// Single evaluation of the sech² profile.
pub fn sech2_profile(
    theta: f64,
    t: f64,
    amplitude: f64,
    coeffs: &KdvCoefficients,
    c_star: f64,
    r_max: f64,
) -> Result<f64, AnalyticError> {
    Ok(Sech2Wave::new(amplitude, coeffs, c_star, r_max)?.eval(theta, t))
}

/// Radial wavenumber `M = π / (1 − β)`.
pub fn radial_wavenumber(beta: f64) -> Result<f64, AnalyticError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(AnalyticError::BadBeta(beta));
    }
    Ok(PI / (1.0 - beta))
}

/// Dimensionless Rossby radius `β₁ = √(g h̄) / ω`, ω the local frequency.
pub fn rossby_radius(depth: f64, g: f64, omega_wave: f64) -> Result<f64, AnalyticError> {
    if !(omega_wave > 0.0) {
        return Err(AnalyticError::ZeroFrequency(omega_wave));
    }
    Ok((g * depth).sqrt() / omega_wave)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDecayFit {
    /// A_m (m).
    pub amplitude: f64,
    /// M.
    pub wavenumber_m: f64,
    /// β₁.
    pub rossby_radius_beta1: f64,
    /// Additive fit constant B (m).
    pub offset_b: f64,
}

/// `A_r = A_m e^(M r − β₁) + B`, evaluated literally with r in metres.
pub fn radial_decay_profile(r: f64, fit: &RadialDecayFit) -> f64 {
    fit.amplitude * (fit.wavenumber_m * r - fit.rossby_radius_beta1).exp() + fit.offset_b
}

/// Least-squares `(A_m, B)` for fixed `M`, `β₁`. Returns the fit and the RMS
/// residual against the samples `(r, amplitude)`.
pub fn fit_radial_decay(
    samples: &[(f64, f64)],
    wavenumber_m: f64,
    rossby_radius_beta1: f64,
) -> Result<(RadialDecayFit, f64), AnalyticError> {
    let n = samples.len();
    if n < 2 {
        return Err(AnalyticError::TooFewSamples(n));
    }
    // Normal equations of y = a·x + b with x = e^(M r − β₁).
    let xs: Vec<f64> = samples
        .iter()
        .map(|&(r, _)| (wavenumber_m * r - rossby_radius_beta1).exp())
        .collect();
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, &(_, y)) in xs.iter().zip(samples) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx <= f64::EPSILON * mean_x * mean_x * nf {
        return Err(AnalyticError::SingularFit);
    }
    let amplitude = sxy / sxx;
    let fit = RadialDecayFit {
        amplitude,
        wavenumber_m,
        rossby_radius_beta1,
        offset_b: mean_y - amplitude * mean_x,
    };
    let rms = (samples
        .iter()
        .map(|&(r, y)| (radial_decay_profile(r, &fit) - y).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Ok((fit, rms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coeffs() -> KdvCoefficients {
        KdvCoefficients::raw(0.3, 296.0, 1.0, 0.0, 6.0)
    }

    #[test]
    fn crest_value_and_symmetry() {
        let w = Sech2Wave::new(0.11, &coeffs(), 1.5, 0.223).unwrap();
        assert_eq!(w.eval(0.0, 0.0), 0.11);
        for th in [0.01, 0.2, 1.3, 3.0] {
            assert_eq!(w.eval(th, 0.0), w.eval(-th, 0.0));
        }
        assert_eq!(
            sech2_profile(0.0, 0.0, 0.11, &coeffs(), 1.5, 0.223).unwrap(),
            0.11
        );
    }

    #[test]
    fn negative_radicand_rejected() {
        let mut c = coeffs();
        c.b_nonlin = -1.0;
        assert!(matches!(
            Sech2Wave::new(1.0, &c, 1.0, 0.2),
            Err(AnalyticError::NegativeRadicand(_))
        ));
    }

    #[test]
    fn crest_tracks_linearly() {
        let mut c = coeffs();
        c.c_time = 4.0;
        let w = Sech2Wave::new(1.0, &c, 2.0, 0.223).unwrap();
        let n = 4000;
        let dth = 2.0 / n as f64;
        let argmax = |t: f64| {
            (0..n)
                .map(|i| i as f64 * dth)
                .max_by(|a, b| w.eval(*a, t).total_cmp(&w.eval(*b, t)))
                .unwrap()
        };
        let (t1, t2) = (0.5, 2.5);
        let slope = (argmax(t2) - argmax(t1)) / (t2 - t1);
        // c*/C = 0.5
        assert!((slope - 0.5).abs() <= dth / (t2 - t1) + 1e-12, "{slope}");
        assert_relative_eq!(w.crest_position(t2), 1.25);
    }

    #[test]
    fn tails_vanish() {
        let w = Sech2Wave::new(0.2, &coeffs(), 0.0, 0.223).unwrap();
        let theta = 2.0 * 5.0 / w.kappa;
        assert!(w.eval(theta, 0.0) <= 0.2 * 2e-4);
    }

    #[test]
    fn half_width_by_bisection() {
        let w = Sech2Wave::new(1.0, &coeffs(), 0.0, 0.223).unwrap();
        let dth = 1e-3;
        let fwhm = w.full_width_half_max();
        // Scan outward from the crest on a sampled profile.
        let mut i = 0usize;
        while w.eval(i as f64 * dth, 0.0) > 0.5 {
            i += 1;
        }
        // Bisection within the bracketing cell.
        let (mut lo, mut hi) = ((i - 1) as f64 * dth, i as f64 * dth);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if w.eval(mid, 0.0) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((2.0 * lo - fwhm).abs() <= 2.0 * dth);
    }

    #[test]
    fn radial_wavenumber_cases() {
        assert!((radial_wavenumber(0.5605).unwrap() - 7.148).abs() < 5e-4);
        assert_eq!(radial_wavenumber(0.0).unwrap(), PI);
        assert_relative_eq!(
            radial_wavenumber(0.5).unwrap(),
            2.0 * PI,
            max_relative = 1e-15
        );
        assert!(radial_wavenumber(1.0).is_err());
        assert!(radial_wavenumber(1.2).is_err());
    }

    #[test]
    fn rossby_radius_cases() {
        // √(9.81·0.0933) / 6.84
        assert_relative_eq!(
            rossby_radius(0.0933, 9.81, 6.84).unwrap(),
            0.13986827664167092,
            max_relative = 1e-12
        );
        assert_eq!(rossby_radius(0.0, 9.81, 6.84).unwrap(), 0.0);
        let b1 = rossby_radius(0.05, 9.81, 3.0).unwrap();
        assert_relative_eq!(
            rossby_radius(0.2, 9.81, 3.0).unwrap(),
            2.0 * b1,
            max_relative = 1e-15
        );
        assert!(rossby_radius(0.1, 9.81, 0.0).is_err());
    }

    #[test]
    fn radial_profile_properties() {
        let flat = RadialDecayFit {
            amplitude: 0.05,
            wavenumber_m: 0.0,
            rossby_radius_beta1: 0.14,
            offset_b: 0.01,
        };
        let v = 0.05 * (-0.14f64).exp() + 0.01;
        assert_eq!(radial_decay_profile(0.125, &flat), v);
        assert_eq!(radial_decay_profile(0.223, &flat), v);
        let fit = RadialDecayFit {
            wavenumber_m: 7.148,
            ..flat
        };
        assert_eq!(
            radial_decay_profile(0.0, &fit),
            0.01 + 0.05 * (-0.14f64).exp()
        );
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20 {
            let r = 0.125 + 0.098 * i as f64 / 20.0;
            let a = radial_decay_profile(r, &fit);
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn radial_fit_recovers_synthetic_parameters() {
        let (m, b1) = (7.148, 0.1399);
        let truth = RadialDecayFit {
            amplitude: 0.021,
            wavenumber_m: m,
            rossby_radius_beta1: b1,
            offset_b: -0.004,
        };
        // Deterministic pseudo-noise of ±1e-4 m.
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let r = 0.125 + 0.098 * i as f64 / 29.0;
                let noise = 1e-4 * ((i * 7919 % 13) as f64 / 6.0 - 1.0);
                (r, radial_decay_profile(r, &truth) + noise)
            })
            .collect();
        let (fit, rms) = fit_radial_decay(&samples, m, b1).unwrap();
        assert!((fit.amplitude - truth.amplitude).abs() < 5e-4);
        assert!((fit.offset_b - truth.offset_b).abs() < 2e-3);
        assert!(rms < 1.5e-4, "{rms}");

        let exact: Vec<(f64, f64)> = samples
            .iter()
            .map(|&(r, _)| (r, radial_decay_profile(r, &truth)))
            .collect();
        let (fit, rms) = fit_radial_decay(&exact, m, b1).unwrap();
        assert_relative_eq!(fit.amplitude, truth.amplitude, max_relative = 1e-9);
        assert!(rms < 1e-12);
        assert!(fit_radial_decay(&exact[..1], m, b1).is_err());
        assert!(fit_radial_decay(&[(0.2, 1.0), (0.2, 2.0)], m, b1).is_err());
    }
}
