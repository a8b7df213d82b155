//! Dimensional coefficients of the forced KdV equation
//!
//! ```text
//! A η_θθθ + B η η_θ + C η_t + D₀ sin(θ − Ω t) = 0
//! ```
//!
//! plus the linear dispersion relation and the long-wave speed estimate.

use thiserror::Error;

use crate::scenario::{DerivedScales, Scenario};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoefficientError {
    #[error("amplitude parameter epsilon must be nonzero")]
    ZeroEpsilon,
    #[error("rotation rate omega must be nonzero")]
    ZeroOmega,
    #[error("evaluation radius must be positive, got {0}")]
    BadRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdvCoefficients {
    /// Dispersion coefficient A.
    pub a_disp: f64,
    /// Nonlinearity coefficient B.
    pub b_nonlin: f64,
    /// Time coefficient C.
    pub c_time: f64,
    /// Forcing amplitude D₀ of `D = D₀ sin(θ − Ω t)`.
    pub d_forcing_amp: f64,
    /// Rotation rate Ω (rad/s).
    pub omega: f64,
    /// Radius at which the r-dependent factors were evaluated (m).
    pub r_eval: f64,
}

impl KdvCoefficients {
    /// Coefficients set directly, e.g. for textbook KdV checks.
    pub fn raw(a_disp: f64, b_nonlin: f64, c_time: f64, d_forcing_amp: f64, omega: f64) -> Self {
        Self {
            a_disp,
            b_nonlin,
            c_time,
            d_forcing_amp,
            omega,
            r_eval: 1.0,
        }
    }
}

/// Coefficients evaluated on the outer wall, `r = r_max`.
pub fn compute_coefficients(
    scenario: &Scenario,
    scales: &DerivedScales,
) -> Result<KdvCoefficients, CoefficientError> {
    compute_coefficients_at(scenario, scales, scenario.geometry.r_max)
}

/// Coefficients with the r-dependent factors evaluated at `r_eval`.
///
/// The forcing denominator uses δ = σ, which undoes the `τ = σ τ̄` scaling.
pub fn compute_coefficients_at(
    scenario: &Scenario,
    scales: &DerivedScales,
    r_eval: f64,
) -> Result<KdvCoefficients, CoefficientError> {
    let eps = scales.epsilon;
    let omega = scenario.omega;
    if eps == 0.0 {
        return Err(CoefficientError::ZeroEpsilon);
    }
    if omega == 0.0 {
        return Err(CoefficientError::ZeroOmega);
    }
    if !(r_eval.is_finite() && r_eval > 0.0) {
        return Err(CoefficientError::BadRadius(r_eval));
    }

    let h = scales.mean_depth;
    let lambda = scales.lambda;
    let c = scales.long_wave_speed;
    let delta = scales.sigma;

    // Dimensionless rotation rate and radius.
    let omega_bar = omega * lambda / c;
    let r_bar = r_eval / lambda;
    let r_bar2 = r_bar * r_bar;
    let eps_h = eps * h;

    let a_disp = (omega_bar / (2.0 * r_bar2) - 1.0 / (6.0 * omega_bar * r_bar2 * r_bar2)) / eps_h;
    let b_nonlin = (3.0 / (eps_h * eps_h)) / ((lambda / c) * r_bar2);
    let c_time = 2.0 * lambda / (eps * eps * c * h);
    let d_forcing_amp = scenario.tilt_tau * omega * r_eval / (eps * delta * c);

    Ok(KdvCoefficients {
        a_disp,
        b_nonlin,
        c_time,
        d_forcing_amp,
        omega,
        r_eval,
    })
}

/// Linear dispersion relation `ω(k) = (k − A k³) / c`.
pub fn dispersion_relation(k: f64, coeffs: &KdvCoefficients, c: f64) -> f64 {
    (k - coeffs.a_disp * k * k * k) / c
}

/// Weakly nonlinear solitary-wave speed `√(g h̄) (1 + A / (2 h̄))`.
pub fn theoretical_wave_speed(depth: f64, amplitude: f64, g: f64) -> f64 {
    (g * depth).sqrt() * (1.0 + amplitude / (2.0 * depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{derive_scales, LabCase, Scenario};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lab(case: LabCase) -> (Scenario, DerivedScales) {
        let sc = Scenario::laboratory_case(case);
        let s = derive_scales(&sc).unwrap();
        (sc, s)
    }

    // Frozen from a standalone script evaluating the four printed formulas
    // with h̄ = V / base area, ε = σ², δ = σ, r = r_max.
    #[test]
    fn ten_litre_case_matches_scripted_oracle() {
        let (sc, s) = lab(LabCase::V10000);
        let k = compute_coefficients(&sc, &s).unwrap();
        assert_relative_eq!(k.a_disp, 414742.04291851865, max_relative = 1e-12);
        assert_relative_eq!(k.b_nonlin, 471545111.81246275, max_relative = 1e-12);
        assert_relative_eq!(k.c_time, 1593575.7298893614, max_relative = 1e-12);
        assert_relative_eq!(k.d_forcing_amp, 90.06173301125088, max_relative = 1e-12);
    }

    #[test]
    fn other_cases_match_scripted_oracle() {
        let (sc, s) = lab(LabCase::V12000);
        let k = compute_coefficients(&sc, &s).unwrap();
        assert_relative_eq!(k.a_disp, 176755.9416500416, max_relative = 1e-12);
        assert_relative_eq!(k.c_time, 584622.9412837868, max_relative = 1e-12);
        assert_relative_eq!(k.d_forcing_amp, 29.32725468581751, max_relative = 1e-12);
        let (sc, s) = lab(LabCase::V14000);
        let k = compute_coefficients(&sc, &s).unwrap();
        assert_relative_eq!(k.b_nonlin, 74100143.82860133, max_relative = 1e-12);
        assert_relative_eq!(k.c_time, 250419.71134573664, max_relative = 1e-12);
    }

    #[test]
    fn untilted_channel_is_unforced() {
        let (mut sc, s) = lab(LabCase::V10000);
        sc.tilt_tau = 0.0;
        assert_eq!(compute_coefficients(&sc, &s).unwrap().d_forcing_amp, 0.0);
    }

    #[test]
    fn doubling_epsilon_quarters_c() {
        let (sc, s) = lab(LabCase::V12000);
        let mut s2 = s;
        s2.epsilon *= 2.0;
        let c1 = compute_coefficients(&sc, &s).unwrap().c_time;
        let c2 = compute_coefficients(&sc, &s2).unwrap().c_time;
        assert_relative_eq!(c1 / c2, 4.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_epsilon_and_omega_rejected() {
        let (mut sc, mut s) = lab(LabCase::V10000);
        let eps = s.epsilon;
        s.epsilon = 0.0;
        assert_eq!(
            compute_coefficients(&sc, &s),
            Err(CoefficientError::ZeroEpsilon)
        );
        s.epsilon = eps;
        sc.omega = 0.0;
        assert_eq!(
            compute_coefficients(&sc, &s),
            Err(CoefficientError::ZeroOmega)
        );
    }

    #[test]
    fn sign_structure_on_lab_cases() {
        for case in LabCase::ALL {
            let (sc, s) = lab(case);
            let k = compute_coefficients(&sc, &s).unwrap();
            assert!(k.b_nonlin > 0.0 && k.c_time > 0.0, "{case:?}");
        }
    }

    #[test]
    fn dispersion_relation_cases() {
        let (sc, s) = lab(LabCase::V10000);
        let k = compute_coefficients(&sc, &s).unwrap();
        assert_eq!(dispersion_relation(0.0, &k, 1.3), 0.0);
        let mut flat = k;
        flat.a_disp = 0.0;
        assert_eq!(dispersion_relation(2.5, &flat, 1.3), 2.5 / 1.3);
        // k = 1 with the long-wave speed as divisor: (1 − A) / c.
        let w = dispersion_relation(1.0, &k, s.long_wave_speed);
        assert_relative_eq!(w, -433431.1377736615, max_relative = 1e-12);
    }

    #[test]
    fn wave_speed_laboratory_cases() {
        assert!((theoretical_wave_speed(0.0933, 0.112, 9.81) - 1.528).abs() < 0.005);
        assert!((theoretical_wave_speed(0.112, 0.0886, 9.81) - 1.463).abs() < 0.005);
        assert_eq!(
            theoretical_wave_speed(0.1, 0.0, 9.81),
            (9.81f64 * 0.1).sqrt()
        );
    }

    proptest! {
        #[test]
        fn dispersion_is_odd(k in -50.0f64..50.0, a in -1e3f64..1e3, c in 0.1f64..10.0) {
            let co = KdvCoefficients::raw(a, 1.0, 1.0, 0.0, 1.0);
            prop_assert_eq!(dispersion_relation(-k, &co, c), -dispersion_relation(k, &co, c));
        }

        #[test]
        fn wave_speed_monotone_in_amplitude(h in 0.01f64..0.25, a in 0.0f64..0.2, da in 1e-6f64..0.1) {
            prop_assert!(theoretical_wave_speed(h, a + da, 9.81) > theoretical_wave_speed(h, a, 9.81));
        }
    }
}
