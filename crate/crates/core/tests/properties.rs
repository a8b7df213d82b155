use std::sync::Arc;

use proptest::prelude::*;

use kelvin_kdv::cli_io::{compare_profiles, MeasuredProfile, ProfileUnits};
use kelvin_kdv::solver::{
    gaussian_initial_condition, simulate, ForcingMode, NullSink, RingGrid, StepParams, WaveState,
};
use kelvin_kdv::KdvCoefficients;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arc_mm_round_trip(start in -150.0f64..0.0, step in 0.5f64..5.0, r_max in 0.1f64..0.5) {
        let raw: Vec<(f64, f64)> = (0..40).map(|i| (start + step * i as f64, (i as f64 * 0.3).sin() * 50.0)).collect();
        let p = MeasuredProfile::from_raw(&raw, ProfileUnits::MmArcMm, r_max, "p").unwrap();
        for ((s0, e0), (s1, e1)) in raw.iter().zip(p.to_arc_mm(r_max)) {
            prop_assert!((s1 - s0).abs() <= 1e-9 * s0.abs().max(1.0));
            prop_assert!((e1 - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn comparison_symmetric_on_shared_grid(n in 16usize..128, a1 in 0.01f64..0.1, a2 in 0.01f64..0.1, st in 0.1f64..1.0, shift in -1.0f64..1.0) {
        let grid = Arc::new(RingGrid::full(n).unwrap());
        let s1 = gaussian_initial_condition(Arc::clone(&grid), a1, 0.0, st).unwrap();
        let s2 = gaussian_initial_condition(grid, a2, shift, st).unwrap();
        let c12 = compare_profiles(&s1, &MeasuredProfile::from_state(&s2, "2")).unwrap();
        let c21 = compare_profiles(&s2, &MeasuredProfile::from_state(&s1, "1")).unwrap();
        prop_assert_eq!(c12.l2, c21.l2);
        prop_assert_eq!(c12.linf, c21.linf);
    }

    #[test]
    fn simulation_is_deterministic(a in -1e-3f64..1e-3, b in -2.0f64..2.0, amp in 0.01f64..0.2) {
        let grid = Arc::new(RingGrid::full(64).unwrap());
        let ic = gaussian_initial_condition(grid, amp, 0.3, 0.5).unwrap();
        let p = StepParams::new(KdvCoefficients::raw(a, b, 1.0, 0.1, 2.0), 1e-4, 1.0, 1.0, ForcingMode::FullSin, 0.5).unwrap();
        let x = simulate(&ic, &p, 200, 200, &mut NullSink).unwrap();
        let y = simulate(&ic, &p, 200, 200, &mut NullSink).unwrap();
        prop_assert_eq!(x, y);
    }
}

/// The linear phase speed at fixed k approaches `(k − A k³)/C` as Δθ → 0.
#[test]
fn linear_phase_error_shrinks_with_resolution() {
    let coeffs = KdvCoefficients::raw(0.05, 0.0, 1.0, 0.0, 1.0);
    let k = 4.0;
    let exact = (k - 0.05 * k * k * k) / 1.0;
    let mut errs = Vec::new();
    for n in [64usize, 128, 256] {
        let grid = Arc::new(RingGrid::full(n).unwrap());
        let ic = WaveState::from_fn(grid, |t| (k * t).cos()).unwrap();
        let p = StepParams::new(coeffs, 1e-6, 0.0, 1.0, ForcingMode::EtaThetaApprox, 0.5).unwrap();
        let end = simulate(&ic, &p, 200_000, 200_000, &mut NullSink).unwrap();
        let phase = |s: &WaveState| {
            let (re, im) = s
                .grid
                .theta
                .iter()
                .zip(&s.eta)
                .fold((0.0, 0.0), |(r, i), (&t, &e)| {
                    (r + e * (k * t).cos(), i - e * (k * t).sin())
                });
            im.atan2(re)
        };
        let omega = -(phase(&end) - phase(&ic)) / end.time;
        errs.push(((omega - exact) / exact).abs());
    }
    // Second order: each halving of Δθ cuts the error by about four.
    for w in errs.windows(2) {
        assert!((3.5..4.5).contains(&(w[0] / w[1])), "{errs:?}");
    }
}
