//! Property tests for the library's structural invariants.

use gdof_core::achievable::{decode_catalog, max_symmetric_rate, RateBound};
use gdof_core::closed_form::{gdof_piecewise_weak, gdof_weak};
use gdof_core::prelog::{predicted_prelog, PrelogSpec};
use gdof_core::rng::Rng;
use gdof_core::{generate_channel, logdet_rate, received_covariance, CMat, SystemConfig};
use proptest::prelude::*;

fn weak_config(a1: f64, a2: f64) -> Option<SystemConfig> {
    SystemConfig::new(1, 2, a1, a2)
        .ok()
        .filter(|c| c.regime().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn received_covariance_is_hermitian_psd(
        seed in 0u64..1000,
        rho in 1.5f64..1e6,
        p1 in 0.0f64..2.0,
        p2 in 0.0f64..2.0,
    ) {
        let cfg = SystemConfig::new(1, 2, 0.9, 0.4).unwrap();
        let ch = generate_channel(cfg, seed).unwrap();
        let cov = received_covariance(&ch, 1, &[(1, p1), (2, p2), (3, 0.3)], rho).unwrap();
        prop_assert!(cov.hermitian_defect() <= 1e-12);
        let evs = cov.hermitian_eigenvalues();
        prop_assert!(evs[0] >= -1e-10 * cov.trace_re().max(1.0));
    }

    #[test]
    fn logdet_rate_monotone_under_psd_ordering(seed in 0u64..1000, scale in 0.1f64..50.0) {
        // A2 = A1 + v v^H dominates A1 in the PSD order.
        let mut rng = Rng::new(seed);
        let n = 3;
        let mut noise = CMat::identity(n);
        let h = gdof_core::channel::sample_gaussian_matrix(&mut rng, n, 2);
        noise.add_scaled_gram(&h, 0.5);
        let mut a1 = CMat::zeros(n, n);
        let g = gdof_core::channel::sample_gaussian_matrix(&mut rng, n, 2);
        a1.add_scaled_gram(&g, scale);
        let mut a2 = a1.clone();
        let v = gdof_core::channel::sample_gaussian_matrix(&mut rng, n, 1);
        a2.add_scaled_gram(&v, scale);
        let r1 = logdet_rate(&a1, &noise).unwrap();
        let r2 = logdet_rate(&a2, &noise).unwrap();
        prop_assert!(r2 >= r1 - 1e-9, "{r1} vs {r2}");
    }

    #[test]
    fn prelog_monotone_in_exponents(
        r in 1usize..4,
        extra in 0usize..6,
        a in 0.0f64..2.0,
        db in 0.0f64..1.0,
        dc in 0.0f64..1.0,
        bump in 0.001f64..0.5,
    ) {
        let n = r + extra;
        let b = a * db;
        let c = b * dc;
        let spec = PrelogSpec::new(r, n, [a, b, c]).unwrap();
        let base = predicted_prelog(&spec);
        let bumped = PrelogSpec::new(r, n, [a + bump, b, c]).unwrap();
        prop_assert!(predicted_prelog(&bumped) >= base);
        let bumped_mid = PrelogSpec::new(r, n, [a + bump, b + bump, c]).unwrap();
        prop_assert!(predicted_prelog(&bumped_mid) >= base);
        if n >= 3 * r {
            prop_assert!((base - r as f64 * (a + b + c)).abs() < 1e-12);
        }
    }

    #[test]
    fn piecewise_equals_min_of_max_off_boundaries(a1 in 0.02f64..0.98, frac in 0.05f64..0.95) {
        let a2 = a1 * frac;
        prop_assume!(a2 > 0.01);
        if let Some(cfg) = weak_config(a1, a2) {
            let p = gdof_piecewise_weak(&cfg).unwrap();
            prop_assume!(!p.boundary_fallback);
            let w = gdof_weak(&cfg).unwrap();
            prop_assert!((p.value - w.value).abs() <= 1e-12, "({a1},{a2})");
        }
    }

    #[test]
    fn lp_point_is_feasible_and_axis_optimal(
        v1 in 0.1f64..5.0,
        v2 in 0.1f64..5.0,
        v3 in 0.1f64..5.0,
        v12 in 0.1f64..8.0,
        v123 in 0.1f64..12.0,
    ) {
        let plan = decode_catalog(&SystemConfig::new(1, 2, 0.5, 0.2).unwrap()).unwrap();
        let mk = |w: [u32; 3], v: f64| RateBound { label: String::new(), weights: w, value: v };
        let bounds = vec![
            mk([1, 0, 0], v1),
            mk([0, 1, 0], v2),
            mk([0, 0, 1], v3),
            mk([1, 1, 0], v12),
            mk([2, 2, 1], v123),
        ];
        let p = max_symmetric_rate(&bounds, &plan).unwrap();
        let coords = [p.rc1, p.rc2, p.rp];
        for b in &bounds {
            let lhs: f64 = (0..3).map(|c| b.weights[c] as f64 * coords[c]).sum();
            prop_assert!(lhs <= b.value + 1e-6);
        }
        // No coordinate can grow by 1e-3 and stay feasible: the point sits
        // on the efficient frontier.
        for j in 0..3 {
            let mut bumped = coords;
            bumped[j] += 1e-3;
            let feasible = bounds.iter().all(|b| {
                let lhs: f64 = (0..3).map(|c| b.weights[c] as f64 * bumped[c]).sum();
                lhs <= b.value + 1e-9
            });
            prop_assert!(!feasible, "coordinate {j} of {coords:?} can still grow");
        }
    }
}
