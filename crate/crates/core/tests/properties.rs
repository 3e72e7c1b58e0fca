use nalgebra::DMatrix;
use proptest::prelude::*;

use optocoherence::gaussian::{
    f_entropy, pt_min_symplectic_eig, symplectic_eigs_numeric, symplectic_eigs_symmetric, symplectic_form,
    validate_physical, GeneralCM, SymmetricTwoModeCM,
};
use optocoherence::measures::{eof, gqd, measure_triple, quantum_coherence};
use optocoherence::model::{
    blocks_for_rates, closed_form_blocks, full_cm, mechanical_subsystem, optical_subsystem, SystemParams,
};
use optocoherence::oracle::{compare_cm, diffusion_matrix, drift_matrix, steady_state};
use optocoherence::sweep::{run_sweep, to_csv_string, SweepSpec, SweepVariable};

/// Physical symmetric states: s ∈ [0.5, 20], |k| < √(s² − 1/4).
fn physical_state() -> impl Strategy<Value = SymmetricTwoModeCM> {
    (0.5f64..20.0, -0.999_999f64..0.999_999).prop_map(|(s, frac)| {
        let kmax = (s * s - 0.25).max(0.0).sqrt();
        SymmetricTwoModeCM::new(s, frac * kmax).unwrap()
    })
}

fn system_params() -> impl Strategy<Value = SystemParams> {
    (0.0f64..100.0, 0.0f64..3.0, 0.0f64..50.0, 0.01f64..1.0)
        .prop_map(|(c, r, n, g)| SystemParams::new(c, r, n, g).unwrap())
}

/// Absolute values of spec(iΩV) through the general eigensolver, paired.
fn general_spectrum(v: &DMatrix<f64>) -> Vec<f64> {
    let ov = symplectic_form(v.nrows() / 2) * v;
    let mut abs: Vec<f64> = ov.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    abs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_spectrum_matches_numeric(cm in physical_state()) {
        let closed = symplectic_eigs_symmetric(&cm);
        let numeric = symplectic_eigs_numeric(&cm.to_general()).unwrap();
        let scale = cm.s().max(1.0);
        prop_assert!((numeric[0] - closed.eta_plus).abs() < 1e-10 * scale);
        prop_assert!((numeric[1] - closed.eta_minus).abs() < 1e-10 * scale);
        let oracle = general_spectrum(cm.to_general().matrix());
        prop_assert!((oracle[1] - closed.eta_minus).abs() < 1e-8 * scale);
    }

    #[test]
    fn partial_transpose_closed_form(cm in physical_state()) {
        prop_assert!((pt_min_symplectic_eig(&cm) - (cm.s() - cm.k().abs())).abs() < 1e-12);
        let v = cm.to_general();
        let pt = v.partial_transpose(1).unwrap();
        let rel = (pt.det() - v.det()).abs() / v.det().abs();
        prop_assert!(rel < 1e-10);
    }

    #[test]
    fn measures_are_nonnegative(cm in physical_state()) {
        let m = measure_triple(&cm).unwrap();
        prop_assert!(m.eof >= 0.0 && m.gqd >= 0.0 && m.qc >= 0.0);
        prop_assert!(m.eof.is_finite() && m.gqd.is_finite() && m.qc.is_finite());
    }

    #[test]
    fn eof_support_is_the_ppt_condition(cm in physical_state()) {
        prop_assert_eq!(eof(&cm).unwrap() > 0.0, cm.s() - cm.k().abs() < 0.5);
    }

    #[test]
    fn eof_continuous_at_threshold(s in 0.5001f64..20.0, j in -10i32..=10) {
        let theta = 0.5 + 1e-9 * j as f64;
        let cm = SymmetricTwoModeCM::new(s, s - theta).unwrap();
        prop_assert!(eof(&cm).unwrap().abs() < 1e-6);
    }

    #[test]
    fn pure_state_identities(r in 0.0f64..2.5) {
        let cm = SymmetricTwoModeCM::two_mode_squeezed_vacuum(r).unwrap();
        let reduced = f_entropy(cm.s()).unwrap();
        // s − k is a difference of rounded O(s) numbers, so the bound grows with s
        let tol = 1e-12 * cm.s().max(1.0);
        prop_assert!((eof(&cm).unwrap() - reduced).abs() < tol);
        prop_assert!((gqd(&cm).unwrap() - reduced).abs() < tol);
        prop_assert!((quantum_coherence(&cm).unwrap() - 2.0 * reduced).abs() < 10.0 * tol);
    }

    #[test]
    fn subsystems_are_physical(p in system_params()) {
        let b = closed_form_blocks(&p);
        for cm in [mechanical_subsystem(&b).unwrap(), optical_subsystem(&b).unwrap()] {
            prop_assert!(validate_physical(&cm.to_general(), 1e-12).physical);
        }
    }

    #[test]
    fn closed_forms_scale_free(c in 0.0f64..100.0, r in 0.0f64..3.0, n in 0.0f64..50.0,
                               g in 0.01f64..1.0, scale in 1e-3f64..1e3) {
        let a = blocks_for_rates(c, r, n, 1.0, g);
        let b = blocks_for_rates(c, r, n, scale, g * scale);
        for (x, y) in [(a.v1, b.v1), (a.v13, b.v13), (a.v2, b.v2), (a.v57, b.v57)] {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn zero_patterns(p in system_params()) {
        let b = closed_form_blocks(&p);
        prop_assert_eq!(b.v13 == 0.0, p.coop() == 0.0 || p.squeeze() == 0.0);
        prop_assert_eq!(b.v57 == 0.0, p.squeeze() == 0.0);
    }

    #[test]
    fn thermal_monotonicity(p in system_params(), dn in 0.01f64..10.0) {
        let hotter = p.with_nth(p.nth() + dn).unwrap();
        let (a, b) = (closed_form_blocks(&p), closed_form_blocks(&hotter));
        prop_assert!(b.v1 > a.v1);
        if p.coop() > 0.0 {
            prop_assert!(b.v2 > a.v2);
        } else {
            prop_assert_eq!(b.v2, a.v2);
        }
    }

    #[test]
    fn lyapunov_matches_closed_forms(p in system_params()) {
        let sol = steady_state(&p).unwrap();
        prop_assert!(sol.residual < 1e-10);
        let cmp = compare_cm(&closed_form_blocks(&p), &sol, 1e-10);
        prop_assert!(cmp.passed, "{:?}", cmp);
    }

    #[test]
    fn drift_stable_and_diffusion_psd(p in system_params()) {
        prop_assert!(drift_matrix(&p).spectral_abscissa() < 0.0);
        let d = diffusion_matrix(&p);
        prop_assert!(d.min_eigenvalue() >= -1e-12 * d.matrix().amax());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn full_cm_is_physical(p in system_params()) {
        let cm = full_cm(&p).unwrap();
        let check = validate_physical(&cm, 1e-9);
        prop_assert!(check.physical, "{:?}", check);
        let again: GeneralCM = full_cm(&p).unwrap();
        prop_assert_eq!(cm, again);
    }
}

#[test]
fn dominance_on_figure_region() {
    for r in [1.0, 1.5] {
        for ci in 0..=20 {
            for ni in 0..=30 {
                let p = SystemParams::new(5.0 * ci as f64, r, ni as f64, 0.05).unwrap();
                let b = closed_form_blocks(&p);
                for cm in [mechanical_subsystem(&b).unwrap(), optical_subsystem(&b).unwrap()] {
                    let m = measure_triple(&cm).unwrap();
                    assert!(m.qc >= m.eof.max(m.gqd) - 1e-9, "{p:?}: {m:?}");
                }
            }
        }
    }
}

#[test]
fn sweep_output_is_deterministic() {
    let fixed = SystemParams::new(20.0, 1.2, 0.0, 0.1).unwrap();
    let spec = SweepSpec::new(SweepVariable::Nth, 0.0, 12.0, 97, fixed).unwrap();
    let a = to_csv_string(&run_sweep(&spec).unwrap());
    let b = to_csv_string(&run_sweep(&spec).unwrap());
    assert_eq!(a, b);
}
