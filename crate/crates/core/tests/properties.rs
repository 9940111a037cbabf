//! Property-based invariants across modules.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use cylquant::angle::{angle_limit_matrix, angle_operator};
use cylquant::kernel::{validate_kernel, ValidationGrid};
use cylquant::observable::{fourier_coefficient, fourier_coefficient_quadrature};
use cylquant::phase::{gw_phase_matrix, naimark_compress, pov_distribution, pov_probability};
use cylquant::quantizer::{restricted_quantizer, weyl_apply};
use cylquant::{
    ClassicalObservable, ComplexMatrix, Config, Kernel, Matrix, NumberState, Quadrature, State, C64,
};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn number_state(max_s: usize) -> impl Strategy<Value = NumberState> {
    prop::collection::vec(complex(), 1..=max_s + 1)
        .prop_filter("nonzero", |v| v.iter().any(|z| z.norm() > 1e-3))
        .prop_map(|v| NumberState::normalized(v).unwrap())
}

fn kernel() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::weyl()), Just(Kernel::symmetric())]
}

fn real_observable() -> impl Strategy<Value = ClassicalObservable<f64>> {
    prop_oneof![
        Just(ClassicalObservable::angle()),
        Just(ClassicalObservable::angle_squared()),
        Just(ClassicalObservable::momentum()),
        Just(ClassicalObservable::angle_times_momentum()),
        (1u32..4).prop_map(ClassicalObservable::momentum_power),
        (0i64..4).prop_map(ClassicalObservable::cos_angle),
        (1i64..4).prop_map(ClassicalObservable::sin_angle),
    ]
}

fn hermitian(n: i64) -> impl Strategy<Value = Matrix> {
    let dim = (2 * n + 1) as usize;
    prop::collection::vec(complex(), dim * dim).prop_map(move |v| {
        let a = ComplexMatrix::from_entries(-n, n, v).unwrap();
        a.add(&a.adjoint()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builtin_kernels_satisfy_all_conditions(k in kernel()) {
        prop_assert!(validate_kernel(&k, ValidationGrid::default(), 1e-12).unwrap().all_passed());
    }

    #[test]
    fn real_observables_give_hermitian_operators(
        f in real_observable(), k in kernel(), n in 1i64..8, hbar in 0.1f64..3.0,
    ) {
        let m = weyl_apply(&f, &k, &Config::new(n, hbar).unwrap()).unwrap();
        prop_assert!(m.hermiticity_defect() < 1e-10);
    }

    #[test]
    fn quantizer_is_hermitian_with_unit_trace(
        k in kernel(), n in 1i64..10, theta in -PI..PI, frac in 0.0f64..1.0,
    ) {
        let point = ((2 * n + 1) as f64 * frac).floor() as i64 - n;
        let omega = restricted_quantizer(&k, theta, point.min(n), &Config::new(n, 1.0).unwrap()).unwrap();
        prop_assert!(omega.hermiticity_defect() < 1e-10);
        prop_assert!((omega.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn real_observable_coefficients_are_conjugate_symmetric(
        f in real_observable(), l in -12i64..12, n in -6i64..6,
    ) {
        let q = Quadrature::default();
        let a = fourier_coefficient(&f, l, n, 0.7, &q).unwrap();
        let b = fourier_coefficient(&f, -l, n, 0.7, &q).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12);
        let quad = fourier_coefficient_quadrature(&f, l, n, 0.7, &q).unwrap();
        prop_assert!((a - quad).norm() < 1e-9);
    }

    #[test]
    fn matrix_json_round_trips(n in 0i64..5, seed in prop::collection::vec(complex(), 81)) {
        let dim = (2 * n + 1) as usize;
        let m = ComplexMatrix::from_entries(-n, n, seed[..dim * dim].to_vec()).unwrap();
        prop_assert_eq!(Matrix::from_json_str(&m.to_json_string()).unwrap(), m);
    }

    #[test]
    fn state_json_round_trips(psi in number_state(10), lo in -5i64..5) {
        prop_assert_eq!(NumberState::from_json_str(&psi.to_json_string()).unwrap(), psi.clone());
        let circle = State::new(lo, psi.coefficients().to_vec()).unwrap();
        prop_assert_eq!(State::from_json_str(&circle.to_json_string()).unwrap(), circle);
    }

    #[test]
    fn hermitian_expectations_are_real(h in hermitian(3), coeffs in prop::collection::vec(complex(), 7)) {
        prop_assume!(coeffs.iter().any(|z| z.norm() > 1e-3));
        let psi = State::new(-3, coeffs).unwrap().normalized().unwrap();
        prop_assert!(h.expectation(&psi).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn pov_is_nonnegative_normalized_and_additive(
        psi in number_state(12), a in -PI..PI, t in 0.05f64..0.95, u in 0.05f64..0.95,
    ) {
        let dist = pov_distribution(&psi, 128, -PI).unwrap();
        prop_assert!(dist.min_value() >= -1e-14);
        assert_abs_diff_eq!(dist.total_probability(), 1.0, epsilon = 1e-12);
        let b = a + (PI - a) * t;
        let c = b + (PI - b) * u;
        let whole = pov_probability(a, c, &psi).unwrap();
        let split = pov_probability(a, b, &psi).unwrap() + pov_probability(b, c, &psi).unwrap();
        assert_abs_diff_eq!(whole, split, epsilon = 1e-12);
        prop_assert!((-1e-14..=1.0 + 1e-12).contains(&whole));
    }

    #[test]
    fn naimark_compression_of_minus_angle_is_gw(s in 0usize..40) {
        let n = s as i64;
        let compressed = naimark_compress(&angle_limit_matrix::<f64>(-n, n).unwrap().neg()).unwrap();
        prop_assert_eq!(compressed, gw_phase_matrix(s, -PI).unwrap());
    }
}

#[test]
fn single_precision_angle_operator() {
    let cfg = cylquant::QuantizerConfig::<f32>::new(24, 1.0).unwrap();
    let m = angle_operator(&cylquant::KernelSpec::<f32>::symmetric(), &cfg).unwrap();
    let limit = angle_limit_matrix::<f32>(-24, 24).unwrap();
    assert!(m.max_abs_diff(&limit).unwrap() < 1e-6);
}
