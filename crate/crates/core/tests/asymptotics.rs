//! Cross-module checks of the prime-sum asymptotics at desk scale: diagonal
//! ratios, the twisted-equivalence dichotomy, and main-term tracking for
//! two-field convolutions with the shift supplied by the detector.

use std::sync::Arc;

use num_complex::Complex64;
use rslab_core::arithmetic::PrimeTable;
use rslab_core::characters::DirichletCharacter;
use rslab_core::equivalence::{default_test_primes, detect_twist, twisted_pairs};
use rslab_core::fields::CyclicExtension;
use rslab_core::pnt::{main_term, partial_sum};
use rslab_core::rankin::CoefficientStream;
use rslab_core::reps::{ramanujan_tau_table, AutomorphicRepQ, BaseChangedRep};

fn quad_field() -> CyclicExtension {
    CyclicExtension::new(DirichletCharacter::of_order(5, 2).unwrap()).unwrap()
}

fn cubic_field() -> CyclicExtension {
    CyclicExtension::new(DirichletCharacter::of_order(7, 3).unwrap()).unwrap()
}

#[test]
fn diagonal_ratio_near_one_on_shipped_instances() {
    let x = 100_000u64;
    let primes = PrimeTable::sieve(x).unwrap();
    let tau = Arc::new(ramanujan_tau_table(x).unwrap());
    let instances: Vec<(&str, BaseChangedRep)> = vec![
        (
            "trivial over Q",
            BaseChangedRep::over_q(AutomorphicRepQ::trivial()),
        ),
        (
            "quadratic character over Q",
            BaseChangedRep::over_q(AutomorphicRepQ::character_rep(
                DirichletCharacter::of_order(5, 2).unwrap(),
            )),
        ),
        (
            "Delta over Q",
            BaseChangedRep::over_q(AutomorphicRepQ::cusp_form_rep(Arc::clone(&tau))),
        ),
        (
            "trivial over quadratic E",
            BaseChangedRep::new(AutomorphicRepQ::trivial(), quad_field()),
        ),
        (
            "Delta over cubic F",
            BaseChangedRep::new(
                AutomorphicRepQ::cusp_form_rep(Arc::clone(&tau)),
                cubic_field(),
            ),
        ),
    ];
    for (name, bc) in &instances {
        let stream = CoefficientStream::single_field(bc, bc, x, &primes).unwrap();
        let s = partial_sum(&stream, x).unwrap();
        let ratio = s.re / x as f64;
        assert!(s.im.abs() < 1e-6);
        assert!(
            (0.9..=1.1).contains(&ratio),
            "{name}: S(x)/x = {ratio} outside [0.9, 1.1]"
        );
    }
}

#[test]
fn dichotomy_over_q_with_detected_shift() {
    let x = 1_000_000u64;
    let primes = PrimeTable::sieve(x).unwrap();

    // twisted-equivalent pair: the sum must track the shifted main term
    let pi = AutomorphicRepQ::trivial();
    let pi_shifted = pi.twist(&DirichletCharacter::trivial(), 0.7).unwrap();
    let test_primes = default_test_primes(&[&pi, &pi_shifted], &[], 25).unwrap();
    let tau0 = detect_twist(&pi, &pi_shifted, &test_primes, 1e-9)
        .unwrap()
        .expect("constructed twist must be detected")
        .tau;
    let a = BaseChangedRep::over_q(pi);
    let b = BaseChangedRep::over_q(pi_shifted);
    let stream = CoefficientStream::single_field(&a, &b, x, &primes).unwrap();
    let s = partial_sum(&stream, x).unwrap();
    let err = (s - main_term(x as f64, tau0)).norm() / x as f64;
    assert!(err <= 0.05, "relative error {err}");

    // non-equivalent pair: the sum itself is o(x)
    let chi5 = AutomorphicRepQ::character_rep(DirichletCharacter::of_order(5, 2).unwrap());
    let chi7 = AutomorphicRepQ::character_rep(DirichletCharacter::of_order(7, 3).unwrap());
    let test_primes = default_test_primes(&[&chi5, &chi7], &[], 25).unwrap();
    assert!(detect_twist(&chi5, &chi7, &test_primes, 1e-9)
        .unwrap()
        .is_none());
    let a = BaseChangedRep::over_q(chi5);
    let b = BaseChangedRep::over_q(chi7);
    let stream = CoefficientStream::single_field(&a, &b, x, &primes).unwrap();
    let s = partial_sum(&stream, x).unwrap();
    assert!(
        s.norm() / x as f64 <= 0.02,
        "off-diagonal |S|/x = {}",
        s.norm() / x as f64
    );

    // distinct characters of the same conductor decay just as well
    let gen5 = AutomorphicRepQ::character_rep(DirichletCharacter::of_order(5, 4).unwrap());
    let quad5 = AutomorphicRepQ::character_rep(DirichletCharacter::of_order(5, 2).unwrap());
    let a = BaseChangedRep::over_q(gen5);
    let b = BaseChangedRep::over_q(quad5);
    let stream = CoefficientStream::single_field(&a, &b, x, &primes).unwrap();
    let s = partial_sum(&stream, x).unwrap();
    assert!(
        s.norm() / x as f64 <= 0.02,
        "same-conductor |S|/x = {}",
        s.norm() / x as f64
    );
}

#[test]
fn base_change_main_term_tracks_detected_shift() {
    // E and F of coprime prime degrees, descents arranged twisted-equivalent
    // at (i0, j0) = (1, 0) with theorem-side shift 0.3
    let x = 1_000_000u64;
    let primes = PrimeTable::sieve(x).unwrap();
    let eta = DirichletCharacter::of_order(5, 2).unwrap();
    let psi = DirichletCharacter::of_order(7, 3).unwrap();
    let pi = AutomorphicRepQ::trivial();
    let pi_prime = pi.twist(&eta, 0.3).unwrap();

    let test_primes = default_test_primes(&[&pi, &pi_prime], &[&eta, &psi], 25).unwrap();
    let matches = twisted_pairs(&pi, &eta, &pi_prime, &psi, &test_primes, 1e-9).unwrap();
    assert_eq!(matches.len(), 1);
    assert_eq!((matches[0].i, matches[0].j), (1, 0));
    // the match records pi eta^i = pi' psi^j |det|^{i tau}; the pole of the
    // convolution sits at 1 - i tau, so the main-term shift is the negative
    let tau0 = -matches[0].tau;
    assert!((tau0 - 0.3).abs() < 1e-9);

    let a = BaseChangedRep::new(pi, quad_field());
    let b = BaseChangedRep::new(pi_prime, cubic_field());
    let stream = CoefficientStream::base_change(&a, &b, x, &primes).unwrap();
    let s = partial_sum(&stream, x).unwrap();
    let err = (s - main_term(x as f64, tau0)).norm() / x as f64;
    assert!(err <= 0.10, "relative error {err}");
}

#[test]
fn base_change_stream_reduces_to_plain_psi_over_q() {
    let primes = PrimeTable::sieve(10_000).unwrap();
    let a = BaseChangedRep::over_q(AutomorphicRepQ::trivial());
    let single = CoefficientStream::single_field(&a, &a, 10_000, &primes).unwrap();
    let bc = CoefficientStream::base_change(&a, &a, 10_000, &primes).unwrap();
    let s1 = partial_sum(&single, 10_000).unwrap();
    let s2 = partial_sum(&bc, 10_000).unwrap();
    assert!((s1 - s2).norm() < 1e-9);
    assert!((s1 - Complex64::new(10013.39669326311, 0.0)).norm() < 1e-6); // psi(10^4)
}
