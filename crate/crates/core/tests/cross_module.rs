//! Consistency between modules through the public API only.

use motzkin_core::excursion;
use motzkin_core::field::field_expectation_rational;
use motzkin_core::hamiltonian::{state_vector, verify_frustration_free};
use motzkin_core::markov::{build_heff, DyckBasis};
use motzkin_core::schmidt::{entropy_exact, schmidt_spectrum, spectrum_from_table};
use motzkin_core::walks::{enumerate_walks, motzkin_number, CountTable, Step, WalkFilter};
use motzkin_core::{Boundary, ChainSpec};
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[test]
fn state_vector_holds_every_motzkin_walk_once() {
    for (two_n, s) in [(6, 1), (6, 2), (4, 3)] {
        let psi = state_vector(two_n, s).unwrap();
        let support = psi.iter().filter(|&&a| a != 0.0).count();
        assert_eq!(Some(support as u64), motzkin_number(two_n, s).to_u64());
        let norm: f64 = psi.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(verify_frustration_free(&ChainSpec::new(two_n, s, Boundary::MotzkinBoundary)).unwrap().passed);
    }
}

#[test]
fn entropy_is_the_same_from_either_table_mode() {
    for s in 1..=3 {
        let n = 250;
        let exact = spectrum_from_table(&CountTable::exact(n, s).unwrap()).entropy();
        let log = spectrum_from_table(&CountTable::log_only(n, s).unwrap()).entropy();
        assert!((exact - log).abs() < 1e-10, "s={s}: {exact} vs {log}");
        assert!((entropy_exact(n, s).unwrap() - exact).abs() < 1e-10);
        assert!((schmidt_spectrum(n, s).unwrap().total_probability() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn balanced_field_expectation_is_the_mean_over_the_ground_state() {
    for (len, s) in [(8, 1), (8, 2), (6, 3)] {
        let (mut walks, mut nonflat) = (0u64, 0u64);
        for w in enumerate_walks(len, s, WalkFilter::Motzkin).unwrap() {
            walks += 1;
            nonflat += w.steps.iter().filter(|st| **st != Step::Flat).count() as u64;
        }
        assert_eq!(field_expectation_rational(len, 0, s).unwrap(), BigRational::new(nonflat.into(), walks.into()));
    }
}

#[test]
fn dyck_ground_state_weights_match_walk_counts() {
    // The Dyck-path amplitudes squared sum to one because every Motzkin walk reduces to exactly
    // one Dyck path after its flat steps are removed.
    for (two_n, s) in [(8, 1), (8, 2)] {
        let heff = build_heff(two_n, s).unwrap();
        let total: f64 = heff.ground_state().iter().map(|a| a * a).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(heff.basis.len(), DyckBasis::new(two_n / 2, s).unwrap().len());
    }
}

#[test]
fn trial_overlap_and_characteristic_function_are_small_at_the_default_twist() {
    // The default twist is the frequency 1/σ in excursion units.
    let f = excursion::area_characteristic(1.0 / excursion::area_std()).unwrap().value.norm();
    let t = excursion::trial_energy_exact(16, 1, excursion::trial_twist(16)).unwrap();
    assert!(f < 0.01);
    assert!(t.overlap.norm() < 0.01);
}
