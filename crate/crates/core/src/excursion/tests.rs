use super::special::{airy_zeros, area_u, gamma, tricomi_u_positive, Airy};
use super::*;
use crate::hamiltonian::{build_hamiltonian, gap_row, state_vector, Boundary, ChainSpec, EigenOptions, LinearOperator};
use crate::walks::motzkin_number;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gamma_matches_known_values() {
    assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
    assert!(rel(gamma(5.0), 24.0) < 1e-14);
    assert!(rel(gamma(1.0 / 3.0), 2.678_938_534_707_747_6) < 1e-14);
    assert!(rel(gamma(1.0 / 6.0), 5.566_316_001_780_235) < 1e-14);
    assert!(rel(gamma(-0.5), -2.0 * PI.sqrt()) < 1e-14);
    assert!(rel(gamma(1.0 / 6.0) * gamma(5.0 / 6.0), 2.0 * PI) < 1e-14);
}

#[test]
fn airy_values_and_zeros() {
    let airy = Airy::new(45.0);
    // Reference values of Ai.
    for (x, want) in [
        (0.0, 0.355_028_053_887_817_2),
        (1.0, 0.135_292_416_312_881_4),
        (-1.0, 0.535_560_883_292_352_1),
        (-10.0, 0.040_241_238_486_443_19),
        (-30.0, -0.087_968_188_456_842_16),
    ] {
        let got = airy.ai(x).unwrap();
        assert!((got - want).abs() < 1e-12, "Ai({x}) = {got}, want {want}");
    }
    assert!(airy.ai(-50.0).is_err());

    let zeros = airy_zeros(DEFAULT_ZEROS).unwrap();
    assert_eq!(zeros.len(), DEFAULT_ZEROS);
    assert!(zeros[0] > -2.4 && zeros[0] < -2.3);
    assert!((zeros[0] + 2.338_107_410_459_767).abs() < 1e-12);
    assert!((zeros[1] + 4.087_949_444_130_970).abs() < 1e-12);
    assert!((zeros[9] + 12.828_776_752_865_757).abs() < 1e-11);
    assert!(zeros.windows(2).all(|w| w[1] < w[0]));
    for &a in &zeros {
        assert!(airy.ai(a).unwrap().abs() < 1e-10);
    }
}

/// `U` from Kummer's `M` series; fine for moderate `z` where the two pieces do not cancel.
fn u_from_kummer(a: f64, b: f64, z: f64) -> f64 {
    let kummer = |a: f64, b: f64| {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 0..400 {
            let k = k as f64;
            term *= (a + k) / (b + k) * z / (k + 1.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    };
    gamma(1.0 - b) / gamma(a - b + 1.0) * kummer(a, b)
        + gamma(b - 1.0) / gamma(a) * z.powf(1.0 - b) * kummer(a - b + 1.0, 2.0 - b)
}

/// Large-`z` expansion `U ~ z^{−a} Σ (a)_k (a−b+1)_k / k! (−z)^{−k}`.
fn u_asymptotic(a: f64, b: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..30 {
        let k = k as f64;
        term *= -(a + k) * (a - b + 1.0 + k) / ((k + 1.0) * z);
        sum += term;
    }
    z.powf(-a) * sum
}

#[test]
fn confluent_u_matches_series_and_asymptotics() {
    for z in [0.02, 0.1, 0.5, 1.0, 2.0, 5.0] {
        assert!(rel(area_u(z), u_from_kummer(-5.0 / 6.0, 4.0 / 3.0, z)) < 1e-11, "z = {z}");
        assert!(rel(tricomi_u_positive(1.0 / 6.0, 4.0 / 3.0, z), u_from_kummer(1.0 / 6.0, 4.0 / 3.0, z)) < 1e-11);
    }
    for z in [100.0, 300.0, 700.0] {
        assert!(rel(area_u(z), u_asymptotic(-5.0 / 6.0, 4.0 / 3.0, z)) < 1e-12, "z = {z}");
    }
}

#[test]
fn recursion_constants_and_moments() {
    let ks = moment_constants(4);
    let frac = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    assert_eq!(ks, vec![frac(-1, 2), frac(1, 8), frac(5, 64), frac(15, 128), frac(1105, 4096)]);

    let m = excursion_moments(4).unwrap();
    assert_eq!(m[0], 1.0);
    assert!((m[1] - 0.626_657).abs() < 1e-6);
    assert!(rel(m[1], area_mean()) < 1e-13);
    assert!(rel(m[2], 5.0 / 12.0) < 1e-13);
    // The familiar 7-digit figure 0.1548144 sits 2.8e-7 below the exact value 0.15481468.
    assert!(((m[2] - m[1] * m[1]).sqrt() - 0.154_814_4).abs() < 5e-7);
    assert!(((m[2] - m[1] * m[1]).sqrt() - area_std()).abs() < 1e-14);
    // Closed forms of the third and fourth moments.
    assert!(rel(m[3], 15.0 * (2.0 * PI).sqrt() / 128.0) < 1e-13);
    assert!(rel(m[4], 221.0 / 1008.0) < 1e-13);
    assert!(excursion_moments(MAX_MOMENT + 1).is_err());
}

#[test]
fn moments_approach_large_order_form() {
    let m = excursion_moments(MAX_MOMENT).unwrap();
    let ratio = |k: usize| m[k] / moment_asymptotic(k);
    assert!((ratio(25) - 1.0).abs() < 0.15, "ratio at 25 = {}", ratio(25));
    assert!((ratio(30) - 1.0).abs() < (ratio(10) - 1.0).abs());
}

#[test]
fn density_normalization_mean_and_moments() {
    let density = ExcursionDensity::standard();
    let mass = density.integrate_against(|_| 1.0, 1e-12);
    assert!((mass.value - 1.0).abs() < 1e-6, "mass {}", mass.value);
    let exact = excursion_moments(4).unwrap();
    let mean = density.moment(1);
    assert!((mean - area_mean()).abs() < 1e-6);
    let second = density.moment(2);
    assert!(((second - mean * mean).sqrt() - 0.154_814_4).abs() < 1e-5);
    for k in 1..=4 {
        assert!((density.moment(k as i32) - exact[k]).abs() < 1e-5, "moment {k}");
    }
}

#[test]
fn density_pointwise_behaviour() {
    let density = ExcursionDensity::standard();
    assert!(density.density(0.05).unwrap().abs() < 1e-8);
    assert!(density.density(0.0).is_err());
    assert!(density.density(-1.0).is_err());
    let v = density.eval(0.6).unwrap();
    assert!(v.value > 1.0 && v.truncation < 1e-12 * v.value);
    let (mode, peak) = density.mode();
    assert!(mode > 0.5 && mode < 0.7 && peak > 2.0 && peak < 3.0, "mode {mode} peak {peak}");
    // Frozen from an independent 40-digit evaluation of the same series (60 zeros). Beyond the
    // mode the terms cancel, so the comparison is absolute.
    for (x, want, tol) in [
        (0.6, 2.630_134_649_576_530_6, 1e-13),
        (1.5, 2.915_238_278_044_315_8e-4, 1e-15),
        (2.0, 1.460_425_810_204_140_4e-8, 1e-15),
        (2.5, 3.161_078_011_998_471_6e-14, 1e-15),
    ] {
        assert!((density.density(x).unwrap() - want).abs() < tol, "f({x})");
    }
    let grid = density.tabulate(0.01, 3.0, 300).unwrap();
    assert_eq!(grid.len(), 300);
    assert_eq!(grid[299].0, 3.0);
}

#[test]
fn fewer_zeros_change_only_the_small_area_side() {
    let full = ExcursionDensity::standard();
    let short = ExcursionDensity::new(10).unwrap();
    for x in [0.4, 0.6, 1.0, 1.5] {
        assert!((full.density(x).unwrap() - short.density(x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn characteristic_function_properties() {
    let density = ExcursionDensity::standard();
    let at_zero = density.characteristic(0.0).unwrap();
    assert!((at_zero.value - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    for theta in [0.1, 0.5, 1.0, 2.5, 6.0, 20.0, 100.0] {
        let f = density.characteristic(theta).unwrap();
        assert!(f.value.norm() <= 1.0, "theta {theta}");
        assert!(f.error <= 1e-6);
        let g = density.characteristic(-theta).unwrap();
        assert!((f.value - g.value.conj()).norm() < 1e-9);
    }
    // Small-θ slope is 2πi·E[B].
    let h = 1e-4;
    let f = density.characteristic(h).unwrap().value;
    assert!((f.im / (2.0 * PI * h) - area_mean()).abs() < 1e-5);
    assert!(density.characteristic(101.0).is_err());
}

#[test]
fn level_set_rectangle_bounds_the_characteristic_function() {
    let density = ExcursionDensity::standard();
    let set = density.level_set(area_std()).unwrap();
    assert!((set.x2 - set.x1 - area_std()).abs() < 1e-9);
    assert!(set.x1 < set.mode && set.mode < set.x2);
    assert!((density.density(set.x1).unwrap() - set.height).abs() < 1e-9);
    assert!((density.density(set.x2).unwrap() - set.height).abs() < 1e-9);
    assert!(set.height > 1.0, "height {}", set.height);
    let f = density.characteristic(set.frequency()).unwrap();
    assert!(f.value.norm() <= set.rectangle_bound());
    assert!(density.level_set(10.0).is_err());
}

#[test]
fn trial_profile_counts_and_two_area_routes() {
    for (two_n, s) in [(2, 1), (6, 1), (8, 1), (6, 2), (4, 3)] {
        let profile = area_profile(two_n, s).unwrap();
        assert_eq!(Some(profile.walks), motzkin_number(two_n, s).to_u64());
        let state = trial_state(two_n, s, 0.0).unwrap();
        let mut hist = vec![0u64; profile.counts.len()];
        for &a in &state.areas {
            hist[a as usize] += 1;
        }
        assert_eq!(hist, profile.counts, "two_n = {two_n}, s = {s}");
    }
    // Walks of length 2: 00 (area 0) and ℓr (area 1); one linked pair.
    let p = area_profile(2, 1).unwrap();
    assert_eq!(p.counts, vec![1, 1]);
    assert_eq!(p.move_pairs, 1);
    assert!(area_profile(20, 1).is_err());
    assert!(area_profile(14, 2).is_err());
    assert!(area_profile(7, 1).is_err());
}

#[test]
fn untwisted_state_is_the_ground_state() {
    let e = trial_energy_exact(10, 1, 0.0).unwrap();
    assert!((e.overlap - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(e.energy, 0.0);
    let state = trial_state(8, 2, 0.3).unwrap();
    assert!((state.norm_sq() - 1.0).abs() < 1e-12);
    for i in [0, state.indices.len() / 2, state.indices.len() - 1] {
        assert!((state.amplitude(i).norm() - state.modulus()).abs() < 1e-15);
    }
}

#[test]
fn energy_and_overlap_match_the_hamiltonian() {
    for (two_n, s, twist) in [(6, 1, 0.21), (8, 1, trial_twist(8)), (6, 2, 0.37)] {
        let exact = trial_energy_exact(two_n, s, twist).unwrap();
        let state = trial_state(two_n, s, twist).unwrap();
        let (re, im) = state.dense_parts();
        let h = build_hamiltonian(&ChainSpec::new(two_n, s, Boundary::MotzkinBoundary)).unwrap();
        let energy = h.expectation(&re) + h.expectation(&im);
        assert!((energy - exact.energy).abs() < 1e-12, "two_n = {two_n}, s = {s}: {energy} vs {}", exact.energy);
        let ground = state_vector(two_n, s).unwrap();
        let dot = |v: &[f64]| v.iter().zip(&ground).map(|(a, b)| a * b).sum::<f64>();
        let overlap = Complex64::new(dot(&re), dot(&im));
        assert!((overlap - exact.overlap).norm() < 1e-12);
    }
}

#[test]
fn twist_at_one_standard_deviation_nearly_decouples_from_the_ground_state() {
    // The twist sits at frequency 1/σ in excursion units, where the characteristic function of
    // a near-Gaussian area is of order e^{−2π²}.
    let e = trial_energy_exact(16, 1, trial_twist(16)).unwrap();
    assert!(e.overlap_sq() < 1e-3, "overlap² = {}", e.overlap_sq());
}

#[test]
fn variational_bound_exceeds_the_true_gap() {
    let opts = EigenOptions::default();
    for (two_n, s) in [(6, 1), (8, 1), (10, 1), (6, 2)] {
        let bound = variational_gap_bound(two_n, s).unwrap();
        assert!(bound.overlap_sq <= 0.5);
        assert!(bound.bound.is_finite() && bound.bound > 0.0);
        assert!(bound.sharp_bound <= bound.bound);
        let row = gap_row(&ChainSpec::new(two_n, s, Boundary::MotzkinBoundary), &opts).unwrap();
        assert!(bound.sharp_bound >= row.gap, "two_n = {two_n}: {} < {}", bound.sharp_bound, row.gap);
    }
    // At two_n = 4 the twist and all its doublings are within 2% of an integer, so the phase is
    // almost trivial on integer areas.
    assert!(matches!(variational_gap_bound(4, 1), Err(crate::Error::OverlapTooLarge { .. })));
}

proptest! {
    #[test]
    fn energy_is_even_and_periodic_in_the_twist(twist in -2.0f64..2.0, two_n in (1usize..=5).prop_map(|k| 2 * k)) {
        let p = area_profile(two_n, 1).unwrap();
        prop_assert!((p.energy(twist) - p.energy(-twist)).abs() < 1e-12);
        prop_assert!((p.energy(twist) - p.energy(twist + 1.0)).abs() < 1e-9);
        prop_assert!((p.overlap(twist) - p.overlap(-twist).conj()).norm() < 1e-12);
        prop_assert!(p.overlap(twist).norm() <= 1.0 + 1e-12);
    }
}

