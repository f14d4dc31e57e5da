use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistlat::curves;
use twistlat::hyp::H2Point;
use twistlat::lattice::{count_twist_lattice, count_twist_lattice_with, Powers};
use twistlat::torus::{intersection_number, twist_on_slope, twist_on_structure, MarkoffStructure, Slope, TwistSpec};

fn slope_strategy() -> impl Strategy<Value = Slope> {
    (-40i64..=40, 0i64..=40).prop_filter_map("primitive", |(p, q)| Slope::new(p, q).ok())
}

fn power_strategy() -> impl Strategy<Value = i64> {
    prop_oneof![-30i64..=-1, 1i64..=30]
}

fn powers_strategy() -> impl Strategy<Value = Powers> {
    prop_oneof![Just(Powers::Unit), Just(Powers::All), (1i64..4).prop_map(Powers::Fixed)]
}

fn structure(seed: u64) -> MarkoffStructure {
    MarkoffStructure::sample_thick(&mut ChaCha8Rng::seed_from_u64(seed), 2.2, 6.0, 0.3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twist_then_inverse_is_identity(a in slope_strategy(), b in slope_strategy(), n in power_strategy()) {
        let t = TwistSpec::new(a, n).unwrap();
        prop_assert_eq!(twist_on_slope(t.inverse(), twist_on_slope(t, b)), b);
    }

    #[test]
    fn twists_preserve_intersection(a in slope_strategy(), b in slope_strategy(), c in slope_strategy(), n in power_strategy()) {
        let t = TwistSpec::new(a, n).unwrap();
        prop_assert_eq!(intersection_number(twist_on_slope(t, b), twist_on_slope(t, c)), intersection_number(b, c));
    }

    #[test]
    fn remarked_structure_carries_lengths(seed in 0u64..1000, a in slope_strategy(), s in slope_strategy(), n in power_strategy()) {
        let x = structure(seed);
        let t = TwistSpec::new(a, n).unwrap();
        let y = twist_on_structure(&x, t).unwrap();
        let (lx, ly) = (x.length(s), y.length(twist_on_slope(t, s)));
        prop_assert!((lx - ly).abs() <= 1e-9 * lx.max(1.0), "{} vs {}", lx, ly);
    }

    #[test]
    fn curve_counts_ignore_the_marking(seed in 0u64..1000, a in slope_strategy(), n in -3i64..=3, len in 5.0f64..30.0) {
        prop_assume!(n != 0);
        let x = structure(seed);
        let y = twist_on_structure(&x, TwistSpec::new(a, n).unwrap()).unwrap();
        prop_assert_eq!(curves::count_scc(&x, len), curves::count_scc(&y, len));
    }

    #[test]
    fn lattice_counts_are_modular_invariant(re in -0.5f64..0.5, im in 0.5f64..2.0, r in 0.5f64..5.0, powers in powers_strategy()) {
        let z = H2Point::new(re, im).unwrap();
        let shifted = H2Point::new(re + 1.0, im).unwrap();
        let d = re * re + im * im;
        let inverted = H2Point::new(-re / d, im / d).unwrap();
        let c = count_twist_lattice(z, r, powers);
        prop_assert_eq!(c, count_twist_lattice(shifted, r, powers));
        prop_assert_eq!(c, count_twist_lattice(inverted, r, powers));
    }

    #[test]
    fn doubling_the_search_box_changes_nothing(re in -0.5f64..0.5, im in 0.5f64..2.0, r in 0.5f64..6.0, powers in powers_strategy()) {
        let z = H2Point::new(re, im).unwrap();
        prop_assert_eq!(count_twist_lattice(z, r, powers), count_twist_lattice_with(z, r, powers, 2.0));
    }

    #[test]
    fn lattice_counts_grow_with_radius(re in -0.5f64..0.5, im in 0.5f64..2.0, r in 0.5f64..6.0, dr in 0.0f64..1.0) {
        let z = H2Point::new(re, im).unwrap();
        let unit = count_twist_lattice(z, r, Powers::Unit);
        prop_assert!(unit <= count_twist_lattice(z, r + dr, Powers::Unit));
        prop_assert!(unit <= count_twist_lattice(z, r, Powers::All));
    }
}
