//! Property tests for the algebraic and statistical invariants.

use proptest::prelude::*;
use qkdsim_core::pauli::{
    conjugate, error_to_bell_label, parse_pauli, BellLabel, BellPattern, Pauli, PauliString,
    Phase,
};
use qkdsim_core::sampling::estimate_singlet_fraction;

fn pauli_class() -> impl Strategy<Value = Pauli> {
    prop_oneof![
        Just(Pauli::I),
        Just(Pauli::X),
        Just(Pauli::Y),
        Just(Pauli::Z),
    ]
}

fn phase() -> impl Strategy<Value = Phase> {
    prop_oneof![
        Just(Phase::PlusOne),
        Just(Phase::PlusI),
        Just(Phase::MinusOne),
        Just(Phase::MinusI),
    ]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(pauli_class(), n), phase())
        .prop_map(|(classes, ph)| PauliString::from_classes(&classes).with_phase(ph))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_associative(
        (a, b, c) in (1usize..80).prop_flat_map(|n| {
            (pauli_string(n), pauli_string(n), pauli_string(n))
        })
    ) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn every_element_squares_to_the_identity_class(
        p in (1usize..80).prop_flat_map(pauli_string)
    ) {
        let sq = p.mul(&p).unwrap();
        prop_assert_eq!(sq.weight(), 0);
        prop_assert!(matches!(sq.phase(), Phase::PlusOne | Phase::MinusOne));
    }

    #[test]
    fn conjugation_preserves_classes_with_real_sign(
        (j_classes, i) in (1usize..40).prop_flat_map(|n| {
            (proptest::collection::vec(pauli_class(), n), pauli_string(n))
        })
    ) {
        let j = PauliString::from_classes(&j_classes);
        let r = conjugate(&j, &i).unwrap();
        prop_assert_eq!(r.classes(), i.classes());
        let sign_flips = j.anticommutes(&i);
        let expected_phase = if sign_flips { i.phase().negate() } else { i.phase() };
        prop_assert_eq!(r.phase(), expected_phase);
    }

    #[test]
    fn text_round_trip(p in (1usize..30).prop_flat_map(pauli_string)) {
        let text = p.to_string();
        let back = parse_pauli(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn bell_pattern_hex_round_trip(
        bits in proptest::collection::vec(0u8..4, 1..100)
    ) {
        let labels: Vec<BellLabel> =
            bits.iter().map(|&b| BellLabel::from_bits(b).unwrap()).collect();
        let pattern = BellPattern::new(labels);
        let back = BellPattern::from_hex(&pattern.to_hex(), pattern.n_pairs()).unwrap();
        prop_assert_eq!(back, pattern);
    }

    #[test]
    fn label_error_maps_are_mutually_inverse(bits in 0u8..4) {
        let label = BellLabel::from_bits(bits).unwrap();
        let e = qkdsim_core::pauli::bell_label_to_error(label);
        prop_assert_eq!(error_to_bell_label(e), label);
    }

    #[test]
    fn estimator_stays_in_range(m in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((m as f64) * frac).round() as usize;
        let k = k.min(m);
        let f = estimate_singlet_fraction(m, k).unwrap();
        prop_assert!((-0.5..=1.0).contains(&f));
    }

    #[test]
    fn weight_counts_non_identity_positions(
        classes in proptest::collection::vec(pauli_class(), 1..200)
    ) {
        let p = PauliString::from_classes(&classes);
        let expected = classes.iter().filter(|&&c| c != Pauli::I).count();
        prop_assert_eq!(p.weight(), expected);
    }
}
