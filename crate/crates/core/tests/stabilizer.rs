use proptest::prelude::*;
use qsc_core::sim::{StateVector, C64};
use qsc_core::stabilizer::*;

/// The printed 16×16 syndrome matrix for three variables: identity except
/// for ancilla flips on the bitstrings with two or more ones.
fn printed_three_variable_syndrome() -> Vec<Vec<u8>> {
    let swapped = [(6, 7), (10, 11), (12, 13), (14, 15)];
    (0..16)
        .map(|r| {
            (0..16)
                .map(|c| {
                    let partner = swapped.iter().find_map(|&(a, b)| {
                        if r == a {
                            Some(b)
                        } else if r == b {
                            Some(a)
                        } else {
                            None
                        }
                    });
                    u8::from(partner.map_or(r == c, |p| p == c))
                })
                .collect()
        })
        .collect()
}

#[test]
fn edge_stabilizer_is_diag_1_1_1_minus1() {
    let s = build_stabilizer(&Constraint::is_edge());
    assert_eq!(
        s.to_dense(),
        vec![
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, -1]
        ]
    );
}

#[test]
fn three_variable_one_hot_diagonal() {
    let s = build_stabilizer(&Constraint::one_hot(3).unwrap());
    assert_eq!(s.diagonal(), &[-1, 1, 1, -1, 1, -1, -1, -1]);
}

#[test]
fn printed_syndrome_matrix_is_at_most_one() {
    let g = build_syndrome_unitary(&Constraint::at_most_one(3).unwrap());
    assert_eq!(g.to_dense(), printed_three_variable_syndrome());
}

#[test]
fn one_hot_syndrome_differs_only_on_empty_bitstring() {
    let one_hot = build_syndrome_unitary(&Constraint::one_hot(3).unwrap()).to_dense();
    let printed = printed_three_variable_syndrome();
    for r in 0..16 {
        if r < 2 {
            assert_ne!(one_hot[r], printed[r]);
        } else {
            assert_eq!(one_hot[r], printed[r], "row {r}");
        }
    }
}

#[test]
fn edge_syndrome_is_toffoli() {
    let g = build_syndrome_unitary(&Constraint::is_edge());
    let m = g.to_complex();
    for idx in 0..8 {
        let mut a = StateVector::basis(3, idx).unwrap();
        let mut b = a.clone();
        // ancilla on qubit 0, variables on qubits 1 and 2
        a.apply_matrix(&m, &[0, 1, 2]).unwrap();
        b.apply_toffoli(1, 2, 0).unwrap();
        assert!(a.fidelity(&b) > 1.0 - 1e-14, "basis {idx}");
    }
}

#[test]
fn syndrome_flips_ancilla_exactly_on_violations() {
    let c = Constraint::from_fn(3, "b0 and not b2", |b| b[0] && !b[2]).unwrap();
    let g = build_syndrome_unitary(&c);
    for b in 0..8usize {
        for a in 0..2usize {
            let expected_a = a ^ usize::from(!c.holds(b));
            assert_eq!(g.image((b << 1) | a), (b << 1) | expected_a);
        }
    }
    let mut psi = StateVector::basis(4, 0b1010).unwrap();
    // b = 0b101 violates: b0 set, b2 set
    psi.apply_matrix(&g.to_complex(), &[0, 1, 2, 3]).unwrap();
    assert_eq!(psi.probabilities()[0b1011], 1.0);
}

#[test]
fn shipped_constraints_pass_algebra_checks() {
    let mut shipped = vec![Constraint::is_edge()];
    for k in 1..=6 {
        shipped.push(Constraint::one_hot(k).unwrap());
        shipped.push(Constraint::at_most_one(k).unwrap());
    }
    for c in &shipped {
        let k = c.arity();
        let report = check_stabilizer_algebra(&[(c.clone(), (0..k).collect())], k).unwrap();
        assert!(report.passed(), "{}", c.label());
        let g = build_syndrome_unitary(c);
        assert!(g.is_permutation() && g.is_involution());
    }
    let items = vec![
        (Constraint::one_hot(3).unwrap(), vec![0, 1, 2]),
        (Constraint::is_edge(), vec![2, 3]),
        (Constraint::at_most_one(2).unwrap(), vec![4, 0]),
    ];
    assert!(check_stabilizer_algebra(&items, 5).unwrap().passed());
}

#[test]
fn algebra_rejects_bad_placements() {
    let c = Constraint::is_edge();
    assert!(check_stabilizer_algebra(&[(c.clone(), vec![0, 0])], 2).is_err());
    assert!(check_stabilizer_algebra(&[(c.clone(), vec![0, 5])], 2).is_err());
    assert!(check_stabilizer_algebra(&[(c, vec![0])], 2).is_err());
}

fn predicate() -> impl Strategy<Value = Constraint> {
    (1usize..=6)
        .prop_flat_map(|k| proptest::collection::vec(any::<bool>(), 1 << k))
        .prop_map(|table| Constraint::from_truth_table(table, "random").unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_predicates_form_stabilizer_group(c in predicate(), d in predicate()) {
        let k = c.arity();
        let s = build_stabilizer(&c);
        for b in 0..1usize << k {
            prop_assert_eq!(s.diagonal()[b] == 1, c.holds(b));
        }
        let g = build_syndrome_unitary(&c);
        prop_assert!(g.is_permutation());
        prop_assert!(g.is_involution());
        let n = k.max(d.arity()) + 1;
        let items = vec![
            (c.clone(), (0..k).collect::<Vec<_>>()),
            (d.clone(), (0..d.arity()).map(|j| n - 1 - j).collect()),
        ];
        let report = check_stabilizer_algebra(&items, n).unwrap();
        prop_assert!(report.passed());
    }

    #[test]
    fn syndrome_copies_violation_onto_ancilla(c in predicate(), seed in any::<u64>()) {
        let k = c.arity();
        let g = build_syndrome_unitary(&c);
        let b = (seed as usize) % (1 << k);
        let mut psi = StateVector::basis(k + 1, b << 1).unwrap();
        let qubits: Vec<usize> = (0..=k).collect();
        psi.apply_matrix(&g.to_complex(), &qubits).unwrap();
        let flipped = psi.amplitude((b << 1) | 1);
        prop_assert_eq!(flipped == C64::new(1.0, 0.0), !c.holds(b));
    }
}
