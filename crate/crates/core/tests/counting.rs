use infreg::analysis::{type_class_brute_force, type_class_count, type_class_from_counts, whittle_brute_force, whittle_count};
use num_bigint::BigUint;

/// Counts sequences of length `n + 1` starting anywhere, grouped by
/// (start, end, transition counts), by walking all `2^(n+1)` sequences once.
fn binary_walk_table(n: u32) -> std::collections::HashMap<(usize, usize, [u64; 4]), u64> {
    let mut table = std::collections::HashMap::new();
    for code in 0u32..1 << (n + 1) {
        let bit = |i: u32| ((code >> i) & 1) as usize;
        let mut f = [0u64; 4];
        for i in 0..n {
            f[bit(i) * 2 + bit(i + 1)] += 1;
        }
        *table.entry((bit(0), bit(n), f)).or_insert(0) += 1;
    }
    table
}

#[test]
fn whittle_agrees_with_enumeration_on_every_binary_matrix_up_to_eight_transitions() {
    for n in 0..=8u64 {
        let table = binary_walk_table(n as u32);
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    let f = vec![vec![a, b], vec![c, d]];
                    for u in 0..2 {
                        for v in 0..2 {
                            let want = table.get(&(u, v, [a, b, c, d])).copied().unwrap_or(0);
                            let got = whittle_count(&f, u, v).unwrap();
                            assert_eq!(got, BigUint::from(want), "F={f:?} u={u} v={v}");
                            if n <= 6 {
                                assert_eq!(whittle_brute_force(&f, u, v).unwrap(), want);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn whittle_spec_walk() {
    assert_eq!(whittle_count(&[vec![0, 1], vec![1, 0]], 0, 0).unwrap(), BigUint::from(1u32));
    assert_eq!(whittle_count(&[vec![0, 0], vec![0, 6]], 1, 1).unwrap(), BigUint::from(1u32));
}

#[test]
fn binary_type_classes_up_to_twelve() {
    for n in 0..=12u64 {
        let mut total = 0u64;
        for k in 0..=n {
            let t = type_class_from_counts(&[k, n - k]).unwrap();
            let brute = type_class_brute_force(&[k, n - k]).unwrap();
            assert_eq!(t.count, BigUint::from(brute), "n={n} k={k}");
            assert!(t.lower_holds && t.upper_holds, "n={n} k={k}");
            total += brute;
        }
        assert_eq!(total, 1 << n);
    }
}

#[test]
fn ternary_type_classes_satisfy_both_bounds() {
    for n in 1..=9u64 {
        for a in 0..=n {
            for b in 0..=n - a {
                let t = type_class_from_counts(&[a, b, n - a - b]).unwrap();
                assert!(t.lower_holds && t.upper_holds);
                assert_eq!(t.count, BigUint::from(type_class_brute_force(&[a, b, n - a - b]).unwrap()));
            }
        }
    }
}

#[test]
fn type_class_from_a_pmf() {
    let t = type_class_count(&[0.25, 0.75], 8).unwrap();
    assert_eq!(t.count, BigUint::from(28u32));
    assert!(type_class_count(&[0.5, 0.5], 3).is_err());
}
