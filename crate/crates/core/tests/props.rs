//! Algebraic invariants of the bit-sequence substrate and the exponent
//! matrices.

use proptest::prelude::*;
use shiftxor_core::{BitSeq, CostLedger, ShiftMatrix};

fn bitseq(max_len: usize) -> impl Strategy<Value = BitSeq> {
    proptest::collection::vec(any::<bool>(), 0..=max_len).prop_map(|b| BitSeq::from_bits(&b))
}

proptest! {
    #[test]
    fn shift_pad_composes(a in bitseq(160), s in 0usize..80, t in 0usize..80) {
        prop_assert_eq!(a.shift_pad(s + t), a.shift_pad(s).shift_pad(t));
    }

    #[test]
    fn add_is_commutative_and_associative(
        a in bitseq(160),
        b in bitseq(160),
        c in bitseq(160),
    ) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn add_is_self_inverse(a in bitseq(160)) {
        prop_assert_eq!(a.add(&a), BitSeq::zeros(a.len_bits()));
        prop_assert_eq!(a.add(&BitSeq::zeros(0)), a);
    }

    #[test]
    fn subseq_undoes_shift_pad(a in bitseq(160), t in 0usize..80) {
        let shifted = a.shift_pad(t);
        prop_assert_eq!(shifted.subseq(t + 1, t + a.len_bits()), a);
    }

    #[test]
    fn padding_stays_canonical(a in bitseq(160), b in bitseq(160), t in 0usize..80) {
        prop_assert!(a.shift_pad(t).has_canonical_padding());
        prop_assert!(a.add(&b).has_canonical_padding());
        prop_assert!(a.subseq(1 + t, t + 40).has_canonical_padding());
    }

    #[test]
    fn xor_into_is_involutive_and_matches_bitwise(
        dst_bits in proptest::collection::vec(any::<bool>(), 1..200),
        src_bits in proptest::collection::vec(any::<bool>(), 1..200),
        d0 in 0usize..64,
        s0 in 0usize..64,
    ) {
        let ledger = CostLedger::new();
        let dst = BitSeq::from_bits(&dst_bits);
        let src = BitSeq::from_bits(&src_bits);
        let d0 = d0 % dst.len_bits();
        let s0 = s0 % src.len_bits();
        let count = (dst.len_bits() - d0).min(src.len_bits() - s0);
        let mut fast = dst.clone();
        fast.xor_into(d0, &src, s0 + 1, count, &ledger);
        let mut slow = dst.clone();
        slow.xor_into_bitwise(d0, &src, s0 + 1, count, &ledger);
        prop_assert_eq!(&fast, &slow);
        prop_assert!(fast.has_canonical_padding());
        fast.xor_into(d0, &src, s0 + 1, count, &ledger);
        prop_assert_eq!(fast, dst);
    }

    #[test]
    fn bytes_and_hex_round_trip(a in bitseq(200)) {
        let n = a.len_bits();
        prop_assert_eq!(BitSeq::from_bytes_le(&a.to_bytes_le(), n).unwrap(), a.clone());
        prop_assert_eq!(BitSeq::from_hex(&a.to_hex(), n).unwrap(), a);
    }
}

#[test]
fn submatrices_of_rid_matrices_are_rid() {
    for seed in 0..60u64 {
        let rows = 2 + (seed % 5) as usize;
        let cols = 2 + (seed / 5 % 5) as usize;
        let m = ShiftMatrix::random_rid(rows, cols, seed, 3);
        assert!(m.check_rid());
        // every contiguous and strided subset stays RID
        let row_sets: Vec<Vec<usize>> = vec![
            (1..=rows).collect(),
            (2..=rows).collect(),
            (1..=rows).step_by(2).collect(),
            vec![1, rows],
        ];
        let col_sets: Vec<Vec<usize>> = vec![
            (1..=cols).collect(),
            (1..=cols.max(2) - 1).collect(),
            (1..=cols).step_by(2).collect(),
            vec![cols],
        ];
        for rs in &row_sets {
            for cs in &col_sets {
                let sub = m.submatrix(rs, cs).unwrap();
                assert!(sub.check_rid(), "seed {seed} rows {rs:?} cols {cs:?}");
                assert!(sub.check_rid_naive(), "seed {seed} rows {rs:?} cols {cs:?}");
            }
        }
    }
}

#[test]
fn fast_rid_check_agrees_with_naive_on_mutations() {
    let mut mismatches = 0;
    for seed in 0..200u64 {
        let m = ShiftMatrix::random_rid(4, 4, seed, 2);
        // perturb one entry up or down and compare both checkers
        let mut entries: Vec<u32> = Vec::new();
        for i in 1..=4 {
            for j in 1..=4 {
                entries.push(m.exp(i, j));
            }
        }
        let pos = (seed as usize * 7) % 16;
        let bump = if seed % 2 == 0 { 1 } else { u32::MAX };
        entries[pos] = entries[pos].wrapping_add(bump).min(1 << 20);
        if entries[pos] == u32::MAX {
            entries[pos] = 0;
        }
        let mutated = ShiftMatrix::new(4, 4, entries).unwrap();
        assert_eq!(mutated.check_rid(), mutated.check_rid_naive(), "seed {seed}");
        if !mutated.check_rid() {
            mismatches += 1;
        }
    }
    // the mutation campaign must actually produce non-RID matrices
    assert!(mismatches > 50);
}

/// For any RID k x k matrix and 1 <= u < v < k, the phase lengths satisfy
/// t[k-v][v+1] - t[k-v][u] < sum(L_b for b in u..=v) < t[k-u][v+1] - t[k-u][u].
#[test]
fn phase_length_sums_are_bracketed_by_exponent_differences() {
    for seed in 0..300u64 {
        let k = 3 + (seed % 4) as usize;
        let m = ShiftMatrix::random_rid(k, k, seed, 4);
        let plan = m.phase_plan(10).unwrap();
        for u in 1..k {
            for v in (u + 1)..k {
                let sum: i64 = (u..=v).map(|b| plan.phase_len(b) as i64).sum();
                let lower = i64::from(m.exp(k - v, v + 1)) - i64::from(m.exp(k - v, u));
                let upper = i64::from(m.exp(k - u, v + 1)) - i64::from(m.exp(k - u, u));
                assert!(lower < sum, "seed {seed} u {u} v {v}: {lower} !< {sum}");
                assert!(sum < upper, "seed {seed} u {u} v {v}: {sum} !< {upper}");
            }
        }
    }
}
