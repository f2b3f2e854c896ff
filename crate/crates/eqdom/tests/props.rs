use eqdom::finalg::{rank, table_len, unrank};
use eqdom::{delta4, El, OpTable, Relation};
use proptest::prelude::*;

/// Independent reference for preservation: walk every selection of columns
/// from the relation and check the componentwise image.
fn preserves_reference(op: &OpTable, rel: &Relation) -> bool {
    let cols: Vec<Vec<El>> = rel
        .tuples
        .iter()
        .map(|&r| unrank(r, rel.universe, rel.arity))
        .collect();
    if cols.is_empty() {
        return true;
    }
    let mut sel = vec![0usize; op.arity];
    loop {
        let image: Vec<El> = (0..rel.arity)
            .map(|c| {
                let args: Vec<El> = sel.iter().map(|&s| cols[s][c]).collect();
                op.eval(&args)
            })
            .collect();
        if !rel.contains_rank(rank(&image, rel.universe)) {
            return false;
        }
        let mut i = op.arity;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            sel[i] += 1;
            if sel[i] < cols.len() {
                break;
            }
            sel[i] = 0;
        }
    }
}

proptest! {
    #[test]
    fn rank_unrank_roundtrip(q in 2usize..6, n in 1usize..6, seed in any::<u64>()) {
        let r = (seed as usize) % table_len(q, n);
        let t = unrank(r, q, n);
        prop_assert_eq!(t.len(), n);
        prop_assert!(t.iter().all(|&x| (x as usize) < q));
        prop_assert_eq!(rank(&t, q), r);
    }

    #[test]
    fn preserves_matches_reference(
        q in 2usize..4,
        n in 1usize..4,
        op_vals in prop::collection::vec(0u8..4, 1..81),
        rel_bits in prop::collection::vec(any::<bool>(), 1..81),
    ) {
        let len = table_len(q, n);
        let values: Vec<El> = (0..len).map(|i| op_vals[i % op_vals.len()] % q as El).collect();
        let op = OpTable::new("f", n, q, values).unwrap();
        let k = 2usize;
        let ranks: Vec<usize> = (0..table_len(q, k))
            .filter(|&r| rel_bits[r % rel_bits.len()])
            .collect();
        let rel = Relation::from_ranks(k, q, ranks).unwrap();
        prop_assert_eq!(op.preserves(&rel).unwrap(), preserves_reference(&op, &rel));
    }

    #[test]
    fn delta4_cardinality(q in 1usize..6) {
        prop_assert_eq!(delta4(q).tuples.len(), 2 * q * q * q - q * q);
    }

    #[test]
    fn conjugation_by_an_involution_is_an_involution(
        q in 2usize..4,
        n in 1usize..4,
        op_vals in prop::collection::vec(0u8..4, 1..81),
        swap in 0u8..3,
    ) {
        let len = table_len(q, n);
        let values: Vec<El> = (0..len).map(|i| op_vals[i % op_vals.len()] % q as El).collect();
        let op = OpTable::new("f", n, q, values).unwrap();
        // transposition of two elements (or identity when they coincide)
        let (a, b) = (0u8, swap % q as El);
        let perm = OpTable::from_fn("s", 1, q, |t| {
            if t[0] == a { b } else if t[0] == b { a } else { t[0] }
        });
        let twice = op.conjugate(&perm).unwrap().conjugate(&perm).unwrap();
        prop_assert_eq!(twice.values, op.values);
    }

    #[test]
    fn projections_have_one_essential_argument(q in 2usize..5, n in 1usize..5, i in 1usize..5) {
        let i = (i - 1) % n + 1;
        let p = OpTable::projection(n, i, q);
        prop_assert_eq!(p.essential_arity(), 1);
        let t = unrank(3 % table_len(q, n), q, n);
        prop_assert_eq!(p.eval(&t), t[i - 1]);
    }
}

/// Force the large-relation search path (selection count above the brute
/// threshold) and compare with the reference walk on a case small enough to
/// walk anyway: 3 columns over a 7-ary relation with 120+ tuples.
#[test]
fn preserves_targeted_path_matches_reference() {
    let q = 2usize;
    let k = 7usize;
    // drop a handful of tuples from the full relation
    let holes = [0usize, 5, 31, 64, 100, 127];
    let ranks: Vec<usize> = (0..table_len(q, k)).filter(|r| !holes.contains(r)).collect();
    let rel = Relation::from_ranks(k, q, ranks).unwrap();
    assert!((rel.tuples.len() as f64).powi(3) > 1_000_000.0);
    for pattern in 0..16u8 {
        let op = OpTable::from_fn("f", 3, q, |t| {
            let idx = (t[0] << 2) | (t[1] << 1) | t[2];
            (pattern >> (idx & 3)) & 1
        });
        assert_eq!(
            op.preserves(&rel).unwrap(),
            preserves_reference(&op, &rel),
            "pattern {pattern}"
        );
    }
}
