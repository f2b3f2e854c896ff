use eqdom::alggeo::{
    build_delta_indicator_malcev, is_equationally_additive, minimal_boolean_witness,
    solve_system, sudoku_collapse, AdditivityObstruction,
};
use eqdom::clones::SearchOutcome;
use eqdom::conlat::GenMode;
use eqdom::{delta4, El, FiniteAlgebra, OpTable};

const CAP: usize = 2_000_000;

fn field(q: usize) -> FiniteAlgebra {
    let add = OpTable::from_fn("add", 2, q, |t| ((t[0] as usize + t[1] as usize) % q) as El);
    let mul = OpTable::from_fn("mul", 2, q, |t| ((t[0] as usize * t[1] as usize) % q) as El);
    let neg = OpTable::from_fn("neg", 1, q, |t| ((q - t[0] as usize) % q) as El);
    FiniteAlgebra::new(format!("f{q}"), q, vec![add, mul, neg]).unwrap()
}

fn zmod_group(q: usize) -> FiniteAlgebra {
    let add = OpTable::from_fn("add", 2, q, |t| ((t[0] as usize + t[1] as usize) % q) as El);
    let neg = OpTable::from_fn("neg", 1, q, |t| ((q - t[0] as usize) % q) as El);
    FiniteAlgebra::new(format!("z{q}"), q, vec![add, neg]).unwrap()
}

/// 4-ary indicator (x1 - x2)(x3 - x4) over the prime field.
fn field_indicator(q: usize) -> OpTable {
    OpTable::from_fn("f", 4, q, |t| {
        let d1 = (q + t[0] as usize - t[1] as usize) % q;
        let d2 = (q + t[2] as usize - t[3] as usize) % q;
        ((d1 * d2) % q) as El
    })
}

#[test]
fn f2_additive_direct() {
    for mode in [GenMode::Term, GenMode::Polynomial] {
        match is_equationally_additive(&field(2), mode, CAP) {
            SearchOutcome::Proven(sys) => {
                assert_eq!(solve_system(&sys).tuples, delta4(2).tuples);
            }
            other => panic!("f2 should be proven additive, got {other:?}"),
        }
    }
}

#[test]
fn f3_additive_direct() {
    match is_equationally_additive(&field(3), GenMode::Polynomial, CAP) {
        SearchOutcome::Proven(sys) => {
            assert_eq!(solve_system(&sys).tuples, delta4(3).tuples);
        }
        other => panic!("f3 should be proven additive, got {other:?}"),
    }
}

#[test]
fn z3_group_refuted() {
    match is_equationally_additive(&zmod_group(3), GenMode::Polynomial, CAP) {
        SearchOutcome::Refuted(AdditivityObstruction::Uncovered { .. }) => {}
        other => panic!("z3 should be refuted with an uncovered tuple, got {other:?}"),
    }
}

#[test]
fn essentially_unary_refuted() {
    let neg = OpTable::from_fn("not", 1, 2, |t| 1 - t[0]);
    let alg = FiniteAlgebra::new("neg2", 2, vec![neg]).unwrap();
    match is_equationally_additive(&alg, GenMode::Polynomial, CAP) {
        SearchOutcome::Refuted(AdditivityObstruction::EssentiallyUnary) => {}
        other => panic!("expected the essentially-unary refutation, got {other:?}"),
    }
}

#[test]
fn sudoku_on_field_indicators() {
    for q in [2usize, 3, 5] {
        let f = field_indicator(q);
        let out = sudoku_collapse(&f, 0).unwrap();
        assert_eq!(out.p.eval(&[0]), 0);
        for x in 1..q as El {
            assert_eq!(out.p.eval(&[x]), out.i);
        }
        assert_ne!(out.i, 0);
    }
}

#[test]
fn boolean_witness_from_indicator() {
    let f = field_indicator(3);
    let alg = FiniteAlgebra::new("ind3", 3, vec![f]).unwrap();
    let w = minimal_boolean_witness(&alg, 0).unwrap();
    assert_ne!(w.i, 0);
    assert_eq!(w.c.eval(&[0]), w.i);
    assert_eq!(w.c.eval(&[w.i]), 0);
    assert_eq!(w.m.eval(&[w.i, w.i]), w.i);
    assert_eq!(w.m.eval(&[0, w.i]), 0);
}

#[test]
fn delta_indicator_f2() {
    match build_delta_indicator_malcev(&field(2), CAP) {
        SearchOutcome::Proven(ind) => {
            let mask = delta4(2).rank_bitset();
            for (r, &in_d) in mask.iter().enumerate() {
                assert_eq!(ind.f.values[r] == ind.a, in_d);
            }
        }
        other => panic!("f2 should yield an indicator, got {other:?}"),
    }
}

#[test]
fn delta_indicator_f3() {
    match build_delta_indicator_malcev(&field(3), CAP) {
        SearchOutcome::Proven(ind) => {
            let mask = delta4(3).rank_bitset();
            for (r, &in_d) in mask.iter().enumerate() {
                assert_eq!(ind.f.values[r] == ind.a, in_d);
            }
        }
        other => panic!("f3 should yield an indicator, got {other:?}"),
    }
}

#[test]
fn delta_indicator_refuses_abelian() {
    match build_delta_indicator_malcev(&zmod_group(4), CAP) {
        SearchOutcome::Refuted(reason) => assert!(reason.contains("Abelian")),
        other => panic!("z4 has an Abelian monolith, got {other:?}"),
    }
}
