use eqdom::atlas::{op_and, op_g, op_h, op_not, op_or, op_t};
use eqdom::clones::{
    bicentralizer_contains, centralizer_kary, clone_contains, enumerate_kary,
    enumerate_kary_universe, find_special, SearchOutcome, SpecialKind, DEFAULT_CAP_BYTES,
};
use eqdom::conlat::{gens_for, GenMode};
use eqdom::atlas::alg_zmod_group;
use eqdom::OpTable;

fn complete_len(out: SearchOutcome<eqdom::clones::TermOpSet, ()>) -> usize {
    match out {
        SearchOutcome::Proven(s) => {
            // witness soundness: every member re-evaluates to its table
            for i in 0..s.len() {
                assert_eq!(s.reevaluate_witness(i), s.members[i]);
            }
            s.len()
        }
        other => panic!("expected a completed closure, got {other:?}"),
    }
}

#[test]
fn post_lattice_counts() {
    // binary monotone functions with constants: 0, 1, x, y, meet, join
    let mc = [op_and(), op_or(), OpTable::constant(2, 0), OpTable::constant(2, 1)];
    assert_eq!(complete_len(enumerate_kary(&mc, 2, DEFAULT_CAP_BYTES)), 6);
    // ternary monotone functions: the Dedekind number for three variables
    assert_eq!(complete_len(enumerate_kary(&mc, 3, DEFAULT_CAP_BYTES)), 20);
    // the full clone on {0,1}
    let o2 = [op_and(), op_or(), op_not()];
    assert_eq!(complete_len(enumerate_kary(&o2, 1, DEFAULT_CAP_BYTES)), 4);
    assert_eq!(complete_len(enumerate_kary(&o2, 2, DEFAULT_CAP_BYTES)), 16);
    assert_eq!(complete_len(enumerate_kary(&o2, 3, DEFAULT_CAP_BYTES)), 256);
    // the trivial clone has only projections at every arity
    assert_eq!(complete_len(enumerate_kary_universe(&[], 3, 2, DEFAULT_CAP_BYTES)), 3);
}

#[test]
fn containment_examples() {
    // t(x,y,z) = x or (y and z) is a lattice term
    assert!(matches!(
        clone_contains(&[op_and(), op_or()], &op_t(), DEFAULT_CAP_BYTES),
        SearchOutcome::Proven(_)
    ));
    // the ternary sum is not monotone
    assert!(matches!(
        clone_contains(&[op_and(), op_or()], &op_g(), DEFAULT_CAP_BYTES),
        SearchOutcome::Refuted(())
    ));
}

#[test]
fn special_term_searches() {
    let z4 = alg_zmod_group(4);
    let gens = gens_for(&z4, GenMode::Term);
    assert!(matches!(
        find_special(&gens, SpecialKind::Malcev, DEFAULT_CAP_BYTES),
        SearchOutcome::Proven(_)
    ));
    assert!(matches!(
        find_special(&gens, SpecialKind::Majority, DEFAULT_CAP_BYTES),
        SearchOutcome::Refuted(())
    ));
    assert!(matches!(
        find_special(&[op_h()], SpecialKind::Majority, DEFAULT_CAP_BYTES),
        SearchOutcome::Proven(_)
    ));
    assert!(matches!(
        find_special(&[op_h()], SpecialKind::JonssonChain(8), DEFAULT_CAP_BYTES),
        SearchOutcome::Proven(_)
    ));
    assert!(matches!(
        find_special(&[op_g()], SpecialKind::JonssonChain(8), DEFAULT_CAP_BYTES),
        SearchOutcome::Refuted(())
    ));
    assert!(matches!(
        find_special(&[op_and()], SpecialKind::JonssonChain(8), DEFAULT_CAP_BYTES),
        SearchOutcome::Refuted(())
    ));
}

#[test]
fn centralizer_counts_on_two_elements() {
    // with no constraints: all unary operations
    assert_eq!(centralizer_kary(&[], 1).unwrap().len(), 4);
    // commuting with negation: the two permutations at arity one, and the
    // four self-dual tables at arity two
    assert_eq!(centralizer_kary(&[op_not()], 1).unwrap().len(), 2);
    assert_eq!(centralizer_kary(&[op_not()], 2).unwrap().len(), 4);
}

#[test]
fn bicentralizer_smoke() {
    // any generator lies in its own bicentralizer
    assert!(bicentralizer_contains(&[op_g()], &op_g(), 3).unwrap());
    // negation does not commute with the centralizer of conjunction
    // (conjunction commutes with itself)
    assert!(!bicentralizer_contains(&[op_and()], &op_not(), 2).unwrap());
}
