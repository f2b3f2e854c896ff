use eqdom::atlas::{
    alg_klein_group, alg_zmod_group, boolean_catalog, classify_boolean, classify_eminimal,
    classify_selfdual, family_zpl, is_eminimal, lemma311_extend, op_a, op_and, op_g, op_h, op_l,
    op_m, op_not, op_or, op_plus0, op_ps, op_r, op_sigma, prop82_f, verify_claim, AtlasError,
    ClaimStatus, TCTTypeLite,
};
use eqdom::conlat::{cg, Congruence};
use eqdom::{El, FiniteAlgebra, OpTable};

#[test]
fn spot_values_match_defining_rules() {
    let r = op_r();
    assert_eq!(r.eval(&[0, 1]), 1);
    assert_eq!(r.eval(&[1, 2]), 2);
    assert_eq!(r.eval(&[0, 2]), 0);
    let ps = op_ps();
    assert_eq!(ps.eval(&[0, 1, 2]), 1);
    assert_eq!(ps.eval(&[0, 0, 2]), 0);
    let f = prop82_f();
    assert_eq!(f.eval(&[0, 1, 1]), 2);
    assert_eq!(f.eval(&[2, 0, 1]), 2);
}

#[test]
fn restrictions_to_the_boolean_subuniverse() {
    let b: &[El] = &[0, 1];
    assert_eq!(op_r().restrict(b).unwrap().values, op_or().values);
    assert_eq!(op_l().restrict(b).unwrap().values, op_and().values);
    assert_eq!(op_plus0().restrict(b).unwrap().values, op_g().values);
    // ps restricted to {0,1} is the first projection
    let ps = op_ps().restrict(b).unwrap();
    assert_eq!(ps.values, OpTable::projection(3, 1, 2).values);
}

#[test]
fn l_is_the_sigma_conjugate_of_r() {
    let conj = op_r().conjugate(&op_sigma()).unwrap();
    assert_eq!(conj.values, op_l().values);
}

#[test]
fn boolean_classifier_examples() {
    let v = classify_boolean(&[op_h()]).unwrap();
    assert!(v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp4);

    let v = classify_boolean(&[op_and(), op_or(), op_not()]).unwrap();
    assert!(v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp3);

    let v = classify_boolean(&[op_g()]).unwrap();
    assert!(!v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp2);

    let v = classify_boolean(&[op_and()]).unwrap();
    assert!(!v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp5);

    let v = classify_boolean(&[op_not()]).unwrap();
    assert!(!v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp1);
}

#[test]
fn boolean_catalog_has_constant_expansions() {
    let cat = boolean_catalog();
    assert!(cat.len() >= 18);
    assert!(cat.iter().any(|s| s.id == "s00"));
    assert!(cat.iter().any(|s| s.id == "m2-c"));
}

#[test]
fn eminimal_examples() {
    assert!(is_eminimal(&alg_zmod_group(4)).unwrap());
    let v = classify_eminimal(&alg_zmod_group(4)).unwrap();
    assert!(!v.additive);
    assert_eq!(v.tct, TCTTypeLite::Unknown);

    assert!(is_eminimal(&alg_klein_group()).unwrap());
    assert!(!classify_eminimal(&alg_klein_group()).unwrap().additive);

    let two = FiniteAlgebra::new("bool2", 2, vec![op_and(), op_or(), op_not()]).unwrap();
    let v = classify_eminimal(&two).unwrap();
    assert!(v.additive);
    assert_eq!(v.tct, TCTTypeLite::Tp3);
    assert!(v.jonsson.is_some());

    // a three-element chain meet-semilattice has x /\ 1 as a non-trivial
    // idempotent unary polynomial
    let meet = OpTable::from_fn("meet", 2, 3, |t| t[0].min(t[1]));
    let chain = FiniteAlgebra::new("chain3", 3, vec![meet]).unwrap();
    assert!(!is_eminimal(&chain).unwrap());
    assert!(matches!(
        classify_eminimal(&chain),
        Err(AtlasError::Inapplicable(_))
    ));
}

#[test]
fn selfdual_classifier_examples() {
    assert!(classify_selfdual(&[op_m()]).unwrap().additive);
    assert!(!classify_selfdual(&[op_a()]).unwrap().additive);
    assert!(!classify_selfdual(&[op_r(), op_ps()]).unwrap().additive);
    assert!(matches!(
        classify_selfdual(&[op_sigma()]),
        Err(AtlasError::Inapplicable(_))
    ));
}

#[test]
fn lemma311_extension_on_a_bare_set() {
    let base = FiniteAlgebra::new("three", 3, vec![]).unwrap();
    let ext = lemma311_extend(&base, 0, 1).unwrap();
    assert_eq!(ext.ops.len(), 2);
}

#[test]
fn zpl_332_monolith_oracle() {
    let alg = family_zpl(3, 3, 2).unwrap();
    assert_eq!(alg.universe, 27);
    let class_of: Vec<usize> = (0..27).map(|x| x % 9).collect();
    let expected = Congruence::from_assignment(27, &class_of);
    assert_eq!(cg(&alg, &[(0, 9)]), expected);
}

#[test]
fn phi_lifts_the_majority_clone_to_three_elements() {
    use eqdom::alggeo::solve_system;
    use eqdom::atlas::{phi_delta_system, phi_member};
    use eqdom::delta4;

    let gens = [op_h()];
    let b: &[El] = &[0, 1];
    let sys = phi_delta_system(&gens, b, 3, 0, 2, 2_000_000).unwrap();
    assert_eq!(sys.universe, 3);
    assert_eq!(solve_system(&sys).tuples, delta4(3).tuples);

    // the lift of h itself is a member
    let lifted = OpTable::from_fn("h^", 3, 3, |t| {
        if t.iter().all(|&x| x <= 1) {
            op_h().eval(t)
        } else {
            2
        }
    });
    assert!(phi_member(&gens, &lifted, b).unwrap());
    // not preserving {0,1}: never a member
    let shift = OpTable::from_fn("s", 1, 3, |t| (t[0] + 1) % 3);
    assert!(!phi_member(&gens, &shift, b).unwrap());
    // preserves {0,1} but restricts to minority, which is not monotone
    let minority3 = OpTable::from_fn("mino", 3, 3, |t| {
        if t.iter().all(|&x| x <= 1) {
            t[0] ^ t[1] ^ t[2]
        } else {
            2
        }
    });
    assert!(!phi_member(&gens, &minority3, b).unwrap());
}

#[test]
fn cheap_claims_pass() {
    for id in [
        "remark64-majority-eq",
        "remark64-tau-systems",
        "remark64-53",
        "remark64-no-single-equation",
        "lemma72-systems",
        "prop82-system",
    ] {
        let report = verify_claim(id).unwrap();
        assert_eq!(report.status, ClaimStatus::Pass, "{id}: {}", report.details);
    }
    assert!(verify_claim("nope").is_err());
}
