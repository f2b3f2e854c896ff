use eqdom::atlas::{alg_field, alg_klein_group, alg_s3_group, alg_zmod_group, malcev_corpus};
use eqdom::clones::SearchOutcome;
use eqdom::conlat::{
    absorbing_commutator, all_congruences, cg, commutator, find_weak_difference, is_fsi, is_si,
    monolith, Congruence, GenMode,
};
use eqdom::{FiniteAlgebra, OpTable};

const CAP: usize = 2_000_000;

#[test]
fn s3_lattice_and_abelian_monolith() {
    let s3 = alg_s3_group();
    let lat = all_congruences(&s3, 10_000).unwrap();
    // normal subgroups: trivial, the alternating subgroup, everything
    assert_eq!(lat.congruences.len(), 3);
    assert!(is_si(&s3).unwrap());
    let mono = monolith(&s3).unwrap().unwrap();
    assert_eq!(mono.blocks().len(), 2);
    assert!(commutator(&s3, &mono, &mono).is_bottom());
}

#[test]
fn klein_group_is_not_fsi() {
    let k = alg_klein_group();
    let lat = all_congruences(&k, 10_000).unwrap();
    // bottom, three proper subgroups, top
    assert_eq!(lat.congruences.len(), 5);
    assert_eq!(lat.atoms.len(), 3);
    assert!(!is_fsi(&k).unwrap());
    assert!(!is_si(&k).unwrap());
    assert!(monolith(&k).unwrap().is_none());
}

#[test]
fn commutator_laws_on_the_corpus() {
    for alg in malcev_corpus() {
        // the family instance carries a 4-ary basic operation, which makes
        // the matrix closure for large congruence pairs quartic in its size
        if alg.universe > 6 {
            continue;
        }
        let lat = all_congruences(&alg, 10_000).unwrap();
        let n = lat.congruences.len();
        let comm: Vec<Vec<Congruence>> = lat
            .congruences
            .iter()
            .map(|a| {
                lat.congruences
                    .iter()
                    .map(|b| commutator(&alg, a, b))
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&lat.congruences[i], &lat.congruences[j]);
                assert!(comm[i][j].leq(&a.meet(b)), "[a,b] <= a /\\ b in {}", alg.name);
                // monotone in both arguments
                for k in 0..n {
                    if a.leq(&lat.congruences[k]) {
                        assert!(comm[i][j].leq(&comm[k][j]), "monotone in {}", alg.name);
                    }
                    if b.leq(&lat.congruences[k]) {
                        assert!(comm[i][j].leq(&comm[i][k]), "monotone in {}", alg.name);
                    }
                }
            }
        }
    }
}

#[test]
fn cg_closure_laws() {
    for alg in [alg_field(3, "f3"), alg_zmod_group(4), alg_s3_group()] {
        let q = alg.universe as u8;
        for a in 0..q {
            for b in (a + 1)..q {
                let c = cg(&alg, &[(a, b)]);
                assert!(c.related(a, b));
                assert!(c.is_congruence_of(&alg));
                // idempotent: regenerating from all pairs is a fixpoint
                assert_eq!(cg(&alg, &c.nontrivial_pairs()), c);
            }
        }
    }
}

#[test]
fn absorbing_pairs_generate_the_commutator() {
    // algebras whose binary polynomial parts stay small
    let algs = [
        alg_field(2, "f2"),
        alg_zmod_group(3),
        alg_zmod_group(4),
        alg_klein_group(),
    ];
    for alg in algs {
        let q = alg.universe as u8;
        let pairs = [(0u8, 1u8), (0, q - 1), (1, q - 1)];
        for &p1 in &pairs {
            for &p2 in &pairs {
                let comm = commutator(&alg, &cg(&alg, &[p1]), &cg(&alg, &[p2]));
                match absorbing_commutator(&alg, p1, p2, CAP) {
                    SearchOutcome::Proven(abs) => {
                        assert_eq!(
                            cg(&alg, &abs),
                            comm,
                            "absorbing pairs vs commutator on {} at {:?},{:?}",
                            alg.name,
                            p1,
                            p2
                        );
                    }
                    other => panic!("binary enumeration should complete, got {other:?}"),
                }
            }
        }
    }
}

#[test]
fn weak_difference_search() {
    // every Mal'cev polynomial is a weak difference
    let z4 = alg_zmod_group(4);
    assert!(matches!(
        find_weak_difference(&z4, GenMode::Polynomial, CAP).unwrap(),
        SearchOutcome::Proven(_)
    ));
    // a bare two-element set: the total congruence is Abelian there, so a
    // weak difference would have to act as a Mal'cev operation, and the
    // polynomial clone has only projections and constants
    let bare = FiniteAlgebra::new("bare2", 2, vec![]).unwrap();
    assert!(matches!(
        find_weak_difference(&bare, GenMode::Polynomial, CAP).unwrap(),
        SearchOutcome::Refuted(())
    ));
    // the two-element meet-semilattice is not Abelian at the top, so the
    // first projection already passes the local condition
    let meet = OpTable::from_fn("meet", 2, 2, |t| t[0] & t[1]);
    let sl = FiniteAlgebra::new("sl2", 2, vec![meet]).unwrap();
    assert!(matches!(
        find_weak_difference(&sl, GenMode::Polynomial, CAP).unwrap(),
        SearchOutcome::Proven(_)
    ));
}
