//! Algebraic geometry over a finite algebra: equation systems and their
//! solution sets, separation witnesses for algebraicity, the delta-relation
//! decision procedure for equational additivity, and polynomial
//! interpolation inside a non-Abelian monolith class.

use std::collections::{BTreeSet, HashMap};

use crate::clones::{closure_with_universe, ClosureEnd, SearchOutcome, TermOpSet, Visit};
use crate::conlat::{
    cg_trace, classify_malcev_eqadd, find_absorbing_with_values, gens_for, Congruence,
    ConlatError, GenMode,
};
use crate::finalg::{delta4, rank, table_len, unrank, El, FiniteAlgebra, OpTable};
use crate::Relation;

#[derive(Debug, thiserror::Error)]
pub enum AlggeoError {
    #[error("term set is not a complete clone part; refusing to certify")]
    IncompleteTerms,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("universe mismatch: {0} vs {1}")]
    UniverseMismatch(usize, usize),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("hypotheses not satisfied: {0}")]
    NotApplicable(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error("congruence computation failed: {0}")]
    Conlat(#[from] ConlatError),
}

type Result<T> = std::result::Result<T, AlggeoError>;

/// A finite system of equations `f_i(x) = g_i(x)` between k-ary tables.
#[derive(Debug, Clone)]
pub struct EquationSystem {
    pub k: usize,
    pub universe: usize,
    pub pairs: Vec<(OpTable, OpTable)>,
}

impl EquationSystem {
    pub fn new(k: usize, universe: usize, pairs: Vec<(OpTable, OpTable)>) -> Result<Self> {
        for (f, g) in &pairs {
            if f.arity != k || g.arity != k {
                return Err(AlggeoError::ArityMismatch {
                    expected: k,
                    got: if f.arity != k { f.arity } else { g.arity },
                });
            }
            if f.universe != universe || g.universe != universe {
                return Err(AlggeoError::UniverseMismatch(universe, f.universe));
            }
        }
        Ok(EquationSystem { k, universe, pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn holds_at_rank(&self, r: usize) -> bool {
        self.pairs.iter().all(|(f, g)| f.values[r] == g.values[r])
    }
}

/// The solution set of a system as a relation.
pub fn solve_system(sys: &EquationSystem) -> Relation {
    let len = table_len(sys.universe, sys.k);
    let ranks: Vec<usize> = (0..len).filter(|&r| sys.holds_at_rank(r)).collect();
    Relation {
        arity: sys.k,
        universe: sys.universe,
        tuples: ranks,
    }
}

/// One separation: a pair of k-ary members agreeing on `x` and differing at
/// `tuple`.
#[derive(Debug, Clone)]
pub struct SeparationPair {
    pub tuple: Vec<El>,
    pub f: OpTable,
    pub g: OpTable,
}

/// A full certificate that `x` is an algebraic set: every outside tuple is
/// separated by some pair.
#[derive(Debug, Clone)]
pub struct SeparationCertificate {
    pub x: Relation,
    pub pairs: Vec<SeparationPair>,
}

impl SeparationCertificate {
    /// Re-check the certificate from scratch.
    pub fn check(&self) -> bool {
        let q = self.x.universe;
        let mut outside: BTreeSet<usize> = self.x.complement().tuples.iter().copied().collect();
        for sp in &self.pairs {
            let r = rank(&sp.tuple, q);
            if self.x.contains_rank(r) || sp.f.values[r] == sp.g.values[r] {
                return false;
            }
            for &on in &self.x.tuples {
                if sp.f.values[on] != sp.g.values[on] {
                    return false;
                }
            }
            outside.remove(&r);
        }
        outside.is_empty()
    }
}

fn check_terms_rel(terms: &TermOpSet, x: &Relation) -> Result<()> {
    if !terms.complete {
        return Err(AlggeoError::IncompleteTerms);
    }
    if terms.k != x.arity {
        return Err(AlggeoError::ArityMismatch {
            expected: terms.k,
            got: x.arity,
        });
    }
    if terms.universe != x.universe {
        return Err(AlggeoError::UniverseMismatch(terms.universe, x.universe));
    }
    Ok(())
}

/// Group member indices by their restriction to the tuples of `x`.
fn restriction_classes(terms: &TermOpSet, x: &Relation) -> HashMap<Vec<El>, Vec<usize>> {
    let mut classes: HashMap<Vec<El>, Vec<usize>> = HashMap::new();
    for (i, values) in terms.members.iter().enumerate() {
        let key: Vec<El> = x.tuples.iter().map(|&r| values[r]).collect();
        classes.entry(key).or_default().push(i);
    }
    classes
}

/// A pair of members of the (complete) k-ary part agreeing on `x` and
/// differing at `a`, if one exists. `a` must lie outside `x`.
pub fn separation_witness(
    terms: &TermOpSet,
    x: &Relation,
    a: &[El],
) -> Result<Option<(OpTable, OpTable)>> {
    check_terms_rel(terms, x)?;
    if a.len() != x.arity {
        return Err(AlggeoError::ArityMismatch {
            expected: x.arity,
            got: a.len(),
        });
    }
    let r = rank(a, x.universe);
    if x.contains_rank(r) {
        return Err(AlggeoError::BadInput(
            "separation point lies inside the set".into(),
        ));
    }
    let classes = restriction_classes(terms, x);
    let mut keys: Vec<&Vec<El>> = classes.keys().collect();
    keys.sort();
    for key in keys {
        let members = &classes[key];
        let rep = members[0];
        for &i in &members[1..] {
            if terms.members[i][r] != terms.members[rep][r] {
                return Ok(Some((terms.member_op(rep), terms.member_op(i))));
            }
        }
    }
    Ok(None)
}

/// Is `x` an algebraic set over the clone part `terms`? Proven comes with a
/// full separation certificate, Refuted with an inseparable outside tuple.
pub fn is_algebraic(
    terms: &TermOpSet,
    x: &Relation,
) -> Result<SearchOutcome<SeparationCertificate, Vec<El>>> {
    check_terms_rel(terms, x)?;
    let classes = restriction_classes(terms, x);
    let mut pairs = Vec::new();
    for r in x.complement().tuples {
        let mut found = None;
        let mut keys: Vec<&Vec<El>> = classes.keys().collect();
        keys.sort();
        'outer: for key in keys {
            let members = &classes[key];
            let rep = members[0];
            for &i in &members[1..] {
                if terms.members[i][r] != terms.members[rep][r] {
                    found = Some((rep, i));
                    break 'outer;
                }
            }
        }
        match found {
            Some((f, g)) => pairs.push(SeparationPair {
                tuple: unrank(r, x.universe, x.arity),
                f: terms.member_op(f),
                g: terms.member_op(g),
            }),
            None => return Ok(SearchOutcome::Refuted(unrank(r, x.universe, x.arity))),
        }
    }
    Ok(SearchOutcome::Proven(SeparationCertificate {
        x: x.clone(),
        pairs,
    }))
}

/// Combine systems with solution sets B and C into one with solution set
/// `B ∪ C`, using a system whose solution set is the delta relation. The
/// union law is checked before returning.
pub fn union_system(
    sys_b: &EquationSystem,
    sys_c: &EquationSystem,
    delta_sys: &EquationSystem,
) -> Result<EquationSystem> {
    if sys_b.k != sys_c.k {
        return Err(AlggeoError::ArityMismatch {
            expected: sys_b.k,
            got: sys_c.k,
        });
    }
    let q = sys_b.universe;
    if sys_c.universe != q || delta_sys.universe != q {
        return Err(AlggeoError::UniverseMismatch(q, delta_sys.universe));
    }
    if delta_sys.k != 4 {
        return Err(AlggeoError::ArityMismatch {
            expected: 4,
            got: delta_sys.k,
        });
    }
    let delta = delta4(q);
    if solve_system(delta_sys).tuples != delta.tuples {
        return Err(AlggeoError::BadInput(
            "third system does not solve to the delta relation".into(),
        ));
    }
    let mut pairs = Vec::new();
    for (p, pq) in &delta_sys.pairs {
        for (f, g) in &sys_b.pairs {
            for (h, t) in &sys_c.pairs {
                let inner = [f, g, h, t];
                let lhs = OpTable::compose(p, &inner).map_err(|_| AlggeoError::ArityMismatch {
                    expected: 4,
                    got: p.arity,
                })?;
                let rhs = OpTable::compose(pq, &inner).map_err(|_| AlggeoError::ArityMismatch {
                    expected: 4,
                    got: pq.arity,
                })?;
                pairs.push((lhs, rhs));
            }
        }
    }
    let out = EquationSystem::new(sys_b.k, q, pairs)?;
    // union law: the composed system solves to exactly solve(B) ∪ solve(C)
    let sol = solve_system(&out);
    let sb = solve_system(sys_b);
    let sc = solve_system(sys_c);
    let mut want: Vec<usize> = sb.tuples.iter().chain(sc.tuples.iter()).copied().collect();
    want.sort_unstable();
    want.dedup();
    if sol.tuples != want {
        return Err(AlggeoError::InternalInvariant(
            "union construction did not solve to the union".into(),
        ));
    }
    Ok(out)
}

/// Why equational additivity was refuted.
#[derive(Debug, Clone)]
pub enum AdditivityObstruction {
    /// Every generator of the polynomial clone depends on at most one
    /// argument (and the universe has at least two elements).
    EssentiallyUnary,
    /// The 4-ary clone part is fully enumerated and this off-delta tuple
    /// cannot be separated from the delta relation.
    Uncovered { tuple: Vec<El> },
}

/// Decide whether the chosen clone of `alg` is equationally additive, i.e.
/// whether the delta relation is an algebraic set. Proven returns a system
/// solving to delta; refutation is only reported from a complete 4-ary
/// enumeration (or the essentially-unary criterion in polynomial mode).
pub fn is_equationally_additive(
    alg: &FiniteAlgebra,
    mode: GenMode,
    cap_bytes: usize,
) -> SearchOutcome<EquationSystem, AdditivityObstruction> {
    let q = alg.universe;
    if q <= 1 {
        // delta is the full relation: the empty system solves to it
        return SearchOutcome::Proven(EquationSystem {
            k: 4,
            universe: q,
            pairs: Vec::new(),
        });
    }
    let gens = gens_for(alg, mode);
    if mode == GenMode::Polynomial && gens.iter().all(|g| g.essential_arity() <= 1) {
        return SearchOutcome::Refuted(AdditivityObstruction::EssentiallyUnary);
    }

    let delta = delta4(q);
    let dmask = delta.rank_bitset();
    let len = table_len(q, 4);

    // fast path: a single generator whose level sets already carve out delta
    // via f(x1,x2,x3,x4) = f(x1,x1,x1,x1)
    for g in &gens {
        if g.arity != 4 {
            continue;
        }
        let ok = (0..len).all(|r| {
            let t = unrank(r, q, 4);
            let diag = g.eval(&[t[0], t[0], t[0], t[0]]);
            (g.values[r] == diag) == dmask[r]
        });
        if ok {
            let diag_tab = {
                let pi = OpTable::projection(4, 1, q);
                OpTable::compose(g, &[&pi, &pi, &pi, &pi]).expect("diagonal composition")
            };
            let sys = EquationSystem {
                k: 4,
                universe: q,
                pairs: vec![(g.clone(), diag_tab)],
            };
            return SearchOutcome::Proven(sys);
        }
    }

    // full search: enumerate the 4-ary part, group members by restriction to
    // delta, and cover every off-delta tuple by a differing pair
    let on: Vec<usize> = delta.tuples.clone();
    let off: Vec<usize> = delta.complement().tuples;
    let mut class_of: HashMap<Vec<El>, usize> = HashMap::new();
    let mut all_members: Vec<Vec<El>> = Vec::new();
    let mut covered: Vec<Option<(usize, usize)>> = vec![None; off.len()];
    let mut uncovered = off.len();
    let mut visit = |i: usize, values: &[El]| {
        all_members.push(values.to_vec());
        let key: Vec<El> = on.iter().map(|&r| values[r]).collect();
        match class_of.entry(key) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(i);
            }
            std::collections::hash_map::Entry::Occupied(e) => {
                let rep = *e.get();
                for (pi, &r) in off.iter().enumerate() {
                    if covered[pi].is_none() && values[r] != all_members[rep][r] {
                        covered[pi] = Some((rep, i));
                        uncovered -= 1;
                    }
                }
                if uncovered == 0 {
                    return Visit::Stop;
                }
            }
        }
        Visit::Continue
    };
    let (_, end) = closure_with_universe(&gens, 4, q, cap_bytes, &mut visit);
    if uncovered == 0 {
        let mut pair_set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for c in covered.into_iter().flatten() {
            pair_set.insert(c);
        }
        let mk = |i: usize| OpTable {
            name: format!("w{i}"),
            arity: 4,
            universe: q,
            values: all_members[i].clone(),
        };
        let pairs: Vec<(OpTable, OpTable)> =
            pair_set.into_iter().map(|(a, b)| (mk(a), mk(b))).collect();
        let sys = EquationSystem {
            k: 4,
            universe: q,
            pairs,
        };
        debug_assert_eq!(solve_system(&sys).tuples, delta.tuples);
        return SearchOutcome::Proven(sys);
    }
    match end {
        ClosureEnd::Fixpoint => {
            let pi = covered.iter().position(|c| c.is_none()).expect("uncovered > 0");
            SearchOutcome::Refuted(AdditivityObstruction::Uncovered {
                tuple: unrank(off[pi], q, 4),
            })
        }
        _ => SearchOutcome::Inconclusive {
            reason: format!(
                "4-ary closure cap reached with {uncovered} off-delta tuples not yet separated"
            ),
            partial: None,
        },
    }
}

/// Result of the collapsing-polynomial construction: a unary polynomial of
/// `(A; f)` fixing `zero` and sending everything else to a single element
/// `i != zero`.
#[derive(Debug, Clone)]
pub struct SudokuCollapse {
    pub p: OpTable,
    pub i: El,
    pub trace: Vec<String>,
}

/// A 4-ary table restricted to a sub-universe, stored densely over local
/// indices; values are element labels of the parent universe.
struct SubF {
    elems: Vec<El>,
    vals: Vec<El>,
}

impl SubF {
    fn from_table(f: &OpTable, elems: Vec<El>) -> SubF {
        let u = elems.len();
        let mut vals = vec![0 as El; u * u * u * u];
        let mut idx = 0;
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    for &d in &elems {
                        vals[idx] = f.eval(&[a, b, c, d]);
                        idx += 1;
                    }
                }
            }
        }
        SubF { elems, vals }
    }

    fn local(&self, e: El) -> usize {
        self.elems.iter().position(|&x| x == e).expect("element in sub-universe")
    }

    fn eval(&self, a: El, b: El, c: El, d: El) -> El {
        let u = self.elems.len();
        let idx = ((self.local(a) * u + self.local(b)) * u + self.local(c)) * u + self.local(d);
        self.vals[idx]
    }

    /// Apply a unary map (given on the parent labels) to every table entry,
    /// then restrict the arguments to `elems`.
    fn mapped_restriction(&self, map: &HashMap<El, El>, elems: Vec<El>) -> SubF {
        let u = elems.len();
        let mut vals = vec![0 as El; u * u * u * u];
        let mut idx = 0;
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    for &d in &elems {
                        vals[idx] = map[&self.eval(a, b, c, d)];
                        idx += 1;
                    }
                }
            }
        }
        SubF { elems, vals }
    }

    /// Does `f` vanish to `zero` exactly on the delta relation of `elems`?
    fn indicator_check(&self, zero: El) -> bool {
        for &a in &self.elems {
            for &b in &self.elems {
                for &c in &self.elems {
                    for &d in &self.elems {
                        let in_delta = a == b || c == d;
                        if (self.eval(a, b, c, d) == zero) != in_delta {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

fn sudoku_rec(
    f: &SubF,
    zero: El,
    trace: &mut Vec<String>,
) -> Result<(HashMap<El, El>, El)> {
    let u = f.elems.len();
    if u < 2 {
        return Err(AlggeoError::InternalInvariant(
            "sub-universe collapsed below two elements".into(),
        ));
    }
    if u == 2 {
        let nz = *f.elems.iter().find(|&&x| x != zero).expect("second element");
        let v = f.eval(zero, nz, zero, nz);
        if v != nz {
            return Err(AlggeoError::InternalInvariant(
                "two-element base case produced the wrong value".into(),
            ));
        }
        let mut p = HashMap::new();
        p.insert(zero, zero);
        p.insert(nz, nz);
        trace.push(format!("base |B|=2: p(x) = f({zero},x,{zero},x), i = {nz}"));
        return Ok((p, nz));
    }

    // the one-parameter family p_a(x) = f(zero, x, zero, a)
    let params: Vec<El> = f.elems.iter().copied().filter(|&a| a != zero).collect();
    let p_of = |a: El, x: El| f.eval(zero, x, zero, a);
    let is_perm = |a: El| {
        let mut seen: Vec<bool> = vec![false; u];
        for &x in &f.elems {
            let li = f.elems.iter().position(|&e| e == p_of(a, x)).unwrap();
            if seen[li] {
                return false;
            }
            seen[li] = true;
        }
        true
    };

    if params.iter().all(|&a| is_perm(a)) {
        // every p_a is a permutation: iterate all of them to the identity
        let order = |a: El| {
            let mut m = 1usize;
            // order of the permutation = lcm of its cycle lengths
            let mut visited: Vec<bool> = vec![false; u];
            for start in 0..u {
                if visited[start] {
                    continue;
                }
                let mut len = 0;
                let mut x = f.elems[start];
                loop {
                    let li = f.elems.iter().position(|&e| e == x).unwrap();
                    if visited[li] {
                        break;
                    }
                    visited[li] = true;
                    len += 1;
                    x = p_of(a, x);
                }
                m = lcm(m, len.max(1));
            }
            m
        };
        let mut m = 1usize;
        for &a in &params {
            m = lcm(m, order(a));
        }
        // least non-zero value of f on the sub-universe
        let mut image: Vec<El> = f.vals.clone();
        image.sort_unstable();
        image.dedup();
        let i = *image
            .iter()
            .find(|&&v| v != zero)
            .ok_or_else(|| AlggeoError::InternalInvariant("constant indicator".into()))?;
        let mut p = HashMap::new();
        for &x in &f.elems {
            let mut w = i;
            for _ in 0..m {
                w = f.eval(zero, w, zero, x);
            }
            p.insert(x, w);
        }
        if p[&zero] != zero || f.elems.iter().any(|&x| x != zero && p[&x] != i) {
            return Err(AlggeoError::InternalInvariant(
                "permutation case did not collapse".into(),
            ));
        }
        trace.push(format!(
            "all p_a permutations: p(x) = p_x^{m}({i}) with p_x(w) = f({zero},w,{zero},x)"
        ));
        return Ok((p, i));
    }

    // some p_a is not a permutation: iterate it to an idempotent e and
    // recurse on the image of e
    let a = *params.iter().find(|&&a| !is_perm(a)).expect("non-permutation");
    let mut e: HashMap<El, El> = f.elems.iter().map(|&x| (x, p_of(a, x))).collect();
    let mut power = 1usize;
    loop {
        let ee: HashMap<El, El> = e.iter().map(|(&x, &v)| (x, e[&v])).collect();
        if ee == e {
            break;
        }
        // square-free stepping keeps the exponent a plain iteration count
        e = e.iter().map(|(&x, &v)| (x, p_of(a, v))).collect();
        power += 1;
        if power > u * u + 2 {
            return Err(AlggeoError::InternalInvariant(
                "no idempotent power found".into(),
            ));
        }
    }
    let mut b_elems: Vec<El> = e.values().copied().collect();
    b_elems.sort_unstable();
    b_elems.dedup();
    if !b_elems.contains(&zero) || b_elems.len() >= u || b_elems.len() < 2 {
        return Err(AlggeoError::InternalInvariant(
            "idempotent image is not a proper sub-universe containing zero".into(),
        ));
    }
    trace.push(format!(
        "p_{a} not a permutation: e = p_{a}^{power} idempotent, image {:?}",
        b_elems
    ));
    let fb = f.mapped_restriction(&e, b_elems);
    if !fb.indicator_check(zero) {
        return Err(AlggeoError::InternalInvariant(
            "restricted indicator lost the delta level set".into(),
        ));
    }
    let (p_small, i) = sudoku_rec(&fb, zero, trace)?;
    let p: HashMap<El, El> = f.elems.iter().map(|&x| (x, p_small[&e[&x]])).collect();
    Ok((p, i))
}

/// From a 4-ary table `f` whose zero level set is exactly the delta
/// relation, build a unary polynomial `p` of `(A; f)` with `p(zero) = zero`
/// and `p(x) = i` for all `x != zero`, for a single element `i != zero`.
pub fn sudoku_collapse(f: &OpTable, zero: El) -> Result<SudokuCollapse> {
    let q = f.universe;
    if f.arity != 4 {
        return Err(AlggeoError::ArityMismatch {
            expected: 4,
            got: f.arity,
        });
    }
    if q < 2 {
        return Err(AlggeoError::BadInput("universe must have size >= 2".into()));
    }
    let elems: Vec<El> = (0..q as El).collect();
    let sub = SubF::from_table(f, elems);
    if !sub.indicator_check(zero) {
        return Err(AlggeoError::BadInput(
            "zero level set of f is not the delta relation".into(),
        ));
    }
    let mut trace = Vec::new();
    let (pmap, i) = sudoku_rec(&sub, zero, &mut trace)?;
    let p = OpTable::from_fn("p", 1, q, |t| pmap[&t[0]]);
    if p.eval(&[zero]) != zero
        || i == zero
        || (0..q as El).any(|x| x != zero && p.eval(&[x]) != i)
    {
        return Err(AlggeoError::InternalInvariant(
            "collapse postcondition failed".into(),
        ));
    }
    Ok(SudokuCollapse { p, i, trace })
}

/// A two-element Boolean fragment inside `(A; f)`: a swap `c` of
/// `{zero, i}` and a meet `m` on `{zero, i}` with top `i`, both polynomials.
#[derive(Debug, Clone)]
pub struct BooleanWitness {
    pub i: El,
    pub p: OpTable,
    pub c: OpTable,
    pub m: OpTable,
    pub trace: Vec<String>,
}

/// Extract the two-element Boolean fragment from an algebra one of whose
/// basic operations is a 4-ary delta indicator with value `zero` on delta.
pub fn minimal_boolean_witness(alg: &FiniteAlgebra, zero: El) -> Result<BooleanWitness> {
    let q = alg.universe;
    let delta = delta4(q);
    let dmask = delta.rank_bitset();
    let f = alg
        .ops
        .iter()
        .find(|g| {
            g.arity == 4 && (0..g.values.len()).all(|r| (g.values[r] == zero) == dmask[r])
        })
        .ok_or_else(|| {
            AlggeoError::BadInput("no 4-ary delta indicator among the basic operations".into())
        })?;
    let SudokuCollapse { p, i, trace } = sudoku_collapse(f, zero)?;
    let pv = |x: El| p.eval(&[x]);
    let c = OpTable::from_fn("c", 1, q, |t| pv(f.eval(&[t[0], i, t[0], i])));
    let m = OpTable::from_fn("m", 2, q, |t| {
        let inner = pv(f.eval(&[t[0], i, t[0], i]));
        pv(f.eval(&[inner, i, t[1], zero]))
    });
    let ok = c.eval(&[zero]) == i
        && c.eval(&[i]) == zero
        && m.eval(&[i, i]) == i
        && m.eval(&[zero, zero]) == zero
        && m.eval(&[zero, i]) == zero
        && m.eval(&[i, zero]) == zero;
    if !ok {
        return Err(AlggeoError::InternalInvariant(
            "boolean fragment identities failed".into(),
        ));
    }
    Ok(BooleanWitness { i, p, c, m, trace })
}

/// Interpolation inside one class of a non-Abelian monolith of a
/// subdirectly irreducible algebra with a Mal'cev polynomial.
pub struct InterpolationProblem<'a> {
    pub alg: &'a FiniteAlgebra,
    /// A Mal'cev polynomial of the algebra.
    pub d: &'a OpTable,
    /// The monolith; its self-commutator must not be the bottom congruence.
    pub mu: &'a Congruence,
    /// The monolith class inside which all values must stay.
    pub u_class: &'a [El],
    /// Distinct k-ary argument tuples.
    pub t: &'a [Vec<El>],
    /// Prescribed values, one per tuple, all inside `u_class`.
    pub l: &'a [El],
    pub cap_bytes: usize,
}

struct InterpCtx<'a> {
    pr: &'a InterpolationProblem<'a>,
    k: usize,
    q: usize,
    in_u: Vec<bool>,
    memo: HashMap<(Option<usize>, usize), OpTable>,
    zmemo: HashMap<(El, El), OpTable>,
    noncentral: Option<(OpTable, El, El, El, El)>,
}

impl<'a> InterpCtx<'a> {
    fn list(&self, key: (Option<usize>, usize)) -> Vec<usize> {
        let mut v = Vec::new();
        if let Some(s) = key.0 {
            v.push(s);
        }
        v.extend(key.1..self.pr.t.len());
        v
    }

    fn constant(&self, v: El) -> OpTable {
        OpTable::from_fn(format!("c{v}"), self.k, self.q, |_| v)
    }

    fn eval_at(&self, p: &OpTable, ti: usize) -> El {
        p.eval(&self.pr.t[ti])
    }

    /// A binary polynomial `t` and elements `a, b, u, v` (monolith-related
    /// pairs) with `t(a,u) = t(a,v)` and `t(b,u) != t(b,v)`.
    fn noncentralizing(&mut self) -> Result<(OpTable, El, El, El, El)> {
        if let Some(w) = &self.noncentral {
            return Ok(w.clone());
        }
        let pairs = self.pr.mu.nontrivial_pairs();
        let q = self.q;
        let gens = crate::clones::polynomial_gens(self.pr.alg);
        let mut found: Option<(Vec<El>, El, El, El, El)> = None;
        let mut visit = |_i: usize, values: &[El]| {
            let at = |x: El, y: El| values[x as usize * q + y as usize];
            for &(a, b) in &pairs {
                for &(u, v) in &pairs {
                    if at(a, u) == at(a, v) && at(b, u) != at(b, v) {
                        found = Some((values.to_vec(), a, b, u, v));
                        return Visit::Stop;
                    }
                }
            }
            Visit::Continue
        };
        let (_, _) = closure_with_universe(&gens, 2, q, self.pr.cap_bytes, &mut visit);
        let (values, a, b, u, v) = found.ok_or_else(|| {
            AlggeoError::NotApplicable(
                "no non-centralizing binary polynomial; monolith appears Abelian".into(),
            )
        })?;
        let t = OpTable {
            name: "nc".into(),
            arity: 2,
            universe: q,
            values,
        };
        self.noncentral = Some((t.clone(), a, b, u, v));
        Ok((t, a, b, u, v))
    }

    /// Absorbing binary polynomial `z` at `(c0, c0)` with `z(c0,c0) = d0`
    /// and `z(d0,d0) = c0`; exists because the monolith equals its own
    /// commutator.
    fn absorbing(&mut self, c0: El, d0: El) -> Result<OpTable> {
        if let Some(z) = self.zmemo.get(&(c0, d0)) {
            return Ok(z.clone());
        }
        let z = find_absorbing_with_values(
            self.pr.alg,
            (c0, d0),
            (c0, d0),
            (c0, d0),
            self.pr.cap_bytes,
        )
        .ok_or_else(|| {
            AlggeoError::NotApplicable(format!(
                "no absorbing polynomial realizing ({c0}, {d0}); monolith commutator too small"
            ))
        })?;
        self.zmemo.insert((c0, d0), z.clone());
        Ok(z)
    }

    /// A k-ary polynomial taking values `x` and `y` at tuples `t_i` and
    /// `t_j`; `(x, y)` must lie in the congruence generated by the
    /// coordinatewise pairs of the two tuples.
    fn connect(&self, i: usize, j: usize, x: El, y: El) -> Result<OpTable> {
        let pairs: Vec<(El, El)> = self.pr.t[i]
            .iter()
            .zip(self.pr.t[j].iter())
            .map(|(&a, &b)| (a, b))
            .collect();
        let (_, trace) = cg_trace(self.pr.alg, &pairs);
        trace.explain(self.pr.alg, self.pr.d, x, y).ok_or_else(|| {
            AlggeoError::InternalInvariant(
                "pair not reachable in the generated congruence".into(),
            )
        })
    }

    fn two_point(&mut self, i1: usize, i2: usize) -> Result<OpTable> {
        let fv = self.pr.l[i1];
        let gv = self.pr.l[i2];
        if fv == gv {
            return Ok(self.constant(fv));
        }
        let (tp, a, b, u, v) = self.noncentralizing()?;
        let h = self.connect(i1, i2, u, v)?;
        // unary polynomial sending t(b,u) to fv and t(b,v) to gv
        let tbu = tp.eval(&[b, u]);
        let tbv = tp.eval(&[b, v]);
        let (_, utrace) = cg_trace(self.pr.alg, &[(tbu, tbv)]);
        let p_un = utrace
            .explain(self.pr.alg, self.pr.d, fv, gv)
            .ok_or_else(|| {
                AlggeoError::InternalInvariant("value pair not in the principal congruence".into())
            })?;
        let cb = self.constant(b);
        let ca = self.constant(a);
        let inner1 = OpTable::compose(&tp, &[&cb, &h]).expect("compose");
        let inner2 = OpTable::compose(&tp, &[&ca, &h]).expect("compose");
        let inner3 = self.constant(tp.eval(&[a, u]));
        let dd = OpTable::compose(self.pr.d, &[&inner1, &inner2, &inner3]).expect("compose");
        Ok(OpTable::compose(&p_un, &[&dd]).expect("compose"))
    }

    fn solve(&mut self, key: (Option<usize>, usize)) -> Result<OpTable> {
        if let Some(p) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        let idxs = self.list(key);
        let out = match idxs.len() {
            0 => self.constant(self.pr.u_class[0]),
            1 => self.constant(self.pr.l[idxs[0]]),
            2 => self.two_point(idxs[0], idxs[1])?,
            _ => {
                let (child1, child2) = match key {
                    (None, j) => ((None, j + 1), (Some(j), j + 2)),
                    (Some(s), j) => ((None, j), (Some(s), j + 1)),
                };
                let p = self.solve(child1)?;
                let t1 = idxs[0];
                let d0 = self.pr.l[t1];
                let c0 = self.eval_at(&p, t1);
                if c0 == d0 {
                    self.memo.insert(key, p.clone());
                    return Ok(p);
                }
                let qt = self.solve(child2)?;
                debug_assert_eq!(self.eval_at(&qt, t1), d0);
                let z = self.absorbing(c0, d0)?;
                let t2 = idxs[1];
                let q_w = self.connect(t1, t2, c0, d0)?;
                let q_wr = self.connect(t1, t2, d0, c0)?;
                let cd0 = self.constant(d0);
                let cc0 = self.constant(c0);
                let p_u = OpTable::compose(self.pr.d, &[&q_w, &q_wr, &cd0]).expect("compose");
                let p_v = OpTable::compose(self.pr.d, &[&q_w, &cc0, &cd0]).expect("compose");
                let hbar = OpTable::compose(&z, &[&qt, &p_u]).expect("compose");
                let zav = OpTable::compose(&z, &[&p, &p_v]).expect("compose");
                let zau = OpTable::compose(&z, &[&p, &p_u]).expect("compose");
                let zbv = OpTable::compose(&z, &[&qt, &p_v]).expect("compose");
                let mid = OpTable::compose(self.pr.d, &[&zav, &zau, &hbar]).expect("compose");
                let h = OpTable::compose(self.pr.d, &[&hbar, &mid, &zbv]).expect("compose");
                OpTable::compose(self.pr.d, &[&p, &h, &hbar]).expect("compose")
            }
        };
        // interpolation and range invariants, checked at every node
        for &i in &idxs {
            if self.eval_at(&out, i) != self.pr.l[i] {
                return Err(AlggeoError::InternalInvariant(format!(
                    "interpolant misses the prescribed value at tuple {i}"
                )));
            }
        }
        if out.values.iter().any(|&v| !self.in_u[v as usize]) {
            return Err(AlggeoError::InternalInvariant(
                "interpolant leaves the monolith class".into(),
            ));
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Interpolate the prescribed labels `l` at the tuples `t` by a polynomial
/// with all values inside the monolith class `u_class`.
pub fn interpolate_in_class(pr: &InterpolationProblem) -> Result<OpTable> {
    let q = pr.alg.universe;
    let k = pr.t.first().map(|t| t.len()).unwrap_or(1).max(1);
    if pr.t.len() != pr.l.len() {
        return Err(AlggeoError::BadInput("one label per tuple required".into()));
    }
    if pr.t.iter().any(|t| t.len() != k) {
        return Err(AlggeoError::BadInput("tuples must share an arity".into()));
    }
    {
        let mut seen = std::collections::HashSet::new();
        for t in pr.t {
            if !seen.insert(t.clone()) {
                return Err(AlggeoError::BadInput("tuples must be distinct".into()));
            }
        }
    }
    let mut in_u = vec![false; q];
    for &x in pr.u_class {
        in_u[x as usize] = true;
    }
    if pr.l.iter().any(|&v| !in_u[v as usize]) {
        return Err(AlggeoError::BadInput("labels must lie in the class".into()));
    }
    if pr.u_class.is_empty()
        || pr
            .u_class
            .iter()
            .any(|&x| !pr.mu.related(pr.u_class[0], x))
    {
        return Err(AlggeoError::BadInput(
            "class must be a nonempty block of the monolith".into(),
        ));
    }
    let mut ctx = InterpCtx {
        pr,
        k,
        q,
        in_u,
        memo: HashMap::new(),
        zmemo: HashMap::new(),
        noncentral: None,
    };
    ctx.solve((None, 0))
}

/// A 4-ary polynomial whose `a` level set is exactly the delta relation,
/// with values in `{a} ∪ {b}` up to the monolith class.
#[derive(Debug, Clone)]
pub struct DeltaIndicator {
    pub f: OpTable,
    pub a: El,
    pub b: El,
}

/// For an algebra with a Mal'cev polynomial: if it is subdirectly
/// irreducible with non-Abelian monolith, construct a 4-ary polynomial
/// delta indicator; otherwise report the failing hypothesis.
pub fn build_delta_indicator_malcev(
    alg: &FiniteAlgebra,
    cap_bytes: usize,
) -> SearchOutcome<DeltaIndicator, String> {
    let q = alg.universe;
    let verdict = match classify_malcev_eqadd(alg, cap_bytes) {
        Ok(v) => v,
        Err(ConlatError::NoMalcev) => {
            return SearchOutcome::Refuted("no Mal'cev polynomial found".into())
        }
        Err(e) => {
            return SearchOutcome::Inconclusive {
                reason: format!("classification failed: {e}"),
                partial: None,
            }
        }
    };
    if !verdict.si {
        return SearchOutcome::Refuted("not subdirectly irreducible".into());
    }
    let mu = verdict.monolith.as_ref().expect("monolith of an SI algebra");
    if verdict
        .monolith_commutator
        .as_ref()
        .map(|c| c.is_bottom())
        .unwrap_or(true)
    {
        return SearchOutcome::Refuted("monolith is Abelian".into());
    }
    let block = mu
        .blocks()
        .into_iter()
        .find(|b| b.len() >= 2)
        .expect("nontrivial monolith block");
    let (a, b) = (block[0], block[1]);
    let d = &verdict.malcev.tables[0];
    let delta = delta4(q);
    let dmask = delta.rank_bitset();
    let len = table_len(q, 4);
    let t: Vec<Vec<El>> = (0..len).map(|r| unrank(r, q, 4)).collect();
    let l: Vec<El> = (0..len).map(|r| if dmask[r] { a } else { b }).collect();
    let pr = InterpolationProblem {
        alg,
        d,
        mu,
        u_class: &block,
        t: &t,
        l: &l,
        cap_bytes,
    };
    match interpolate_in_class(&pr) {
        Ok(f) => {
            let ok = (0..len).all(|r| (f.values[r] == a) == dmask[r]);
            if ok {
                SearchOutcome::Proven(DeltaIndicator { f, a, b })
            } else {
                SearchOutcome::Inconclusive {
                    reason: "interpolant is not a delta indicator".into(),
                    partial: None,
                }
            }
        }
        Err(AlggeoError::NotApplicable(r)) => SearchOutcome::Refuted(r),
        Err(e) => SearchOutcome::Inconclusive {
            reason: format!("interpolation failed: {e}"),
            partial: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clones::enumerate_kary;

    fn bool_meet() -> OpTable {
        OpTable::from_fn("and", 2, 2, |t| t[0] & t[1])
    }

    #[test]
    fn solve_simple_system() {
        let q = 2;
        let f = OpTable::projection(2, 1, q);
        let g = OpTable::projection(2, 2, q);
        let sys = EquationSystem::new(2, q, vec![(f, g)]).unwrap();
        let sol = solve_system(&sys);
        assert_eq!(sol.tuples, vec![0, 3]);
    }

    #[test]
    fn meet_clone_delta_not_algebraic_at_three() {
        // the ternary part of the clone of meet cannot separate everything
        // from delta3; quick smoke of the certificate machinery instead on
        // the diagonal
        let set = match enumerate_kary(&[bool_meet()], 2, 1 << 20) {
            SearchOutcome::Proven(s) => s,
            _ => panic!("closure should complete"),
        };
        let diag = Relation::from_tuples(2, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        match is_algebraic(&set, &diag).unwrap() {
            SearchOutcome::Proven(cert) => assert!(cert.check()),
            _ => panic!("diagonal is a solution set of x=y over any clone"),
        }
    }
}
