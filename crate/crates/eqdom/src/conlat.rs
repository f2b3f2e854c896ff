//! Congruences and congruence lattices of finite algebras, congruence
//! generation by unary polynomial translations (with provenance for
//! extracting witness polynomials in Mal'cev algebras), the term-condition
//! commutator, absorbing binary polynomials, weak difference search, and the
//! Mal'cev classifier for equational additivity.

use crate::clones::{
    enumerate_kary, find_special, polynomial_gens, SearchOutcome, SpecialKind, SpecialWitness,
};
use crate::finalg::{El, FiniteAlgebra, OpTable};
use std::collections::{HashMap, VecDeque};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ConlatError {
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("the algebra has no Mal'cev polynomial within the search cap")]
    NoMalcev,
    #[error("element {0} out of range for universe size {1}")]
    OutOfRange(usize, usize),
}

/// A congruence in canonical representative form: `rep[x]` is the least
/// element of the block of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    pub universe: usize,
    pub rep: Vec<El>,
}

impl Congruence {
    pub fn bottom(universe: usize) -> Self {
        Congruence {
            universe,
            rep: (0..universe).map(|x| x as El).collect(),
        }
    }

    pub fn top(universe: usize) -> Self {
        Congruence {
            universe,
            rep: vec![0; universe],
        }
    }

    /// Canonicalize an arbitrary block-assignment into least-representative
    /// form.
    pub fn from_assignment(universe: usize, class_of: &[usize]) -> Self {
        let mut least: HashMap<usize, El> = HashMap::new();
        for x in 0..universe {
            least.entry(class_of[x]).or_insert(x as El);
        }
        Congruence {
            universe,
            rep: (0..universe).map(|x| least[&class_of[x]]).collect(),
        }
    }

    pub fn related(&self, x: El, y: El) -> bool {
        self.rep[x as usize] == self.rep[y as usize]
    }

    pub fn is_bottom(&self) -> bool {
        self.rep.iter().enumerate().all(|(x, &r)| r as usize == x)
    }

    pub fn is_top(&self) -> bool {
        self.rep.iter().all(|&r| r == 0)
    }

    /// All related pairs `(x, y)` with `x != y`, in lexicographic order.
    pub fn nontrivial_pairs(&self) -> Vec<(El, El)> {
        let q = self.universe;
        let mut out = Vec::new();
        for x in 0..q {
            for y in 0..q {
                if x != y && self.related(x as El, y as El) {
                    out.push((x as El, y as El));
                }
            }
        }
        out
    }

    /// All related pairs including the diagonal, in lexicographic order.
    pub fn all_pairs(&self) -> Vec<(El, El)> {
        let q = self.universe;
        let mut out = Vec::new();
        for x in 0..q {
            for y in 0..q {
                if self.related(x as El, y as El) {
                    out.push((x as El, y as El));
                }
            }
        }
        out
    }

    pub fn blocks(&self) -> Vec<Vec<El>> {
        let mut map: std::collections::BTreeMap<El, Vec<El>> = Default::default();
        for x in 0..self.universe {
            map.entry(self.rep[x]).or_default().push(x as El);
        }
        map.into_values().collect()
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let q = self.universe;
        let mut key: HashMap<(El, El), usize> = HashMap::new();
        let mut class_of = vec![0usize; q];
        for x in 0..q {
            let k = (self.rep[x], other.rep[x]);
            let next = key.len();
            class_of[x] = *key.entry(k).or_insert(next);
        }
        Congruence::from_assignment(q, &class_of)
    }

    /// Join in the congruence lattice: the transitive closure of the union
    /// (a congruence whenever both inputs are).
    pub fn join(&self, other: &Congruence) -> Congruence {
        let q = self.universe;
        let mut uf = UnionFind::new(q);
        for x in 0..q {
            uf.union(x, self.rep[x] as usize);
            uf.union(x, other.rep[x] as usize);
        }
        let class_of: Vec<usize> = (0..q).map(|x| uf.find(x)).collect();
        Congruence::from_assignment(q, &class_of)
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        (0..self.universe).all(|x| other.related(x as El, self.rep[x]))
    }

    /// Is this partition compatible with every operation of `alg`?
    pub fn is_congruence_of(&self, alg: &FiniteAlgebra) -> bool {
        let q = alg.universe;
        for op in &alg.ops {
            let n = op.arity;
            // check compatibility via single-coordinate perturbations: for a
            // partition this is equivalent to full compatibility
            let len = crate::finalg::table_len(q, n);
            for r in 0..len {
                let t = crate::finalg::unrank(r, q, n);
                let v = op.eval(&t);
                for pos in 0..n {
                    for y in 0..q as El {
                        if self.related(t[pos], y) {
                            let mut t2 = t.clone();
                            t2[pos] = y;
                            if !self.related(v, op.eval(&t2)) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        // keep the least element as root so reps are canonical
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// Why two elements were merged during congruence generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeReason {
    /// The i-th generator pair.
    Generator(usize),
    /// The unary translation `x -> op(frozen[0..pos], x, frozen[pos..])`
    /// applied to an earlier edge.
    Translation {
        op: usize,
        pos: usize,
        frozen: Vec<El>,
        base: usize,
    },
}

/// The proof forest built while generating a congruence; lets callers
/// extract, for any related pair, a polynomial witness in the sense of the
/// Mal'cev congruence-generation lemma.
#[derive(Debug, Clone)]
pub struct CgTrace {
    pub universe: usize,
    pub gen_pairs: Vec<(El, El)>,
    /// Edge list `(u, v, reason)`; edges form a forest spanning each block.
    pub edges: Vec<(El, El, MergeReason)>,
}

/// Congruence generated by `pairs`, with a proof forest. Closure: union-find
/// over the generator pairs and, iteratively, every unary translation of
/// every merged edge (each basic operation with all but one argument
/// frozen).
pub fn cg_trace(alg: &FiniteAlgebra, pairs: &[(El, El)]) -> (Congruence, CgTrace) {
    let q = alg.universe;
    let mut uf = UnionFind::new(q);
    let mut edges: Vec<(El, El, MergeReason)> = Vec::new();
    let mut work: VecDeque<usize> = VecDeque::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if uf.union(a as usize, b as usize) {
            edges.push((a, b, MergeReason::Generator(i)));
            work.push_back(edges.len() - 1);
        }
    }
    while let Some(e) = work.pop_front() {
        let (x, y, _) = edges[e].clone();
        for (oi, op) in alg.ops.iter().enumerate() {
            let n = op.arity;
            let frozen_len = crate::finalg::table_len(q, n - 1);
            for pos in 0..n {
                for fr in 0..frozen_len {
                    let frozen = crate::finalg::unrank(fr, q, n - 1);
                    let mut args = vec![0 as El; n];
                    for (j, &f) in frozen.iter().enumerate() {
                        args[if j < pos { j } else { j + 1 }] = f;
                    }
                    args[pos] = x;
                    let u = op.eval(&args);
                    args[pos] = y;
                    let v = op.eval(&args);
                    if uf.union(u as usize, v as usize) {
                        edges.push((
                            u,
                            v,
                            MergeReason::Translation {
                                op: oi,
                                pos,
                                frozen,
                                base: e,
                            },
                        ));
                        work.push_back(edges.len() - 1);
                    }
                }
            }
        }
    }
    let class_of: Vec<usize> = (0..q).map(|x| uf.find(x)).collect();
    (
        Congruence::from_assignment(q, &class_of),
        CgTrace {
            universe: q,
            gen_pairs: pairs.to_vec(),
            edges,
        },
    )
}

/// Least congruence of `alg` containing `pairs`.
pub fn cg(alg: &FiniteAlgebra, pairs: &[(El, El)]) -> Congruence {
    cg_trace(alg, pairs).0
}

impl CgTrace {
    fn unary_translation(&self, alg: &FiniteAlgebra, op: usize, pos: usize, frozen: &[El]) -> OpTable {
        let g = &alg.ops[op];
        OpTable::from_fn(format!("{}[slice]", g.name), 1, self.universe, |t| {
            let mut args = vec![0 as El; g.arity];
            for (j, &f) in frozen.iter().enumerate() {
                args[if j < pos { j } else { j + 1 }] = f;
            }
            args[pos] = t[0];
            g.eval(&args)
        })
    }

    /// Polynomial witness for edge `e`: a k-ary table `p` (k = number of
    /// generator pairs) with `p(a_1..a_k) = u` and `p(b_1..b_k) = v` where
    /// `(u, v)` is the edge. Requires a Mal'cev polynomial only for the path
    /// composition in [`CgTrace::explain`], not here.
    fn edge_polynomial(&self, alg: &FiniteAlgebra, e: usize, memo: &mut HashMap<usize, OpTable>) -> OpTable {
        if let Some(p) = memo.get(&e) {
            return p.clone();
        }
        let k = self.gen_pairs.len();
        let q = self.universe;
        let p = match &self.edges[e].2 {
            MergeReason::Generator(i) => OpTable::projection(k, i + 1, q),
            MergeReason::Translation {
                op,
                pos,
                frozen,
                base,
            } => {
                let t = self.unary_translation(alg, *op, *pos, frozen);
                let inner = self.edge_polynomial(alg, *base, memo);
                OpTable::compose(&t, &[&inner]).expect("translation composition")
            }
        };
        memo.insert(e, p.clone());
        p
    }

    /// A k-ary polynomial `p` with `p(a_1..a_k) = c` and `p(b_1..b_k) = e`
    /// for a pair `(c, e)` of the generated congruence; `d` must be a
    /// Mal'cev polynomial of the algebra (used to compose path steps).
    pub fn explain(&self, alg: &FiniteAlgebra, d: &OpTable, c: El, e: El) -> Option<OpTable> {
        let k = self.gen_pairs.len().max(1);
        let q = self.universe;
        if c == e {
            return Some(OpTable::from_fn(format!("c{c}"), k, q, |_| c));
        }
        // BFS for a path from c to e in the proof forest
        let mut adj: HashMap<El, Vec<(El, usize, bool)>> = HashMap::new();
        for (i, (u, v, _)) in self.edges.iter().enumerate() {
            adj.entry(*u).or_default().push((*v, i, false));
            adj.entry(*v).or_default().push((*u, i, true));
        }
        let mut prev: HashMap<El, (El, usize, bool)> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(c);
        while let Some(x) = queue.pop_front() {
            if x == e {
                break;
            }
            if let Some(nbrs) = adj.get(&x) {
                for &(y, i, rev) in nbrs {
                    if y != c && !prev.contains_key(&y) {
                        prev.insert(y, (x, i, rev));
                        queue.push_back(y);
                    }
                }
            }
        }
        prev.get(&e)?;
        let mut path: Vec<(usize, bool)> = Vec::new();
        let mut cur = e;
        while cur != c {
            let (px, i, rev) = prev[&cur];
            path.push((i, rev));
            cur = px;
        }
        path.reverse();
        // compose the path: step polynomials glued by the Mal'cev operation
        let mut memo = HashMap::new();
        let mut acc: Option<(OpTable, El)> = None; // (polynomial, current right endpoint)
        for (i, rev) in path {
            let (u, v, _) = self.edges[i].clone();
            let raw = self.edge_polynomial(alg, i, &mut memo);
            let (step, to) = if rev {
                // need (v -> u): symmetry via d
                let cu = OpTable::from_fn("c", k, q, |_| u);
                let cv = OpTable::from_fn("c", k, q, |_| v);
                (OpTable::compose(d, &[&cu, &raw, &cv]).expect("sym"), u)
            } else {
                (raw, v)
            };
            acc = Some(match acc {
                None => (step, to),
                Some((p1, mid)) => {
                    let cm = OpTable::from_fn("c", k, q, |_| mid);
                    (OpTable::compose(d, &[&p1, &cm, &step]).expect("trans"), to)
                }
            });
        }
        acc.map(|(p, _)| p)
    }
}

/// The congruence lattice of a finite algebra.
#[derive(Debug, Clone)]
pub struct ConLattice {
    pub congruences: Vec<Congruence>,
    pub bottom: usize,
    pub top: usize,
    pub atoms: Vec<usize>,
    pub coatoms: Vec<usize>,
}

/// All congruences: join closure of the principal congruences.
pub fn all_congruences(alg: &FiniteAlgebra, budget: usize) -> Result<ConLattice, ConlatError> {
    let q = alg.universe;
    let mut set: Vec<Congruence> = vec![Congruence::bottom(q)];
    for a in 0..q {
        for b in (a + 1)..q {
            let c = cg(alg, &[(a as El, b as El)]);
            if !set.contains(&c) {
                set.push(c);
            }
        }
    }
    // join closure
    let mut i = 0;
    while i < set.len() {
        let mut j = 0;
        while j < set.len() {
            let joined = set[i].join(&set[j]);
            if !set.contains(&joined) {
                set.push(joined);
                if set.len() > budget {
                    return Err(ConlatError::Budget(format!(
                        "congruence lattice exceeds {budget} elements"
                    )));
                }
            }
            j += 1;
        }
        i += 1;
    }
    set.sort();
    let bottom = set
        .iter()
        .position(|c| c.is_bottom())
        .expect("bottom present");
    let top = set.iter().position(|c| c.is_top()).expect("top present");
    let atoms: Vec<usize> = (0..set.len())
        .filter(|&i| {
            !set[i].is_bottom()
                && (0..set.len()).all(|j| {
                    j == i || set[j].is_bottom() || !set[j].leq(&set[i]) || set[j] == set[i]
                })
        })
        .collect();
    let coatoms: Vec<usize> = (0..set.len())
        .filter(|&i| {
            !set[i].is_top()
                && (0..set.len()).all(|j| {
                    j == i || set[j].is_top() || !set[i].leq(&set[j]) || set[j] == set[i]
                })
        })
        .collect();
    Ok(ConLattice {
        congruences: set,
        bottom,
        top,
        atoms,
        coatoms,
    })
}

/// No two nontrivial congruences meet to the bottom; for finite lattices,
/// at most one atom.
pub fn is_fsi(alg: &FiniteAlgebra) -> Result<bool, ConlatError> {
    let lat = all_congruences(alg, 100_000)?;
    Ok(lat.atoms.len() <= 1)
}

/// Finitely subdirectly irreducible with a unique atom and at least two
/// elements.
pub fn is_si(alg: &FiniteAlgebra) -> Result<bool, ConlatError> {
    let lat = all_congruences(alg, 100_000)?;
    Ok(lat.atoms.len() == 1 && alg.universe >= 2)
}

/// The unique atom of the congruence lattice, when it exists.
pub fn monolith(alg: &FiniteAlgebra) -> Result<Option<Congruence>, ConlatError> {
    let lat = all_congruences(alg, 100_000)?;
    if lat.atoms.len() == 1 && alg.universe >= 2 {
        Ok(Some(lat.congruences[lat.atoms[0]].clone()))
    } else {
        Ok(None)
    }
}

/// Generate the matrix subalgebra M(alpha, beta): quadruples
/// `(m11, m12, m21, m22)` generated by alpha-rows `(a,a,b,b)`, beta-columns
/// `(u,v,u,v)` and diagonal constants, closed under the basic operations
/// componentwise.
pub fn matrices(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Vec<[El; 4]> {
    let q = alg.universe;
    let mut set: Vec<[El; 4]> = Vec::new();
    let mut index: std::collections::HashSet<[El; 4]> = Default::default();
    let push = |m: [El; 4], set: &mut Vec<[El; 4]>, index: &mut std::collections::HashSet<[El; 4]>| {
        if index.insert(m) {
            set.push(m);
        }
    };
    for (a, b) in alpha.all_pairs() {
        push([a, a, b, b], &mut set, &mut index);
    }
    for (u, v) in beta.all_pairs() {
        push([u, v, u, v], &mut set, &mut index);
    }
    for c in 0..q as El {
        push([c, c, c, c], &mut set, &mut index);
    }
    // frontier-based closure under the basic operations componentwise
    let mut prev_start = 0usize;
    loop {
        let cur_len = set.len();
        for op in &alg.ops {
            let n = op.arity;
            let mut sel = vec![0usize; n];
            'tuples: loop {
                if sel.iter().any(|&s| s >= prev_start) {
                    let mut m = [0 as El; 4];
                    for c in 0..4 {
                        let mut args = vec![0 as El; n];
                        for (j, &s) in sel.iter().enumerate() {
                            args[j] = set[s][c];
                        }
                        m[c] = op.eval(&args);
                    }
                    if index.insert(m) {
                        set.push(m);
                    }
                }
                let mut i = n;
                loop {
                    if i == 0 {
                        break 'tuples;
                    }
                    i -= 1;
                    sel[i] += 1;
                    if sel[i] < cur_len {
                        break;
                    }
                    sel[i] = 0;
                }
            }
        }
        if set.len() == cur_len {
            return set;
        }
        prev_start = cur_len;
    }
}

/// Method for the centralizing check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralizeMethod {
    Matrices,
    BinaryPolys { cap_bytes: usize },
}

/// Does alpha centralize beta modulo eta?
pub fn centralizes(
    alg: &FiniteAlgebra,
    alpha: &Congruence,
    beta: &Congruence,
    eta: &Congruence,
    method: CentralizeMethod,
) -> SearchOutcome<(), ([El; 4],)> {
    match method {
        CentralizeMethod::Matrices => {
            for m in matrices(alg, alpha, beta) {
                if eta.related(m[0], m[1]) && !eta.related(m[2], m[3]) {
                    return SearchOutcome::Refuted((m,));
                }
            }
            SearchOutcome::Proven(())
        }
        CentralizeMethod::BinaryPolys { cap_bytes } => {
            // C(1,1,alpha,beta,eta) over the enumerated binary polynomials
            let gens = polynomial_gens(alg);
            let set = match enumerate_kary(&gens, 2, cap_bytes) {
                SearchOutcome::Proven(s) => s,
                _ => {
                    return SearchOutcome::Inconclusive {
                        reason: "binary polynomial enumeration hit the cap".into(),
                        partial: None,
                    }
                }
            };
            let q = alg.universe;
            for values in &set.members {
                let at = |x: El, y: El| values[x as usize * q + y as usize];
                for (a, b) in alpha.all_pairs() {
                    for (u, v) in beta.all_pairs() {
                        if eta.related(at(a, u), at(a, v)) && !eta.related(at(b, u), at(b, v)) {
                            return SearchOutcome::Refuted(([at(a, u), at(a, v), at(b, u), at(b, v)],));
                        }
                    }
                }
            }
            SearchOutcome::Proven(())
        }
    }
}

/// The commutator `[alpha, beta]`: least eta with `C(alpha, beta; eta)`,
/// found by forced-pair iteration from the bottom congruence using the
/// matrix subalgebra.
pub fn commutator(alg: &FiniteAlgebra, alpha: &Congruence, beta: &Congruence) -> Congruence {
    let ms = matrices(alg, alpha, beta);
    let mut eta = Congruence::bottom(alg.universe);
    loop {
        let mut forced: Vec<(El, El)> = Vec::new();
        for m in &ms {
            if eta.related(m[0], m[1]) && !eta.related(m[2], m[3]) {
                forced.push((m[2], m[3]));
            }
        }
        if forced.is_empty() {
            return eta;
        }
        let mut pairs = eta.nontrivial_pairs();
        pairs.extend(forced);
        eta = cg(alg, &pairs);
    }
}

/// The absorbing-polynomial pair set
/// `{(z(v1,v2), z(u1,u2)) : z binary polynomial absorbing at (u1,u2)}`.
pub fn absorbing_commutator(
    alg: &FiniteAlgebra,
    p1: (El, El),
    p2: (El, El),
    cap_bytes: usize,
) -> SearchOutcome<Vec<(El, El)>, ()> {
    let (u1, v1) = p1;
    let (u2, v2) = p2;
    let gens = polynomial_gens(alg);
    let set = match enumerate_kary(&gens, 2, cap_bytes) {
        SearchOutcome::Proven(s) => s,
        _ => {
            return SearchOutcome::Inconclusive {
                reason: "binary polynomial enumeration hit the cap".into(),
                partial: None,
            }
        }
    };
    let q = alg.universe;
    let mut out: Vec<(El, El)> = Vec::new();
    for values in &set.members {
        let at = |x: El, y: El| values[x as usize * q + y as usize];
        let c = at(u1, u2);
        let absorbing = (0..q as El).all(|x| at(x, u2) == c) && (0..q as El).all(|y| at(u1, y) == c);
        if absorbing {
            out.push((at(v1, v2), c));
        }
    }
    out.sort_unstable();
    out.dedup();
    SearchOutcome::Proven(out)
}

/// Find an absorbing binary polynomial `z` at `(u1, u2)` with prescribed
/// values `z(v1, v2) = c0` and `z(u1, u2) = d0` (early-exit search over the
/// binary polynomial closure).
pub fn find_absorbing_with_values(
    alg: &FiniteAlgebra,
    (u1, v1): (El, El),
    (u2, v2): (El, El),
    (c0, d0): (El, El),
    cap_bytes: usize,
) -> Option<OpTable> {
    let gens = polynomial_gens(alg);
    let q = alg.universe;
    let mut found: Option<Vec<El>> = None;
    let mut check = |_i: usize, values: &[El]| {
        let at = |x: El, y: El| values[x as usize * q + y as usize];
        let c = at(u1, u2);
        if c == d0
            && at(v1, v2) == c0
            && (0..q as El).all(|x| at(x, u2) == c)
            && (0..q as El).all(|y| at(u1, y) == c)
        {
            found = Some(values.to_vec());
            crate::clones::Visit::Stop
        } else {
            crate::clones::Visit::Continue
        }
    };
    let (_, _) = crate::clones::closure_with_universe(&gens, 2, q, cap_bytes, &mut check);
    found.map(|values| OpTable {
        name: "z".into(),
        arity: 2,
        universe: q,
        values,
    })
}

/// Outcome payload of [`find_weak_difference`].
#[derive(Debug, Clone)]
pub struct WeakDifference {
    pub witness: SpecialWitness,
}

/// Generator mode: the term clone or the polynomial clone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    Term,
    Polynomial,
}

pub fn gens_for(alg: &FiniteAlgebra, mode: GenMode) -> Vec<OpTable> {
    match mode {
        GenMode::Term => alg.ops.clone(),
        GenMode::Polynomial => polynomial_gens(alg),
    }
}

/// Search the ternary part for a weak difference operation: `d(a,b,b)` and
/// `d(b,b,a)` are `[theta,theta]`-related to `a` for every congruence theta
/// and `(a,b)` in theta.
pub fn find_weak_difference(
    alg: &FiniteAlgebra,
    mode: GenMode,
    cap_bytes: usize,
) -> Result<SearchOutcome<SpecialWitness, ()>, ConlatError> {
    let lat = all_congruences(alg, 100_000)?;
    let comms: Vec<Congruence> = lat
        .congruences
        .iter()
        .map(|t| commutator(alg, t, t))
        .collect();
    let q = alg.universe;
    let gens = gens_for(alg, mode);
    let ok = |values: &[El]| -> bool {
        let at = |x: El, y: El, z: El| values[(x as usize * q + y as usize) * q + z as usize];
        for (t, c) in lat.congruences.iter().zip(&comms) {
            for (a, b) in t.all_pairs() {
                if !c.related(at(a, b, b), a) || !c.related(at(b, b, a), a) {
                    return false;
                }
            }
        }
        true
    };
    let mut found = None;
    let mut check = |i: usize, values: &[El]| {
        if ok(values) {
            found = Some(i);
            crate::clones::Visit::Stop
        } else {
            crate::clones::Visit::Continue
        }
    };
    let (set, end) = crate::clones::closure_with_universe(&gens, 3, q, cap_bytes, &mut check);
    if let Some(i) = found {
        return Ok(SearchOutcome::Proven(SpecialWitness {
            tables: vec![set.member_op(i)],
            terms: vec![set.witness_term(i)],
        }));
    }
    Ok(match end {
        crate::clones::ClosureEnd::Fixpoint => SearchOutcome::Refuted(()),
        _ => SearchOutcome::Inconclusive {
            reason: "ternary closure cap reached".into(),
            partial: None,
        },
    })
}

/// Structured verdict of the Mal'cev classifier: a finite algebra with a
/// Mal'cev polynomial has an equationally additive polynomial clone iff it
/// is subdirectly irreducible with a non-Abelian monolith.
#[derive(Debug, Clone)]
pub struct MalcevVerdict {
    pub malcev: SpecialWitness,
    pub lattice_size: usize,
    pub si: bool,
    pub monolith: Option<Congruence>,
    pub monolith_commutator: Option<Congruence>,
    pub additive: bool,
}

pub fn classify_malcev_eqadd(
    alg: &FiniteAlgebra,
    cap_bytes: usize,
) -> Result<MalcevVerdict, ConlatError> {
    let gens = polynomial_gens(alg);
    // Cheap pass first: Mal'cev polynomials of expanded groups are built from
    // the low-arity operations, and restricting the generators avoids
    // enumerating compositions of high-arity ones. A hit in the subclone is a
    // hit in the full clone; only a miss needs the full search.
    let low: Vec<OpTable> = gens.iter().filter(|g| g.arity <= 2).cloned().collect();
    let malcev = match find_special(&low, SpecialKind::Malcev, cap_bytes) {
        SearchOutcome::Proven(w) => w,
        _ => match find_special(&gens, SpecialKind::Malcev, cap_bytes) {
            SearchOutcome::Proven(w) => w,
            _ => return Err(ConlatError::NoMalcev),
        },
    };
    let lat = all_congruences(alg, 100_000)?;
    let si = lat.atoms.len() == 1 && alg.universe >= 2;
    let mono = if si {
        Some(lat.congruences[lat.atoms[0]].clone())
    } else {
        None
    };
    let comm = mono.as_ref().map(|m| commutator(alg, m, m));
    let additive = si && comm.as_ref().map(|c| !c.is_bottom()).unwrap_or(false);
    Ok(MalcevVerdict {
        malcev,
        lattice_size: lat.congruences.len(),
        si,
        monolith: mono,
        monolith_commutator: comm,
        additive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalg::FiniteAlgebra;

    fn z4_group() -> FiniteAlgebra {
        let add = OpTable::from_fn("add", 2, 4, |t| ((t[0] as usize + t[1] as usize) % 4) as El);
        let neg = OpTable::from_fn("neg", 1, 4, |t| ((4 - t[0] as usize) % 4) as El);
        FiniteAlgebra::new("z4", 4, vec![add, neg]).unwrap()
    }

    #[test]
    fn z4_lattice() {
        let alg = z4_group();
        let lat = all_congruences(&alg, 1000).unwrap();
        assert_eq!(lat.congruences.len(), 3);
        let c = cg(&alg, &[(0, 2)]);
        assert!(c.related(1, 3));
        assert!(!c.related(0, 1));
        let m = monolith(&alg).unwrap().unwrap();
        assert_eq!(m, c);
        // Abelian group: commutator of top with itself is bottom
        let top = Congruence::top(4);
        assert!(commutator(&alg, &top, &top).is_bottom());
    }
}
