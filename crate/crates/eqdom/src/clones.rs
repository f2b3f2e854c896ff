//! Enumeration of the k-ary part of a generated clone by breadth-first
//! closure under composition, clone membership tests, searches for special
//! ternary terms (Mal'cev, majority, Jonsson chains), and centralizers on
//! small universes.

use crate::finalg::{table_len, unrank, El, FiniteAlgebra, OpTable};
use std::collections::HashMap;

/// Default enumeration cap, counted in table bytes across all members.
pub const DEFAULT_CAP_BYTES: usize = 2_000_000;

/// Outcome of a bounded search.
#[derive(Debug, Clone)]
pub enum SearchOutcome<P, R> {
    /// A checkable witness.
    Proven(P),
    /// A checkable counterexample (or exhaustion of a completed space).
    Refuted(R),
    /// The search hit a cap; the answer is unknown.
    Inconclusive { reason: String, partial: Option<P> },
}

impl<P, R> SearchOutcome<P, R> {
    pub fn is_proven(&self) -> bool {
        matches!(self, SearchOutcome::Proven(_))
    }
    pub fn is_refuted(&self) -> bool {
        matches!(self, SearchOutcome::Refuted(_))
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, SearchOutcome::Inconclusive { .. })
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CloneError {
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Finalg(#[from] crate::finalg::FinalgError),
}

/// How a member of a [`TermOpSet`] arose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The i-th (1-based) projection.
    Projection(usize),
    /// Generator `gen` applied to earlier members.
    Apply { gen: usize, children: Vec<usize> },
}

/// The enumerated k-ary part of a generated clone. Members `0..k-1` are the
/// projections.
#[derive(Debug, Clone)]
pub struct TermOpSet {
    pub k: usize,
    pub universe: usize,
    pub gens: Vec<OpTable>,
    /// Member value tables in discovery order.
    pub members: Vec<Vec<El>>,
    pub witnesses: Vec<Witness>,
    /// Whether the closure reached a fixpoint.
    pub complete: bool,
    index: HashMap<Vec<El>, usize>,
}

impl TermOpSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position_of(&self, values: &[El]) -> Option<usize> {
        self.index.get(values).copied()
    }

    pub fn member_op(&self, i: usize) -> OpTable {
        OpTable {
            name: format!("m{i}"),
            arity: self.k,
            universe: self.universe,
            values: self.members[i].clone(),
        }
    }

    /// Re-evaluate the witness of member `i` bottom-up; equals the stored
    /// table for a sound set.
    pub fn reevaluate_witness(&self, i: usize) -> Vec<El> {
        match &self.witnesses[i] {
            Witness::Projection(p) => {
                let q = self.universe;
                let len = table_len(q, self.k);
                (0..len).map(|r| unrank(r, q, self.k)[p - 1]).collect()
            }
            Witness::Apply { gen, children } => {
                let g = &self.gens[*gen];
                let q = self.universe;
                let len = table_len(q, self.k);
                let kids: Vec<Vec<El>> = children
                    .iter()
                    .map(|&c| self.reevaluate_witness(c))
                    .collect();
                (0..len)
                    .map(|p| {
                        let mut idx = 0usize;
                        for kid in &kids {
                            idx = idx * q + kid[p] as usize;
                        }
                        g.values[idx]
                    })
                    .collect()
            }
        }
    }

    /// Render the witness of member `i` as a term string over `x1..xk`.
    pub fn witness_term(&self, i: usize) -> String {
        match &self.witnesses[i] {
            Witness::Projection(p) => format!("x{p}"),
            Witness::Apply { gen, children } => {
                let args: Vec<String> =
                    children.iter().map(|&c| self.witness_term(c)).collect();
                format!("{}({})", self.gens[*gen].name, args.join(","))
            }
        }
    }
}

/// Visitor verdict for [`closure_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Continue,
    Stop,
}

/// Why a closure run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureEnd {
    Fixpoint,
    CapHit,
    VisitorStop,
}

/// Breadth-first closure of the k projections under the generators, with
/// deterministic generator and operand order. `on_new` sees every member
/// (including the projections) in discovery order and may stop the run.
pub fn closure_with(
    gens: &[OpTable],
    k: usize,
    cap_bytes: usize,
    mut on_new: impl FnMut(usize, &[El]) -> Visit,
) -> (TermOpSet, ClosureEnd) {
    assert!(k >= 1);
    let universe = gens.first().map(|g| g.universe).unwrap_or(0);
    let universe = if universe == 0 {
        // generator-free clones still have projections; universe must come
        // from somewhere, so default to 1 only if truly unknown
        1
    } else {
        universe
    };
    for g in gens {
        assert_eq!(g.universe, universe, "generators must share a universe");
    }
    closure_with_universe(gens, k, universe, cap_bytes, &mut on_new)
}

/// Like [`closure_with`] but with an explicit universe (needed when `gens`
/// is empty, e.g. the clone of projections).
pub fn closure_with_universe(
    gens: &[OpTable],
    k: usize,
    universe: usize,
    cap_bytes: usize,
    on_new: &mut dyn FnMut(usize, &[El]) -> Visit,
) -> (TermOpSet, ClosureEnd) {
    let q = universe;
    let tlen = table_len(q, k);
    let mut set = TermOpSet {
        k,
        universe: q,
        gens: gens.to_vec(),
        members: Vec::new(),
        witnesses: Vec::new(),
        complete: false,
        index: HashMap::new(),
    };
    let cap_members = (cap_bytes / tlen.max(1)).max(k);
    let mut end = ClosureEnd::Fixpoint;

    macro_rules! add {
        ($values:expr, $wit:expr) => {{
            let values: Vec<El> = $values;
            if !set.index.contains_key(&values) {
                let idx = set.members.len();
                set.index.insert(values.clone(), idx);
                set.members.push(values);
                set.witnesses.push($wit);
                if on_new(idx, &set.members[idx]) == Visit::Stop {
                    end = ClosureEnd::VisitorStop;
                    true
                } else if set.members.len() >= cap_members {
                    end = ClosureEnd::CapHit;
                    true
                } else {
                    false
                }
            } else {
                false
            }
        }};
    }

    for i in 1..=k {
        let values: Vec<El> = (0..tlen).map(|r| unrank(r, q, k)[i - 1]).collect();
        if add!(values, Witness::Projection(i)) {
            return (set, end);
        }
    }

    // Round-based closure: in each round, apply every generator to every
    // tuple of members present at round start, skipping tuples confined to
    // members that already existed two rounds ago (those were covered).
    let mut prev_start = 0usize;
    loop {
        let cur_len = set.members.len();
        let mut out = vec![0 as El; tlen];
        'gens: for (gi, g) in gens.iter().enumerate() {
            let n = g.arity;
            let mut sel = vec![0usize; n];
            loop {
                let fresh = sel.iter().any(|&s| s >= prev_start);
                if fresh {
                    for p in 0..tlen {
                        let mut idx = 0usize;
                        for &s in &sel {
                            idx = idx * q + set.members[s][p] as usize;
                        }
                        out[p] = g.values[idx];
                    }
                    if add!(
                        out.clone(),
                        Witness::Apply {
                            gen: gi,
                            children: sel.clone(),
                        }
                    ) {
                        return (set, end);
                    }
                }
                // advance selection over members[0..cur_len]
                let mut i = n;
                loop {
                    if i == 0 {
                        continue 'gens;
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
        if set.members.len() == cur_len {
            set.complete = true;
            return (set, ClosureEnd::Fixpoint);
        }
        prev_start = cur_len;
    }
}

/// Enumerate the k-ary part of the clone generated by `gens`.
pub fn enumerate_kary(
    gens: &[OpTable],
    k: usize,
    cap_bytes: usize,
) -> SearchOutcome<TermOpSet, ()> {
    let (set, end) = closure_with(gens, k, cap_bytes, |_, _| Visit::Continue);
    match end {
        ClosureEnd::Fixpoint => SearchOutcome::Proven(set),
        _ => SearchOutcome::Inconclusive {
            reason: format!("member cap reached at {} members", set.len()),
            partial: Some(set),
        },
    }
}

/// Like [`enumerate_kary`] with an explicit universe (for empty generator
/// sets).
pub fn enumerate_kary_universe(
    gens: &[OpTable],
    k: usize,
    universe: usize,
    cap_bytes: usize,
) -> SearchOutcome<TermOpSet, ()> {
    let mut cont = |_: usize, _: &[El]| Visit::Continue;
    let (set, end) = closure_with_universe(gens, k, universe, cap_bytes, &mut cont);
    match end {
        ClosureEnd::Fixpoint => SearchOutcome::Proven(set),
        _ => SearchOutcome::Inconclusive {
            reason: format!("member cap reached at {} members", set.len()),
            partial: Some(set),
        },
    }
}

/// The polynomial generators of an algebra: its operations plus all unary
/// constants, deduplicated by value table.
pub fn polynomial_gens(alg: &FiniteAlgebra) -> Vec<OpTable> {
    let mut gens = alg.ops.clone();
    let mut seen: std::collections::HashSet<(usize, Vec<El>)> = gens
        .iter()
        .map(|g| (g.arity, g.values.clone()))
        .collect();
    for a in 0..alg.universe {
        let c = OpTable::constant(alg.universe, a as El);
        if seen.insert((c.arity, c.values.clone())) {
            gens.push(c);
        }
    }
    gens
}

/// A membership certificate: the enumerated set plus the index of the target.
#[derive(Debug, Clone)]
pub struct Containment {
    pub set: TermOpSet,
    pub member: usize,
}

/// Does the clone generated by `gens` contain `target` (at its own arity)?
pub fn clone_contains(
    gens: &[OpTable],
    target: &OpTable,
    cap_bytes: usize,
) -> SearchOutcome<Containment, ()> {
    let mut found = None;
    let mut check = |i: usize, values: &[El]| {
        if values == target.values.as_slice() {
            found = Some(i);
            Visit::Stop
        } else {
            Visit::Continue
        }
    };
    let (set, end) = closure_with_universe(
        gens,
        target.arity,
        target.universe,
        DEFAULT_CAP_BYTES.max(cap_bytes),
        &mut check,
    );
    if let Some(member) = found {
        return SearchOutcome::Proven(Containment { set, member });
    }
    match end {
        ClosureEnd::Fixpoint => SearchOutcome::Refuted(()),
        _ => SearchOutcome::Inconclusive {
            reason: "closure cap reached before the target appeared".into(),
            partial: None,
        },
    }
}

/// The special ternary terms searched by [`find_special`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialKind {
    /// `d(x,y,y) = d(y,y,x) = x`.
    Malcev,
    /// `h(x,x,y) = h(x,y,x) = h(y,x,x) = x`.
    Majority,
    /// A chain `f_0..f_n`, `n <= L`, of Jonsson terms with `f_0 = x`,
    /// `f_n = z`.
    JonssonChain(usize),
    /// `f(x,x,y) = x = f(x,y,x)` and `f(y,x,x) = f(x,y,f(y,x,x))`.
    WeakChainTerm,
}

/// Witness for [`find_special`]: the tables of the found term(s).
#[derive(Debug, Clone)]
pub struct SpecialWitness {
    pub tables: Vec<OpTable>,
    pub terms: Vec<String>,
}

fn is_malcev(values: &[El], q: usize) -> bool {
    for x in 0..q as El {
        for y in 0..q as El {
            if values[rank3(x, y, y, q)] != x || values[rank3(y, y, x, q)] != x {
                return false;
            }
        }
    }
    true
}

fn is_majority(values: &[El], q: usize) -> bool {
    for x in 0..q as El {
        for y in 0..q as El {
            if values[rank3(x, x, y, q)] != x
                || values[rank3(x, y, x, q)] != x
                || values[rank3(y, x, x, q)] != x
            {
                return false;
            }
        }
    }
    true
}

fn is_weak_chain_term(values: &[El], q: usize) -> bool {
    for x in 0..q as El {
        for y in 0..q as El {
            if values[rank3(x, x, y, q)] != x || values[rank3(x, y, x, q)] != x {
                return false;
            }
        }
    }
    for x in 0..q as El {
        for y in 0..q as El {
            let fyxx = values[rank3(y, x, x, q)];
            if values[rank3(x, y, fyxx, q)] != fyxx {
                return false;
            }
        }
    }
    true
}

#[inline]
fn rank3(x: El, y: El, z: El, q: usize) -> usize {
    (x as usize * q + y as usize) * q + z as usize
}

/// Search the ternary part of the clone generated by `gens` for a special
/// term (or Jonsson chain).
pub fn find_special(
    gens: &[OpTable],
    kind: SpecialKind,
    cap_bytes: usize,
) -> SearchOutcome<SpecialWitness, ()> {
    let universe = gens.first().map(|g| g.universe).unwrap_or(1);
    let q = universe;
    let single: Option<fn(&[El], usize) -> bool> = match kind {
        SpecialKind::Malcev => Some(is_malcev),
        SpecialKind::Majority => Some(is_majority),
        SpecialKind::WeakChainTerm => Some(is_weak_chain_term),
        SpecialKind::JonssonChain(_) => None,
    };
    if let Some(pred) = single {
        let mut found = None;
        let mut check = |i: usize, values: &[El]| {
            if pred(values, q) {
                found = Some(i);
                Visit::Stop
            } else {
                Visit::Continue
            }
        };
        let (set, end) = closure_with_universe(gens, 3, q, cap_bytes, &mut check);
        if let Some(i) = found {
            return SearchOutcome::Proven(SpecialWitness {
                tables: vec![set.member_op(i)],
                terms: vec![set.witness_term(i)],
            });
        }
        return match end {
            ClosureEnd::Fixpoint => SearchOutcome::Refuted(()),
            _ => SearchOutcome::Inconclusive {
                reason: "ternary closure cap reached".into(),
                partial: None,
            },
        };
    }
    let max_len = match kind {
        SpecialKind::JonssonChain(l) => l,
        _ => unreachable!(),
    };
    let mut cont = |_: usize, _: &[El]| Visit::Continue;
    let (set, end) = closure_with_universe(gens, 3, q, cap_bytes, &mut cont);
    match jonsson_chain_in(&set, max_len) {
        Some(chain) => SearchOutcome::Proven(SpecialWitness {
            terms: chain.iter().map(|&i| set.witness_term(i)).collect(),
            tables: chain.iter().map(|&i| set.member_op(i)).collect(),
        }),
        None => match end {
            ClosureEnd::Fixpoint => SearchOutcome::Refuted(()),
            _ => SearchOutcome::Inconclusive {
                reason: "ternary closure cap reached".into(),
                partial: None,
            },
        },
    }
}

/// Find a Jonsson chain `f_0 = x, .., f_n = z` with `n <= max_len` among the
/// members of a ternary term set: all `f_i(x,y,x) = x`, and consecutive terms
/// agree on `(x,x,y)` at even steps and on `(x,y,y)` at odd steps.
pub fn jonsson_chain_in(set: &TermOpSet, max_len: usize) -> Option<Vec<usize>> {
    assert_eq!(set.k, 3);
    let q = set.universe;
    let nodes: Vec<usize> = (0..set.len())
        .filter(|&i| {
            let v = &set.members[i];
            (0..q as El).all(|x| (0..q as El).all(|y| v[rank3(x, y, x, q)] == x))
        })
        .collect();
    if nodes.is_empty() {
        return None;
    }
    // members 0 and 2 are the projections x1 and x3
    if set.witnesses.first() != Some(&Witness::Projection(1))
        || set.witnesses.get(2) != Some(&Witness::Projection(3))
    {
        return None;
    }
    let (pi1, pi3) = (0usize, 2usize);
    // key of the (x,x,y) and (x,y,y) slices
    let slice = |i: usize, even: bool| -> Vec<El> {
        let v = &set.members[i];
        let mut out = Vec::with_capacity(q * q);
        for x in 0..q as El {
            for y in 0..q as El {
                out.push(if even {
                    v[rank3(x, x, y, q)]
                } else {
                    v[rank3(x, y, y, q)]
                });
            }
        }
        out
    };
    // BFS over (node, step parity considered next)
    use std::collections::VecDeque;
    let mut prev: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back((pi1, 0usize));
    prev.insert((pi1, 0), (usize::MAX, usize::MAX));
    while let Some((cur, steps)) = queue.pop_front() {
        if cur == pi3 {
            // reconstruct
            let mut chain = Vec::new();
            let mut state = (cur, steps);
            while state.0 != usize::MAX {
                chain.push(state.0);
                state = prev[&state];
            }
            chain.reverse();
            return Some(chain);
        }
        if steps == max_len {
            continue;
        }
        let even = steps % 2 == 0;
        let key = slice(cur, even);
        for &nx in &nodes {
            if nx != cur && slice(nx, even) == key && !prev.contains_key(&(nx, steps + 1)) {
                prev.insert((nx, steps + 1), (cur, steps));
                queue.push_back((nx, steps + 1));
            }
        }
    }
    None
}

/// Do `g` and `f` commute (each is a homomorphism for the other)?
pub fn commutes(g: &OpTable, f: &OpTable) -> bool {
    assert_eq!(g.universe, f.universe);
    let q = g.universe;
    let n = f.arity;
    let j = g.arity;
    let cells = table_len(q, n * j);
    let mut matrix = vec![0 as El; n * j];
    for m in 0..cells {
        let flat = unrank(m, q, n * j);
        matrix.copy_from_slice(&flat);
        // rows are length j, one per argument of f
        let mut idx_f = 0usize;
        for r in 0..n {
            idx_f = idx_f * q + g.values[crate::finalg::rank(&matrix[r * j..(r + 1) * j], q)] as usize;
        }
        let lhs = f.values[idx_f];
        let mut idx_g = 0usize;
        for c in 0..j {
            let mut col_idx = 0usize;
            for r in 0..n {
                col_idx = col_idx * q + matrix[r * j + c] as usize;
            }
            idx_g = idx_g * q + f.values[col_idx] as usize;
        }
        let rhs = g.values[idx_g];
        if lhs != rhs {
            return false;
        }
    }
    true
}

fn shift3(universe: usize) -> OpTable {
    OpTable::from_fn("zeta3", 1, universe, |t| ((t[0] as usize + 1) % universe) as El)
}

/// Exactly the k-ary tables commuting with every generator, within the hard
/// enumeration budget (q=2 with k<=4; q=3 with k<=2; q=3, k=3 when all
/// generators commute with the cyclic shift, ranging over shift-equivariant
/// candidates only).
pub fn centralizer_kary(gens: &[OpTable], k: usize) -> Result<Vec<OpTable>, CloneError> {
    let q = gens.first().map(|g| g.universe).unwrap_or(2);
    let space = table_len(q, k); // positions per candidate
    let direct = (q as f64).powf(space as f64);
    let mut out = Vec::new();
    if direct <= 65536.0 + 0.5 {
        for code in 0..(q.pow(space as u32)) {
            let values = unrank(code, q, space);
            let cand = OpTable {
                name: format!("u{code}"),
                arity: k,
                universe: q,
                values,
            };
            if gens.iter().all(|g| commutes(&cand, g)) {
                out.push(cand);
            }
        }
        return Ok(out);
    }
    if q == 3 && k == 3 {
        let zeta = shift3(3);
        if gens.iter().all(|g| commutes(g, &zeta)) {
            // shift-equivariant candidates: value at p + (1,1,1) is value at
            // p plus one; representatives are the 9 positions with x1 = 0
            for code in 0..3usize.pow(9) {
                let reps = unrank(code, 3, 9);
                let mut values = vec![0 as El; 27];
                for (ri, v) in reps.iter().enumerate() {
                    let y = (ri / 3) as El;
                    let z = (ri % 3) as El;
                    for s in 0..3 as El {
                        let pos = rank3(s, (y + s) % 3, (z + s) % 3, 3);
                        values[pos] = (v + s) % 3;
                    }
                }
                let cand = OpTable {
                    name: format!("u{code}"),
                    arity: 3,
                    universe: 3,
                    values,
                };
                if gens.iter().all(|g| commutes(&cand, g)) {
                    out.push(cand);
                }
            }
            return Ok(out);
        }
        return Err(CloneError::Budget(
            "q=3, k=3 centralizer requires shift-equivariant generators".into(),
        ));
    }
    Err(CloneError::Budget(format!(
        "centralizer space {q}^{space} is beyond the enumeration budget"
    )))
}

/// Does `target` commute with every member of the centralizer of `gens` up to
/// arity `k_budget`?
pub fn bicentralizer_contains(
    gens: &[OpTable],
    target: &OpTable,
    k_budget: usize,
) -> Result<bool, CloneError> {
    for j in 1..=k_budget {
        let cz = centralizer_kary(gens, j)?;
        for u in &cz {
            if !commutes(u, target) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meet2() -> OpTable {
        OpTable::from_fn("and", 2, 2, |t| t[0] & t[1])
    }

    #[test]
    fn closure_of_meet_binary() {
        let set = match enumerate_kary(&[meet2()], 2, DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(s) => s,
            _ => panic!("expected completion"),
        };
        assert_eq!(set.len(), 3);
        assert!(set.complete);
    }

    #[test]
    fn negation_unary_closure() {
        let neg = OpTable::from_fn("not", 1, 2, |t| 1 - t[0]);
        let set = match enumerate_kary(&[neg], 1, DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(s) => s,
            _ => panic!(),
        };
        assert_eq!(set.len(), 2);
    }
}
