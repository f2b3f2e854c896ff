//! Finite operations stored as dense value tables, finite algebras, explicit
//! relations, restriction/conjugation, the delta relations, and the bundle
//! file format.
//!
//! Tuples over a universe of size `q` are identified with their *rank*:
//! lexicographic with the first coordinate most significant,
//! `rank(x) = sum x_i * q^(n-i)`.

use std::fmt::Write as _;

/// An element of a finite universe `{0, .., q-1}`.
pub type El = u8;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FinalgError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("universe mismatch: {0} vs {1}")]
    UniverseMismatch(usize, usize),
    #[error("element {0} out of range for universe size {1}")]
    OutOfRange(usize, usize),
    #[error("table for `{name}` has {got} entries, expected {expected}")]
    TableLength {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("subset not invariant: image of tuple {tuple:?} is {value}, outside the subset")]
    NotInvariant { tuple: Vec<El>, value: El },
    #[error("unary table is not a permutation")]
    NotBijective,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FinalgError>;

/// Rank of a tuple, first coordinate most significant.
pub fn rank(tuple: &[El], q: usize) -> usize {
    let mut r = 0usize;
    for &x in tuple {
        r = r * q + x as usize;
    }
    r
}

/// Inverse of [`rank`] at arity `n`.
pub fn unrank(mut r: usize, q: usize, n: usize) -> Vec<El> {
    let mut t = vec![0 as El; n];
    for i in (0..n).rev() {
        t[i] = (r % q) as El;
        r /= q;
    }
    t
}

/// `q^n`, the number of `n`-tuples over a `q`-element universe.
pub fn table_len(q: usize, n: usize) -> usize {
    q.checked_pow(n as u32).expect("table size overflow")
}

/// A finitary operation on `{0,..,q-1}` stored as a dense value table in rank
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpTable {
    pub name: String,
    pub arity: usize,
    pub universe: usize,
    pub values: Vec<El>,
}

impl OpTable {
    pub fn new(name: impl Into<String>, arity: usize, universe: usize, values: Vec<El>) -> Result<Self> {
        let name = name.into();
        assert!(arity >= 1, "arity 0 is disallowed; use a unary constant");
        let expected = table_len(universe, arity);
        if values.len() != expected {
            return Err(FinalgError::TableLength {
                name,
                expected,
                got: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|&&v| (v as usize) >= universe) {
            return Err(FinalgError::OutOfRange(v as usize, universe));
        }
        Ok(OpTable {
            name,
            arity,
            universe,
            values,
        })
    }

    /// Build a table by evaluating `f` on every tuple in rank order.
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        universe: usize,
        mut f: impl FnMut(&[El]) -> El,
    ) -> Self {
        let len = table_len(universe, arity);
        let mut values = Vec::with_capacity(len);
        let mut tuple = vec![0 as El; arity];
        for r in 0..len {
            if r > 0 {
                // increment the tuple in rank order
                for i in (0..arity).rev() {
                    if (tuple[i] as usize) + 1 < universe {
                        tuple[i] += 1;
                        break;
                    }
                    tuple[i] = 0;
                }
            }
            values.push(f(&tuple));
        }
        OpTable::new(name, arity, universe, values).expect("from_fn produced an invalid table")
    }

    /// The `i`-th (1-based) of the `k` projections.
    pub fn projection(k: usize, i: usize, universe: usize) -> Self {
        assert!(1 <= i && i <= k);
        OpTable::from_fn(format!("pi{i}_{k}"), k, universe, |t| t[i - 1])
    }

    /// The unary constant with value `a`.
    pub fn constant(universe: usize, a: El) -> Self {
        assert!((a as usize) < universe);
        OpTable::from_fn(format!("c{a}"), 1, universe, |_| a)
    }

    /// Unchecked evaluation; callers must pass `arity` in-range elements.
    #[inline]
    pub fn eval(&self, args: &[El]) -> El {
        self.values[rank(args, self.universe)]
    }

    /// Checked evaluation.
    pub fn apply(&self, args: &[El]) -> Result<El> {
        if args.len() != self.arity {
            return Err(FinalgError::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        if let Some(&x) = args.iter().find(|&&x| (x as usize) >= self.universe) {
            return Err(FinalgError::OutOfRange(x as usize, self.universe));
        }
        Ok(self.eval(args))
    }

    /// Superposition `x -> outer(inner_1(x), .., inner_n(x))`; all inner
    /// tables share an arity `k` and the outer universe.
    pub fn compose(outer: &OpTable, inners: &[&OpTable]) -> Result<OpTable> {
        if inners.len() != outer.arity {
            return Err(FinalgError::ArityMismatch {
                expected: outer.arity,
                got: inners.len(),
            });
        }
        let k = match inners.first() {
            Some(g) => g.arity,
            None => unreachable!("arity 0 is disallowed"),
        };
        for g in inners {
            if g.arity != k {
                return Err(FinalgError::ArityMismatch {
                    expected: k,
                    got: g.arity,
                });
            }
            if g.universe != outer.universe {
                return Err(FinalgError::UniverseMismatch(outer.universe, g.universe));
            }
        }
        let q = outer.universe;
        let len = table_len(q, k);
        let mut values = Vec::with_capacity(len);
        for p in 0..len {
            let mut idx = 0usize;
            for g in inners {
                idx = idx * q + g.values[p] as usize;
            }
            values.push(outer.values[idx]);
        }
        Ok(OpTable {
            name: format!("{}(..)", outer.name),
            arity: k,
            universe: q,
            values,
        })
    }

    /// Number of argument positions on which the table actually depends.
    pub fn essential_arity(&self) -> usize {
        let q = self.universe;
        let n = self.arity;
        let mut essential = 0;
        for i in 0..n {
            // stride of position i in rank order
            let stride = table_len(q, n - 1 - i);
            let block = stride * q;
            let mut depends = false;
            'outer: for base in (0..self.values.len()).step_by(block) {
                for off in 0..stride {
                    let first = self.values[base + off];
                    for v in 1..q {
                        if self.values[base + v * stride + off] != first {
                            depends = true;
                            break 'outer;
                        }
                    }
                }
            }
            if depends {
                essential += 1;
            }
        }
        essential
    }

    /// Does the componentwise action of this table on tuples of `rel` stay
    /// inside `rel`?
    pub fn preserves(&self, rel: &Relation) -> Result<bool> {
        if self.universe != rel.universe {
            return Err(FinalgError::UniverseMismatch(self.universe, rel.universe));
        }
        let n = self.arity;
        let k = rel.arity;
        let q = rel.universe;
        let selections = (rel.tuples.len() as f64).powi(n as i32);
        if selections <= 1_000_000.0 {
            return Ok(self.preserves_brute(rel));
        }
        // Targeted search: look for a selection whose image is a specific
        // tuple outside rel. Sound and complete, and fast whenever the
        // complement of rel is small.
        let member = rel.rank_bitset();
        let tuples: Vec<Vec<El>> = rel.tuples.iter().map(|&r| unrank(r, q, k)).collect();
        // prefix_ok[v][m] = bitset over q^(m+1): prefixes of length m+1 of
        // preimages f^{-1}(v)
        let mut prefix_ok: Vec<Vec<Vec<bool>>> = vec![Vec::new(); q];
        for v in 0..q {
            let mut per_m = Vec::with_capacity(n);
            for m in 1..=n {
                per_m.push(vec![false; table_len(q, m)]);
            }
            prefix_ok[v] = per_m;
        }
        for (r, &val) in self.values.iter().enumerate() {
            let t = unrank(r, q, n);
            let mut pref = 0usize;
            for m in 0..n {
                pref = pref * q + t[m] as usize;
                prefix_ok[val as usize][m][pref] = true;
            }
        }
        for outside in 0..table_len(q, k) {
            if member[outside] {
                continue;
            }
            let target = unrank(outside, q, k);
            // DFS over the n argument columns
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, vec![0usize; k])];
            // (next column index to try at this depth, per-row prefix ranks)
            let mut chosen: Vec<usize> = Vec::new();
            'dfs: loop {
                let depth = chosen.len();
                if depth == n {
                    return Ok(false);
                }
                let (ref mut next, ref pref) = *stack.last_mut().unwrap();
                let mut advanced = false;
                while *next < tuples.len() {
                    let col = &tuples[*next];
                    *next += 1;
                    let mut newpref = pref.clone();
                    let mut ok = true;
                    for c in 0..k {
                        let np = newpref[c] * q + col[c] as usize;
                        if !prefix_ok[target[c] as usize][depth][np] {
                            ok = false;
                            break;
                        }
                        newpref[c] = np;
                    }
                    if ok {
                        chosen.push(*next - 1);
                        stack.push((0, newpref));
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    stack.pop();
                    if chosen.pop().is_none() {
                        break 'dfs;
                    }
                }
            }
        }
        Ok(true)
    }

    fn preserves_brute(&self, rel: &Relation) -> bool {
        let n = self.arity;
        let k = rel.arity;
        let q = rel.universe;
        let member = rel.rank_bitset();
        let tuples: Vec<Vec<El>> = rel.tuples.iter().map(|&r| unrank(r, q, k)).collect();
        let m = tuples.len();
        if m == 0 {
            return true;
        }
        let mut sel = vec![0usize; n];
        let mut args = vec![0 as El; n];
        loop {
            let mut out_rank = 0usize;
            for c in 0..k {
                for (j, &s) in sel.iter().enumerate() {
                    args[j] = tuples[s][c];
                }
                out_rank = out_rank * q + self.eval(&args) as usize;
            }
            if !member[out_rank] {
                return false;
            }
            // next selection
            let mut i = n;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                sel[i] += 1;
                if sel[i] < m {
                    break;
                }
                sel[i] = 0;
            }
        }
    }

    /// Restriction to an invariant subset, re-indexed to `0..|subset|-1` in
    /// increasing order of the original elements (the sorted subset is the
    /// renaming: new `i` names old `subset[i]`).
    pub fn restrict(&self, subset: &[El]) -> Result<OpTable> {
        let mut sub: Vec<El> = subset.to_vec();
        sub.sort_unstable();
        sub.dedup();
        let b = sub.len();
        let mut new_of_old = vec![usize::MAX; self.universe];
        for (i, &x) in sub.iter().enumerate() {
            if (x as usize) >= self.universe {
                return Err(FinalgError::OutOfRange(x as usize, self.universe));
            }
            new_of_old[x as usize] = i;
        }
        let n = self.arity;
        let len = table_len(b, n);
        let mut values = Vec::with_capacity(len);
        for r in 0..len {
            let small = unrank(r, b, n);
            let big: Vec<El> = small.iter().map(|&i| sub[i as usize]).collect();
            let v = self.eval(&big);
            let nv = new_of_old[v as usize];
            if nv == usize::MAX {
                return Err(FinalgError::NotInvariant {
                    tuple: big,
                    value: v,
                });
            }
            values.push(nv as El);
        }
        Ok(OpTable {
            name: format!("{}|", self.name),
            arity: n,
            universe: b,
            values,
        })
    }

    /// Is this a bijective unary table?
    pub fn is_permutation(&self) -> bool {
        if self.arity != 1 {
            return false;
        }
        let mut seen = vec![false; self.universe];
        for &v in &self.values {
            if seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    /// Conjugation `x -> perm(op(perm^{-1}(x_1), .., perm^{-1}(x_n)))`.
    pub fn conjugate(&self, perm: &OpTable) -> Result<OpTable> {
        if perm.universe != self.universe {
            return Err(FinalgError::UniverseMismatch(self.universe, perm.universe));
        }
        if !perm.is_permutation() {
            return Err(FinalgError::NotBijective);
        }
        let q = self.universe;
        let mut inv = vec![0 as El; q];
        for (x, &y) in perm.values.iter().enumerate() {
            inv[y as usize] = x as El;
        }
        let op = self;
        Ok(OpTable::from_fn(
            format!("{}^{}", op.name, perm.name),
            op.arity,
            q,
            |t| {
                let pre: Vec<El> = t.iter().map(|&x| inv[x as usize]).collect();
                perm.values[op.eval(&pre) as usize]
            },
        ))
    }
}

/// A finitary relation as an explicit, sorted, duplicate-free set of tuple
/// ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub universe: usize,
    pub tuples: Vec<usize>,
}

impl Relation {
    pub fn from_ranks(arity: usize, universe: usize, mut ranks: Vec<usize>) -> Result<Self> {
        ranks.sort_unstable();
        ranks.dedup();
        let len = table_len(universe, arity);
        if let Some(&r) = ranks.last() {
            if r >= len {
                return Err(FinalgError::OutOfRange(r, len));
            }
        }
        Ok(Relation {
            arity,
            universe,
            tuples: ranks,
        })
    }

    pub fn from_tuples(arity: usize, universe: usize, tuples: &[Vec<El>]) -> Result<Self> {
        for t in tuples {
            if t.len() != arity {
                return Err(FinalgError::ArityMismatch {
                    expected: arity,
                    got: t.len(),
                });
            }
            if let Some(&x) = t.iter().find(|&&x| (x as usize) >= universe) {
                return Err(FinalgError::OutOfRange(x as usize, universe));
            }
        }
        let ranks = tuples.iter().map(|t| rank(t, universe)).collect();
        Relation::from_ranks(arity, universe, ranks)
    }

    /// All of `A^m`.
    pub fn full(arity: usize, universe: usize) -> Self {
        Relation {
            arity,
            universe,
            tuples: (0..table_len(universe, arity)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains_rank(&self, r: usize) -> bool {
        self.tuples.binary_search(&r).is_ok()
    }

    pub fn contains_tuple(&self, t: &[El]) -> bool {
        self.contains_rank(rank(t, self.universe))
    }

    /// Membership bitset over all `q^m` ranks.
    pub fn rank_bitset(&self) -> Vec<bool> {
        let mut b = vec![false; table_len(self.universe, self.arity)];
        for &r in &self.tuples {
            b[r] = true;
        }
        b
    }

    pub fn complement(&self) -> Relation {
        let member = self.rank_bitset();
        Relation {
            arity: self.arity,
            universe: self.universe,
            tuples: (0..member.len()).filter(|&r| !member[r]).collect(),
        }
    }

    pub fn tuple_vecs(&self) -> Vec<Vec<El>> {
        self.tuples
            .iter()
            .map(|&r| unrank(r, self.universe, self.arity))
            .collect()
    }
}

/// The 4-ary relation `{x : x1 = x2 or x3 = x4}`.
pub fn delta4(q: usize) -> Relation {
    let mut ranks = Vec::new();
    for r in 0..table_len(q, 4) {
        let t = unrank(r, q, 4);
        if t[0] == t[1] || t[2] == t[3] {
            ranks.push(r);
        }
    }
    Relation {
        arity: 4,
        universe: q,
        tuples: ranks,
    }
}

/// The 3-ary relation `{x : x1 = x2 or x2 = x3}`.
pub fn delta3(q: usize) -> Relation {
    let mut ranks = Vec::new();
    for r in 0..table_len(q, 3) {
        let t = unrank(r, q, 3);
        if t[0] == t[1] || t[1] == t[2] {
            ranks.push(r);
        }
    }
    Relation {
        arity: 3,
        universe: q,
        tuples: ranks,
    }
}

/// A universe size plus named operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub name: String,
    pub universe: usize,
    pub ops: Vec<OpTable>,
    /// Whether the unary constants were appended (polynomial setting).
    pub constantive: bool,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, universe: usize, ops: Vec<OpTable>) -> Result<Self> {
        let name = name.into();
        let mut seen = std::collections::HashSet::new();
        for op in &ops {
            if op.universe != universe {
                return Err(FinalgError::UniverseMismatch(universe, op.universe));
            }
            if !seen.insert(op.name.clone()) {
                return Err(FinalgError::Parse {
                    line: 0,
                    msg: format!("duplicate op name `{}`", op.name),
                });
            }
        }
        Ok(FiniteAlgebra {
            name,
            universe,
            ops,
            constantive: false,
        })
    }
}

/// An algebra together with named relations, as read from a bundle file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub algebra: FiniteAlgebra,
    pub relations: Vec<(String, Relation)>,
}

/// Parse the bundle file format: `algebra <name>`, `size <q>`, then any
/// number of `op <name> <arity>` blocks (q^arity integers in rank order) and
/// `rel <name> <arity>` blocks (`count <m>` plus m tuple lines). `#` starts a
/// line comment.
pub fn parse_bundle(text: &str) -> Result<Bundle> {
    struct Tok {
        line: usize,
        word: String,
    }
    let mut toks: Vec<Tok> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for word in line.split_whitespace() {
            toks.push(Tok {
                line: i + 1,
                word: word.to_string(),
            });
        }
    }
    let mut pos = 0usize;
    let err = |line: usize, msg: String| FinalgError::Parse { line, msg };
    let next = |pos: &mut usize, what: &str| -> Result<&Tok> {
        if *pos >= toks.len() {
            return Err(err(0, format!("unexpected end of input, expected {what}")));
        }
        let t = &toks[*pos];
        *pos += 1;
        Ok(t)
    };
    let t = next(&mut pos, "`algebra`")?;
    if t.word != "algebra" {
        return Err(err(t.line, format!("expected `algebra`, got `{}`", t.word)));
    }
    let name = next(&mut pos, "algebra name")?.word.clone();
    let t = next(&mut pos, "`size`")?;
    if t.word != "size" {
        return Err(err(t.line, format!("expected `size`, got `{}`", t.word)));
    }
    let t = next(&mut pos, "universe size")?;
    let q: usize = t
        .word
        .parse()
        .map_err(|_| err(t.line, format!("bad universe size `{}`", t.word)))?;
    if q < 1 {
        return Err(err(t.line, "universe size must be >= 1".into()));
    }
    let mut ops: Vec<OpTable> = Vec::new();
    let mut relations: Vec<(String, Relation)> = Vec::new();
    while pos < toks.len() {
        let t = next(&mut pos, "`op` or `rel`")?;
        match t.word.as_str() {
            "op" => {
                let op_name = next(&mut pos, "op name")?.word.clone();
                let t = next(&mut pos, "op arity")?;
                let arity: usize = t
                    .word
                    .parse()
                    .map_err(|_| err(t.line, format!("bad arity `{}`", t.word)))?;
                if arity < 1 {
                    return Err(err(t.line, "arity must be >= 1".into()));
                }
                let len = table_len(q, arity);
                let mut values = Vec::with_capacity(len);
                for _ in 0..len {
                    if pos >= toks.len()
                        || matches!(toks[pos].word.as_str(), "op" | "rel")
                    {
                        return Err(FinalgError::TableLength {
                            name: op_name,
                            expected: len,
                            got: values.len(),
                        });
                    }
                    let t = next(&mut pos, "table entry")?;
                    let v: usize = t
                        .word
                        .parse()
                        .map_err(|_| err(t.line, format!("bad table entry `{}`", t.word)))?;
                    if v >= q {
                        return Err(FinalgError::OutOfRange(v, q));
                    }
                    values.push(v as El);
                }
                ops.push(OpTable::new(op_name, arity, q, values)?);
            }
            "rel" => {
                let rel_name = next(&mut pos, "rel name")?.word.clone();
                let t = next(&mut pos, "rel arity")?;
                let arity: usize = t
                    .word
                    .parse()
                    .map_err(|_| err(t.line, format!("bad arity `{}`", t.word)))?;
                let t = next(&mut pos, "`count`")?;
                if t.word != "count" {
                    return Err(err(t.line, format!("expected `count`, got `{}`", t.word)));
                }
                let t = next(&mut pos, "tuple count")?;
                let m: usize = t
                    .word
                    .parse()
                    .map_err(|_| err(t.line, format!("bad count `{}`", t.word)))?;
                let mut tuples = Vec::with_capacity(m);
                for _ in 0..m {
                    let mut tuple = Vec::with_capacity(arity);
                    for _ in 0..arity {
                        let t = next(&mut pos, "tuple entry")?;
                        let v: usize = t
                            .word
                            .parse()
                            .map_err(|_| err(t.line, format!("bad tuple entry `{}`", t.word)))?;
                        if v >= q {
                            return Err(FinalgError::OutOfRange(v, q));
                        }
                        tuple.push(v as El);
                    }
                    tuples.push(tuple);
                }
                relations.push((rel_name, Relation::from_tuples(arity, q, &tuples)?));
            }
            other => {
                return Err(err(t.line, format!("expected `op` or `rel`, got `{other}`")));
            }
        }
    }
    Ok(Bundle {
        algebra: FiniteAlgebra::new(name, q, ops)?,
        relations,
    })
}

/// Canonical emission: ops in declaration order, relation tuples in rank
/// order. `parse_bundle(emit_bundle(b)) == b` on canonical bundles.
pub fn emit_bundle(bundle: &Bundle) -> String {
    let mut out = String::new();
    let alg = &bundle.algebra;
    let q = alg.universe;
    writeln!(out, "algebra {}", alg.name).unwrap();
    writeln!(out, "size {q}").unwrap();
    for op in &alg.ops {
        writeln!(out, "op {} {}", op.name, op.arity).unwrap();
        // one row per assignment of all but the last coordinate
        for chunk in op.values.chunks(q) {
            let row: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    for (name, rel) in &bundle.relations {
        writeln!(out, "rel {} {}", name, rel.arity).unwrap();
        writeln!(out, "count {}", rel.len()).unwrap();
        for t in rel.tuple_vecs() {
            let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[1, 0], 2), 2);
        assert_eq!(unrank(2, 2, 2), vec![1, 0]);
        assert_eq!(rank(&[2, 1, 0], 3), 2 * 9 + 3);
    }

    #[test]
    fn delta_counts() {
        assert_eq!(delta4(2).len(), 12);
        assert_eq!(delta4(3).len(), 45);
        assert_eq!(delta3(3).len(), 15);
    }
}
