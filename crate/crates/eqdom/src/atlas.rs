//! Catalogs of named operations on {0,1} and {0,1,2}, the Boolean,
//! E-minimal, and self-dual classifiers, generated example families, the
//! clone-lifting construction to a larger universe, and the claim
//! verification registry with JSON reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::alggeo::{
    is_algebraic, is_equationally_additive, solve_system, AlggeoError, EquationSystem,
};
use crate::clones::{
    centralizer_kary, clone_contains, commutes, enumerate_kary_universe, find_special,
    polynomial_gens, CloneError, SearchOutcome, SpecialKind, DEFAULT_CAP_BYTES,
};
use crate::conlat::{
    cg, classify_malcev_eqadd, is_si, monolith, Congruence, ConlatError, GenMode,
};
use crate::finalg::{
    delta4, rank, table_len, unrank, El, FinalgError, FiniteAlgebra, OpTable, Relation,
};

#[derive(Debug, thiserror::Error)]
pub enum AtlasError {
    #[error("hypotheses not satisfied: {0}")]
    Inapplicable(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error("search inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error(transparent)]
    Finalg(#[from] FinalgError),
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error(transparent)]
    Conlat(#[from] ConlatError),
    #[error(transparent)]
    Alggeo(#[from] AlggeoError),
}

type Result<T> = std::result::Result<T, AtlasError>;

// ---- named operations on {0,1} ----

pub fn op_not() -> OpTable {
    OpTable::from_fn("not", 1, 2, |t| 1 - t[0])
}

pub fn op_and() -> OpTable {
    OpTable::from_fn("and", 2, 2, |t| t[0] & t[1])
}

pub fn op_or() -> OpTable {
    OpTable::from_fn("or", 2, 2, |t| t[0] | t[1])
}

/// Ternary sum modulo 2 (the minority operation on {0,1}).
pub fn op_g() -> OpTable {
    OpTable::from_fn("g", 3, 2, |t| t[0] ^ t[1] ^ t[2])
}

/// Ternary majority.
pub fn op_h() -> OpTable {
    OpTable::from_fn("h", 3, 2, |t| (t[0] & t[1]) | (t[0] & t[2]) | (t[1] & t[2]))
}

/// `t(x,y,z) = x or (y and z)`.
pub fn op_t() -> OpTable {
    OpTable::from_fn("t", 3, 2, |t| t[0] | (t[1] & t[2]))
}

/// `t∂(x,y,z) = x and (y or z)`, the dual of [`op_t`].
pub fn op_tdual() -> OpTable {
    OpTable::from_fn("td", 3, 2, |t| t[0] & (t[1] | t[2]))
}

/// The Pixley operation `(x and z) or (x and !y and !z) or (!x and !y and z)`.
pub fn op_pixley() -> OpTable {
    OpTable::from_fn("p", 3, 2, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let (nx, ny, nz) = (1 - x, 1 - y, 1 - z);
        (x & z) | (x & ny & nz) | (nx & ny & z)
    })
}

// ---- named operations on {0,1,2} ----

/// The cyclic shift x+1 mod 3; an operation on {0,1,2} is self-dual when it
/// commutes with this permutation.
pub fn op_zeta3() -> OpTable {
    OpTable::from_fn("zeta3", 1, 3, |t| (t[0] + 1) % 3)
}

/// The transposition of 0 and 1 (used for conjugating, not itself self-dual).
pub fn op_sigma() -> OpTable {
    OpTable::new("sigma", 1, 3, vec![1, 0, 2]).expect("fixed table")
}

/// Second coordinate on the orbit {(0,1,1),(1,2,2),(2,0,0)}, first otherwise.
pub fn op_fpi2() -> OpTable {
    OpTable::from_fn("fpi2", 3, 3, |t| match (t[0], t[1], t[2]) {
        (0, 1, 1) | (1, 2, 2) | (2, 0, 0) => t[1],
        _ => t[0],
    })
}

/// Second coordinate on the orbit {(1,0,0),(0,2,2),(2,1,1)}, first otherwise.
pub fn op_fpi2_dual() -> OpTable {
    OpTable::from_fn("fpi2d", 3, 3, |t| match (t[0], t[1], t[2]) {
        (1, 0, 0) | (0, 2, 2) | (2, 1, 1) => t[1],
        _ => t[0],
    })
}

/// Majority where at most two values occur, first coordinate otherwise.
pub fn op_m() -> OpTable {
    OpTable::from_fn("m", 3, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        if x == y || x == z {
            x
        } else if y == z {
            y
        } else {
            x
        }
    })
}

/// Minority where at most two values occur, x+1 mod 3 otherwise.
pub fn op_plus0() -> OpTable {
    OpTable::from_fn("plus0", 3, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        if x == y {
            z
        } else if x == z {
            y
        } else if y == z {
            x
        } else {
            (x + 1) % 3
        }
    })
}

/// First coordinate where at most two values occur, second otherwise.
pub fn op_ps() -> OpTable {
    OpTable::from_fn("ps", 3, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        if x != y && x != z && y != z {
            y
        } else {
            x
        }
    })
}

/// The affine operation 2x + 2y + 1 mod 3.
pub fn op_a() -> OpTable {
    OpTable::from_fn("a", 2, 3, |t| {
        let (x, y) = (t[0] as usize, t[1] as usize);
        ((2 * x + 2 * y + 1) % 3) as El
    })
}

/// The self-dual binary operation 2(x² + x + xy + y + y²) mod 3; its
/// restriction to {0,1} is disjunction.
pub fn op_r() -> OpTable {
    OpTable::from_fn("r", 2, 3, |t| {
        let (x, y) = (t[0] as usize, t[1] as usize);
        ((2 * (x * x + x + x * y + y + y * y)) % 3) as El
    })
}

/// The self-dual binary operation x² + 2x + xy + 2y + y² mod 3; its
/// restriction to {0,1} is conjunction.
pub fn op_l() -> OpTable {
    OpTable::from_fn("l", 2, 3, |t| {
        let (x, y) = (t[0] as usize, t[1] as usize);
        ((x * x + 2 * x + x * y + 2 * y + y * y) % 3) as El
    })
}

// ---- catalogs ----

/// A named generating set over a fixed universe.
#[derive(Debug, Clone)]
pub struct NamedGeneratorSet {
    pub id: String,
    pub universe: usize,
    pub gens: Vec<OpTable>,
    pub description: String,
}

fn ngs(id: &str, universe: usize, gens: Vec<OpTable>, description: &str) -> NamedGeneratorSet {
    NamedGeneratorSet {
        id: id.into(),
        universe,
        gens,
        description: description.into(),
    }
}

/// Generating sets of the classical clones on {0,1}, each also in a
/// constant-expanded variant with id suffix `-c`.
pub fn boolean_catalog() -> Vec<NamedGeneratorSet> {
    let base: Vec<(&str, Vec<OpTable>, &str)> = vec![
        ("i2", vec![], "projections only"),
        ("n2", vec![op_not()], "negation"),
        ("e2", vec![op_and()], "conjunction"),
        ("v2", vec![op_or()], "disjunction"),
        ("l2", vec![op_g()], "ternary sum mod 2"),
        ("d2", vec![op_h()], "majority"),
        ("s00", vec![op_t()], "x or (y and z)"),
        ("s10", vec![op_tdual()], "x and (y or z)"),
        ("m2", vec![op_and(), op_or()], "conjunction and disjunction"),
        ("o2", vec![op_and(), op_or(), op_not()], "all Boolean operations"),
    ];
    let mut out = Vec::with_capacity(base.len() * 2);
    for (id, gens, desc) in base {
        out.push(ngs(id, 2, gens.clone(), desc));
        let mut cgens = gens;
        cgens.push(OpTable::constant(2, 0));
        cgens.push(OpTable::constant(2, 1));
        out.push(ngs(
            &format!("{id}-c"),
            2,
            cgens,
            &format!("{desc}, with constants"),
        ));
    }
    out
}

/// Named generating sets on {0,1,2} around the self-dual classification
/// (`sigma` itself is not self-dual; it is kept for conjugation checks).
pub fn selfdual_catalog() -> Vec<NamedGeneratorSet> {
    vec![
        ngs("zeta3", 3, vec![op_zeta3()], "cyclic shift"),
        ngs("sigma", 3, vec![op_sigma()], "transposition of 0 and 1"),
        ngs("fpi2", 3, vec![op_fpi2()], "orbit-selector, ascending"),
        ngs("fpi2-dual", 3, vec![op_fpi2_dual()], "orbit-selector, descending"),
        ngs("m", 3, vec![op_m()], "near-majority"),
        ngs("plus0", 3, vec![op_plus0()], "near-minority"),
        ngs("a", 3, vec![op_a()], "affine 2x+2y+1"),
        ngs("r", 3, vec![op_r()], "self-dual extension of disjunction"),
        ngs("l", 3, vec![op_l()], "self-dual extension of conjunction"),
        ngs("ps", 3, vec![op_ps()], "rainbow-sensitive projection"),
        ngs("ap", 3, vec![op_r(), op_ps()], "disjunction-like pair"),
        ngs("ap-dual", 3, vec![op_l(), op_ps()], "conjunction-like pair"),
    ]
}

// ---- TCT-lite labels and the three classifiers ----

/// Coarse local-behavior label; assigned only by the decision procedures in
/// this module, never guessed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TCTTypeLite {
    #[serde(rename = "tp1")]
    Tp1,
    #[serde(rename = "tp2")]
    Tp2,
    #[serde(rename = "tp3")]
    Tp3,
    #[serde(rename = "tp4")]
    Tp4,
    #[serde(rename = "tp5")]
    Tp5,
    #[serde(rename = "unknown")]
    Unknown,
}

fn is_affine2(f: &OpTable) -> bool {
    let n = f.arity;
    let c = f.values[0];
    let mut coef = vec![0u8; n];
    for (i, ci) in coef.iter_mut().enumerate() {
        let mut args = vec![0u8; n];
        args[i] = 1;
        *ci = f.eval(&args) ^ c;
    }
    (0..table_len(2, n)).all(|rk| {
        let t = unrank(rk, 2, n);
        let mut v = c;
        for i in 0..n {
            v ^= coef[i] & t[i];
        }
        f.values[rk] == v
    })
}

fn is_conj_shape(f: &OpTable) -> bool {
    if f.values.iter().all(|&v| v == f.values[0]) {
        return true;
    }
    let n = f.arity;
    (1..1usize << n).any(|s| {
        (0..table_len(2, n)).all(|rk| {
            let t = unrank(rk, 2, n);
            let want = (0..n).filter(|&i| s >> i & 1 == 1).all(|i| t[i] == 1);
            f.values[rk] == want as u8
        })
    })
}

fn is_disj_shape(f: &OpTable) -> bool {
    if f.values.iter().all(|&v| v == f.values[0]) {
        return true;
    }
    let n = f.arity;
    (1..1usize << n).any(|s| {
        (0..table_len(2, n)).all(|rk| {
            let t = unrank(rk, 2, n);
            let want = (0..n).filter(|&i| s >> i & 1 == 1).any(|i| t[i] == 1);
            f.values[rk] == want as u8
        })
    })
}

fn is_monotone2(f: &OpTable) -> bool {
    let n = f.arity;
    (0..table_len(2, n)).all(|rk| {
        let t = unrank(rk, 2, n);
        (0..n).all(|i| {
            // x1 is the most significant coordinate
            t[i] == 1 || f.values[rk] <= f.values[rk + (1 << (n - 1 - i))]
        })
    })
}

/// Five-way polynomial-equivalence split of the constant expansion of a
/// Boolean clone, decided by exact shape tests on the generators: the only
/// constantive clones on {0,1} are everything, the monotone clone, the
/// affine clone, the two semilattice expansions, and the essentially unary
/// operations.
fn boolean_tct(gens: &[OpTable]) -> Result<TCTTypeLite> {
    if gens.iter().all(|g| g.essential_arity() <= 1) {
        return Ok(TCTTypeLite::Tp1);
    }
    if gens.iter().all(is_affine2) {
        return Ok(TCTTypeLite::Tp2);
    }
    if gens.iter().all(is_conj_shape) || gens.iter().all(is_disj_shape) {
        return Ok(TCTTypeLite::Tp5);
    }
    if gens.iter().all(is_monotone2) {
        let mut gc = gens.to_vec();
        gc.push(OpTable::constant(2, 0));
        gc.push(OpTable::constant(2, 1));
        let set = match enumerate_kary_universe(&gc, 2, 2, DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(s) => s,
            _ => return Err(AtlasError::Budget("binary closure on {0,1}".into())),
        };
        if set.position_of(&op_and().values).is_some()
            && set.position_of(&op_or().values).is_some()
        {
            return Ok(TCTTypeLite::Tp4);
        }
        return Ok(TCTTypeLite::Unknown);
    }
    Ok(TCTTypeLite::Tp3)
}

#[derive(Debug, Clone, Serialize)]
pub struct BooleanVerdict {
    pub additive: bool,
    pub route: String,
    pub tct: TCTTypeLite,
}

/// Classify a clone on {0,1}: equational additivity holds exactly when the
/// clone contains the majority operation, `t`, or its dual; the TCT label
/// comes from the constant-expansion split.
pub fn classify_boolean(gens: &[OpTable]) -> Result<BooleanVerdict> {
    for g in gens {
        if g.universe != 2 {
            return Err(AtlasError::Inapplicable(format!(
                "generator `{}` is not on a 2-element universe",
                g.name
            )));
        }
    }
    let mut additive = false;
    let mut route = String::from("contains none of h, t, t-dual");
    for (op, nm) in [(op_h(), "h"), (op_t(), "t"), (op_tdual(), "t-dual")] {
        match clone_contains(gens, &op, DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(_) => {
                additive = true;
                route = format!("contains {nm}");
                break;
            }
            SearchOutcome::Refuted(()) => {}
            SearchOutcome::Inconclusive { reason, .. } => {
                return Err(AtlasError::Inconclusive(reason))
            }
        }
    }
    let tct = boolean_tct(gens)?;
    Ok(BooleanVerdict {
        additive,
        route,
        tct,
    })
}

/// Does every idempotent unary polynomial of `alg` act as a constant or as
/// the identity (with at least two elements)?
pub fn is_eminimal(alg: &FiniteAlgebra) -> Result<bool> {
    let q = alg.universe;
    if q < 2 {
        return Ok(false);
    }
    let gens = polynomial_gens(alg);
    let set = match enumerate_kary_universe(&gens, 1, q, DEFAULT_CAP_BYTES) {
        SearchOutcome::Proven(s) => s,
        _ => return Err(AtlasError::Budget("unary polynomial closure".into())),
    };
    for p in &set.members {
        let idempotent = (0..q).all(|x| p[p[x] as usize] == p[x]);
        if !idempotent {
            continue;
        }
        let constant = p.iter().all(|&v| v == p[0]);
        let identity = (0..q).all(|x| p[x] as usize == x);
        if !constant && !identity {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct EminimalVerdict {
    pub eminimal: bool,
    pub additive: bool,
    pub tct: TCTTypeLite,
    /// Jonsson chain terms when congruence distributivity was established.
    pub jonsson: Option<Vec<String>>,
}

/// Classify an E-minimal algebra: its polynomial clone is equationally
/// additive exactly when the universe has two elements and the polynomial
/// clone admits a Jonsson chain (congruence distributivity), which pins the
/// TCT label to tp3 or tp4 via the Boolean split.
pub fn classify_eminimal(alg: &FiniteAlgebra) -> Result<EminimalVerdict> {
    if !is_eminimal(alg)? {
        return Err(AtlasError::Inapplicable(format!(
            "`{}` is not E-minimal",
            alg.name
        )));
    }
    let q = alg.universe;
    let gens = polynomial_gens(alg);
    let jonsson = if q == 2 {
        match find_special(&gens, SpecialKind::JonssonChain(8), DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(w) => Some(w.terms),
            SearchOutcome::Refuted(()) => None,
            SearchOutcome::Inconclusive { reason, .. } => {
                return Err(AtlasError::Inconclusive(reason))
            }
        }
    } else {
        None
    };
    let additive = q == 2 && jonsson.is_some();
    let tct = if q == 2 {
        let bv = classify_boolean(&gens)?;
        if bv.additive != additive {
            return Err(AtlasError::InternalInvariant(
                "containment route disagrees with the Jonsson-chain route".into(),
            ));
        }
        bv.tct
    } else {
        TCTTypeLite::Unknown
    };
    Ok(EminimalVerdict {
        eminimal: true,
        additive,
        tct,
        jonsson,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfdualVerdict {
    pub additive: bool,
    pub route: String,
}

/// Classify a self-dual clone on {0,1,2}: equational additivity holds
/// exactly when the clone contains one of the two orbit-selectors or the
/// near-majority. All containment searches complete, because the self-dual
/// ternary operations number at most 3^9.
pub fn classify_selfdual(gens: &[OpTable]) -> Result<SelfdualVerdict> {
    let zeta = op_zeta3();
    for g in gens {
        if g.universe != 3 {
            return Err(AtlasError::Inapplicable(format!(
                "generator `{}` is not on a 3-element universe",
                g.name
            )));
        }
        if !commutes(g, &zeta) {
            return Err(AtlasError::Inapplicable(format!(
                "generator `{}` is not self-dual",
                g.name
            )));
        }
    }
    for (op, nm) in [
        (op_fpi2(), "fpi2"),
        (op_fpi2_dual(), "fpi2-dual"),
        (op_m(), "m"),
    ] {
        match clone_contains(gens, &op, DEFAULT_CAP_BYTES) {
            SearchOutcome::Proven(_) => {
                return Ok(SelfdualVerdict {
                    additive: true,
                    route: format!("contains {nm}"),
                })
            }
            SearchOutcome::Refuted(()) => {}
            SearchOutcome::Inconclusive { reason, .. } => {
                return Err(AtlasError::Inconclusive(reason))
            }
        }
    }
    Ok(SelfdualVerdict {
        additive: false,
        route: "contains none of fpi2, fpi2-dual, m".into(),
    })
}

// ---- generated families ----

/// 4-ary composition of `op` with the projections selected by `vars`
/// (1-based indices into x1..x4).
pub fn substitute4(op: &OpTable, vars: &[usize]) -> OpTable {
    debug_assert_eq!(op.arity, vars.len());
    let projs: Vec<OpTable> = vars
        .iter()
        .map(|&i| OpTable::projection(4, i, op.universe))
        .collect();
    let refs: Vec<&OpTable> = projs.iter().collect();
    OpTable::compose(op, &refs).expect("composition with projections")
}

/// The one-equation majority system h(x3,x4,x1) = h(x3,x4,x2).
pub fn h_system() -> Result<EquationSystem> {
    let h = op_h();
    Ok(EquationSystem::new(
        4,
        2,
        vec![(substitute4(&h, &[3, 4, 1]), substitute4(&h, &[3, 4, 2]))],
    )?)
}

/// The two-equation system tau(x3,x4,x1) = tau(x3,x4,x2),
/// tau(x4,x3,x1) = tau(x4,x3,x2) for a ternary operation on {0,1}.
pub fn tau_system(tau: &OpTable) -> Result<EquationSystem> {
    Ok(EquationSystem::new(
        4,
        tau.universe,
        vec![
            (substitute4(tau, &[3, 4, 1]), substitute4(tau, &[3, 4, 2])),
            (substitute4(tau, &[4, 3, 1]), substitute4(tau, &[4, 3, 2])),
        ],
    )?)
}

/// The four-equation system f(x1,x2,x3) = f(x1,x2,x4), f(x2,x1,x3) =
/// f(x2,x1,x4), f(x3,x4,x1) = f(x3,x4,x2), f(x4,x3,x1) = f(x4,x3,x2).
pub fn four_equation_system(f: &OpTable) -> Result<EquationSystem> {
    Ok(EquationSystem::new(
        4,
        f.universe,
        vec![
            (substitute4(f, &[1, 2, 3]), substitute4(f, &[1, 2, 4])),
            (substitute4(f, &[2, 1, 3]), substitute4(f, &[2, 1, 4])),
            (substitute4(f, &[3, 4, 1]), substitute4(f, &[3, 4, 2])),
            (substitute4(f, &[4, 3, 1]), substitute4(f, &[4, 3, 2])),
        ],
    )?)
}

/// The two-equation near-majority system m(x1,x2,x3) = m(x1,x2,x4),
/// m(x2,x1,x3) = m(x2,x1,x4).
pub fn m_system() -> Result<EquationSystem> {
    let m = op_m();
    Ok(EquationSystem::new(
        4,
        3,
        vec![
            (substitute4(&m, &[1, 2, 3]), substitute4(&m, &[1, 2, 4])),
            (substitute4(&m, &[2, 1, 3]), substitute4(&m, &[2, 1, 4])),
        ],
    )?)
}

fn fresh_name(base: &str, taken: &[OpTable]) -> String {
    let mut name = base.to_string();
    while taken.iter().any(|o| o.name == name) {
        name.push('\'');
    }
    name
}

/// Expand `alg` with the 4-ary delta indicator (value `a` on the delta
/// relation, `b` off it) and the constant `a`. The result is verified to be
/// subdirectly irreducible with monolith Cg{(a,b)} and equationally
/// additive.
pub fn lemma311_extend(alg: &FiniteAlgebra, a: El, b: El) -> Result<FiniteAlgebra> {
    let q = alg.universe;
    if q < 2 || a as usize >= q || b as usize >= q || a == b {
        return Err(AtlasError::Inapplicable(
            "need two distinct elements of the universe".into(),
        ));
    }
    let mask = delta4(q).rank_bitset();
    let f = OpTable {
        name: fresh_name("f", &alg.ops),
        arity: 4,
        universe: q,
        values: mask.iter().map(|&d| if d { a } else { b }).collect(),
    };
    let mut ca = OpTable::constant(q, a);
    ca.name = fresh_name(&ca.name, &alg.ops);
    let mut ops = alg.ops.clone();
    ops.push(f);
    ops.push(ca);
    let ext = FiniteAlgebra::new(format!("{}-ext", alg.name), q, ops)?;
    if !is_si(&ext)? {
        return Err(AtlasError::InternalInvariant(
            "extension is not subdirectly irreducible".into(),
        ));
    }
    let mono = monolith(&ext)?.ok_or_else(|| {
        AtlasError::InternalInvariant("subdirectly irreducible but no monolith".into())
    })?;
    if mono != cg(&ext, &[(a, b)]) {
        return Err(AtlasError::InternalInvariant(
            "monolith differs from the congruence generated by (a,b)".into(),
        ));
    }
    match is_equationally_additive(&ext, GenMode::Term, DEFAULT_CAP_BYTES) {
        SearchOutcome::Proven(sys) => {
            if solve_system(&sys).tuples != delta4(q).tuples {
                return Err(AtlasError::InternalInvariant(
                    "returned system does not solve to the delta relation".into(),
                ));
            }
        }
        _ => {
            return Err(AtlasError::InternalInvariant(
                "extension not proven equationally additive".into(),
            ))
        }
    }
    Ok(ext)
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The expanded group (Z_{p^l}; +, -, c0, f, h_i) where f is 0 on the delta
/// relation and p^(l-1) off it, and h_i multiplies i arguments scaled by
/// p^(l-2).
pub fn family_zpl(p: usize, l: u32, i: usize) -> Result<FiniteAlgebra> {
    if !is_prime(p) {
        return Err(AtlasError::Inapplicable(format!("{p} is not prime")));
    }
    if l < 3 || i < 2 {
        return Err(AtlasError::Inapplicable(
            "need exponent l >= 3 and arity i >= 2".into(),
        ));
    }
    let q = p
        .checked_pow(l)
        .filter(|&q| q <= 256)
        .ok_or_else(|| AtlasError::Budget(format!("universe {p}^{l} too large")))?;
    if table_len(q, 4) > DEFAULT_CAP_BYTES || table_len(q, i) > DEFAULT_CAP_BYTES {
        return Err(AtlasError::Budget("operation tables exceed the cap".into()));
    }
    let add = OpTable::from_fn("add", 2, q, |t| {
        ((t[0] as usize + t[1] as usize) % q) as El
    });
    let neg = OpTable::from_fn("neg", 1, q, |t| ((q - t[0] as usize) % q) as El);
    let c0 = OpTable::constant(q, 0);
    let pl1 = (q / p) as El;
    let pl2 = q / (p * p);
    let mask = delta4(q).rank_bitset();
    let f = OpTable {
        name: "f".into(),
        arity: 4,
        universe: q,
        values: mask.iter().map(|&d| if d { 0 } else { pl1 }).collect(),
    };
    let h = OpTable::from_fn(format!("h{i}"), i, q, |t| {
        let prod = t.iter().fold(1usize, |acc, &x| acc * x as usize % q);
        (pl2 * prod % q) as El
    });
    Ok(FiniteAlgebra::new(
        format!("zpl-{p}-{l}-{i}"),
        q,
        vec![add, neg, c0, f, h],
    )?)
}

/// Value 2 on {(0,2,0),(0,1,1),(1,2,2)}, first coordinate otherwise.
pub fn prop82_f() -> OpTable {
    OpTable::from_fn("f82", 3, 3, |t| match (t[0], t[1], t[2]) {
        (0, 2, 0) | (0, 1, 1) | (1, 2, 2) => 2,
        _ => t[0],
    })
}

/// {0,1,2}^k minus the first standard basis tuple and every 0/1-tuple of
/// weight between 3 and k-1.
pub fn prop82_rho(k: usize) -> Result<Relation> {
    if k < 1 || table_len(3, k) > DEFAULT_CAP_BYTES {
        return Err(AtlasError::Budget(format!("arity {k} out of range")));
    }
    let mut ranks = Vec::new();
    for r in 0..table_len(3, k) {
        let t = unrank(r, 3, k);
        let e1 = t[0] == 1 && t[1..].iter().all(|&x| x == 0);
        let binary = t.iter().all(|&x| x <= 1);
        let w = t.iter().filter(|&&x| x == 1).count();
        if e1 || (binary && w >= 3 && w + 1 <= k) {
            continue;
        }
        ranks.push(r);
    }
    Ok(Relation::from_ranks(k, 3, ranks)?)
}

/// n-ary operation on {0,1,2}: 1 on the all-ones tuple, 0 on the standard
/// basis tuples, 2 elsewhere.
pub fn prop82_fn(n: usize) -> Result<OpTable> {
    if n < 1 || table_len(3, n) > DEFAULT_CAP_BYTES {
        return Err(AtlasError::Budget(format!("arity {n} out of range")));
    }
    Ok(OpTable::from_fn(format!("f{n}"), n, 3, |t| {
        if t.iter().all(|&x| x == 1) {
            1
        } else if t.iter().filter(|&&x| x == 1).count() == 1 && t.iter().all(|&x| x <= 1) {
            0
        } else {
            2
        }
    }))
}

/// A subdirectly irreducible equational domain on {0..n} together with the
/// image of its quotient by the monolith.
#[derive(Debug, Clone)]
pub struct Thm83Family {
    pub a_alg: FiniteAlgebra,
    pub z0_alg: FiniteAlgebra,
}

fn thm83_h(t: &[El]) -> El {
    let ones = t.iter().filter(|&&x| x == 1).count();
    let twos = t.iter().filter(|&&x| x == 2).count();
    let i = t.len();
    if (ones == 1 && twos == i - 1) || (twos == 1 && ones == i - 1) {
        1
    } else {
        0
    }
}

/// Build the pair (A_I, Z_I^0) for n >= 3 and a set of arities all >= 3:
/// A_I = ({0..n}; f, h_i for i in I) with f = 0 on the delta relation and n
/// off it, and Z_I^0 = ({0..n-1}; c0 (4-ary), g_i) with the same case rule.
pub fn family_thm83(n: usize, arities: &[usize]) -> Result<Thm83Family> {
    if n < 3 {
        return Err(AtlasError::Inapplicable("need n >= 3".into()));
    }
    if arities.is_empty() || arities.iter().any(|&i| i < 3) {
        return Err(AtlasError::Inapplicable("need arities, all >= 3".into()));
    }
    let qa = n + 1;
    if qa > 256
        || table_len(qa, 4) > DEFAULT_CAP_BYTES
        || arities
            .iter()
            .any(|&i| table_len(qa, i) > DEFAULT_CAP_BYTES)
    {
        return Err(AtlasError::Budget("operation tables exceed the cap".into()));
    }
    let mask = delta4(qa).rank_bitset();
    let f = OpTable {
        name: "f".into(),
        arity: 4,
        universe: qa,
        values: mask.iter().map(|&d| if d { 0 } else { n as El }).collect(),
    };
    let mut a_ops = vec![f];
    let mut z_ops = vec![OpTable::from_fn("c4_0", 4, n, |_| 0)];
    for &i in arities {
        a_ops.push(OpTable::from_fn(format!("h{i}"), i, qa, thm83_h));
        z_ops.push(OpTable::from_fn(format!("g{i}"), i, n, thm83_h));
    }
    let tag: Vec<String> = arities.iter().map(|i| i.to_string()).collect();
    let tag = tag.join("-");
    Ok(Thm83Family {
        a_alg: FiniteAlgebra::new(format!("thm83-a{n}-{tag}"), qa, a_ops)?,
        z0_alg: FiniteAlgebra::new(format!("thm83-z{n}-{tag}"), n, z_ops)?,
    })
}

// ---- lifting a clone to a larger universe ----

fn check_embedding(gens_a: &[OpTable], a_embedded: &[El], universe_b: usize) -> Result<usize> {
    let qa = a_embedded.len();
    if qa == 0 || !a_embedded.windows(2).all(|w| w[0] < w[1]) {
        return Err(AtlasError::Inapplicable(
            "embedded subset must be nonempty and strictly increasing".into(),
        ));
    }
    if a_embedded[qa - 1] as usize >= universe_b {
        return Err(AtlasError::Inapplicable(
            "embedded subset exceeds the outer universe".into(),
        ));
    }
    for g in gens_a {
        if g.universe != qa {
            return Err(AtlasError::Inapplicable(format!(
                "generator `{}` does not live on a {qa}-element universe",
                g.name
            )));
        }
    }
    Ok(qa)
}

/// Is `g` (an operation on the larger universe) a member of the lifted
/// clone, i.e. does it preserve the embedded subset and restrict to a member
/// of Clone(gens_a)?
pub fn phi_member(gens_a: &[OpTable], g: &OpTable, a_embedded: &[El]) -> Result<bool> {
    check_embedding(gens_a, a_embedded, g.universe)?;
    let restricted = match g.restrict(a_embedded) {
        Ok(r) => r,
        Err(_) => return Ok(false),
    };
    match clone_contains(gens_a, &restricted, DEFAULT_CAP_BYTES) {
        SearchOutcome::Proven(_) => Ok(true),
        SearchOutcome::Refuted(()) => Ok(false),
        SearchOutcome::Inconclusive { reason, .. } => Err(AtlasError::Inconclusive(reason)),
    }
}

/// Build a system over the lifted clone solving to the delta relation of the
/// larger universe: every pair of a defining system for the embedded delta
/// relation is extended by the off-subuniverse constant `b`, and one more
/// pair (first projection on the subuniverse, `b` on delta off it, `a`
/// elsewhere, against the same with constant `b`) carves delta outside the
/// subuniverse.
pub fn phi_delta_system(
    gens_a: &[OpTable],
    a_embedded: &[El],
    universe_b: usize,
    a: El,
    b: El,
    cap_bytes: usize,
) -> Result<EquationSystem> {
    let qa = check_embedding(gens_a, a_embedded, universe_b)?;
    if universe_b > 256 || table_len(universe_b, 4) > cap_bytes.max(DEFAULT_CAP_BYTES) {
        return Err(AtlasError::Budget("outer universe too large".into()));
    }
    if !a_embedded.contains(&a) {
        return Err(AtlasError::Inapplicable(
            "the inner value must lie in the embedded subset".into(),
        ));
    }
    if (b as usize) >= universe_b || a_embedded.contains(&b) {
        return Err(AtlasError::Inapplicable(
            "the outer value must lie outside the embedded subset".into(),
        ));
    }
    let base = FiniteAlgebra::new("phi-base", qa, gens_a.to_vec())?;
    let inner_sys = match is_equationally_additive(&base, GenMode::Term, cap_bytes) {
        SearchOutcome::Proven(sys) => sys,
        SearchOutcome::Refuted(_) => {
            return Err(AtlasError::Inapplicable(
                "the inner clone is not equationally additive".into(),
            ))
        }
        SearchOutcome::Inconclusive { reason, .. } => {
            return Err(AtlasError::Inconclusive(reason))
        }
    };
    let qb = universe_b;
    let mut preim = vec![None; qb];
    for (j, &e) in a_embedded.iter().enumerate() {
        preim[e as usize] = Some(j);
    }
    // a 4-ary table on B agreeing with `inner` on the embedded subset (up to
    // renaming) and constantly `fill` elsewhere
    let lift = |inner: &OpTable, fill: El| -> OpTable {
        let values = (0..table_len(qb, 4))
            .map(|r| {
                let t = unrank(r, qb, 4);
                let pre: Option<Vec<El>> = t
                    .iter()
                    .map(|&x| preim[x as usize].map(|j| j as El))
                    .collect();
                match pre {
                    Some(p) => a_embedded[inner.eval(&p) as usize],
                    None => fill,
                }
            })
            .collect();
        OpTable {
            name: format!("{}^", inner.name),
            arity: 4,
            universe: qb,
            values,
        }
    };
    let mut pairs: Vec<(OpTable, OpTable)> = inner_sys
        .pairs
        .iter()
        .map(|(f, g)| (lift(f, b), lift(g, b)))
        .collect();
    let dmask = delta4(qb).rank_bitset();
    let in_a = |t: &[El]| t.iter().all(|&x| preim[x as usize].is_some());
    let lhs = OpTable {
        name: "pi1+u".into(),
        arity: 4,
        universe: qb,
        values: (0..table_len(qb, 4))
            .map(|r| {
                let t = unrank(r, qb, 4);
                if in_a(&t) {
                    t[0]
                } else if dmask[r] {
                    b
                } else {
                    a
                }
            })
            .collect(),
    };
    let rhs = OpTable {
        name: "pi1+cb".into(),
        arity: 4,
        universe: qb,
        values: (0..table_len(qb, 4))
            .map(|r| {
                let t = unrank(r, qb, 4);
                if in_a(&t) {
                    t[0]
                } else {
                    b
                }
            })
            .collect(),
    };
    pairs.push((lhs, rhs));
    let sys = EquationSystem::new(4, qb, pairs)?;
    if solve_system(&sys).tuples != delta4(qb).tuples {
        return Err(AtlasError::InternalInvariant(
            "lifted system does not solve to the outer delta relation".into(),
        ));
    }
    Ok(sys)
}

// ---- the classifier corpus ----

pub fn alg_field(q: usize, name: &str) -> FiniteAlgebra {
    let add = OpTable::from_fn("add", 2, q, |t| {
        ((t[0] as usize + t[1] as usize) % q) as El
    });
    let mul = OpTable::from_fn("mul", 2, q, |t| {
        ((t[0] as usize * t[1] as usize) % q) as El
    });
    let neg = OpTable::from_fn("neg", 1, q, |t| ((q - t[0] as usize) % q) as El);
    FiniteAlgebra::new(name, q, vec![add, mul, neg]).expect("ring construction")
}

pub fn alg_zmod_group(q: usize) -> FiniteAlgebra {
    let add = OpTable::from_fn("add", 2, q, |t| {
        ((t[0] as usize + t[1] as usize) % q) as El
    });
    let neg = OpTable::from_fn("neg", 1, q, |t| ((q - t[0] as usize) % q) as El);
    FiniteAlgebra::new(format!("z{q}"), q, vec![add, neg]).expect("group construction")
}

pub fn alg_klein_group() -> FiniteAlgebra {
    let add = OpTable::from_fn("add", 2, 4, |t| t[0] ^ t[1]);
    let neg = OpTable::from_fn("neg", 1, 4, |t| t[0]);
    FiniteAlgebra::new("klein", 4, vec![add, neg]).expect("group construction")
}

pub fn alg_s3_group() -> FiniteAlgebra {
    // permutations of {0,1,2}: id, (01), (02), (12), (012), (021)
    let perms: [[El; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let index = |p: [El; 3]| perms.iter().position(|&x| x == p).unwrap() as El;
    let mul = OpTable::from_fn("mul", 2, 6, |t| {
        let (a, b) = (perms[t[0] as usize], perms[t[1] as usize]);
        index([a[b[0] as usize], a[b[1] as usize], a[b[2] as usize]])
    });
    let inv = OpTable::from_fn("inv", 1, 6, |t| {
        let a = perms[t[0] as usize];
        let mut out = [0; 3];
        for (i, &ai) in a.iter().enumerate() {
            out[ai as usize] = i as El;
        }
        index(out)
    });
    FiniteAlgebra::new("s3", 6, vec![mul, inv]).expect("group construction")
}

/// The standard test corpus for the Mal'cev classifier.
pub fn malcev_corpus() -> Vec<FiniteAlgebra> {
    vec![
        alg_field(2, "f2"),
        alg_field(3, "f3"),
        alg_field(4, "z4ring"),
        alg_zmod_group(3),
        alg_zmod_group(4),
        alg_klein_group(),
        alg_s3_group(),
        family_zpl(2, 3, 2).expect("small instance"),
    ]
}

// ---- claim registry ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// Self-contained verification report; `details` carries enough counts and
/// witnesses to re-evaluate the sub-checks.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub id: String,
    pub status: ClaimStatus,
    pub details: Value,
    pub millis: u64,
}

pub const CLAIM_IDS: [&str; 13] = [
    "remark64-majority-eq",
    "remark64-tau-systems",
    "remark64-53",
    "remark64-no-single-equation",
    "lemma72-systems",
    "thm76-classification-sweep",
    "prop82-system",
    "prop82-separation",
    "thm83-n3",
    "zpl-232",
    "lemma311-smoke",
    "thm48-corpus",
    "thm65-boolean-alginv",
];

pub fn claim_ids() -> &'static [&'static str] {
    &CLAIM_IDS
}

fn status_of(pass: bool) -> ClaimStatus {
    if pass {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

fn claim_remark64_majority_eq() -> Result<(ClaimStatus, Value)> {
    let sys = h_system()?;
    let sol = solve_system(&sys);
    let pass = sol.tuples == delta4(2).tuples;
    Ok((
        status_of(pass),
        json!({ "equations": sys.len(), "solution_size": sol.len(), "expected_size": 12 }),
    ))
}

fn claim_remark64_tau_systems() -> Result<(ClaimStatus, Value)> {
    let mut entries = Vec::new();
    let mut pass = true;
    for tau in [op_t(), op_tdual()] {
        let sys = tau_system(&tau)?;
        let sol = solve_system(&sys);
        let ok = sol.tuples == delta4(2).tuples;
        pass &= ok;
        entries.push(json!({ "op": tau.name, "equations": sys.len(), "solution_size": sol.len(), "exact": ok }));
    }
    Ok((status_of(pass), json!({ "systems": entries })))
}

fn quaternary_s00() -> Result<crate::clones::TermOpSet> {
    match enumerate_kary_universe(&[op_t()], 4, 2, DEFAULT_CAP_BYTES) {
        SearchOutcome::Proven(s) => Ok(s),
        _ => Err(AtlasError::Budget("quaternary closure of {t}".into())),
    }
}

fn claim_remark64_53() -> Result<(ClaimStatus, Value)> {
    let set = quaternary_s00()?;
    Ok((
        status_of(set.len() == 53),
        json!({ "count": set.len(), "expected": 53 }),
    ))
}

fn claim_remark64_no_single_equation() -> Result<(ClaimStatus, Value)> {
    let set = quaternary_s00()?;
    let delta = delta4(2);
    let on = &delta.tuples;
    let off = delta.complement().tuples;
    let mut pairs = 0usize;
    let mut agreeing = 0usize;
    let mut violations = Vec::new();
    for i in 0..set.len() {
        for j in i..set.len() {
            pairs += 1;
            let (fi, fj) = (&set.members[i], &set.members[j]);
            if on.iter().any(|&r| fi[r] != fj[r]) {
                continue;
            }
            agreeing += 1;
            if off.iter().all(|&r| fi[r] != fj[r]) {
                violations.push(json!([set.witness_term(i), set.witness_term(j)]));
            }
        }
    }
    let pass = set.len() == 53 && violations.is_empty();
    Ok((
        status_of(pass),
        json!({
            "terms": set.len(),
            "pairs": pairs,
            "pairs_agreeing_on_delta": agreeing,
            "violations": violations,
        }),
    ))
}

fn claim_lemma72_systems() -> Result<(ClaimStatus, Value)> {
    let mut entries = Vec::new();
    let mut pass = true;
    for f in [op_fpi2(), op_fpi2_dual()] {
        let sys = four_equation_system(&f)?;
        let sol = solve_system(&sys);
        let ok = sol.tuples == delta4(3).tuples;
        pass &= ok;
        entries.push(json!({ "op": f.name, "equations": sys.len(), "solution_size": sol.len(), "exact": ok }));
    }
    let sys = m_system()?;
    let sol = solve_system(&sys);
    let ok = sol.tuples == delta4(3).tuples;
    pass &= ok;
    entries.push(json!({ "op": "m", "equations": sys.len(), "solution_size": sol.len(), "exact": ok }));
    Ok((
        status_of(pass),
        json!({ "systems": entries, "expected_size": 45 }),
    ))
}

fn claim_prop82_system() -> Result<(ClaimStatus, Value)> {
    let sys = four_equation_system(&prop82_f())?;
    let sol = solve_system(&sys);
    let pass = sol.tuples == delta4(3).tuples;
    Ok((
        status_of(pass),
        json!({ "equations": sys.len(), "solution_size": sol.len(), "expected_size": 45 }),
    ))
}

fn claim_prop82_separation() -> Result<(ClaimStatus, Value)> {
    let rho3 = prop82_rho(3)?;
    let mut pass = rho3.len() == 26;
    let mut grid = Vec::new();
    for n in 2..=5 {
        let f = prop82_fn(n)?;
        for k in 3..=7 {
            let rho = prop82_rho(k)?;
            let preserved = f.preserves(&rho)?;
            let ok = preserved == (k != n + 1);
            pass &= ok;
            grid.push(json!({ "n": n, "k": k, "preserves": preserved, "expected": k != n + 1 }));
        }
    }
    Ok((
        status_of(pass),
        json!({ "rho3_size": rho3.len(), "grid": grid }),
    ))
}

fn claim_thm76_sweep() -> Result<(ClaimStatus, Value)> {
    let zeta = op_zeta3();
    let expected_additive = ["fpi2", "fpi2-dual", "m"];
    let mut entries = Vec::new();
    let mut pass = true;
    let mut verdicts: std::collections::HashMap<String, bool> = std::collections::HashMap::new();
    for set in selfdual_catalog() {
        if !set.gens.iter().all(|g| commutes(g, &zeta)) {
            entries.push(json!({ "id": set.id, "skipped": "not self-dual" }));
            continue;
        }
        let v = classify_selfdual(&set.gens)?;
        // independent distributivity route: the ternary closure always
        // completes, so a missing Jonsson chain is a definite refutation
        let jonsson = match find_special(&set.gens, SpecialKind::JonssonChain(8), DEFAULT_CAP_BYTES)
        {
            SearchOutcome::Proven(_) => true,
            SearchOutcome::Refuted(()) => false,
            SearchOutcome::Inconclusive { reason, .. } => {
                return Err(AtlasError::Inconclusive(reason))
            }
        };
        let expected = expected_additive.contains(&set.id.as_str());
        let mut direct = "skipped";
        if expected {
            let alg = FiniteAlgebra::new(set.id.clone(), 3, set.gens.clone())?;
            direct = match is_equationally_additive(&alg, GenMode::Term, DEFAULT_CAP_BYTES) {
                SearchOutcome::Proven(_) => "proven",
                SearchOutcome::Refuted(_) => "refuted",
                SearchOutcome::Inconclusive { .. } => "incomplete",
            };
            pass &= direct == "proven";
        }
        let ok = v.additive == jonsson && v.additive == expected;
        pass &= ok;
        verdicts.insert(set.id.clone(), v.additive);
        entries.push(json!({
            "id": set.id, "additive": v.additive, "route": v.route,
            "jonsson": jonsson, "expected": expected, "direct": direct,
        }));
    }
    // conjugation coherence between the two mixed pairs
    pass &= verdicts.get("ap") == verdicts.get("ap-dual");
    Ok((status_of(pass), json!({ "entries": entries })))
}

fn claim_thm83_n3() -> Result<(ClaimStatus, Value)> {
    let mut entries = Vec::new();
    let mut pass = true;
    for arities in [vec![3usize], vec![4], vec![3, 4]] {
        let fam = family_thm83(3, &arities)?;
        let additive = matches!(
            is_equationally_additive(&fam.a_alg, GenMode::Term, DEFAULT_CAP_BYTES),
            SearchOutcome::Proven(_)
        );
        let mono = monolith(&fam.a_alg)?;
        let expected_mono = Congruence::from_assignment(4, &[0, 1, 2, 0]);
        let mono_ok = mono.as_ref() == Some(&expected_mono);
        // the collapse x -> x (x < 3), 3 -> 0 is a surjective homomorphism
        // onto the quotient image with kernel the monolith
        let phi: Vec<El> = vec![0, 1, 2, 0];
        let mut hom = true;
        for (op_a, op_z) in fam.a_alg.ops.iter().zip(&fam.z0_alg.ops) {
            let k = op_a.arity;
            hom &= op_z.arity == k;
            for r in 0..table_len(4, k) {
                let t = unrank(r, 4, k);
                let image: Vec<El> = t.iter().map(|&x| phi[x as usize]).collect();
                if phi[op_a.values[r] as usize] != op_z.eval(&image) {
                    hom = false;
                    break;
                }
            }
        }
        let ok = additive && mono_ok && hom;
        pass &= ok;
        entries.push(json!({
            "arities": arities, "additive": additive,
            "monolith_pairs_0_3": mono_ok, "quotient_hom": hom,
        }));
    }
    Ok((status_of(pass), json!({ "instances": entries })))
}

fn claim_zpl_232() -> Result<(ClaimStatus, Value)> {
    let alg = family_zpl(2, 3, 2)?;
    let v = classify_malcev_eqadd(&alg, DEFAULT_CAP_BYTES)?;
    let expected_mono = Congruence::from_assignment(8, &[0, 1, 2, 3, 0, 1, 2, 3]);
    let mono_ok = v.monolith.as_ref() == Some(&expected_mono);
    let direct = matches!(
        is_equationally_additive(&alg, GenMode::Polynomial, DEFAULT_CAP_BYTES),
        SearchOutcome::Proven(_)
    );
    let f = alg.ops.iter().find(|o| o.name == "f").ok_or_else(|| {
        AtlasError::InternalInvariant("family instance lost its indicator".into())
    })?;
    // passing to the quotient by the monolith collapses f to the constant 0
    let collapses = f.values.iter().all(|&x| expected_mono.related(x, 0));
    let pass = v.additive && v.si && mono_ok && direct && collapses;
    Ok((
        status_of(pass),
        json!({
            "additive": v.additive, "si": v.si, "lattice_size": v.lattice_size,
            "monolith_expected": mono_ok, "direct_proven": direct,
            "quotient_collapse": collapses,
        }),
    ))
}

fn claim_lemma311_smoke() -> Result<(ClaimStatus, Value)> {
    let mut entries = Vec::new();
    let mut pass = true;
    let bases = [
        FiniteAlgebra::new("three", 3, vec![])?,
        alg_zmod_group(3),
    ];
    for base in bases {
        // lemma311_extend verifies SI, the monolith, and additivity itself
        let ext = lemma311_extend(&base, 0, 1)?;
        let mono = monolith(&ext)?.ok_or_else(|| {
            AtlasError::InternalInvariant("extension lost its monolith".into())
        })?;
        let f = ext
            .ops
            .iter()
            .find(|o| o.arity == 4)
            .ok_or_else(|| AtlasError::InternalInvariant("extension lost its indicator".into()))?;
        let collapses = f.values.iter().all(|&x| mono.related(x, 0));
        pass &= collapses;
        entries.push(json!({ "base": base.name, "extension": ext.name, "quotient_collapse": collapses }));
    }
    Ok((status_of(pass), json!({ "instances": entries })))
}

fn claim_thm48_corpus() -> Result<(ClaimStatus, Value)> {
    let expected_pos = ["f2", "f3", "zpl-2-3-2"];
    let mut entries = Vec::new();
    let mut pass = true;
    for alg in malcev_corpus() {
        let v = classify_malcev_eqadd(&alg, DEFAULT_CAP_BYTES)?;
        let direct = is_equationally_additive(&alg, GenMode::Polynomial, DEFAULT_CAP_BYTES);
        let direct_name = match &direct {
            SearchOutcome::Proven(_) => "proven",
            SearchOutcome::Refuted(_) => "refuted",
            SearchOutcome::Inconclusive { .. } => "incomplete",
        };
        let agree = match direct {
            SearchOutcome::Proven(_) => v.additive,
            SearchOutcome::Refuted(_) => !v.additive,
            SearchOutcome::Inconclusive { .. } => true,
        };
        let expected = expected_pos.contains(&alg.name.as_str());
        let ok = agree && v.additive == expected;
        pass &= ok;
        entries.push(json!({
            "name": alg.name, "additive": v.additive, "si": v.si,
            "direct": direct_name, "expected": expected,
        }));
    }
    Ok((status_of(pass), json!({ "corpus": entries })))
}

fn closed_under(x: &Relation, tuples: &[Vec<El>], u: &OpTable) -> bool {
    if tuples.is_empty() {
        return true;
    }
    let m = x.arity;
    let k = u.arity;
    let mut sel = vec![0usize; k];
    let mut args = vec![0 as El; k];
    loop {
        let mut out = Vec::with_capacity(m);
        for row in 0..m {
            for j in 0..k {
                args[j] = tuples[sel[j]][row];
            }
            out.push(u.eval(&args));
        }
        if !x.contains_tuple(&out) {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            sel[i] += 1;
            if sel[i] < tuples.len() {
                break;
            }
            sel[i] = 0;
        }
    }
}

/// Alg F = Inv F* on {0,1}, exhaustively for all catalog generator sets, all
/// arities m <= 3, and all subsets of {0,1}^m. The invariance side checks
/// the idempotent-element (nullary) condition plus closure under the
/// centralizer up to arity 3; a set that is invariant there but not
/// algebraic is retried against the full 4-ary centralizer, and anything
/// still unresolved is reported honestly.
fn claim_thm65_boolean_alginv() -> Result<(ClaimStatus, Value)> {
    let mut sets = 0usize;
    let mut subsets = 0usize;
    let mut fallback_sets = 0usize;
    let mut resolved_by_fallback = 0usize;
    let mut unresolved = Vec::new();
    for cat in boolean_catalog() {
        sets += 1;
        let gens = &cat.gens;
        let idem: Vec<El> = (0..2 as El)
            .filter(|&x| gens.iter().all(|g| g.eval(&vec![x; g.arity]) == x))
            .collect();
        let mut centralizers = Vec::new();
        for k in 1..=3 {
            centralizers.push(centralizer_kary(gens, k)?);
        }
        let mut cz4: Option<Vec<OpTable>> = None;
        for m in 1..=3usize {
            let term = match enumerate_kary_universe(gens, m, 2, DEFAULT_CAP_BYTES) {
                SearchOutcome::Proven(s) => s,
                _ => return Err(AtlasError::Budget(format!("arity-{m} closure of {}", cat.id))),
            };
            let npos = table_len(2, m);
            for code in 0..(1usize << npos) {
                subsets += 1;
                let ranks: Vec<usize> = (0..npos).filter(|&r| code >> r & 1 == 1).collect();
                let x = Relation::from_ranks(m, 2, ranks)?;
                let tuples = x.tuple_vecs();
                let alg_side = matches!(is_algebraic(&term, &x)?, SearchOutcome::Proven(_));
                let inv_side = idem
                    .iter()
                    .all(|&a| x.contains_rank(rank(&vec![a; m], 2)))
                    && centralizers
                        .iter()
                        .flatten()
                        .all(|u| closed_under(&x, &tuples, u));
                if alg_side == inv_side {
                    continue;
                }
                if alg_side {
                    // an algebraic set must satisfy every necessary
                    // invariance condition; this would be a genuine failure
                    return Ok((
                        ClaimStatus::Fail,
                        json!({ "set": cat.id, "m": m, "subset_code": code, "side": "alg without inv" }),
                    ));
                }
                let c4 = match &cz4 {
                    Some(c) => c,
                    None => {
                        fallback_sets += 1;
                        cz4 = Some(centralizer_kary(gens, 4)?);
                        cz4.as_ref().unwrap()
                    }
                };
                if c4.iter().all(|u| closed_under(&x, &tuples, u)) {
                    unresolved.push(json!({ "set": cat.id, "m": m, "subset_code": code }));
                } else {
                    resolved_by_fallback += 1;
                }
            }
        }
    }
    let status = if unresolved.is_empty() {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Inconclusive
    };
    Ok((
        status,
        json!({
            "sets": sets, "subsets": subsets,
            "fallback_sets": fallback_sets, "resolved_by_fallback": resolved_by_fallback,
            "unresolved": unresolved,
        }),
    ))
}

fn run_claim(id: &str) -> Result<(ClaimStatus, Value)> {
    match id {
        "remark64-majority-eq" => claim_remark64_majority_eq(),
        "remark64-tau-systems" => claim_remark64_tau_systems(),
        "remark64-53" => claim_remark64_53(),
        "remark64-no-single-equation" => claim_remark64_no_single_equation(),
        "lemma72-systems" => claim_lemma72_systems(),
        "thm76-classification-sweep" => claim_thm76_sweep(),
        "prop82-system" => claim_prop82_system(),
        "prop82-separation" => claim_prop82_separation(),
        "thm83-n3" => claim_thm83_n3(),
        "zpl-232" => claim_zpl_232(),
        "lemma311-smoke" => claim_lemma311_smoke(),
        "thm48-corpus" => claim_thm48_corpus(),
        "thm65-boolean-alginv" => claim_thm65_boolean_alginv(),
        other => Err(AtlasError::UnknownClaim(other.into())),
    }
}

/// Run one registered claim; budget and search failures inside a claim are
/// reported as inconclusive, only unknown ids are errors.
pub fn verify_claim(id: &str) -> Result<ClaimReport> {
    if !CLAIM_IDS.contains(&id) {
        return Err(AtlasError::UnknownClaim(id.into()));
    }
    let start = std::time::Instant::now();
    let (status, details) = match run_claim(id) {
        Ok(x) => x,
        Err(e) => (ClaimStatus::Inconclusive, json!({ "error": e.to_string() })),
    };
    Ok(ClaimReport {
        id: id.into(),
        status,
        details,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Run every registered claim (in parallel), reports in registry order.
pub fn verify_all() -> Vec<ClaimReport> {
    use rayon::prelude::*;
    CLAIM_IDS
        .par_iter()
        .map(|id| verify_claim(id).expect("registered id"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixley_identities() {
        let p = op_pixley();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(p.eval(&[x, y, y]), x);
                assert_eq!(p.eval(&[x, y, x]), x);
                assert_eq!(p.eval(&[x, x, y]), y);
            }
        }
        assert_eq!(p.eval(&[0, 1, 0]), 0);
        assert_eq!(p.eval(&[1, 1, 0]), 0);
    }

    #[test]
    fn selfdual_tables_are_selfdual() {
        let zeta = op_zeta3();
        for op in [op_fpi2(), op_fpi2_dual(), op_m(), op_plus0(), op_ps(), op_a(), op_r(), op_l()] {
            assert!(commutes(&op, &zeta), "{} is not self-dual", op.name);
        }
        assert!(!commutes(&op_sigma(), &zeta));
    }

    #[test]
    fn catalog_ids_unique() {
        for cat in [boolean_catalog(), selfdual_catalog()] {
            let mut ids: Vec<&str> = cat.iter().map(|s| s.id.as_str()).collect();
            let n = ids.len();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), n);
        }
    }
}
