use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use eqdom::alggeo::is_equationally_additive;
use eqdom::atlas::{
    boolean_catalog, classify_boolean, classify_eminimal, classify_selfdual, claim_ids,
    family_thm83, family_zpl, lemma311_extend, prop82_f, prop82_fn, prop82_rho, selfdual_catalog,
    verify_all, verify_claim, AtlasError, ClaimReport, ClaimStatus,
};
use eqdom::clones::{enumerate_kary, SearchOutcome, DEFAULT_CAP_BYTES};
use eqdom::conlat::{all_congruences, cg, classify_malcev_eqadd, commutator, ConlatError, GenMode};
use eqdom::finalg::{emit_bundle, parse_bundle, Bundle};
use eqdom::{El, FiniteAlgebra, OpTable};

const SCHEMA: u64 = 1;

#[derive(Parser)]
#[command(name = "eqdom", version, about = "Finite algebras, clones, and equational additivity")]
struct Cli {
    /// Output format; the text form is rendered from the JSON report
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized sweeps (none of the current subcommands draw
    /// randomness; kept for reproducibility plumbing)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Term,
    Polynomial,
}

impl From<Mode> for GenMode {
    fn from(m: Mode) -> GenMode {
        match m {
            Mode::Term => GenMode::Term,
            Mode::Polynomial => GenMode::Polynomial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the delta relation is algebraic over the algebra
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Term)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_CAP_BYTES)]
        cap: usize,
    },
    /// Clone computations
    #[command(subcommand)]
    Clone(CloneCmd),
    /// Congruence lattice computations
    #[command(subcommand)]
    Con(ConCmd),
    /// Commutator of two congruences given by generating pairs
    Commutator {
        file: PathBuf,
        /// Generating pairs for the left congruence, e.g. "0:1,2:3"
        #[arg(long)]
        alpha: String,
        /// Generating pairs for the right congruence
        #[arg(long)]
        beta: String,
    },
    /// Run one of the classifiers on an algebra file
    Classify {
        #[command(subcommand)]
        kind: ClassifyCmd,
    },
    /// Generate a named algebra and write it as a bundle file
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Claim registry
    #[command(subcommand)]
    Paper(PaperCmd),
    /// Named generator-set catalogs
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Subcommand)]
enum CloneCmd {
    /// Enumerate the k-ary part of the term clone
    Enum {
        file: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_CAP_BYTES)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum ConCmd {
    /// Compute the whole congruence lattice
    Lattice {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum ClassifyCmd {
    /// Boolean clone generated by the basic operations (universe {0,1})
    Boolean { file: PathBuf },
    /// Mal'cev-polynomial route: subdirect irreducibility and the monolith
    Malcev {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP_BYTES)]
        cap: usize,
    },
    /// E-minimal algebras
    Eminimal { file: PathBuf },
    /// Self-dual clone on {0,1,2} generated by the basic operations
    Selfdual { file: PathBuf },
}

#[derive(Args)]
struct OutArg {
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Expanded Z_{p^l} with the delta indicator and the i-fold product
    Zpl {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        i: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// The three-element construction with its separating relations
    Prop82 {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// The (n+1)-element family and its quotient
    Thm83 {
        #[arg(long)]
        n: usize,
        /// Comma-separated extra-operation arities, e.g. "3,4"
        #[arg(long)]
        arities: String,
        /// Which algebra to write: the family member or the quotient
        #[arg(long, value_enum, default_value_t = Thm83Part::A)]
        part: Thm83Part,
        #[command(flatten)]
        out: OutArg,
    },
    /// Extend an algebra by a delta indicator and a constant
    Lemma311 {
        file: PathBuf,
        #[arg(long)]
        a: El,
        #[arg(long)]
        b: El,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Thm83Part {
    A,
    Z0,
}

#[derive(Subcommand)]
enum PaperCmd {
    /// Verify one registered claim, or all of them
    Verify { id: String },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the named generator sets
    List,
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("EQDOM_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok((report, code)) => {
            print_report(&report, cli.format);
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn print_report(report: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        Format::Text => print!("{}", render_text(report, "")),
    }
}

/// The text form is a rendering of the JSON report, never computed
/// separately: scalar fields become `key: value` lines, nested objects and
/// arrays indent.
fn render_text(v: &Value, indent: &str) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) if !is_scalar_array(val) => {
                        out.push_str(&format!("{indent}{k}:\n"));
                        out.push_str(&render_text(val, &format!("{indent}  ")));
                    }
                    _ => out.push_str(&format!("{indent}{k}: {}", scalar_line(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) if !is_scalar_array(item) => {
                        out.push_str(&format!("{indent}-\n"));
                        out.push_str(&render_text(item, &format!("{indent}  ")));
                    }
                    _ => out.push_str(&format!("{indent}- {}", scalar_line(item))),
                }
            }
        }
        other => out.push_str(&format!("{indent}{}", scalar_line(other))),
    }
    out
}

fn is_scalar_array(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(|i| !matches!(i, Value::Object(_) | Value::Array(_))))
}

fn scalar_line(v: &Value) -> String {
    match v {
        Value::String(s) => format!("{s}\n"),
        Value::Array(items) => {
            let words: Vec<String> = items.iter().map(|i| scalar_line(i).trim().to_string()).collect();
            format!("{}\n", words.join(" "))
        }
        other => format!("{other}\n"),
    }
}

fn load(file: &PathBuf) -> Result<Bundle> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    parse_bundle(&text).map_err(|e| anyhow!("parsing {}: {e}", file.display()))
}

fn op_json(op: &OpTable) -> Value {
    json!({ "name": op.name, "arity": op.arity, "values": op.values })
}

fn base_report(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

fn parse_pairs(s: &str, q: usize) -> Result<Vec<(El, El)>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| anyhow!("pair {part:?} is not of the form a:b"))?;
        let a: El = a.trim().parse().context("pair element")?;
        let b: El = b.trim().parse().context("pair element")?;
        if (a as usize) >= q || (b as usize) >= q {
            bail!("pair element out of range for universe size {q}");
        }
        out.push((a, b));
    }
    if out.is_empty() {
        bail!("no pairs given");
    }
    Ok(out)
}

fn run(cmd: &Command) -> Result<(Value, u8)> {
    match cmd {
        Command::Check { file, mode, cap } => {
            let bundle = load(file)?;
            let mut rep = base_report("check");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            rep.insert(
                "mode".into(),
                json!(match mode {
                    Mode::Term => "term",
                    Mode::Polynomial => "polynomial",
                }),
            );
            let (verdict, extra, code) =
                match is_equationally_additive(&bundle.algebra, (*mode).into(), *cap) {
                    SearchOutcome::Proven(sys) => {
                        let eqs: Vec<Value> = sys
                            .pairs
                            .iter()
                            .map(|(l, r)| json!({ "lhs": op_json(l), "rhs": op_json(r) }))
                            .collect();
                        ("proven", json!({ "equations": eqs }), 0)
                    }
                    SearchOutcome::Refuted(obstruction) => (
                        "refuted",
                        json!({ "obstruction": format!("{obstruction:?}") }),
                        1,
                    ),
                    SearchOutcome::Inconclusive { reason, .. } => {
                        ("inconclusive", json!({ "reason": reason }), 2)
                    }
                };
            rep.insert("verdict".into(), json!(verdict));
            rep.insert("details".into(), extra);
            Ok((Value::Object(rep), code))
        }

        Command::Clone(CloneCmd::Enum { file, k, cap }) => {
            let bundle = load(file)?;
            let mut rep = base_report("clone enum");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            rep.insert("k".into(), json!(k));
            match enumerate_kary(&bundle.algebra.ops, *k, *cap) {
                SearchOutcome::Proven(set) => {
                    rep.insert("complete".into(), json!(true));
                    rep.insert("count".into(), json!(set.len()));
                    Ok((Value::Object(rep), 0))
                }
                SearchOutcome::Inconclusive { reason, partial } => {
                    rep.insert("complete".into(), json!(false));
                    rep.insert("reason".into(), json!(reason));
                    if let Some(set) = partial {
                        rep.insert("partial_count".into(), json!(set.len()));
                    }
                    Ok((Value::Object(rep), 2))
                }
                SearchOutcome::Refuted(()) => unreachable!("enumeration is never refuted"),
            }
        }

        Command::Con(ConCmd::Lattice { file, budget }) => {
            let bundle = load(file)?;
            let mut rep = base_report("con lattice");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            match all_congruences(&bundle.algebra, *budget) {
                Ok(lat) => {
                    let cons: Vec<Value> =
                        lat.congruences.iter().map(|c| json!(c.rep)).collect();
                    rep.insert("count".into(), json!(lat.congruences.len()));
                    rep.insert("atoms".into(), json!(lat.atoms));
                    rep.insert("coatoms".into(), json!(lat.coatoms));
                    rep.insert("congruences".into(), json!(cons));
                    Ok((Value::Object(rep), 0))
                }
                Err(ConlatError::Budget(reason)) => {
                    rep.insert("verdict".into(), json!("inconclusive"));
                    rep.insert("reason".into(), json!(reason));
                    Ok((Value::Object(rep), 2))
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Commutator { file, alpha, beta } => {
            let bundle = load(file)?;
            let q = bundle.algebra.universe;
            let a = cg(&bundle.algebra, &parse_pairs(alpha, q)?);
            let b = cg(&bundle.algebra, &parse_pairs(beta, q)?);
            let c = commutator(&bundle.algebra, &a, &b);
            let mut rep = base_report("commutator");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            rep.insert("alpha".into(), json!(a.rep));
            rep.insert("beta".into(), json!(b.rep));
            rep.insert("commutator".into(), json!(c.rep));
            rep.insert("is_bottom".into(), json!(c.is_bottom()));
            Ok((Value::Object(rep), 0))
        }

        Command::Classify { kind } => classify(kind),

        Command::Gen { what } => gen(what),

        Command::Paper(PaperCmd::Verify { id }) => {
            let mut rep = base_report("paper verify");
            if id == "all" {
                let reports = verify_all();
                let all_pass = reports.iter().all(|r| r.status == ClaimStatus::Pass);
                let any_fail = reports.iter().any(|r| r.status == ClaimStatus::Fail);
                rep.insert("claims".into(), json!(reports));
                rep.insert("all_pass".into(), json!(all_pass));
                let code = if all_pass {
                    0
                } else if any_fail {
                    1
                } else {
                    2
                };
                Ok((Value::Object(rep), code))
            } else {
                let report: ClaimReport = match verify_claim(id) {
                    Ok(r) => r,
                    Err(AtlasError::UnknownClaim(_)) => {
                        bail!("unknown claim id {id:?}; known ids: {}", claim_ids().join(", "))
                    }
                    Err(e) => return Err(e.into()),
                };
                let code = match report.status {
                    ClaimStatus::Pass => 0,
                    ClaimStatus::Fail => 1,
                    ClaimStatus::Inconclusive => 2,
                };
                rep.insert("claim".into(), json!(report));
                Ok((Value::Object(rep), code))
            }
        }

        Command::Catalog(CatalogCmd::List) => {
            let mut rep = base_report("catalog list");
            let entry = |s: &eqdom::atlas::NamedGeneratorSet| {
                let ops: Vec<&str> = s.gens.iter().map(|g| g.name.as_str()).collect();
                json!({
                    "id": s.id,
                    "universe": s.universe,
                    "ops": ops,
                    "description": s.description,
                })
            };
            rep.insert(
                "boolean".into(),
                json!(boolean_catalog().iter().map(entry).collect::<Vec<_>>()),
            );
            rep.insert(
                "selfdual".into(),
                json!(selfdual_catalog().iter().map(entry).collect::<Vec<_>>()),
            );
            Ok((Value::Object(rep), 0))
        }
    }
}

fn classify(kind: &ClassifyCmd) -> Result<(Value, u8)> {
    match kind {
        ClassifyCmd::Boolean { file } => {
            let bundle = load(file)?;
            let mut rep = base_report("classify boolean");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            let v = classify_boolean(&bundle.algebra.ops)?;
            let code = if v.additive { 0 } else { 1 };
            rep.insert("verdict".into(), serde_json::to_value(&v)?);
            Ok((Value::Object(rep), code))
        }
        ClassifyCmd::Malcev { file, cap } => {
            let bundle = load(file)?;
            let mut rep = base_report("classify malcev");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            match classify_malcev_eqadd(&bundle.algebra, *cap) {
                Ok(v) => {
                    rep.insert(
                        "verdict".into(),
                        json!({
                            "additive": v.additive,
                            "si": v.si,
                            "lattice_size": v.lattice_size,
                            "malcev": v.malcev.terms,
                            "monolith": v.monolith.as_ref().map(|m| m.rep.clone()),
                            "monolith_commutator_bottom": v
                                .monolith_commutator
                                .as_ref()
                                .map(|c| c.is_bottom()),
                        }),
                    );
                    Ok((Value::Object(rep), if v.additive { 0 } else { 1 }))
                }
                Err(ConlatError::NoMalcev) => {
                    bail!("no Mal'cev polynomial found: the classifier does not apply")
                }
                Err(ConlatError::Budget(reason)) => {
                    rep.insert("verdict".into(), json!("inconclusive"));
                    rep.insert("reason".into(), json!(reason));
                    Ok((Value::Object(rep), 2))
                }
                Err(e) => Err(e.into()),
            }
        }
        ClassifyCmd::Eminimal { file } => {
            let bundle = load(file)?;
            let mut rep = base_report("classify eminimal");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            let v = classify_eminimal(&bundle.algebra)?;
            let code = if v.additive { 0 } else { 1 };
            rep.insert("verdict".into(), serde_json::to_value(&v)?);
            Ok((Value::Object(rep), code))
        }
        ClassifyCmd::Selfdual { file } => {
            let bundle = load(file)?;
            let mut rep = base_report("classify selfdual");
            rep.insert("algebra".into(), json!(bundle.algebra.name));
            let v = classify_selfdual(&bundle.algebra.ops)?;
            let code = if v.additive { 0 } else { 1 };
            rep.insert("verdict".into(), serde_json::to_value(&v)?);
            Ok((Value::Object(rep), code))
        }
    }
}

fn write_bundle(out: &OutArg, bundle: &Bundle) -> Result<(Value, u8)> {
    fs::write(&out.out, emit_bundle(bundle))
        .with_context(|| format!("writing {}", out.out.display()))?;
    let mut rep = base_report("gen");
    rep.insert("algebra".into(), json!(bundle.algebra.name));
    rep.insert("size".into(), json!(bundle.algebra.universe));
    rep.insert("ops".into(), json!(bundle.algebra.ops.len()));
    rep.insert("relations".into(), json!(bundle.relations.len()));
    rep.insert("written".into(), json!(out.out.display().to_string()));
    Ok((Value::Object(rep), 0))
}

fn gen(what: &GenCmd) -> Result<(Value, u8)> {
    match what {
        GenCmd::Zpl { p, l, i, out } => {
            let alg = family_zpl(*p, *l, *i)?;
            write_bundle(out, &Bundle { algebra: alg, relations: vec![] })
        }
        GenCmd::Prop82 { n, k, out } => {
            let alg = FiniteAlgebra::new("prop82", 3, vec![prop82_f(), prop82_fn(*n)?])
                .map_err(|e| anyhow!("{e}"))?;
            let rho = prop82_rho(*k)?;
            write_bundle(
                out,
                &Bundle {
                    algebra: alg,
                    relations: vec![(format!("rho{k}"), rho)],
                },
            )
        }
        GenCmd::Thm83 { n, arities, part, out } => {
            let arities: Vec<usize> = arities
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().context("arity"))
                .collect::<Result<_>>()?;
            let fam = family_thm83(*n, &arities)?;
            let alg = match part {
                Thm83Part::A => fam.a_alg,
                Thm83Part::Z0 => fam.z0_alg,
            };
            write_bundle(out, &Bundle { algebra: alg, relations: vec![] })
        }
        GenCmd::Lemma311 { file, a, b, out } => {
            let bundle = load(file)?;
            let ext = lemma311_extend(&bundle.algebra, *a, *b)?;
            write_bundle(out, &Bundle { algebra: ext, relations: vec![] })
        }
    }
}
