use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ordsep_core::amalgam::{
    conjugate_in_amalgam, delta_sets, matched_pair, matched_pair_compact, reduce_amalgam, MatchedPair,
};
use ordsep_core::amalgam_graph::{
    amalgam_splice, glue_quotient, regularize, separate_theorem1, SecondRound, SeparateConfig,
};
use ordsep_core::oracle::{oracle_separate_amalgam, oracle_separate_free, OracleHit};
use ordsep_core::surgery::{equalize_with, exact_order_quotient, find_simple_quotient, DEFAULT_SEED};
use ordsep_core::search::ALL_FAMILIES;
use ordsep_core::words::{commensurable, conjugate_in_free, primitive_root};
use ordsep_core::{
    ActionGraph, AmalgamActionGraph, AmalgamPresentation, Basis, Budget, Conjugacy, Error, FiniteQuotient,
    GluingSpec, Source,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ordsep", version, about = "Order-separating finite quotients of free groups and cyclic amalgams")]
struct Cli {
    /// Work units allowed to the search routines.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT)]
    budget: u64,
    /// Seed for the randomized candidate families.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 3)]
    prime: u64,
    /// Generators of the free group, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "x,y")]
    basis: Vec<String>,
    /// Amalgam presentation file. Defaults to F(x,y) *_{x=s} F(s,t).
    #[arg(long, global = true)]
    presentation: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Round {
    Squared,
    Linear,
}

#[derive(Subcommand)]
enum Cmd {
    /// Freely reduce a word.
    Reduce { word: String },
    /// Decide conjugacy in the free group.
    Conj { u: String, v: String },
    /// Primitive root and exponent.
    Root { word: String },
    /// Whether two words have conjugate nontrivial powers.
    Commensurable { u: String, v: String },
    /// A p-group quotient in which the words' cycles have no l-near vertices.
    SimpleQuotient {
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Give the words one common order above that of --v.
    Equalize {
        #[arg(required = true)]
        us: Vec<String>,
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value_t = 1)]
        min_order: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A quotient in which the word has order exactly n.
    ExactOrder {
        word: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce an amalgam word to normal form.
    AmalgamReduce { word: String },
    /// Decide conjugacy in the amalgam.
    AmalgamConj { u: String, v: String },
    /// The sets a matched pair has to separate.
    DeltaSets { u: String, v: String },
    /// Factor quotients with |a| = |b| separating the delta sets.
    MatchedPair {
        u: String,
        v: String,
        /// Small quotients multiplied by exact-order ones instead of p-groups.
        #[arg(long)]
        compact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Glue two factor quotients (graph or quotient files) into an amalgam quotient.
    Glue {
        a: PathBuf,
        b: PathBuf,
        /// B-orbit glued to each A-orbit; the length sets the number of orbits.
        #[arg(long, value_delimiter = ',')]
        matching: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        rotations: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Splice copies of an amalgam quotient along a u-cycle.
    AmalgamSplice {
        quotient: PathBuf,
        u: String,
        #[arg(long, default_value_t = 0)]
        start: u32,
        #[arg(long, default_value_t = 0)]
        position: usize,
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separate two non-conjugate amalgam elements by the orders of their images.
    Separate {
        u: String,
        v: String,
        #[arg(long, value_enum, default_value_t = Round::Squared)]
        second_round: Round,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search for a separating homomorphism into Sym(n).
    Oracle {
        u: String,
        v: String,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, default_value_t = 5)]
        cap: usize,
        /// Read the words in the amalgam instead of the free group.
        #[arg(long)]
        amalgam: bool,
    },
    /// Graphviz rendering of a graph or quotient file.
    ExportDot { file: PathBuf },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::Parse(_)) => 64,
            Failure::Core(Error::BudgetExceeded(_)) => 3,
            Failure::Core(Error::UndecidedConjugacy) => 4,
            Failure::Core(_) => 2,
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// What a command prints: a text rendering and a JSON value.
struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, code: 0 }
    }
}

struct Ctx {
    budget: Budget,
    seed: u64,
    prime: u64,
    basis: Vec<String>,
    presentation: Option<PathBuf>,
    stdin: Option<std::io::Lines<std::io::StdinLock<'static>>>,
}

impl Ctx {
    /// `-` takes the next line of standard input.
    fn text(&mut self, arg: &str) -> Res<String> {
        if arg != "-" {
            return Ok(arg.to_string());
        }
        let lines = self.stdin.get_or_insert_with(|| std::io::stdin().lock().lines());
        match lines.next() {
            Some(Ok(l)) => Ok(l.trim().to_string()),
            Some(Err(e)) => Err(Failure::Usage(format!("reading stdin: {e}"))),
            None => Err(Failure::Usage("stdin ended before every `-` was read".into())),
        }
    }

    fn basis(&self) -> Res<Basis> {
        Ok(Basis::new(&self.basis)?)
    }

    fn word(&mut self, arg: &str) -> Res<ordsep_core::Word> {
        let t = self.text(arg)?;
        Ok(self.basis()?.parse(&t)?)
    }

    fn pres(&self) -> Res<AmalgamPresentation> {
        match &self.presentation {
            Some(path) => Ok(AmalgamPresentation::from_json(&read(path)?)?),
            None => Ok(AmalgamPresentation::from_names(&["x", "y"], &["s", "t"], "x", "s")?),
        }
    }
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Res<()> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A graph or quotient file; bare graphs are treated as free quotients.
fn load_quotient(path: &Path) -> Res<FiniteQuotient> {
    let text = read(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if v.get("source").is_some() {
        Ok(FiniteQuotient::from_json(&text)?)
    } else {
        Ok(FiniteQuotient::free(ActionGraph::from_json_value(&v)?))
    }
}

fn quotient_text(q: &FiniteQuotient) -> String {
    let mut lines = vec![format!("degree {}", q.graph.degree())];
    lines.extend(q.witness_orders.iter().map(|(w, o)| format!("|{w}| = {o}")));
    lines.extend(q.log.iter().map(|l| format!("  {l}")));
    lines.join("\n")
}

fn emit_quotient(q: &FiniteQuotient, out: &Option<PathBuf>, extra: Value) -> Res<Output> {
    if let Some(path) = out {
        write(path, &q.to_json())?;
    }
    let mut json = json!({ "quotient": q.to_json_value() });
    if let (Some(obj), Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Output::new(quotient_text(q), json))
}

fn hit_output(hit: Option<OracleHit>, nmax: usize) -> Output {
    match hit {
        Some(h) => Output::new(
            format!("n = {}, hom #{}, orders {} and {}\n{}", h.n, h.index, h.order_u, h.order_v, h.graph.to_json()),
            json!({ "n": h.n, "index": h.index, "order_u": h.order_u, "order_v": h.order_v, "hom": h.graph.to_json_value() }),
        ),
        None => Output::new(format!("none up to n = {nmax}"), json!({ "n": null })),
    }
}

fn pair_output(pair: &MatchedPair, out: &Option<PathBuf>) -> Res<Output> {
    let json = json!({ "order": pair.order, "phi": pair.phi.to_json_value(), "psi": pair.psi.to_json_value() });
    if let Some(path) = out {
        write(path, &serde_json::to_string_pretty(&json).expect("json"))?;
    }
    let text = format!(
        "|a| = |b| = {}\nphi: {} vertices\npsi: {} vertices\n{}",
        pair.order,
        pair.phi.graph.degree(),
        pair.psi.graph.degree(),
        pair.phi.log.join("\n")
    );
    Ok(Output::new(text, json))
}

fn run(cmd: Cmd, ctx: &mut Ctx) -> Res<Output> {
    match cmd {
        Cmd::Reduce { word } => {
            let b = ctx.basis()?;
            let r = b.format(&ctx.word(&word)?.reduce());
            Ok(Output::new(r.clone(), json!({ "reduced": r })))
        }
        Cmd::Conj { u, v } => {
            let b = ctx.basis()?;
            let (u, v) = (ctx.word(&u)?, ctx.word(&v)?);
            Ok(match conjugate_in_free(&u, &v) {
                Some(g) => {
                    let g = b.format(&g);
                    Output::new(format!("conjugate by {g}"), json!({ "conjugate": true, "witness": g }))
                }
                None => Output::new("not conjugate", json!({ "conjugate": false })),
            })
        }
        Cmd::Root { word } => {
            let b = ctx.basis()?;
            let (r, e) = primitive_root(&ctx.word(&word)?)?;
            let r = b.format(&r);
            Ok(Output::new(format!("{r} ^ {e}"), json!({ "root": r, "exponent": e })))
        }
        Cmd::Commensurable { u, v } => {
            let c = commensurable(&ctx.word(&u)?, &ctx.word(&v)?)?;
            Ok(Output::new(c.to_string(), json!({ "commensurable": c })))
        }
        Cmd::SimpleQuotient { words, l, out } => {
            let b = ctx.basis()?;
            let ws = words.iter().map(|w| ctx.word(w)).collect::<Res<Vec<_>>>()?;
            let mut q = find_simple_quotient(&b, &ws, ctx.prime, l, &mut ctx.budget, &ALL_FAMILIES, ctx.seed)?;
            for w in &ws {
                q.record(&b.format(w))?;
            }
            emit_quotient(&q, &out, json!({}))
        }
        Cmd::Equalize { us, v, min_order, out } => {
            let b = ctx.basis()?;
            let ws = us.iter().map(|w| ctx.word(w)).collect::<Res<Vec<_>>>()?;
            let v = v.map(|v| ctx.word(&v)).transpose()?;
            let r = equalize_with(&b, &ws, v.as_ref(), ctx.prime, min_order, &mut ctx.budget)?;
            let mut q = r.quotient;
            for w in ws.iter().chain(v.as_ref()) {
                q.record(&b.format(w))?;
            }
            emit_quotient(&q, &out, json!({ "rounds": r.rounds, "orders": r.orders }))
        }
        Cmd::ExactOrder { word, n, out } => {
            let b = ctx.basis()?;
            let w = ctx.word(&word)?;
            let mut q = exact_order_quotient(&b, &w, n, &mut ctx.budget)?;
            q.record(&b.format(&w))?;
            emit_quotient(&q, &out, json!({}))
        }
        Cmd::AmalgamReduce { word } => {
            let p = ctx.pres()?;
            let w = p.parse(&ctx.text(&word)?)?;
            let r = p.format(&reduce_amalgam(&w, &p));
            Ok(Output::new(r.clone(), json!({ "reduced": r })))
        }
        Cmd::AmalgamConj { u, v } => {
            let p = ctx.pres()?;
            let (u, v) = (p.parse(&ctx.text(&u)?)?, p.parse(&ctx.text(&v)?)?);
            Ok(match conjugate_in_amalgam(&u, &v, &p, &mut ctx.budget)? {
                Conjugacy::Yes(g) => {
                    let g = p.format(&g);
                    Output::new(format!("conjugate by {g}"), json!({ "conjugacy": "yes", "witness": g }))
                }
                Conjugacy::No => Output::new("not conjugate", json!({ "conjugacy": "no" })),
                Conjugacy::Unknown => Output { code: 4, ..Output::new("unknown", json!({ "conjugacy": "unknown" })) },
            })
        }
        Cmd::DeltaSets { u, v } => {
            let p = ctx.pres()?;
            let (u, v) = (p.parse(&ctx.text(&u)?)?, p.parse(&ctx.text(&v)?)?);
            let d = delta_sets(&u, &v, &p)?;
            let da: Vec<String> = d.delta_a.iter().map(|w| p.basis_a.format(w)).collect();
            let db: Vec<String> = d.delta_b.iter().map(|w| p.basis_b.format(w)).collect();
            let text = format!("q = {}\nA: {}\nB: {}", d.q, da.join(", "), db.join(", "));
            Ok(Output::new(text, json!({ "q": d.q, "delta_A": da, "delta_B": db })))
        }
        Cmd::MatchedPair { u, v, compact, out } => {
            let p = ctx.pres()?;
            let (u, v) = (p.parse(&ctx.text(&u)?)?, p.parse(&ctx.text(&v)?)?);
            let pair = if compact {
                matched_pair_compact(&u, &v, &p, &mut ctx.budget)?
            } else {
                matched_pair(&u, &v, &p, ctx.prime, &mut ctx.budget)?
            };
            pair_output(&pair, &out)
        }
        Cmd::Glue { a, b, matching, rotations, out } => {
            let p = ctx.pres()?;
            let qa = regularize(&rebase(&load_quotient(&a)?.graph, &p.basis_a)?)?;
            let qb = regularize(&rebase(&load_quotient(&b)?.graph, &p.basis_b)?)?;
            let n = qa.element_order(&p.a);
            if n != qb.element_order(&p.b) {
                return Err(Error::OrderMismatch { a: n, b: qb.element_order(&p.b) }.into());
            }
            let mut spec = GluingSpec::minimal(qa.degree(), qb.degree(), n);
            if let Some(m) = matching {
                let total = m.len() * n as usize;
                if total % qa.degree() != 0 || total % qb.degree() != 0 {
                    return Err(Failure::Usage(format!("{} orbits do not fill whole blocks", m.len())));
                }
                spec = GluingSpec { k: total / qa.degree(), l: total / qb.degree(), rotations: vec![0; m.len()], matching: m };
            }
            if let Some(r) = rotations {
                spec.rotations = r;
            }
            let g = glue_quotient(&p, &qa, &qb, &spec)?;
            emit_quotient(&g.to_quotient(), &out, json!({}))
        }
        Cmd::AmalgamSplice { quotient, u, start, position, copies, out } => {
            let q = load_quotient(&quotient)?;
            let g = AmalgamActionGraph::from_quotient(&q)?;
            let u = g.pres.parse(&ctx.text(&u)?)?;
            let h = amalgam_splice(&g, &u, start, position, copies)?;
            let mut q = h.to_quotient();
            q.record(&h.pres.format(&u))?;
            emit_quotient(&q, &out, json!({}))
        }
        Cmd::Separate { u, v, second_round, out } => {
            let p = ctx.pres()?;
            let (u, v) = (p.parse(&ctx.text(&u)?)?, p.parse(&ctx.text(&v)?)?);
            let config = SeparateConfig {
                second_round: match second_round {
                    Round::Squared => SecondRound::Squared,
                    Round::Linear => SecondRound::Linear,
                },
                prime: ctx.prime,
                ..SeparateConfig::default()
            };
            let s = separate_theorem1(&u, &v, &p, &mut ctx.budget, &config)?;
            let mut o = emit_quotient(
                &s.quotient,
                &out,
                json!({ "case": s.case.label(), "order_u": s.order_u, "order_v": s.order_v }),
            )?;
            o.text = format!("|u| = {}, |v| = {}\n{}", s.order_u, s.order_v, o.text);
            Ok(o)
        }
        Cmd::Oracle { u, v, nmax, cap, amalgam } => {
            if amalgam {
                let p = ctx.pres()?;
                let (u, v) = (p.parse(&ctx.text(&u)?)?, p.parse(&ctx.text(&v)?)?);
                Ok(hit_output(oracle_separate_amalgam(&p, &u, &v, nmax, cap)?, nmax))
            } else {
                let b = ctx.basis()?;
                let (u, v) = (ctx.word(&u)?, ctx.word(&v)?);
                Ok(hit_output(oracle_separate_free(&b, &u, &v, nmax, cap)?, nmax))
            }
        }
        Cmd::ExportDot { file } => {
            let q = load_quotient(&file)?;
            let dot = match q.source {
                Source::Amalgam { .. } => AmalgamActionGraph::from_quotient(&q)?.to_dot(),
                Source::Free { .. } => q.graph.to_dot(None),
            };
            Ok(Output::new(dot.clone(), json!({ "dot": dot })))
        }
    }
}

/// Reads a factor graph over the factor's own generator names.
fn rebase(g: &ActionGraph, basis: &Basis) -> Res<ActionGraph> {
    if g.basis() != basis {
        return Err(Failure::Usage(format!(
            "graph generators {:?} differ from the factor's {:?}",
            g.basis().names(),
            basis.names()
        )));
    }
    Ok(g.clone())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut ctx = Ctx {
        budget: Budget::new(cli.budget),
        seed: cli.seed,
        prime: cli.prime,
        basis: cli.basis,
        presentation: cli.presentation,
        stdin: None,
    };
    match run(cli.cmd, &mut ctx) {
        Ok(out) => {
            let body = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("json"),
            };
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
