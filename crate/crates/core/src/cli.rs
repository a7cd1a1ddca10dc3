//! The `mimred` command line.
//!
//! Exit codes: 0 and 1 answer decision questions, 2 is a usage or I/O
//! problem, 3 a validation failure, 4 an exhausted search budget. Failures
//! are reported on stderr as one JSON object.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::doc::{from_json, to_json, CutDocument, GraphDocument, HybridDocument};
use crate::error::Error;
use crate::formula::{brute_force_nae_capped, eval_nae, parse_nae_dimacs, random_strict_formula, Assignment};
use crate::layout::{LayoutRepr, TreeLayout};
use crate::matching::{cut_value, MatchKind};
use crate::red1::{build_h_scaled, decode_assignment, witness_order, Constants};
use crate::red2::{balancing_tree_from_mapping, build_partitioned, path_mapping_from_order, TreeMapping};
use crate::red3::{
    build_gstar, caterpillar_layout, group_all, group_gadget, hybrid_to_tree_mapping, project_mapping_to_g, HybridTree,
};
use crate::wgraph::{
    check_balancing_order, check_balancing_tree, solve_balancing_order, solve_balancing_tree, LinearOrder,
    DEFAULT_BUDGET,
};
use crate::widths::{exact_width, layout_value, WidthKind, GENERAL_CAP, LINEAR_CAP};

/// Graphs are materialized for exact searches only up to this many vertices.
const MATERIALIZE_CAP: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "mimred", version, about = "Reductions to mim/sim-width with exact checkers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Positive NAE-3-SAT formulas.
    #[command(subcommand)]
    Nae(NaeCmd),
    /// Build the graphs of each reduction step.
    Reduce(ReduceArgs),
    /// Certificates that move between the steps.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Balancing orders and trees of weighted graphs.
    #[command(subcommand)]
    Balance(BalanceCmd),
    /// Exact value of one cut.
    Cutval(CutvalArgs),
    /// Widths of layouts and exact widths of tiny graphs.
    #[command(subcommand)]
    Width(WidthCmd),
    /// Hybrid trees of G*.
    #[command(subcommand)]
    Layout(LayoutCmd),
    /// Random strict formula.
    Gen(GenArgs),
}

#[derive(Subcommand, Debug)]
enum NaeCmd {
    /// Exit 0 iff the assignment NAE-satisfies the formula.
    Check {
        cnf: PathBuf,
        /// One letter per variable, T or F.
        #[arg(long)]
        assignment: String,
        /// Accept formulas that are not 4-occurrence.
        #[arg(long)]
        lax: bool,
    },
    /// Print a satisfying assignment (exit 0) or report none (exit 1).
    Solve {
        cnf: PathBuf,
        #[arg(long)]
        lax: bool,
        #[arg(long, default_value_t = crate::formula::DEFAULT_BRUTE_FORCE_CAP)]
        cap: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Step {
    Step1,
    Step2,
    Step3,
    All,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(value_enum)]
    step: Step,
    /// full, small, or custom:τ,γ,λ,a,b
    #[arg(long, default_value = "small")]
    profile: String,
    #[arg(short, long)]
    input: PathBuf,
    /// Output file; a directory for `all`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// τ-balancing order of H(φ) from a satisfying assignment.
    Order {
        /// H document from `reduce step1`.
        #[arg(short, long)]
        input: PathBuf,
        /// Defaults to the first assignment found by brute force.
        #[arg(long)]
        assignment: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Satisfying assignment read off a (τ+γ)-balancing order.
    Decode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        order: PathBuf,
    },
    /// Path mapping of the partitioned graph following an order.
    PathMapping {
        #[arg(long)]
        order: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Caterpillar layout of G* following an order of the gadgets.
    Caterpillar {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        order: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum BalanceCmd {
    /// Search for a balancing order (or tree); exit 1 if none exists.
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        threshold: u64,
        #[arg(long)]
        tree: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exit 0 iff the order (or the tree of a mapping) is balancing.
    Check {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        threshold: u64,
        #[arg(long, conflicts_with = "mapping", required_unless_present = "mapping")]
        order: Option<PathBuf>,
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Mim,
    Sim,
}

impl From<KindArg> for MatchKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mim => MatchKind::Mim,
            KindArg::Sim => MatchKind::Sim,
        }
    }
}

#[derive(Args, Debug)]
struct CutvalArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// JSON object with sides `a` and `b`.
    #[arg(long)]
    cut: PathBuf,
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WidthArg {
    Mim,
    Sim,
    Omim,
}

impl From<WidthArg> for WidthKind {
    fn from(k: WidthArg) -> Self {
        match k {
            WidthArg::Mim => WidthKind::Mim,
            WidthArg::Sim => WidthKind::Sim,
            WidthArg::Omim => WidthKind::Omim,
        }
    }
}

#[derive(Subcommand, Debug)]
enum WidthCmd {
    /// Exact width by exhaustive enumeration.
    Exact {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: WidthArg,
        #[arg(long)]
        linear: bool,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Value of a given layout.
    Value {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, value_enum)]
        kind: WidthArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LayoutCmd {
    /// Group one gadget (or all, ascending) of a layout or hybrid tree.
    Group {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, conflicts_with = "hybrid", required_unless_present = "hybrid")]
        layout: Option<PathBuf>,
        #[arg(long)]
        hybrid: Option<PathBuf>,
        #[arg(long)]
        gadget: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Contract a fully grouped hybrid tree into a tree mapping of (G*, 𝒮*).
    ToMapping {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        hybrid: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Read a mapping of (G*, 𝒮*) as a mapping of (G, 𝒮).
    Project {
        /// G document from `reduce step2`.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Number of variables, a multiple of 3.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Failures with their exit code.
enum Fail {
    Usage(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

type Outcome = std::result::Result<i32, Fail>;

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(f) => {
            let (kind, message, code) = match f {
                Fail::Usage(m) => ("usage", m, 2),
                Fail::Core(e) => {
                    let code = e.exit_code();
                    (if code == 4 { "budget" } else { "validation" }, e.to_string(), code)
                }
            };
            let d = Diagnostic { error: kind, message, exit_code: code };
            let _ = writeln!(err, "{}", serde_json::to_string(&d).expect("serializable"));
            code
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> std::result::Result<T, Fail> {
    Ok(from_json(&read(path)?)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> std::result::Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Usage(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Fail::Usage(e.to_string())),
    }
}

fn profile(s: &str) -> std::result::Result<Constants, Fail> {
    s.parse::<Constants>().map_err(|e| Fail::Usage(e.to_string()))
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        Cmd::Nae(c) => nae(c, out),
        Cmd::Reduce(a) => reduce(a, out),
        Cmd::Witness(c) => witness(c, out),
        Cmd::Balance(c) => balance(c, out),
        Cmd::Cutval(a) => {
            let doc: GraphDocument = read_json(&a.input)?;
            let g = doc.to_graph(MATERIALIZE_CAP)?;
            let cut: CutDocument = read_json(&a.cut)?;
            let r = cut_value(&g, &cut.a, &cut.b, a.kind.into(), a.threshold, a.budget)?;
            emit(out, None, &to_json(&r))?;
            Ok(0)
        }
        Cmd::Width(c) => width(c, out),
        Cmd::Layout(c) => layout(c, out),
        Cmd::Gen(a) => {
            let f = random_strict_formula(a.n, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
            emit(out, a.output.as_deref(), &f.to_dimacs())?;
            Ok(0)
        }
    }
}

fn nae(cmd: NaeCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        NaeCmd::Check { cnf, assignment, lax } => {
            let f = parse_nae_dimacs(&read(&cnf)?, !lax)?;
            let a = Assignment::from_letters(&assignment)?;
            let ok = eval_nae(&f, &a)?;
            emit(out, None, &format!("{ok}\n"))?;
            Ok(if ok { 0 } else { 1 })
        }
        NaeCmd::Solve { cnf, lax, cap } => {
            let f = parse_nae_dimacs(&read(&cnf)?, !lax)?;
            match brute_force_nae_capped(&f, cap)? {
                Some(a) => {
                    emit(out, None, &format!("{}\n", a.to_letters()))?;
                    Ok(0)
                }
                None => {
                    emit(out, None, "unsatisfiable\n")?;
                    Ok(1)
                }
            }
        }
    }
}

/// Writes `H.json`, `G.json` and `Gstar.json` for a formula.
pub fn reduce_all(cnf_text: &str, c: &Constants, dir: &Path) -> crate::Result<()> {
    let (h, g, gs) = reduce_documents(cnf_text, c)?;
    fs::create_dir_all(dir).map_err(|e| Error::invalid(format!("{}: {e}", dir.display())))?;
    for (name, text) in [("H.json", h), ("G.json", g), ("Gstar.json", gs)] {
        fs::write(dir.join(name), text).map_err(|e| Error::invalid(format!("{name}: {e}")))?;
    }
    Ok(())
}

/// The three documents of `reduce all`, as text.
pub fn reduce_documents(cnf_text: &str, c: &Constants) -> crate::Result<(String, String, String)> {
    let f = parse_nae_dimacs(cnf_text, true)?;
    let h = build_h_scaled(&f, c)?;
    let pg = build_partitioned(&h.graph);
    let gs = build_gstar(&pg, c)?;
    Ok((
        to_json(&GraphDocument::from_h(&h)),
        to_json(&GraphDocument::from_partitioned(&pg, Some(*c))?),
        to_json(&GraphDocument::from_gstar(&gs, Some(*c))?),
    ))
}

fn reduce(a: ReduceArgs, out: &mut dyn Write) -> Outcome {
    let c = profile(&a.profile)?;
    let text = match a.step {
        Step::Step1 => {
            let f = parse_nae_dimacs(&read(&a.input)?, true)?;
            to_json(&GraphDocument::from_h(&build_h_scaled(&f, &c)?))
        }
        Step::Step2 => {
            let doc: GraphDocument = read_json(&a.input)?;
            let h = doc.to_weighted()?;
            let constants = doc.meta.constants;
            to_json(&GraphDocument::from_partitioned(&build_partitioned(&h), constants)?)
        }
        Step::Step3 => {
            let doc: GraphDocument = read_json(&a.input)?;
            let pg = doc.to_partitioned()?;
            to_json(&GraphDocument::from_gstar(&build_gstar(&pg, &c)?, Some(c))?)
        }
        Step::All => {
            let dir = a.output.ok_or_else(|| Fail::Usage("reduce all needs an output directory".into()))?;
            reduce_all(&read(&a.input)?, &c, &dir)?;
            return Ok(0);
        }
    };
    emit(out, a.output.as_deref(), &text)?;
    Ok(0)
}

fn witness(cmd: WitnessCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        WitnessCmd::Order { input, assignment, output } => {
            let h = read_json::<GraphDocument>(&input)?.to_h()?;
            let f = &h.meta.formula;
            let a = match assignment {
                Some(s) => Assignment::from_letters(&s)?,
                None => brute_force_nae_capped(f, crate::formula::DEFAULT_BRUTE_FORCE_CAP)?
                    .ok_or(Error::NotSatisfying)?,
            };
            let ord = witness_order(f, &h, &a)?;
            emit(out, output.as_deref(), &to_json(&ord))?;
            Ok(0)
        }
        WitnessCmd::Decode { input, order } => {
            let h = read_json::<GraphDocument>(&input)?.to_h()?;
            let seq: Vec<usize> = read_json(&order)?;
            let ord = LinearOrder::new(seq, h.graph.vertex_count())?;
            let a = decode_assignment(&h.meta.formula, &h, &ord)?;
            emit(out, None, &format!("{}\n", a.to_letters()))?;
            Ok(0)
        }
        WitnessCmd::PathMapping { order, output } => {
            let seq: Vec<usize> = read_json(&order)?;
            let n = seq.len();
            let m = path_mapping_from_order(n, &LinearOrder::new(seq, n)?)?;
            emit(out, output.as_deref(), &to_json(&m))?;
            Ok(0)
        }
        WitnessCmd::Caterpillar { input, order, output } => {
            let gs = read_json::<GraphDocument>(&input)?.to_gstar()?;
            let seq: Vec<usize> = read_json(&order)?;
            let ord = LinearOrder::new(seq, gs.gadgets().len())?;
            emit(out, output.as_deref(), &to_json(&caterpillar_layout(&gs, &ord)?.to_repr()))?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct CheckReport<V: Serialize> {
    balancing: bool,
    threshold: u64,
    violation: Option<V>,
}

fn balance(cmd: BalanceCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        BalanceCmd::Solve { input, threshold, tree, budget } => {
            let h = read_json::<GraphDocument>(&input)?.to_weighted()?;
            let text = if tree {
                solve_balancing_tree(&h, threshold, budget)?.map(|bt| {
                    to_json(&TreeMapping { path: bt.tree.is_path(), tree: bt.tree, placement: bt.placement })
                })
            } else {
                solve_balancing_order(&h, threshold, budget)?.map(|o| to_json(&o))
            };
            match text {
                Some(t) => {
                    emit(out, None, &t)?;
                    Ok(0)
                }
                None => {
                    emit(out, None, "none\n")?;
                    Ok(1)
                }
            }
        }
        BalanceCmd::Check { input, threshold, order, mapping } => {
            let h = read_json::<GraphDocument>(&input)?.to_weighted()?;
            let (ok, text) = if let Some(path) = order {
                let seq: Vec<usize> = read_json(&path)?;
                let ord = LinearOrder::new(seq, h.vertex_count())?;
                let v = check_balancing_order(&h, &ord, threshold)?;
                (v.is_none(), to_json(&CheckReport { balancing: v.is_none(), threshold, violation: v }))
            } else {
                let m: TreeMapping = read_json(mapping.as_deref().expect("required by clap"))?;
                let bt = balancing_tree_from_mapping(&h, &TreeMapping::new(m.tree, m.placement)?)?;
                let v = check_balancing_tree(&h, &bt, threshold)?;
                (v.is_none(), to_json(&CheckReport { balancing: v.is_none(), threshold, violation: v }))
            };
            emit(out, None, &text)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn width(cmd: WidthCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        WidthCmd::Exact { input, kind, linear, cap, budget } => {
            let doc: GraphDocument = read_json(&input)?;
            let cap = cap.unwrap_or(if linear { LINEAR_CAP } else { GENERAL_CAP });
            if doc.vertices.len() > cap {
                return Err(Error::CapExceeded { size: doc.vertices.len(), cap }.into());
            }
            let g = doc.to_graph(cap)?;
            let r = exact_width(&g, kind.into(), linear, cap, budget)?;
            emit(out, None, &to_json(&r))?;
            Ok(0)
        }
        WidthCmd::Value { input, layout, kind, budget } => {
            let g = read_json::<GraphDocument>(&input)?.to_graph(MATERIALIZE_CAP)?;
            let l = TreeLayout::from_repr(&read_json::<LayoutRepr>(&layout)?)?;
            emit(out, None, &to_json(&layout_value(&g, &l, kind.into(), budget)?))?;
            Ok(0)
        }
    }
}

fn layout(cmd: LayoutCmd, out: &mut dyn Write) -> Outcome {
    match cmd {
        LayoutCmd::Group { input, layout, hybrid, gadget, output } => {
            let gs = read_json::<GraphDocument>(&input)?.to_gstar()?;
            let ht = match (layout, hybrid) {
                (Some(l), _) => HybridTree::from_layout(&TreeLayout::from_repr(&read_json::<LayoutRepr>(&l)?)?)?,
                (None, Some(h)) => read_json::<HybridDocument>(&h)?.into_hybrid()?,
                (None, None) => unreachable!("required by clap"),
            };
            let grouped = match gadget {
                Some(u) => group_gadget(&gs, &ht, u)?.tree,
                None => group_all(&gs, &ht)?,
            };
            emit(out, output.as_deref(), &to_json(&HybridDocument::new(grouped)))?;
            Ok(0)
        }
        LayoutCmd::ToMapping { input, hybrid, output } => {
            let gs = read_json::<GraphDocument>(&input)?.to_gstar()?;
            let ht = read_json::<HybridDocument>(&hybrid)?.into_hybrid()?;
            emit(out, output.as_deref(), &to_json(&hybrid_to_tree_mapping(&gs, &ht)?))?;
            Ok(0)
        }
        LayoutCmd::Project { input, mapping, output } => {
            let pg = read_json::<GraphDocument>(&input)?.to_partitioned()?;
            let m: TreeMapping = read_json(&mapping)?;
            let m = TreeMapping::new(m.tree, m.placement)?;
            emit(out, output.as_deref(), &to_json(&project_mapping_to_g(&pg, &m)?))?;
            Ok(0)
        }
    }
}
