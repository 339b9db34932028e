use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdslab::coding::{check_bounds, InstanceQuantities};
use fdslab::construct;
use fdslab::digraph::Girth;
use fdslab::fds::{AffineFds, Fds, FdsFile, MAX_TABLE_STATES};
use fdslab::guessgraph::{GuessingGraph, MAX_GRAPH_STATES};
use fdslab::optimize::{self, ExtremalResult, Mode, Quantity, SearchBudget};
use fdslab::report::{Entry, Instance, Report};
use fdslab::verify::{self, Suite};
use fdslab::{Digraph, Error};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "fdslab", version, about = "Guessing games and fixed points of finite dynamical systems on digraphs")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural parameters of a digraph.
    Params {
        /// Family spec (K:4, Cdir:5, Cund:5, Kbip:2,3, paley:7, simplex:3, power:Cdir:3^2) or an arc-list file.
        graph: String,
    },
    /// Compute one quantity of a digraph.
    Compute {
        quantity: QuantityArg,
        graph: String,
        #[arg(short)]
        q: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Write the witness FDS to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        suite: SuiteArg,
    },
    /// Build an explicit FDS and report its metrics.
    Construct {
        kind: ConstructionArg,
        /// Digraph for graph-based constructions.
        #[arg(long)]
        graph: Option<String>,
        #[arg(short)]
        n: Option<usize>,
        #[arg(short)]
        q: Option<u32>,
        /// Simplex parameter r.
        #[arg(short)]
        r: Option<u32>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Exhaustive search only.
    #[arg(long, group = "mode")]
    exhaustive: bool,
    /// Seeded randomized search.
    #[arg(long, group = "mode")]
    random: bool,
    /// Constructions and analytic bounds only.
    #[arg(long, group = "mode")]
    construct_only: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on q^n for tabulated state spaces.
    #[arg(long, env = "FDSLAB_CAP_STATES")]
    cap_states: Option<u128>,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        let mode = if self.exhaustive {
            Mode::Exhaustive
        } else if self.random {
            Mode::Randomized
        } else if self.construct_only {
            Mode::ConstructionOnly
        } else {
            Mode::Auto
        };
        SearchBudget {
            mode,
            trials: self.trials,
            seed: self.seed,
            max_states: self.cap_states.unwrap_or(MAX_TABLE_STATES),
            ..SearchBudget::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    G,
    B,
    I,
    S,
    L,
    C,
    Glin,
    Iaff,
    Saff,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    SmallExhaustive,
    Constructions,
    Bounds,
    Equivalences,
    All,
    #[value(hide = true)]
    FabricatedFailure,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    CliqueGuessing,
    Winkler,
    CliquePacking,
    NegationCycle,
    CyclePacking,
    ChordlessCover,
    UndirectedDegree,
    Simplex,
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(Report, Vec<String>), Failure>;

fn load_graph(spec: &str) -> Result<Digraph, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(Digraph::parse(&std::fs::read_to_string(path)?)?);
    }
    Ok(Digraph::family(spec)?)
}

fn instance(spec: &str, d: &Digraph, q: Option<u32>) -> Instance {
    Instance { graph: spec.into(), n: d.n(), q }
}

fn params(spec: &str) -> Outcome {
    let d = load_graph(spec)?;
    let mut report = Report::new("params");
    report.instance = Some(instance(spec, &d, None));
    let (tau, fvs) = d.feedback_vertex_number()?;
    let (nu, _) = d.cycle_packing()?;
    let chi_prime = d.cycle_chromatic_index()?;
    let girth = match d.girth() {
        Girth::Finite(g) => Entry::exact("girth", g as u128),
        Girth::Infinite => Entry::infinite("girth"),
    };
    report.quantities = vec![
        Entry::exact("n", d.n() as u128),
        Entry::exact("arcs", d.arc_count() as u128),
        girth,
        Entry::exact("nu", nu as u128),
        Entry::exact("tau", tau as u128).with_witness(fvs.clone()),
        Entry::exact("chi_prime", chi_prime as u128),
        Entry::exact("max_in_degree", d.max_in_degree() as u128),
        Entry::exact("max_out_degree", d.max_out_degree() as u128),
    ];
    let lines = vec![
        format!("n = {}, arcs = {}", d.n(), d.arc_count()),
        format!("girth = {}", d.girth()),
        format!("nu = {nu}"),
        format!("tau = {tau} (feedback vertex set {fvs:?})"),
        format!("chi' = {chi_prime}"),
        format!("max in-degree = {}, max out-degree = {}", d.max_in_degree(), d.max_out_degree()),
    ];
    Ok((report, lines))
}

fn write_witness(path: &Path, file: &FdsFile, report: &mut Report) -> Result<(), Failure> {
    std::fs::write(path, file.to_json() + "\n")?;
    report.witnesses.push(path.display().to_string());
    Ok(())
}

fn compute(quantity: QuantityArg, spec: &str, q: u32, args: &BudgetArgs, witness: Option<&Path>) -> Outcome {
    let d = load_graph(spec)?;
    let budget = args.budget();
    let mut report = Report::new("compute");
    report.instance = Some(instance(spec, &d, Some(q)));
    report.mode = Some(budget.mode);
    if budget.mode == Mode::Randomized {
        report.seed = Some(budget.seed);
    }
    let mut inst = InstanceQuantities { instance: format!("{spec} q={q}"), q, n: d.n(), ..Default::default() };
    if let Ok((tau, _)) = d.feedback_vertex_number() {
        inst.tau = Some(tau);
        report.quantities.push(Entry::exact("tau", tau as u128));
    }
    if let Ok((nu, _)) = d.cycle_packing() {
        inst.nu = Some(nu);
        report.quantities.push(Entry::exact("nu", nu as u128));
    }
    let lines;
    match quantity {
        QuantityArg::G | QuantityArg::B => {
            let g = GuessingGraph::build_with(&d, q, args.cap_states.unwrap_or(MAX_GRAPH_STATES))?;
            let ind = g.independence_number()?;
            if matches!(quantity, QuantityArg::G) {
                inst.alpha = Some(ind.alpha);
                report.quantities.push(Entry::count("g", ind.alpha, q));
                lines = vec![format!("g: count {} (g = {:.6}), exact", ind.alpha, fdslab::LogCount::new(ind.alpha, q).value())];
                if let Some(path) = witness {
                    write_witness(path, &FdsFile::from(&g.fds_fixing(&ind.witness)?), &mut report)?;
                }
            } else {
                let col = g.chromatic_number()?;
                inst.alpha = Some(ind.alpha);
                inst.chi = Some(col.chi);
                report.quantities.push(Entry::count("b", col.chi, q));
                lines = vec![format!("b: count {} (b = {:.6}), exact", col.chi, fdslab::LogCount::new(col.chi, q).value())];
                if let Some(path) = witness {
                    let class: Vec<usize> = (0..g.len()).filter(|&x| col.colours[x] == 0).collect();
                    write_witness(path, &FdsFile::from(&g.fds_fixing(&class)?), &mut report)?;
                }
            }
        }
        _ => {
            let r: ExtremalResult = match quantity {
                QuantityArg::I => optimize::instability(&d, q, &budget)?,
                QuantityArg::S => optimize::stability(&d, q, &budget)?,
                QuantityArg::L => optimize::guessing_dimension_of_graph(&d, q, &budget)?,
                QuantityArg::C => optimize::coset_dimension_of_graph(&d, q, &budget)?,
                QuantityArg::Glin => optimize::linear_guessing(&d, q, &budget)?,
                QuantityArg::Iaff => optimize::affine_instability(&d, q, &budget)?,
                QuantityArg::Saff => optimize::affine_stability(&d, q, &budget)?,
                QuantityArg::G | QuantityArg::B => unreachable!(),
            };
            if r.certified.is_exact() {
                let v = r.value.raw();
                match r.quantity {
                    Quantity::I => inst.instability = Some(v as usize),
                    Quantity::S => inst.stability = Some(v as usize),
                    Quantity::L => inst.l_count = Some(v),
                    Quantity::C => inst.c_count = Some(v),
                    _ => {}
                }
            }
            let entry = Entry::from_result(&r);
            let shown = match entry.base {
                Some(_) => format!("count {} ({} = {:.6})", r.value.raw(), r.quantity.name(), entry.log.unwrap_or(0.0)),
                None => r.value.raw().to_string(),
            };
            lines = vec![format!("{}: {shown}, {}", r.quantity.name(), r.certified.label())];
            report.quantities.push(entry);
            report.telemetry = Some(r.telemetry.clone());
            if let (Some(path), Some(w)) = (witness, &r.witness) {
                write_witness(path, &w.to_file(), &mut report)?;
            }
            if r.quantity == Quantity::Glin {
                // l_lin = rank(M - I) = n - g_lin
                let l_lin = Entry { name: "l_lin".into(), value: Some(d.n() as u128 - r.value.raw()), bound: None, ..Entry::from_result(&r) };
                report.quantities.push(l_lin);
            }
        }
    }
    report.bounds = match check_bounds(&inst) {
        Ok(b) => b,
        Err(Error::MissingQuantity(_)) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    Ok((report, lines))
}

fn run_verify(suite: SuiteArg) -> Outcome {
    let suites: Vec<Suite> = match suite {
        SuiteArg::SmallExhaustive => vec![Suite::SmallExhaustive],
        SuiteArg::Constructions => vec![Suite::Constructions],
        SuiteArg::Bounds => vec![Suite::Bounds],
        SuiteArg::Equivalences => vec![Suite::Equivalences],
        SuiteArg::All => Suite::PUBLIC.to_vec(),
        SuiteArg::FabricatedFailure => vec![Suite::FabricatedFailure],
    };
    let mut report = Report::new("verify");
    let mut lines = Vec::new();
    for s in suites {
        let out = verify::run(s)?;
        let failures = out.checks.iter().filter(|c| !c.holds).count() + out.bounds.iter().filter(|b| !b.holds).count();
        let verdict = if failures == 0 { "pass".to_string() } else { format!("FAIL ({failures} violations)") };
        lines.push(format!("{}: {} checks, {} bound reports: {verdict}", s.name(), out.checks.len(), out.bounds.len()));
        report.checks.extend(out.checks);
        report.bounds.extend(out.bounds);
    }
    Ok((report, lines))
}

fn metrics_lines(f: &Fds) -> (Vec<Entry>, Vec<String>) {
    let m = f.metrics();
    let entries = vec![Entry::count("fixed_points", m.g.count, f.q()), Entry::exact("s", m.s as u128), Entry::exact("i", m.i as u128)];
    let line = format!("q = {}, n = {}: fixed points {}, s = {}, i = {}", f.q(), f.n(), m.g.count, m.s, m.i);
    (entries, vec![line])
}

fn affine_lines(f: &AffineFds) -> Result<(Vec<Entry>, Vec<String>), Failure> {
    let m = f.structural_metrics()?;
    let entries = vec![
        Entry::count("fixed_points", m.g.count, f.q()),
        Entry::exact("s", m.s as u128),
        Entry::exact("i", m.i as u128),
        Entry::count("code_size", m.l.count, f.q()),
    ];
    let line = format!("q = {}, n = {}: fixed points {}, s = {}, i = {}, |C_f| = {}", f.q(), f.n(), m.g.count, m.s, m.i, m.l.count);
    Ok((entries, vec![line]))
}

struct ConstructArgs<'a> {
    graph: Option<&'a str>,
    n: Option<usize>,
    q: Option<u32>,
    r: Option<u32>,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Input(format!("this construction needs {flag}")))
}

fn run_construct(kind: ConstructionArg, a: ConstructArgs, witness: Option<&Path>) -> Outcome {
    let mut report = Report::new("construct");
    let graph = |a: &ConstructArgs| -> Result<(String, Digraph), Failure> {
        let spec = need(a.graph, "--graph")?;
        Ok((spec.to_string(), load_graph(spec)?))
    };
    let table = |f: Fds, spec: String, report: &mut Report| -> Result<Vec<String>, Failure> {
        report.instance = Some(Instance { graph: spec, n: f.n(), q: Some(f.q()) });
        let (entries, lines) = metrics_lines(&f);
        report.quantities = entries;
        if let Some(path) = witness {
            write_witness(path, &FdsFile::from(&f), report)?;
        }
        Ok(lines)
    };
    let lines = match kind {
        ConstructionArg::CliqueGuessing => {
            let (n, q) = (need(a.n, "-n")?, need(a.q, "-q")?);
            table(construct::clique_guessing(n, q)?, format!("K:{n}"), &mut report)?
        }
        ConstructionArg::Winkler => {
            let q = need(a.q, "-q")?;
            table(construct::winkler_clique(q)?, format!("K:{q}"), &mut report)?
        }
        ConstructionArg::CliquePacking => {
            let (n, q) = (need(a.n, "-n")?, need(a.q, "-q")?);
            table(construct::clique_packing_stability(n, q)?, format!("K:{n}"), &mut report)?
        }
        ConstructionArg::NegationCycle => {
            let (n, q) = (need(a.n, "-n")?, need(a.q, "-q")?);
            table(construct::negation_cycle(n, q)?, format!("Cdir:{n}"), &mut report)?
        }
        ConstructionArg::CyclePacking => {
            let (spec, d) = graph(&a)?;
            let (_, f) = construct::cycle_packing_instability(&d, need(a.q, "-q")?)?;
            table(f, spec, &mut report)?
        }
        ConstructionArg::ChordlessCover => {
            let (spec, d) = graph(&a)?;
            table(construct::chordless_cover_instability(&d)?.1, spec, &mut report)?
        }
        ConstructionArg::UndirectedDegree => {
            let (spec, d) = graph(&a)?;
            table(construct::undirected_degree_instability(&d)?.1, spec, &mut report)?
        }
        ConstructionArg::Simplex => {
            let r = need(a.r, "-r")?;
            let f = construct::simplex_affine(r)?;
            let f = f.with_offset(construct::stablest_offset(&f)?)?;
            report.instance = Some(Instance { graph: format!("simplex:{r}"), n: f.n(), q: Some(2) });
            let (entries, lines) = affine_lines(&f)?;
            report.quantities = entries;
            if let Some(path) = witness {
                write_witness(path, &FdsFile::from(&f), &mut report)?;
            }
            lines
        }
    };
    Ok((report, lines))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    let outcome = match &cli.command {
        Command::Params { graph } => params(graph),
        Command::Compute { quantity, graph, q, budget, witness } => compute(*quantity, graph, *q, budget, witness.as_deref()),
        Command::Verify { suite } => run_verify(*suite),
        Command::Construct { kind, graph, n, q, r, witness } => {
            run_construct(*kind, ConstructArgs { graph: graph.as_deref(), n: *n, q: *q, r: *r }, witness.as_deref())
        }
    };
    let (mut report, lines) = match outcome {
        Ok(v) => v,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("cap exceeded: {msg}");
            return ExitCode::from(EXIT_CAP);
        }
    };
    report.settle();
    let json = report.to_json();
    if cli.json {
        print!("{json}");
    } else {
        for l in &lines {
            println!("{l}");
        }
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match &report.counterexample {
        None => ExitCode::SUCCESS,
        Some(c) => {
            eprintln!("violation: {}", c.to_json());
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}
