//! Subcommands. Each writes its report to `out` and warnings to `err`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dissem::bounds::{bounds_report, dmax, lower_bound_with, BoundCaps};
use dissem::multiround::{ratio_of, required_rounds, schedule};
use dissem::one_round::{decode, recombine, solve_exact, solve_heuristic};
use dissem::sim::{execute, Transcript};
use dissem::{DisseminationInstance, Error, Field, FieldMatrix, SearchCaps, SolveMethod, Strategy};
use serde::Serialize;

use crate::experiment;
use crate::format::{instance_to_json, read_instance, read_scheme, SchemeFile, FORMAT_VERSION};
use crate::generate::{corpus, GenParams};
use crate::{with_field, CliError};

#[derive(Debug, Parser)]
#[command(name = "dissem", version, about = "Coded data dissemination over directed broadcast networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum one-round scheme with decoding coefficients.
    Solve(SolveArgs),
    /// Lower and upper bounds with witnesses.
    Bounds(BoundsArgs),
    /// Multi-round schedule.
    Multiround(MultiroundArgs),
    /// Execute a scheme symbolically and report which requests are met.
    Simulate(SimulateArgs),
    /// Write random instances with a given solvability index.
    Gen(GenArgs),
    /// Ratio of scheduled transmissions to the distance lower bound over a random corpus.
    Experiment(ExperimentArgs),
    /// Validate an instance file.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    /// Exact search only; exit 3 if it exceeds its caps.
    #[arg(long, conflicts_with = "heuristic")]
    pub exact: bool,
    /// Randomized heuristic only.
    #[arg(long)]
    pub heuristic: bool,
    #[arg(long, env = "DISSEM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Candidate subspaces allowed per node in the exact search.
    #[arg(long, default_value_t = SearchCaps::default().max_subspaces)]
    pub cap: u64,
    /// Heuristic restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exact,
    Flood,
    Random,
}

#[derive(Debug, Args)]
pub struct MultiroundArgs {
    pub instance: PathBuf,
    /// Number of rounds; defaults to the solvability index.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exact)]
    pub strategy: StrategyArg,
    /// Draws per round for `--strategy random`.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, env = "DISSEM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the scheme file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub instance: PathBuf,
    pub scheme: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub symbols: usize,
    #[arg(long)]
    pub diameter: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, env = "DISSEM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub field: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 4)]
    pub nodes: usize,
    #[arg(long, default_value_t = 4)]
    pub symbols: usize,
    #[arg(long, default_value_t = 2)]
    pub diameter: usize,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, env = "DISSEM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exact)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Directory for `report.json` and `ratios.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub instance: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.display().to_string(), e)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io("stdout".into(), e))
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn load(path: &Path, err: &mut dyn Write) -> Result<DisseminationInstance, CliError> {
    let inst = read_instance(path)?;
    if let Some((l, s)) = inst.network().first_infeasible(inst.possess_sets(), inst.request_sets()) {
        let _ = writeln!(
            err,
            "warning: {}: infeasible, no holder of x{} reaches node {}",
            path.display(),
            s + 1,
            l + 1
        );
    }
    Ok(inst)
}

fn vector(v: &[impl Field]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Dispatches a parsed command line.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Bounds(a) => cmd_bounds(&a, out, err),
        Command::Multiround(a) => cmd_multiround(&a, out, err),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out),
        Command::Check(a) => cmd_check(&a, out, err),
    }
}

#[derive(Serialize)]
struct DecodeRow<F> {
    node: usize,
    symbol: usize,
    /// `[sender, row]` pairs, 1-based, in the order of `alpha`.
    received: Vec<[usize; 2]>,
    alpha: Vec<F>,
    beta: Vec<F>,
}

#[derive(Serialize)]
struct SolveReport<F> {
    format: u32,
    tau: usize,
    method: SolveMethod,
    node_ranks: Vec<usize>,
    scheme: SchemeFile,
    decodings: Vec<DecodeRow<F>>,
}

pub fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&a.instance, err)?;
    with_field!(inst.field_order(), F => solve_as::<F>(&inst, a, out, err))
}

fn solve_as<F: Field + Serialize>(inst: &DisseminationInstance, a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let caps = SearchCaps {
        max_subspaces: a.cap,
        ..SearchCaps::default()
    };
    let result = if a.heuristic {
        solve_heuristic::<F>(inst, a.seed, a.restarts)?
    } else {
        match solve_exact::<F>(inst, &caps) {
            Err(Error::SearchCapExceeded(why)) if !a.exact => {
                let _ = writeln!(err, "warning: exact search skipped ({why}); using the heuristic");
                solve_heuristic::<F>(inst, a.seed, a.restarts)?
            }
            other => other?,
        }
    };
    let mut decodings = Vec::new();
    for l in 0..inst.node_count() {
        for &eta in inst.request(l) {
            let d = decode(inst, &result.scheme, l, eta)?;
            if recombine(inst, &result.scheme, l, &d) != FieldMatrix::<F>::unit(inst.symbol_count(), eta) {
                return Err(Error::NoDecoding { node: l + 1, symbol: eta + 1 }.into());
            }
            decodings.push(DecodeRow {
                node: l + 1,
                symbol: eta + 1,
                received: d.received.iter().map(|&(s, r)| [s + 1, r + 1]).collect(),
                alpha: d.alpha,
                beta: d.beta,
            });
        }
    }
    let scheme_file = SchemeFile::from_scheme(&result.scheme.clone().into());
    if a.json {
        return emit(
            out,
            &json_line(&SolveReport {
                format: FORMAT_VERSION,
                tau: result.tau,
                method: result.method,
                node_ranks: result.node_ranks.clone(),
                scheme: scheme_file,
                decodings,
            }),
        );
    }
    let mut text = format!("tau: {}\nmethod: {}\n", result.tau, serde_json::to_value(result.method)?.as_str().unwrap_or("?"));
    for l in 0..inst.node_count() {
        let m = result.scheme.node(l);
        if m.rows() > 0 {
            let rows: Vec<String> = m.row_iter().map(vector).collect();
            text += &format!("node {}: {}\n", l + 1, rows.join(" "));
        }
    }
    if !decodings.is_empty() {
        text += "decode:\n";
    }
    for d in &decodings {
        let from: Vec<String> = d.received.iter().map(|[s, r]| format!("v{s}#{r}")).collect();
        text += &format!(
            "  node {} x{}: alpha {} over [{}], beta {}\n",
            d.node,
            d.symbol,
            vector(&d.alpha),
            from.join(", "),
            vector(&d.beta)
        );
    }
    emit(out, &text)
}

pub fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&a.instance, err)?;
    let caps = BoundCaps::default();
    let report = bounds_report(&inst, &caps)?;
    if a.json {
        #[derive(Serialize)]
        struct Wrapped<'a> {
            format: u32,
            lower_bound: usize,
            #[serde(flatten)]
            report: &'a dissem::bounds::BoundsReport,
        }
        return emit(
            out,
            &json_line(&Wrapped {
                format: FORMAT_VERSION,
                lower_bound: lower_bound_with(&inst, &caps)?,
                report: &report,
            }),
        );
    }
    let show = |key: &str, v: Option<usize>| match v {
        Some(v) => format!("{key}: {v}\n"),
        None => format!("{key}: {}\n", report.notes.get(key).map_or("n/a", String::as_str)),
    };
    let mut text = format!("dmax: {}\n", report.lower.dmax);
    text += &show("alpha", report.lower.alpha);
    text += &show("minrank2", report.lower.minrank2);
    text += &show("clique_cover", report.upper.clique_cover);
    text += &show("partition", report.upper.partition);
    text += &format!("lower_bound: {}\n", lower_bound_with(&inst, &caps)?);
    if let Some(s) = &report.witnesses.independent_set {
        text += &format!("independent set: {s:?}\n");
    }
    if let Some(c) = &report.witnesses.clique_cover {
        text += &format!("cliques: {c:?}\n");
    }
    if let Some(p) = &report.witnesses.partition {
        text += &format!("partition (transmitter per symbol): {p:?}\n");
    }
    emit(out, &text)
}

fn strategy(kind: StrategyArg, samples: usize, seed: u64) -> Strategy {
    match kind {
        StrategyArg::Exact => Strategy::Exact,
        StrategyArg::Flood => Strategy::Flood,
        StrategyArg::Random => Strategy::Random { samples, seed },
    }
}

#[derive(Serialize)]
struct MultiroundReport {
    format: u32,
    rounds: usize,
    round_tau: Vec<usize>,
    tau_total: usize,
    dmax: usize,
    ratio: Option<String>,
    heuristic_rounds: Vec<usize>,
    scheme: SchemeFile,
}

pub fn cmd_multiround(a: &MultiroundArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&a.instance, err)?;
    let r = match a.rounds {
        Some(r) => r,
        None => required_rounds(&inst)?,
    };
    let strat = strategy(a.strategy, a.samples, a.seed);
    let (scheme_file, round_tau, heuristic_rounds, satisfied) = with_field!(inst.field_order(), F => {
        let s = schedule::<F>(&inst, r, strat, &SearchCaps::default())?;
        let t = execute(&inst, &s)?;
        let heur: Vec<usize> = s.methods().iter().enumerate().filter(|(_, m)| **m == SolveMethod::Heuristic).map(|(i, _)| i + 1).collect();
        Ok::<_, CliError>((SchemeFile::from_scheme(&s), s.round_tau().to_vec(), heur, t.all_satisfied))
    })?;
    if !satisfied {
        return Err(CliError::Format("internal error: schedule does not satisfy every request".into()));
    }
    if let Some(path) = &a.out {
        write_file(path, &json_line(&scheme_file))?;
    }
    let tau_total: usize = round_tau.iter().sum();
    let lower = dmax(&inst)?;
    let ratio = ratio_of(tau_total, lower).ok().map(|q| q.to_string());
    if !heuristic_rounds.is_empty() && a.strategy == StrategyArg::Exact {
        let _ = writeln!(err, "warning: rounds {heuristic_rounds:?} exceeded the exact-search caps and used the heuristic");
    }
    if a.json {
        return emit(
            out,
            &json_line(&MultiroundReport {
                format: FORMAT_VERSION,
                rounds: r,
                round_tau,
                tau_total,
                dmax: lower,
                ratio,
                heuristic_rounds,
                scheme: scheme_file,
            }),
        );
    }
    let per: Vec<String> = round_tau.iter().map(usize::to_string).collect();
    let mut text = format!("rounds: {r}\ntau: {tau_total}\nper round: {}\ndmax: {lower}\n", per.join(" "));
    if let Some(q) = ratio {
        text += &format!("ratio: {q}\n");
    }
    text += "simulated: all requests satisfied\n";
    emit(out, &text)
}

fn verify_decodings<F: Field>(t: &Transcript<F>, n: usize) -> Result<(), CliError> {
    for rec in t.recovery.iter().filter(|r| r.satisfied) {
        if t.recombine(rec) != Some(FieldMatrix::<F>::unit(n, rec.symbol - 1)) {
            return Err(Error::NoDecoding { node: rec.node, symbol: rec.symbol }.into());
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TranscriptReport<'a, F> {
    format: u32,
    #[serde(flatten)]
    transcript: &'a Transcript<F>,
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&a.instance, err)?;
    let file = read_scheme(&a.scheme)?;
    with_field!(inst.field_order(), F => {
        let scheme = file.to_scheme::<F>(inst.node_count()).map_err(|e| e.in_file(&a.scheme))?;
        let t = execute(&inst, &scheme)?;
        verify_decodings(&t, inst.symbol_count())?;
        if a.json {
            emit(out, &json_line(&TranscriptReport { format: FORMAT_VERSION, transcript: &t }))?;
        } else {
            let mut text = String::new();
            for round in &t.rounds {
                let dims: Vec<String> = round.knowledge_dims.iter().map(usize::to_string).collect();
                text += &format!("round {}: {} broadcast(s), knowledge {}\n", round.round, round.broadcasts.iter().map(|b| b.vectors.rows()).sum::<usize>(), dims.join(" "));
            }
            for rec in &t.recovery {
                let status = if rec.satisfied { "satisfied" } else { "UNSATISFIED" };
                text += &format!("node {} x{}: {status}\n", rec.node, rec.symbol);
            }
            text += if t.all_satisfied { "all requests satisfied\n" } else { "some requests unsatisfied\n" };
            emit(out, &text)?;
        }
        if t.all_satisfied {
            Ok(())
        } else {
            Err(CliError::Unsatisfied(t.unsatisfied()))
        }
    })
}

pub fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = GenParams {
        nodes: a.nodes,
        symbols: a.symbols,
        diameter: a.diameter,
        field: a.field,
    };
    let instances = corpus(&params, a.count, a.seed)?;
    std::fs::create_dir_all(&a.out).map_err(io_err(&a.out))?;
    let width = a.count.to_string().len().max(3);
    for (i, inst) in instances.iter().enumerate() {
        let path = a.out.join(format!("instance-{:0width$}.json", i + 1));
        write_file(&path, &(instance_to_json(inst) + "\n"))?;
        emit(out, &format!("{}\n", path.display()))?;
    }
    Ok(())
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = experiment::run(a.nodes, a.symbols, a.diameter, a.count, a.seed, strategy(a.strategy, a.samples, a.seed))?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        write_file(&dir.join("report.json"), &json_line(&report))?;
        write_file(&dir.join("ratios.csv"), &report.csv()?)?;
    }
    if a.json {
        emit(out, &json_line(&report))
    } else {
        emit(out, &report.table())
    }
}

pub fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&a.instance, err)?;
    let mut text = format!(
        "ok: {} nodes, {} edges, {} symbols, GF({})\n",
        inst.node_count(),
        inst.network().edge_count(),
        inst.symbol_count(),
        inst.field_order()
    );
    text += &format!("feasible: {}\n", if inst.is_feasible() { "yes" } else { "no" });
    text += &format!("bipartite: {}\n", if inst.is_bipartite() { "yes" } else { "no" });
    match inst.network().solvability_index() {
        Some(r) => text += &format!("solvability index: {r}\n"),
        None => text += "solvability index: none (not strongly connected)\n",
    }
    emit(out, &text)
}
