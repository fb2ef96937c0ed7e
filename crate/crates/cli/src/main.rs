use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use archgame_core::model::ClosureMode;
use archgame_core::reduction::{self, Graph};
use archgame_core::solver::{self, SolveMode, SolveReport, DEFAULT_EXACT_CAP};
use archgame_core::{corpus, io, Error, GameContext, Model};
use clap::{Args, Parser, Subcommand};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Decompose software requirements with a coalition game.
///
/// MODEL arguments are paths to JSON model files or `corpus:<name>` for a
/// built-in model.
#[derive(Parser)]
#[command(name = "archgame", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model for structural problems.
    Validate { model: String },
    /// Print the relevance index of every pair.
    Relevance {
        model: String,
        /// One line per pair instead of a matrix.
        #[arg(long)]
        pairs: bool,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Compute a decomposition.
    Solve {
        model: String,
        /// Cohesion level for the k-cohesive solver [default: model's k, else 3].
        #[arg(long, conflicts_with = "exact")]
        k: Option<usize>,
        /// Use the exact solver instead.
        #[arg(long)]
        exact: bool,
        /// Largest model the exact solver accepts.
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
        /// Include search statistics and timing.
        #[arg(long)]
        stats: bool,
        /// Reserved; every solver is deterministic.
        #[arg(long, hide = true)]
        seed: Option<u64>,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Check that a decomposition is a solution.
    Verify {
        model: String,
        decomposition: PathBuf,
        /// Check k-cohesion instead of full cohesion.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: usize,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Write the interaction graph in Graphviz format.
    ExportDot {
        model: String,
        /// Draw the coalitions of this decomposition as clusters.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Build the clique game of an edge-list graph.
    GenClique {
        edgelist: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in model, or list them.
    Corpus { name: Option<String> },
}

#[derive(Args)]
struct GameArgs {
    /// Dependency closure used for relevance.
    #[arg(long, value_parser = parse_closure)]
    closure: Option<ClosureMode>,
}

fn parse_closure(s: &str) -> Result<ClosureMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Input(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn load(model: &str) -> Result<Model, Error> {
    match model.strip_prefix("corpus:") {
        Some(name) => corpus::by_name(name),
        None => io::load_model(model),
    }
}

fn context(model: &str, game: &GameArgs, k: Option<usize>) -> Result<GameContext, Failure> {
    let m = load(model)?;
    let mut params = m.params_or_default();
    if let Some(c) = game.closure {
        params = params.with_closure(c);
    }
    if let Some(k) = k {
        params = params.with_k(k);
    }
    Ok(GameContext::new(m.primitive, params)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write `{}`: {e}", path.display())))
}

fn validate(model: &str) -> Outcome {
    let m = load(model)?;
    let (f, s) = io::kind_counts(&m.primitive);
    Ok(format!(
        "{}: valid ({f} functional, {s} scenarios, {} constraints)\n",
        m.primitive.name,
        m.primitive.constraints.len()
    ))
}

fn relevance(model: &str, pairs: bool, game: &GameArgs) -> Outcome {
    let ctx = context(model, game, None)?;
    let table = ctx.sigma_table();
    let ids: Vec<&str> = (0..ctx.len()).map(|i| ctx.id(i).as_str()).collect();
    let mut out = String::new();
    if pairs {
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                let _ = writeln!(out, "{}\t{}\t{:.4}", ids[i], ids[j], table.get(i, j));
            }
        }
        return Ok(out);
    }
    let w = ids.iter().map(|s| s.len()).max().unwrap_or(0).max(7);
    let _ = write!(out, "{:w$}", "");
    for id in &ids {
        let _ = write!(out, " {id:>w$}");
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        let _ = write!(out, "{id:w$}");
        for j in 0..ids.len() {
            if i == j {
                let _ = write!(out, " {:>w$}", "-");
            } else {
                let _ = write!(out, " {:>w$.4}", table.get(i, j));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

struct SolveArgs<'a> {
    model: &'a str,
    k: Option<usize>,
    exact: bool,
    cap: usize,
    out: Option<&'a Path>,
    json: bool,
    stats: bool,
    game: &'a GameArgs,
}

fn solve(a: SolveArgs) -> Outcome {
    let ctx = context(a.model, a.game, a.k)?;
    let report: SolveReport = if a.exact {
        solver::solve_exact_capped(&ctx, a.cap)?
    } else {
        solver::solve_k(&ctx, ctx.params().k)
    };
    if let Some(path) = a.out {
        write_file(path, &io::report_to_json(&ctx, &report, a.stats))?;
    }
    Ok(if a.json {
        io::report_to_json(&ctx, &report, a.stats)
    } else {
        io::report_to_text(&ctx, &report, a.stats)
    })
}

fn verify(model: &str, decomposition: &Path, k: Option<usize>, cap: usize, game: &GameArgs) -> Outcome {
    let ctx = context(model, game, k)?;
    let d = io::load_decomposition(decomposition)?;
    let mode = k.map_or(SolveMode::Exact, SolveMode::KCohesive);
    let v = solver::verify_solution_capped(&ctx, &d, mode, cap)?;
    let mut out = String::new();
    for (i, (c, u)) in d.coalitions.iter().zip(&v.utilities).enumerate() {
        let _ = writeln!(out, "D{}  {u:.3}  {c}", i + 1);
    }
    for (i, failure) in &v.cohesion_failures {
        if let solver::Cohesion::Violated { witness, utility } = failure {
            let _ = writeln!(
                out,
                "not {mode}: D{} contains {witness} with utility {utility:.3}",
                i + 1
            );
        }
    }
    for w in &v.expansion_failures {
        let _ = writeln!(
            out,
            "not expansion free: D{} and D{} together reach {:.3}",
            w.first + 1,
            w.second + 1,
            w.union_utility
        );
    }
    if v.passed() {
        let _ = writeln!(out, "solution ({mode})");
        Ok(out)
    } else {
        out.push_str("not a solution\n");
        Err(Failure::Verify(out))
    }
}

fn export_dot(model: &str, decomposition: Option<&Path>, out: Option<&Path>, game: &GameArgs) -> Outcome {
    let ctx = context(model, game, None)?;
    let d = decomposition.map(io::load_decomposition).transpose()?;
    if let Some(d) = &d {
        d.check_against(ctx.primitive())?;
    }
    let dot = io::export_dot(&ctx, d.as_ref());
    match out {
        Some(path) => {
            write_file(path, &dot)?;
            Ok(String::new())
        }
        None => Ok(dot),
    }
}

fn gen_clique(edgelist: &Path, gamma: f64, lambda: f64, out: Option<&Path>) -> Outcome {
    let text = std::fs::read_to_string(edgelist)
        .map_err(|e| Failure::Input(format!("cannot read `{}`: {e}", edgelist.display())))?;
    let graph = Graph::parse_edge_list(&text)?;
    let json = io::model_to_json(&reduction::clique_to_game(&graph, gamma, lambda)?);
    match out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(String::new())
        }
        None => Ok(json),
    }
}

fn corpus_cmd(name: Option<&str>) -> Outcome {
    match name {
        Some(name) => Ok(io::model_to_json(&corpus::by_name(name)?)),
        None => Ok(corpus::NAMES.iter().map(|n| format!("{n}\n")).collect()),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { model } => validate(&model),
        Command::Relevance { model, pairs, game } => relevance(&model, pairs, &game),
        Command::Solve {
            model,
            k,
            exact,
            cap,
            out,
            json,
            stats,
            seed: _,
            game,
        } => solve(SolveArgs {
            model: &model,
            k,
            exact,
            cap,
            out: out.as_deref(),
            json,
            stats,
            game: &game,
        }),
        Command::Verify {
            model,
            decomposition,
            k,
            cap,
            game,
        } => verify(&model, &decomposition, k, cap, &game),
        Command::ExportDot {
            model,
            decomposition,
            out,
            game,
        } => export_dot(&model, decomposition.as_deref(), out.as_deref(), &game),
        Command::GenClique {
            edgelist,
            gamma,
            lambda,
            out,
        } => gen_clique(&edgelist, gamma, lambda, out.as_deref()),
        Command::Corpus { name } => corpus_cmd(name.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(text)) => {
            print!("{text}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
