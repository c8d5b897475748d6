use std::fs;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tradeoff_core::elicitation::{Answer, ElicitationSession, QuestionKind};
use tradeoff_core::frontier::efficient_frontier;
use tradeoff_core::io::{parse_answers_json, parse_attributes_json, read_plans_csv, PlanTable};
use tradeoff_core::simharness::{
    run_anytime_experiment, run_first_merge_comparison, Sizes, TrialConfig,
};
use tradeoff_core::utility::ScaledAttribute;
use tradeoff_service::{Defaults, Store};

#[derive(Parser)]
#[command(name = "tradeoff", version, about = "Lazy tradeoff elicitation over a set of plans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the ids of the plans no other plan dominates.
    Frontier {
        #[arg(long)]
        plans: PathBuf,
        #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
        epsilon: f64,
        /// Write the full result (survivors and eliminations) as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulation experiment.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Elicit tradeoffs, from a script of answers or interactively.
    Elicit {
        #[arg(long)]
        plans: PathBuf,
        #[arg(long)]
        attrs: PathBuf,
        /// JSON array of answers to replay.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Plans used when a create request gives none.
        #[arg(long, requires = "attrs")]
        plans: Option<PathBuf>,
        /// Attributes used when a create request gives none.
        #[arg(long)]
        attrs: Option<PathBuf>,
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Simulate {
    /// Frontier reduction from the first merge, per pair-selection strategy.
    FirstMerge(SimArgs),
    /// Mean frontier size after each merge.
    Anytime(SimArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Plans per instance. Without --m and --n, sizes are pooled over the
    /// default grid.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), requires = "n")]
    m: Option<u64>,
    /// Attributes per instance.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..), requires = "m")]
    n: Option<u64>,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path. A `.csv` extension selects CSV where the experiment
    /// supports it; JSON otherwise. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimArgs {
    fn config(&self) -> Result<TrialConfig> {
        let sizes = match (self.m, self.n) {
            (Some(m), Some(n)) => Sizes::Fixed {
                m: m as usize,
                n: n as usize,
            },
            _ => Sizes::pooled_default(),
        };
        Ok(TrialConfig::new(sizes, self.trials as usize, self.seed)?)
    }

    fn wants_csv(&self) -> bool {
        self.out
            .as_deref()
            .and_then(Path::extension)
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("must be finite and >= 0, got {s}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Exits 2 on usage errors, 0 for --help and --version.
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Frontier { plans, epsilon, out } => {
            let table = load_plans(&plans)?;
            let result = efficient_frontier(&table.matrix()?, epsilon)?;
            let ids: Vec<String> = result.surviving.iter().map(usize::to_string).collect();
            println!("{}", ids.join(" "));
            if let Some(out) = out {
                emit(Some(&out), &serde_json::to_string_pretty(&result)?)?;
            }
            Ok(())
        }
        Command::Simulate(Simulate::FirstMerge(args)) => {
            let report = run_first_merge_comparison(&args.config()?)?;
            emit(args.out.as_deref(), &report.to_json())
        }
        Command::Simulate(Simulate::Anytime(args)) => {
            let report = run_anytime_experiment(&args.config()?)?;
            let text = if args.wants_csv() { report.to_csv() } else { report.to_json() };
            emit(args.out.as_deref(), &text)
        }
        Command::Elicit {
            plans,
            attrs,
            script,
            epsilon,
            out,
        } => {
            let (table, attributes) = load_inputs(&plans, &attrs)?;
            let mut session = match script {
                Some(path) => {
                    let answers = parse_answers_json(&read(&path)?)?;
                    ElicitationSession::replay(table.plans, attributes, epsilon, &answers)?
                }
                None => {
                    let mut session = ElicitationSession::start(table.plans, attributes, epsilon)?;
                    prompt_loop(&mut session, io::stdin().lock(), io::stderr())?;
                    session
                }
            };
            let report = session.accept();
            emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)
        }
        Command::Serve {
            port,
            host,
            plans,
            attrs,
            snapshot_dir,
        } => {
            let defaults = Defaults {
                attributes: attrs.as_deref().map(load_attributes).transpose()?,
                plans: plans.as_deref().map(load_plans).transpose()?,
            };
            if let (Some(table), Some(attributes)) = (&defaults.plans, &defaults.attributes) {
                table.check_attributes(attributes)?;
            }
            let store = match snapshot_dir {
                Some(dir) => Store::with_snapshots(&dir)
                    .with_context(|| format!("opening snapshot dir {}", dir.display()))?,
                None => Store::in_memory(),
            };
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .with_context(|| format!("bad address {host}:{port}"))?;
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            runtime.block_on(tradeoff_service::serve(addr, Arc::new(store.with_defaults(defaults))))?;
            Ok(())
        }
    }
}

/// Asks questions until the session is done or the input ends. A number
/// answers the question; `r <ratio>` states the ratio directly; `accept`
/// stops early.
fn prompt_loop(session: &mut ElicitationSession, input: impl BufRead, mut out: impl Write) -> Result<()> {
    let mut lines = input.lines();
    while let Ok(q) = session.next_question() {
        writeln!(out, "\nfrontier: {} plans", session.frontier().len())?;
        writeln!(out, "{}", q.text)?;
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line == "accept" || line == "q" {
            break;
        }
        let answer = match line.strip_prefix("r ") {
            Some(r) => r.trim().parse().map(|r| Answer::DirectRatio { r, pair: None }),
            None => line.parse().map(|x| match q.kind {
                QuestionKind::TypeI { .. } => Answer::Probability { p: x },
                QuestionKind::TypeII { .. } => Answer::MatchingValue { value: x },
            }),
        };
        match answer {
            Ok(a) => {
                if let Err(e) = session.apply_answer(a) {
                    writeln!(out, "not accepted: {e}")?;
                }
            }
            Err(_) => writeln!(out, "enter a number, `r <ratio>`, or `accept`")?,
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_plans(path: &Path) -> Result<PlanTable> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    read_plans_csv(file).with_context(|| format!("in {}", path.display()))
}

fn load_attributes(path: &Path) -> Result<Vec<ScaledAttribute>> {
    parse_attributes_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_inputs(plans: &Path, attrs: &Path) -> Result<(PlanTable, Vec<ScaledAttribute>)> {
    let table = load_plans(plans)?;
    let attributes = load_attributes(attrs)?;
    table.check_attributes(&attributes)?;
    Ok((table, attributes))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
