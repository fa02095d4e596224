//! Command-line entry point: run campaigns, dump optimizer score fields, and
//! lint scenario files.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use extplace_sim::campaign::{derive_drop_seeds, run_campaign, write_field_dumps, write_outputs};
use extplace_sim::episode::{run_episode, Algo};
use extplace_sim::scenario::Scenario;

#[derive(Parser)]
#[command(
    name = "extplace",
    about = "Indoor wireless extender placement workbench",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign of simulation drops and write metric CSVs.
    Run(RunArgs),
    /// Run one reasoning episode and dump its score fields and estimate maps.
    DumpField(DumpFieldArgs),
    /// Parse and check a scenario file.
    Validate { scenario: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Policies to run (comma separated); defaults to all of them.
    #[arg(long, value_delimiter = ',')]
    algo: Vec<Algo>,
    /// Number of drops; defaults to the scenario's [run] drops.
    #[arg(long)]
    drops: Option<usize>,
    /// Master seed; defaults to the scenario's [run] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Optimizer reposition budget: a number or 'unlimited'.
    #[arg(long)]
    max_repositions: Option<String>,
    /// Output directory for summary.csv, drops.csv, convergence_cdf.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpFieldArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Master seed; defaults to the scenario's [run] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Which drop's episode to dump.
    #[arg(long, default_value_t = 0)]
    drop: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_budget(raw: &Option<String>, fallback: Option<usize>) -> anyhow::Result<Option<usize>> {
    match raw.as_deref() {
        None => Ok(fallback),
        Some("unlimited") => Ok(None),
        Some(n) => Ok(Some(n.parse().with_context(|| {
            format!("--max-repositions expects a number or 'unlimited', got '{n}'")
        })?)),
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let algos: Vec<Algo> = if args.algo.is_empty() {
        Algo::ALL.to_vec()
    } else {
        args.algo.clone()
    };
    let drops = args.drops.unwrap_or(scenario.run.drops);
    let seed = args.seed.unwrap_or(scenario.run.seed);
    let budget = parse_budget(&args.max_repositions, scenario.run.max_repositions)?;

    let outcome = run_campaign(&scenario, &algos, drops, seed, budget)?;

    println!(
        "{:<14} {:>16} {:>12} {:>10} {:>14}",
        "algo", "avg_mbps", "jain", "outage", "repositions"
    );
    for r in &outcome.reports {
        println!(
            "{:<14} {:>16.2} {:>12.4} {:>10.3} {:>14.2}",
            r.algo, r.avg_throughput_mbps, r.jain_index, r.outage_fraction, r.mean_repositions
        );
    }

    if let Some(out) = &args.out {
        write_outputs(&outcome, out)?;
        println!("wrote CSV reports to {}", out.display());
    }
    Ok(())
}

fn cmd_dump_field(args: DumpFieldArgs) -> anyhow::Result<()> {
    let scenario = Scenario::load(&args.scenario)?;
    let seed = args.seed.unwrap_or(scenario.run.seed);
    let seeds = derive_drop_seeds(seed, args.drop + 1);
    let drop_seed = *seeds.last().expect("at least one seed");
    let log = run_episode(
        &scenario,
        Algo::AiCbr,
        drop_seed,
        scenario.run.max_repositions,
    )?;
    write_field_dumps(&log, &args.out)?;
    println!(
        "episode: {} requests, {} repositions, terminal {}",
        log.requests.len(),
        log.repositions,
        log.terminal.name()
    );
    println!("wrote field dumps to {}", args.out.display());
    Ok(())
}

fn cmd_validate(path: PathBuf) -> anyhow::Result<()> {
    match Scenario::load(&path) {
        Ok(s) => {
            println!("{}: OK", path.display());
            println!(
                "  plan {}x{} m, grid step {} m, {} walls, {} candidate cells",
                s.plan.width,
                s.plan.height,
                s.plan.grid_step,
                s.plan.walls.len(),
                s.plan.candidates().len()
            );
            println!(
                "  {} extender(s), {} user(s), {} neighbor network(s)",
                s.extenders.len(),
                s.users.len(),
                s.neighbors.len()
            );
            println!(
                "  drops {}, seed {}, reposition budget {}",
                s.run.drops,
                s.run.seed,
                s.run
                    .max_repositions
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| "unlimited".into())
            );
            Ok(())
        }
        Err(e) => bail!("{e}"),
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::DumpField(args) => cmd_dump_field(args),
        Command::Validate { scenario } => cmd_validate(scenario),
    }
}
