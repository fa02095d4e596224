//! Campaign runner: many drops per policy with per-drop seeds derived from
//! one master seed, aggregated into metrics and CSV reports. Everything is
//! ordered and deterministic: identical inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use anyhow::Context;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::episode::{run_episode, Algo, EpisodeLog};
use crate::metrics::{convergence_stats, jain_index, outage, MetricsReport};
use crate::scenario::Scenario;

/// Everything a campaign produced, per policy in run order.
#[derive(Debug)]
pub struct CampaignOutcome {
    pub reports: Vec<MetricsReport>,
    pub logs: Vec<(Algo, Vec<EpisodeLog>)>,
    pub drop_seeds: Vec<u64>,
}

/// Per-drop seeds derived from the master seed; stable regardless of which
/// policies run.
pub fn derive_drop_seeds(master_seed: u64, drops: usize) -> Vec<u64> {
    let mut seeder = ChaCha8Rng::seed_from_u64(master_seed);
    (0..drops).map(|_| seeder.random()).collect()
}

pub fn run_campaign(
    scenario: &Scenario,
    algos: &[Algo],
    drops: usize,
    master_seed: u64,
    max_repositions: Option<usize>,
) -> anyhow::Result<CampaignOutcome> {
    let drop_seeds = derive_drop_seeds(master_seed, drops);
    let mut logs: Vec<(Algo, Vec<EpisodeLog>)> = Vec::new();
    let mut reports = Vec::new();

    for &algo in algos {
        let mut episodes = Vec::with_capacity(drops);
        for &seed in &drop_seeds {
            let log = run_episode(scenario, algo, seed, max_repositions)
                .with_context(|| format!("{} episode, drop seed {seed}", algo.name()))?;
            episodes.push(log);
        }

        let rate_lists: Vec<Vec<f64>> = episodes.iter().map(|e| e.final_rates()).collect();
        let pooled: Vec<f64> = rate_lists.iter().flatten().copied().collect();
        let repositions: Vec<usize> = episodes.iter().map(|e| e.repositions).collect();
        reports.push(MetricsReport {
            algo: algo.name().to_string(),
            avg_throughput_mbps: pooled.iter().sum::<f64>() / pooled.len() as f64,
            jain_index: jain_index(&pooled)?,
            outage_fraction: outage(&rate_lists),
            mean_repositions: repositions.iter().sum::<usize>() as f64 / repositions.len() as f64,
            per_user_rates: pooled,
        });
        logs.push((algo, episodes));
    }

    Ok(CampaignOutcome {
        reports,
        logs,
        drop_seeds,
    })
}

/// Write summary.csv, drops.csv, convergence_cdf.csv and, when the reasoning
/// policy ran, the final drop's knowledge base as kb.txt.
pub fn write_outputs(outcome: &CampaignOutcome, out_dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut summary = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    summary.write_record([
        "algo",
        "avg_throughput_mbps",
        "jain_index",
        "outage_fraction",
        "mean_repositions",
    ])?;
    for r in &outcome.reports {
        summary.write_record([
            r.algo.clone(),
            format!("{}", r.avg_throughput_mbps),
            format!("{}", r.jain_index),
            format!("{}", r.outage_fraction),
            format!("{}", r.mean_repositions),
        ])?;
    }
    summary.flush()?;

    let mut drops = csv::Writer::from_path(out_dir.join("drops.csv"))?;
    drops.write_record(["algo", "drop", "user", "rate_mbps", "satisfied"])?;
    for (algo, episodes) in &outcome.logs {
        for (d, episode) in episodes.iter().enumerate() {
            for user in &episode.final_snapshot().users {
                drops.write_record([
                    algo.name().to_string(),
                    format!("{d}"),
                    user.id.clone(),
                    format!("{}", user.e2e_rate_mbps),
                    format!("{}", user.e2e_rate_mbps >= user.demand_mbps),
                ])?;
            }
        }
    }
    drops.flush()?;

    let mut cdf = csv::Writer::from_path(out_dir.join("convergence_cdf.csv"))?;
    cdf.write_record(["algo", "repositions", "cdf"])?;
    for (algo, episodes) in &outcome.logs {
        let repositions: Vec<usize> = episodes.iter().map(|e| e.repositions).collect();
        let stats = convergence_stats(&repositions)?;
        for (k, v) in stats.cdf {
            cdf.write_record([algo.name().to_string(), format!("{k}"), format!("{v}")])?;
        }
    }
    cdf.flush()?;

    for (algo, episodes) in &outcome.logs {
        if *algo != Algo::AiCbr {
            continue;
        }
        if let Some(last) = episodes.last() {
            for (i, kb) in last.kbs.iter().enumerate() {
                let name = if i == 0 {
                    "kb.txt".to_string()
                } else {
                    format!("kb{}.txt", i + 1)
                };
                let file = fs::File::create(out_dir.join(name))?;
                kb.save(std::io::BufWriter::new(file))?;
            }
        }
    }

    Ok(())
}

/// Per-request score-field and estimate-map dumps for one reasoning episode.
pub fn write_field_dumps(log: &EpisodeLog, out_dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out_dir)?;
    for (t, field) in &log.fields {
        let mut w = csv::Writer::from_path(out_dir.join(format!("field_req{t}.csv")))?;
        w.write_record([
            "x",
            "y",
            "throughput_score",
            "exploration_score",
            "combined",
        ])?;
        for cell in &field.cells {
            w.write_record([
                format!("{}", cell.location.x),
                format!("{}", cell.location.y),
                format!("{}", cell.throughput_score),
                format!("{}", cell.exploration_score),
                format!("{}", cell.combined),
            ])?;
        }
        w.flush()?;
    }
    for (t, maps) in &log.estimate_maps {
        for (i, map) in maps.iter().enumerate() {
            let name = if maps.len() == 1 {
                format!("estimates_req{t}.csv")
            } else {
                format!("estimates_req{t}_ext{}.csv", i + 1)
            };
            let mut w = csv::Writer::from_path(out_dir.join(name))?;
            w.write_record([
                "x",
                "y",
                "est_backhaul_mbps",
                "est_fronthaul_mbps",
                "backhaul_src",
                "fronthaul_src",
            ])?;
            for cell in map.cells() {
                w.write_record([
                    format!("{}", cell.location.x),
                    format!("{}", cell.location.y),
                    format!("{}", cell.backhaul_mbps),
                    format!("{}", cell.fronthaul_mbps),
                    cell.backhaul_src.as_str().to_string(),
                    cell.fronthaul_src.as_str().to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
