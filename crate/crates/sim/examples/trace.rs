//! Debug trace of reasoning episodes: per-request placement, fitness and
//! action source for chosen drops.

use extplace_sim::campaign::derive_drop_seeds;
use extplace_sim::episode::{drop_setup, run_episode, Algo};
use extplace_sim::scenario::Scenario;
use std::path::Path;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let path = args
        .get(1)
        .map(String::as_str)
        .unwrap_or("scenarios/isolated_6room.scn");
    let scenario = Scenario::load(Path::new(path))?;
    let n_drops: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let seeds = derive_drop_seeds(scenario.run.seed, n_drops);

    for (d, &seed) in seeds.iter().enumerate() {
        let setup = drop_setup(&scenario, seed);
        let users: Vec<String> = setup
            .users
            .iter()
            .map(|u| format!("{}@({:.1},{:.1})", u.id, u.location.x, u.location.y))
            .collect();
        println!("=== drop {d} seed {seed} users {users:?}");
        let log = run_episode(&scenario, Algo::AiCbr, seed, scenario.run.max_repositions)?;
        for r in &log.requests {
            let locs: Vec<String> = r
                .extender_locations
                .iter()
                .map(|p| format!("({},{})", p.x, p.y))
                .collect();
            let rates: Vec<String> = r
                .snapshot
                .users
                .iter()
                .map(|u| format!("{}:{:.0}[{}]", u.id, u.e2e_rate_mbps, u.serving))
                .collect();
            let action = r
                .action
                .map(|(src, loc)| format!("{} -> ({},{})", src.name(), loc.x, loc.y))
                .unwrap_or_else(|| "-".into());
            println!(
                "  t={:<2} ext={:<12} min={:.2} mean={:.2} omega={:.2} rates={:?} act={}",
                r.t,
                locs.join(","),
                r.snapshot.overall_fitness(),
                r.snapshot.mean_fitness(),
                r.omega,
                rates,
                action
            );
        }
        println!(
            "  terminal={} repositions={} optimize={}",
            log.terminal.name(),
            log.repositions,
            log.optimize_moves
        );
        let oracle = run_episode(&scenario, Algo::Oracle, seed, None)?;
        let orates: Vec<String> = oracle
            .final_snapshot()
            .users
            .iter()
            .map(|u| format!("{}:{:.0}", u.id, u.e2e_rate_mbps))
            .collect();
        let olocs: Vec<String> = oracle.requests[0]
            .extender_locations
            .iter()
            .map(|p| format!("({},{})", p.x, p.y))
            .collect();
        println!("  oracle ext={} rates={:?}", olocs.join(","), orates);
    }
    Ok(())
}
