//! Episode driver: one simulation drop under a chosen placement policy.
//!
//! The reasoning policy runs the full sense / perceive / reason / decide /
//! optimize / learn loop per request: it measures the current placement,
//! folds the measurement into its throughput estimates, retains or revises
//! experience, and either reuses a well-matching past action or generates a
//! new one from the exploitation x exploration field. Baselines place once
//! and hold; the oracle solves the placement problem exhaustively.

use anyhow::{bail, Context};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use extplace_core::cbr::{decide, Action, Case, Decision, KnowledgeBase, Problem};
use extplace_core::geom::Point;
use extplace_core::learn::{
    BackhaulMeasurement, ExplorationState, FronthaulMeasurement, LearnedThroughputMap,
    ThroughputLearner,
};
use extplace_core::link::coverage_value;
use extplace_core::netstate::{perceive, unsatisfied_users, PerceptionSnapshot, UserSpec};
use extplace_core::placement::{
    exhaustive_solve, fitness_field, ExhaustiveProblem, ExhaustiveSolveResult, ExhaustiveStep,
    FitnessField,
};

use crate::scenario::Scenario;

/// Placement policies under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// Reasoning loop with knowledge reuse and learned estimates.
    AiCbr,
    /// Place once at the max-min-RSSI cell and hold.
    CoverageMax,
    /// No extenders at all.
    ApOnly,
    /// Exhaustive small-instance optimum.
    Oracle,
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::AiCbr => "ai-cbr",
            Algo::CoverageMax => "coverage-max",
            Algo::ApOnly => "ap-only",
            Algo::Oracle => "oracle",
        }
    }

    pub const ALL: [Algo; 4] = [Algo::AiCbr, Algo::CoverageMax, Algo::ApOnly, Algo::Oracle];
}

/// How the move recorded at a request was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSource {
    /// Reused a stored case's action.
    Reuse,
    /// Fresh action from the optimizer.
    Optimize,
    /// Terminal fallback to the best stored action.
    Settle,
}

impl ActionSource {
    pub fn name(&self) -> &'static str {
        match self {
            ActionSource::Reuse => "reuse",
            ActionSource::Optimize => "optimize",
            ActionSource::Settle => "settle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    BudgetExhausted,
}

impl TerminalStatus {
    pub fn name(&self) -> &'static str {
        match self {
            TerminalStatus::Converged => "converged",
            TerminalStatus::BudgetExhausted => "budget-exhausted",
        }
    }
}

/// One request's worth of episode history.
#[derive(Debug, Clone)]
pub struct RequestRecord {
    pub t: usize,
    pub extender_locations: Vec<Point>,
    pub snapshot: PerceptionSnapshot,
    /// Action applied after this request's perception, if any.
    pub action: Option<(ActionSource, Point)>,
    pub omega: f64,
}

/// Full history of one episode.
#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub algo: Algo,
    pub drop_seed: u64,
    pub requests: Vec<RequestRecord>,
    pub terminal: TerminalStatus,
    /// Physical location changes over the episode.
    pub repositions: usize,
    /// Optimizer-driven moves, the budgeted quantity.
    pub optimize_moves: usize,
    /// Knowledge bases per managed extender; empty for baselines.
    pub kbs: Vec<KnowledgeBase>,
    /// Score fields captured at each optimizer call, for heatmap dumps.
    pub fields: Vec<(usize, FitnessField)>,
    /// Estimate maps captured per request, for learning-progress dumps.
    pub estimate_maps: Vec<(usize, Vec<LearnedThroughputMap>)>,
}

impl EpisodeLog {
    pub fn final_snapshot(&self) -> &PerceptionSnapshot {
        &self
            .requests
            .last()
            .expect("episode has at least one request")
            .snapshot
    }

    /// Final per-user rates in user order.
    pub fn final_rates(&self) -> Vec<f64> {
        self.final_snapshot()
            .users
            .iter()
            .map(|u| u.e2e_rate_mbps)
            .collect()
    }
}

/// User locations and extender starting points for one drop, derived solely
/// from the drop seed so every policy sees the same world.
#[derive(Debug, Clone)]
pub struct DropSetup {
    pub users: Vec<UserSpec>,
    pub extender_starts: Vec<Point>,
}

pub fn drop_setup(scenario: &Scenario, drop_seed: u64) -> DropSetup {
    let mut rng = ChaCha8Rng::seed_from_u64(drop_seed);
    let region = scenario
        .run
        .user_region
        .unwrap_or_else(|| scenario.plan.bounds());
    let users = scenario
        .users
        .iter()
        .map(|u| {
            if scenario.run.resample_users {
                let x = rng.random_range(region.min_x..=region.max_x);
                let y = rng.random_range(region.min_y..=region.max_y);
                UserSpec {
                    id: u.id.clone(),
                    location: Point::new(x, y),
                    demand_mbps: u.demand_mbps,
                }
            } else {
                u.clone()
            }
        })
        .collect();
    let candidates = scenario.plan.candidates();
    let extender_starts = scenario
        .extenders
        .iter()
        .map(|e| {
            if scenario.run.resample_extenders {
                candidates[rng.random_range(0..candidates.len())]
            } else {
                e.initial_location
            }
        })
        .collect();
    DropSetup {
        users,
        extender_starts,
    }
}

/// Run one episode. `max_repositions` bounds optimizer-driven moves
/// (None = unlimited).
pub fn run_episode(
    scenario: &Scenario,
    algo: Algo,
    drop_seed: u64,
    max_repositions: Option<usize>,
) -> anyhow::Result<EpisodeLog> {
    let setup = drop_setup(scenario, drop_seed);
    match algo {
        Algo::AiCbr => Ok(run_reasoning(scenario, &setup, drop_seed, max_repositions)),
        Algo::CoverageMax => Ok(run_coverage_max(scenario, &setup, drop_seed)),
        Algo::ApOnly => Ok(run_ap_only(scenario, &setup, drop_seed)),
        Algo::Oracle => run_oracle(scenario, &setup, drop_seed),
    }
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// Candidate cell maximizing the worst-side RSSI, ties to the lowest index.
pub fn coverage_max_place(scenario: &Scenario, users: &[UserSpec]) -> Point {
    let candidates = scenario.plan.candidates();
    let user_locs: Vec<Point> = users.iter().map(|u| u.location).collect();
    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, &c) in candidates.iter().enumerate() {
        let v = coverage_value(
            c,
            &scenario.master,
            &user_locs,
            &scenario.plan,
            &scenario.params,
        );
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    candidates[best_idx]
}

fn hold_placement_log(
    scenario: &Scenario,
    users: &[UserSpec],
    locations: Vec<Point>,
    algo: Algo,
    drop_seed: u64,
) -> EpisodeLog {
    let deployment = scenario.deployment(&locations, users);
    let snapshot = perceive(&deployment, 0);
    EpisodeLog {
        algo,
        drop_seed,
        requests: vec![RequestRecord {
            t: 0,
            extender_locations: locations,
            snapshot,
            action: None,
            omega: scenario.run.initial_omega,
        }],
        terminal: TerminalStatus::Converged,
        repositions: 0,
        optimize_moves: 0,
        kbs: Vec::new(),
        fields: Vec::new(),
        estimate_maps: Vec::new(),
    }
}

fn run_coverage_max(scenario: &Scenario, setup: &DropSetup, drop_seed: u64) -> EpisodeLog {
    let spot = coverage_max_place(scenario, &setup.users);
    let locations = vec![spot; scenario.extenders.len()];
    hold_placement_log(
        scenario,
        &setup.users,
        locations,
        Algo::CoverageMax,
        drop_seed,
    )
}

fn run_ap_only(scenario: &Scenario, setup: &DropSetup, drop_seed: u64) -> EpisodeLog {
    // No extenders: pass an empty location list so none are deployed.
    let deployment = scenario.deployment(&[], &setup.users);
    let snapshot = perceive(&deployment, 0);
    EpisodeLog {
        algo: Algo::ApOnly,
        drop_seed,
        requests: vec![RequestRecord {
            t: 0,
            extender_locations: Vec::new(),
            snapshot,
            action: None,
            omega: scenario.run.initial_omega,
        }],
        terminal: TerminalStatus::Converged,
        repositions: 0,
        optimize_moves: 0,
        kbs: Vec::new(),
        fields: Vec::new(),
        estimate_maps: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

/// Exhaustive single-request solve for the given users, used both by the
/// oracle policy and for per-drop feasibility certification.
pub fn oracle_solve(
    scenario: &Scenario,
    users: &[UserSpec],
) -> extplace_core::Result<ExhaustiveSolveResult> {
    let candidates = scenario.plan.candidates();
    let problem = ExhaustiveProblem {
        candidates: candidates.clone(),
        steps: vec![ExhaustiveStep {
            users: users.iter().map(|u| (u.location, u.demand_mbps)).collect(),
        }],
        max_extenders: scenario.extenders.len(),
    };
    exhaustive_solve(&problem, |_, placement| {
        let locations: Vec<Point> = placement.iter().map(|&i| candidates[i]).collect();
        let deployment = scenario.deployment(&locations, users);
        let snap = perceive(&deployment, 0);
        snap.users.iter().map(|u| u.e2e_rate_mbps).collect()
    })
}

fn run_oracle(
    scenario: &Scenario,
    setup: &DropSetup,
    drop_seed: u64,
) -> anyhow::Result<EpisodeLog> {
    if scenario.extenders.is_empty() {
        bail!("oracle needs at least one managed extender");
    }
    let candidates = scenario.plan.candidates();
    let solution = oracle_solve(scenario, &setup.users)
        .context("exhaustive solve failed; reduce the grid or horizon")?;
    let locations: Vec<Point> = solution.placements[0]
        .iter()
        .map(|&i| candidates[i])
        .collect();
    Ok(hold_placement_log(
        scenario,
        &setup.users,
        locations,
        Algo::Oracle,
        drop_seed,
    ))
}

// ---------------------------------------------------------------------------
// Reasoning policy
// ---------------------------------------------------------------------------

/// Fitness spread tolerated by the stall detector.
const PLATEAU_TOLERANCE: f64 = 0.01;
/// Consecutive requests within the tolerance that count as a stall.
const PLATEAU_WINDOW: usize = 3;
/// Safety cap on requests per episode.
const MAX_REQUESTS: usize = 500;

struct PendingAction {
    action: Action,
    /// Case to revise on reuse; a fresh problem to retain on optimize.
    reuse_index: Option<usize>,
    problem: Option<Problem>,
}

/// Per-extender reasoning state.
struct ExtenderAgent {
    kb: KnowledgeBase,
    learner: ThroughputLearner,
    explore: ExplorationState,
    pending: Option<PendingAction>,
}

fn build_problem(
    scenario: &Scenario,
    snapshot: &PerceptionSnapshot,
    users: &[UserSpec],
    extender_id: &str,
) -> Problem {
    let served: Vec<Option<(Point, f64)>> = users
        .iter()
        .map(|u| {
            let perceived = snapshot
                .users
                .iter()
                .find(|p| p.id == u.id)
                .expect("snapshot covers every user");
            (perceived.serving == extender_id).then_some((u.location, u.demand_mbps))
        })
        .collect();
    Problem::new(
        scenario.master.location,
        &served,
        scenario.run.demand_normalizer,
    )
}

fn run_reasoning(
    scenario: &Scenario,
    setup: &DropSetup,
    drop_seed: u64,
    max_repositions: Option<usize>,
) -> EpisodeLog {
    let candidates = scenario.plan.candidates();
    let users = &setup.users;
    let mut locations = setup.extender_starts.clone();

    let mut agents: Vec<ExtenderAgent> = scenario
        .extenders
        .iter()
        .map(|spec| {
            let prior = LearnedThroughputMap::distance_based_init(
                &candidates,
                &scenario.master,
                spec.tx_power_dbm,
                users,
                &scenario.params,
                &scenario.table,
            );
            ExtenderAgent {
                kb: KnowledgeBase::new(),
                learner: ThroughputLearner::new(
                    prior,
                    scenario.master.location,
                    scenario.plan.grid_step,
                ),
                explore: ExplorationState::new(scenario.run.initial_omega),
                pending: None,
            }
        })
        .collect();

    let mut requests: Vec<RequestRecord> = Vec::new();
    let mut fields: Vec<(usize, FitnessField)> = Vec::new();
    let mut estimate_maps: Vec<(usize, Vec<LearnedThroughputMap>)> = Vec::new();
    let mut fitness_vectors: Vec<Vec<f64>> = Vec::new();
    let mut repositions = 0usize;
    let mut optimize_moves = 0usize;
    let mut terminal;

    let mut t = 0usize;
    loop {
        let deployment = scenario.deployment(&locations, users);
        let snapshot = perceive(&deployment, t);
        // The minimum fitness is the QoS verdict recorded with cases; the
        // mean drives stall detection and exploration adaptation, since the
        // minimum pins at zero while a starved user is starved everywhere.
        let overall = snapshot.overall_fitness();
        let mean = snapshot.mean_fitness();
        fitness_vectors.push(snapshot.users.iter().map(|u| u.fitness).collect());

        // Learning: fold the current placement's measurements into each
        // agent's estimate map and fitness history.
        for (i, agent) in agents.iter_mut().enumerate() {
            let spec = &scenario.extenders[i];
            let state = &snapshot.node(&spec.id).expect("extender perceived").state;
            agent.learner.update_backhaul(BackhaulMeasurement {
                location: locations[i],
                rate_mbps: state.meas_backhaul_mbps,
            });
            let served: Vec<&UserSpec> = users
                .iter()
                .filter(|u| {
                    snapshot
                        .users
                        .iter()
                        .any(|p| p.id == u.id && p.serving == spec.id)
                })
                .collect();
            let anchor_pool: Vec<Point> = if served.is_empty() {
                users.iter().map(|u| u.location).collect()
            } else {
                served.iter().map(|u| u.location).collect()
            };
            let n = anchor_pool.len() as f64;
            let anchor = Point::new(
                anchor_pool.iter().map(|p| p.x).sum::<f64>() / n,
                anchor_pool.iter().map(|p| p.y).sum::<f64>() / n,
            );
            agent.learner.update_fronthaul(FronthaulMeasurement {
                location: locations[i],
                rate_mbps: state.meas_fronthaul_total(),
                backhaul_mbps: state.meas_backhaul_mbps,
                total_demand_mbps: served.iter().map(|u| u.demand_mbps).sum(),
                user_anchor: anchor,
            });
            agent.explore.observe_fitness(mean);

            // Close out the action applied last request now that its effect
            // is measured, or seed the knowledge base with the starting
            // placement.
            match agent.pending.take() {
                Some(p) => match p.reuse_index {
                    Some(k) => {
                        agent.kb.revise(k, overall).expect("revised index is valid");
                    }
                    None => {
                        agent
                            .kb
                            .retain(Case {
                                problem: p.problem.expect("optimize carries its problem"),
                                action: p.action,
                                fitness: overall,
                                request_index: t,
                            })
                            .expect("dimension fixed per episode");
                    }
                },
                None if t == 0 => {
                    let problem = build_problem(scenario, &snapshot, users, &spec.id);
                    agent
                        .kb
                        .retain(Case {
                            problem,
                            action: Action {
                                location: locations[i],
                            },
                            fitness: overall,
                            request_index: 0,
                        })
                        .expect("first case always fits");
                }
                None => {}
            }
        }
        estimate_maps.push((t, agents.iter().map(|a| a.learner.map().clone()).collect()));

        let record_base = RequestRecord {
            t,
            extender_locations: locations.clone(),
            snapshot: snapshot.clone(),
            action: None,
            omega: agents.first().map(|a| a.explore.omega).unwrap_or(0.0),
        };

        // Terminal checks: full satisfaction, stalled fitness, safety cap.
        let unsat = unsatisfied_users(&snapshot);
        if unsat.is_empty() {
            requests.push(record_base);
            terminal = TerminalStatus::Converged;
            break;
        }
        // Stalled when per-user fitness has not moved for three consecutive
        // requests. The per-user vector distinguishes placements whose
        // aggregates happen to collide.
        let stalled = fitness_vectors.len() >= PLATEAU_WINDOW && {
            let tail = &fitness_vectors[fitness_vectors.len() - PLATEAU_WINDOW..];
            tail.windows(2).all(|pair| {
                pair[0]
                    .iter()
                    .zip(&pair[1])
                    .all(|(a, b)| (a - b).abs() <= PLATEAU_TOLERANCE)
            })
        };
        if stalled || t + 1 >= MAX_REQUESTS {
            requests.push(record_base);
            terminal = TerminalStatus::Converged;
            if t + 1 >= MAX_REQUESTS {
                terminal = TerminalStatus::BudgetExhausted;
            }
            break;
        }

        // Reasoning and decision per extender.
        let mut record = record_base;
        let mut budget_exhausted = false;
        for (i, agent) in agents.iter_mut().enumerate() {
            let spec = &scenario.extenders[i];
            let problem = build_problem(scenario, &snapshot, users, &spec.id);
            let decision = match agent.kb.retrieve(&problem) {
                Ok(retrieved) => {
                    let d = decide(retrieved.distance, retrieved.case, &scenario.run.thresholds);
                    match d {
                        Decision::ReuseAction(action) => Some((action, Some(retrieved.index))),
                        Decision::ComputeNewAction => None,
                    }
                }
                Err(_) => None, // empty knowledge base: straight to optimization
            };

            match decision {
                Some((action, reuse_index)) => {
                    if action.location != locations[i] {
                        repositions += 1;
                    }
                    locations[i] = action.location;
                    record.action = Some((ActionSource::Reuse, action.location));
                    agent.pending = Some(PendingAction {
                        action,
                        reuse_index,
                        problem: None,
                    });
                }
                None => {
                    if max_repositions
                        .map(|n| optimize_moves >= n)
                        .unwrap_or(false)
                    {
                        budget_exhausted = true;
                        continue;
                    }
                    let omega = agent.explore.update_omega();
                    let field = fitness_field(
                        &candidates,
                        agent.learner.map(),
                        &agent.kb.stored_actions(),
                        omega,
                        scenario.plan.grid_step,
                    );
                    let generated = field.select();
                    fields.push((t, field));
                    if generated.action.location != locations[i] {
                        repositions += 1;
                    }
                    locations[i] = generated.action.location;
                    optimize_moves += 1;
                    record.omega = omega;
                    record.action = Some((ActionSource::Optimize, generated.action.location));
                    agent.pending = Some(PendingAction {
                        action: generated.action,
                        reuse_index: None,
                        problem: Some(problem),
                    });
                }
            }
        }

        requests.push(record);
        if budget_exhausted {
            terminal = TerminalStatus::BudgetExhausted;
            break;
        }
        t += 1;
    }

    // The network's standing recommendation is its best-known action: when
    // the loop halts somewhere worse, fall back to it and re-measure.
    let current = requests
        .last()
        .map(|r| r.snapshot.overall_fitness())
        .unwrap_or(0.0);
    if current < 1.0 {
        let mut settled = false;
        for (i, agent) in agents.iter().enumerate() {
            if let Some((_, best)) = agent.kb.best_case() {
                if best.fitness > current + PLATEAU_TOLERANCE
                    && best.action.location != locations[i]
                {
                    locations[i] = best.action.location;
                    repositions += 1;
                    settled = true;
                }
            }
        }
        if settled {
            let t = requests.len();
            let deployment = scenario.deployment(&locations, users);
            let snapshot = perceive(&deployment, t);
            if let Some(last) = requests.last_mut() {
                last.action = Some((ActionSource::Settle, locations[0]));
            }
            requests.push(RequestRecord {
                t,
                extender_locations: locations.clone(),
                snapshot,
                action: None,
                omega: agents.first().map(|a| a.explore.omega).unwrap_or(0.0),
            });
        }
    }

    EpisodeLog {
        algo: Algo::AiCbr,
        drop_seed,
        requests,
        terminal,
        repositions,
        optimize_moves,
        kbs: agents.into_iter().map(|a| a.kb).collect(),
        fields,
        estimate_maps,
    }
}
