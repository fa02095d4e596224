//! New-action generation: throughput exploitation and distance-based
//! exploration scores combined multiplicatively over the candidate grid,
//! plus an exhaustive small-instance solver for the underlying dynamic
//! location problem, used as the optimality oracle.

use crate::cbr::Action;
use crate::error::{CoreError, Result};
use crate::geom::Point;
use crate::learn::LearnedThroughputMap;

/// Hard cap on the number of placement sequences the exhaustive solver will
/// enumerate.
pub const MAX_ENUMERATION: u128 = 10_000_000;

/// Scores of one candidate cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCell {
    pub location: Point,
    /// Expected end-to-end throughput: min of learned backhaul and fronthaul.
    pub throughput_score: f64,
    /// Log-distance novelty relative to previously tried actions.
    pub exploration_score: f64,
    pub combined: f64,
}

/// Per-candidate score field for one optimization call.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessField {
    pub cells: Vec<FieldCell>,
}

/// Expected end-to-end throughput per candidate: the weaker of the learned
/// backhaul and aggregate fronthaul estimates. Never consults measured values
/// at unvisited cells; those arrive only through the learned map.
pub fn exploitation_fitness(map: &LearnedThroughputMap) -> Vec<f64> {
    map.cells()
        .iter()
        .map(|c| c.backhaul_mbps.min(c.fronthaul_mbps))
        .collect()
}

/// Distance-based novelty of each candidate: min over stored actions of
/// (log10 zeta)^omega with zeta in metres, so the score crosses 1 at the
/// 10 m mark. The cell holding a stored action scores exactly zero, which
/// keeps the optimizer off already-tried locations regardless of grid
/// pitch; distances inside 1 m clamp to zero as well. An empty history
/// scores 1 everywhere.
pub fn exploration_fitness(
    candidates: &[Point],
    stored_actions: &[Point],
    omega: f64,
    grid_step: f64,
) -> Vec<f64> {
    if stored_actions.is_empty() {
        return vec![1.0; candidates.len()];
    }
    let same_cell = 0.5 * grid_step;
    candidates
        .iter()
        .map(|c| {
            stored_actions
                .iter()
                .map(|a| {
                    let d = c.distance(*a);
                    if d < same_cell {
                        return 0.0;
                    }
                    let lg = d.max(1.0).log10();
                    lg.powf(omega)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Outcome of one optimization call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratedAction {
    pub index: usize,
    pub action: Action,
    /// Set when the combined field was all-zero and the choice fell back to
    /// the throughput score alone.
    pub degenerate: bool,
}

/// Full score field for the current knowledge state.
pub fn fitness_field(
    candidates: &[Point],
    map: &LearnedThroughputMap,
    stored_actions: &[Point],
    omega: f64,
    grid_step: f64,
) -> FitnessField {
    let exploit = exploitation_fitness(map);
    let explore = exploration_fitness(candidates, stored_actions, omega, grid_step);
    let cells = candidates
        .iter()
        .zip(exploit.iter().zip(explore.iter()))
        .map(|(loc, (&t, &e))| FieldCell {
            location: *loc,
            throughput_score: t,
            exploration_score: e,
            combined: t * e,
        })
        .collect();
    FitnessField { cells }
}

fn argmax_strict(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    (best_idx, best)
}

impl FitnessField {
    /// Winning cell of the field: the maximum combined score, ties broken by
    /// lowest candidate index (row-major grid order). An all-zero field falls
    /// back to the raw throughput score and flags the degeneracy.
    pub fn select(&self) -> GeneratedAction {
        assert!(!self.cells.is_empty(), "candidate set is empty");
        let (idx, best) = argmax_strict(self.cells.iter().map(|c| c.combined));
        if best > 0.0 {
            return GeneratedAction {
                index: idx,
                action: Action {
                    location: self.cells[idx].location,
                },
                degenerate: false,
            };
        }
        let (idx, _) = argmax_strict(self.cells.iter().map(|c| c.throughput_score));
        GeneratedAction {
            index: idx,
            action: Action {
                location: self.cells[idx].location,
            },
            degenerate: true,
        }
    }
}

/// Pick the candidate maximizing throughput x novelty, ties broken by lowest
/// candidate index.
pub fn generate_action(
    candidates: &[Point],
    map: &LearnedThroughputMap,
    stored_actions: &[Point],
    omega: f64,
    grid_step: f64,
) -> GeneratedAction {
    fitness_field(candidates, map, stored_actions, omega, grid_step).select()
}

// ---------------------------------------------------------------------------
// Exhaustive solver
// ---------------------------------------------------------------------------

/// User set active during one request of the horizon.
#[derive(Debug, Clone)]
pub struct ExhaustiveStep {
    /// (location, demand) per user.
    pub users: Vec<(Point, f64)>,
}

/// Small-instance dynamic placement problem over a fixed candidate grid.
#[derive(Debug, Clone)]
pub struct ExhaustiveProblem {
    pub candidates: Vec<Point>,
    pub steps: Vec<ExhaustiveStep>,
    /// Maximum number of simultaneously deployed extenders.
    pub max_extenders: usize,
}

/// Optimal (or best-effort) placement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveSolveResult {
    /// Deployed candidate indices per step, each sorted ascending.
    pub placements: Vec<Vec<usize>>,
    /// max-per-step deployment count plus total occupancy flips.
    pub objective: usize,
    /// Total occupancy flips across successive steps (the initial deployment
    /// is free).
    pub reposition_count: usize,
    pub feasible: bool,
    /// Worst per-(step, user) fitness of the returned sequence.
    pub min_fitness: f64,
    /// Measured per-user rates per step under the returned sequence.
    pub rates: Vec<Vec<f64>>,
}

impl ExhaustiveSolveResult {
    /// Deployment indicator for candidate `i` at step `t`.
    pub fn deployed(&self, t: usize, i: usize) -> bool {
        self.placements[t].binary_search(&i).is_ok()
    }

    /// Reposition indicator: occupancy of candidate `i` changed from step
    /// t-1 to t. Always false at t = 0.
    pub fn repositioned(&self, t: usize, i: usize) -> bool {
        t > 0 && self.deployed(t - 1, i) != self.deployed(t, i)
    }
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &current {
            let start = s.last().map(|v| v + 1).unwrap_or(0);
            for i in start..n {
                let mut grown = s.clone();
                grown.push(i);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    out
}

fn symdiff_size(a: &[usize], b: &[usize]) -> usize {
    let mut i = 0;
    let mut j = 0;
    let mut diff = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    diff + (a.len() - i) + (b.len() - j)
}

/// Enumerate every deployment sequence of at most `max_extenders` locations
/// per step and return the cheapest one meeting every demand at every step.
/// Cost = peak deployment count + total occupancy flips (a relocation flips
/// two cells: the vacated and the occupied). When no sequence is feasible the
/// result carries the max-min-fitness sequence with `feasible = false`.
///
/// `rate_fn(step, placement)` must return the measured per-user rate vector
/// for the given step's users; it is the environment oracle and stays
/// independent of the heuristic search path.
pub fn exhaustive_solve<F>(problem: &ExhaustiveProblem, rate_fn: F) -> Result<ExhaustiveSolveResult>
where
    F: Fn(usize, &[usize]) -> Vec<f64>,
{
    let horizon = problem.steps.len();
    if horizon == 0 {
        return Err(CoreError::InvalidParameter("horizon is empty".into()));
    }
    let options = subsets_up_to(problem.candidates.len(), problem.max_extenders);
    let combinations = (options.len() as u128).saturating_pow(horizon as u32);
    if combinations > MAX_ENUMERATION {
        return Err(CoreError::InstanceTooLarge {
            combinations,
            limit: MAX_ENUMERATION,
        });
    }

    // Rates depend only on (step, placement), not on history: evaluate each
    // option once per step.
    struct StepEval {
        rates: Vec<f64>,
        feasible: bool,
        min_fitness: f64,
    }
    let evals: Vec<Vec<StepEval>> = (0..horizon)
        .map(|t| {
            options
                .iter()
                .map(|opt| {
                    let rates = rate_fn(t, opt);
                    let users = &problem.steps[t].users;
                    debug_assert_eq!(rates.len(), users.len());
                    let mut feasible = true;
                    let mut min_fitness = 1.0f64;
                    for (rate, (_, demand)) in rates.iter().zip(users) {
                        if rate < demand {
                            feasible = false;
                        }
                        min_fitness = min_fitness.min((rate / demand).min(1.0));
                    }
                    StepEval {
                        rates,
                        feasible,
                        min_fitness,
                    }
                })
                .collect()
        })
        .collect();

    let mut best_feasible: Option<(usize, Vec<usize>)> = None; // (objective, option idx per step)
    let mut best_effort: (f64, usize, Vec<usize>) = (-1.0, usize::MAX, Vec::new());

    let mut seq = vec![0usize; horizon];
    loop {
        let mut peak = 0usize;
        let mut flips = 0usize;
        let mut feasible = true;
        let mut min_fitness = 1.0f64;
        for t in 0..horizon {
            let opt = &options[seq[t]];
            peak = peak.max(opt.len());
            if t > 0 {
                flips += symdiff_size(&options[seq[t - 1]], opt);
            }
            let eval = &evals[t][seq[t]];
            feasible &= eval.feasible;
            min_fitness = min_fitness.min(eval.min_fitness);
        }
        let objective = peak + flips;

        if feasible {
            let better = match &best_feasible {
                None => true,
                Some((obj, _)) => objective < *obj,
            };
            if better {
                best_feasible = Some((objective, seq.clone()));
            }
        }
        if min_fitness > best_effort.0
            || (min_fitness == best_effort.0 && objective < best_effort.1)
        {
            best_effort = (min_fitness, objective, seq.clone());
        }

        // Odometer over option indices.
        let mut pos = horizon;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < options.len() {
                break;
            }
            seq[pos] = 0;
        }
        if pos == 0 && seq[0] == 0 {
            break;
        }
    }

    let (chosen, feasible) = match best_feasible {
        Some((_, seq)) => (seq, true),
        None => (best_effort.2.clone(), false),
    };

    let placements: Vec<Vec<usize>> = chosen.iter().map(|&o| options[o].clone()).collect();
    let mut peak = 0usize;
    let mut flips = 0usize;
    let mut min_fitness = 1.0f64;
    let mut rates = Vec::with_capacity(horizon);
    for t in 0..horizon {
        peak = peak.max(placements[t].len());
        if t > 0 {
            flips += symdiff_size(&placements[t - 1], &placements[t]);
        }
        let eval = &evals[t][chosen[t]];
        min_fitness = min_fitness.min(eval.min_fitness);
        rates.push(eval.rates.clone());
    }

    Ok(ExhaustiveSolveResult {
        placements,
        objective: peak + flips,
        reposition_count: flips,
        feasible,
        min_fitness,
        rates,
    })
}
