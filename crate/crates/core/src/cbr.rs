//! Case-based reasoning: the knowledge base of (problem, action, fitness)
//! triplets, Euclidean retrieval, the reuse decision rule, and retention and
//! revision of experience.

use std::io::{BufRead, Write};

use crate::error::{CoreError, Result};
use crate::geom::Point;

/// Demands are divided by this before entering a problem vector so Mbps and
/// metres contribute on comparable scales.
pub const DEFAULT_DEMAND_NORMALIZER: f64 = 100.0;

/// A situation description: master location followed by one slot per managed
/// user (x, y, normalized demand), zero for users not served by the extender.
/// Fixed dimension 2 + 3 * slot_count.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    values: Vec<f64>,
    slot_count: usize,
}

impl Problem {
    /// `served` holds, per user slot in a fixed id-sorted order, the user's
    /// location and demand when that user is served by the extender, else
    /// `None`.
    pub fn new(master_loc: Point, served: &[Option<(Point, f64)>], demand_normalizer: f64) -> Self {
        let mut values = Vec::with_capacity(2 + 3 * served.len());
        values.push(master_loc.x);
        values.push(master_loc.y);
        for slot in served {
            match slot {
                Some((loc, demand)) => {
                    values.push(loc.x);
                    values.push(loc.y);
                    values.push(demand / demand_normalizer);
                }
                None => values.extend_from_slice(&[0.0, 0.0, 0.0]),
            }
        }
        Problem {
            values,
            slot_count: served.len(),
        }
    }

    pub fn from_values(values: Vec<f64>, slot_count: usize) -> Result<Self> {
        if values.len() != 2 + 3 * slot_count {
            return Err(CoreError::DimensionMismatch {
                expected: 2 + 3 * slot_count,
                got: values.len(),
            });
        }
        Ok(Problem { values, slot_count })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Euclidean distance to another problem of the same dimension.
    pub fn distance(&self, other: &Problem) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dimension(),
                got: other.dimension(),
            });
        }
        let sq: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sq.sqrt())
    }
}

/// A recommended extender position, always a candidate-grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub location: Point,
}

/// One experienced situation with the action taken and how well it worked.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub problem: Problem,
    pub action: Action,
    pub fitness: f64,
    pub request_index: usize,
}

/// Reuse gate thresholds: a stored case is reused only when it matches
/// closely enough and worked well enough.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionThresholds {
    pub max_match_distance: f64,
    pub min_reuse_fitness: f64,
}

impl Default for DecisionThresholds {
    fn default() -> Self {
        DecisionThresholds {
            max_match_distance: 2.0,
            min_reuse_fitness: 0.8,
        }
    }
}

/// Outcome of the reuse decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    ReuseAction(Action),
    ComputeNewAction,
}

/// Retrieval result: which case matched and how far it was.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retrieved<'a> {
    pub index: usize,
    pub distance: f64,
    pub case: &'a Case,
}

/// Append-only store of cases for one extender.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    cases: Vec<Case>,
}

const KB_FORMAT_HEADER: &str = "kb-format 1";

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase { cases: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn case(&self, index: usize) -> Result<&Case> {
        self.cases.get(index).ok_or(CoreError::BadCaseIndex(index))
    }

    /// Stored actions in retention order, as consumed by the exploration
    /// score.
    pub fn stored_actions(&self) -> Vec<Point> {
        self.cases.iter().map(|c| c.action.location).collect()
    }

    /// Best stored fitness, if any case exists.
    pub fn best_case(&self) -> Option<(usize, &Case)> {
        self.cases.iter().enumerate().max_by(|(ia, a), (ib, b)| {
            a.fitness
                .partial_cmp(&b.fitness)
                .unwrap()
                // Prefer the earliest on equal fitness, so max_by must
                // treat the later index as smaller.
                .then(ib.cmp(ia))
        })
    }

    /// The stored case closest to `current` in Euclidean distance, ties
    /// broken by lowest index. Errors when no cases exist; the caller routes
    /// that to fresh optimization.
    pub fn retrieve(&self, current: &Problem) -> Result<Retrieved<'_>> {
        if self.cases.is_empty() {
            return Err(CoreError::NoCases);
        }
        let mut best_idx = 0usize;
        let mut best_dist = self.cases[0].problem.distance(current)?;
        for (k, case) in self.cases.iter().enumerate().skip(1) {
            let d = case.problem.distance(current)?;
            if d < best_dist {
                best_dist = d;
                best_idx = k;
            }
        }
        Ok(Retrieved {
            index: best_idx,
            distance: best_dist,
            case: &self.cases[best_idx],
        })
    }

    /// Append a new case. The problem dimension must match existing cases.
    pub fn retain(&mut self, case: Case) -> Result<()> {
        if let Some(first) = self.cases.first() {
            if first.problem.dimension() != case.problem.dimension() {
                return Err(CoreError::DimensionMismatch {
                    expected: first.problem.dimension(),
                    got: case.problem.dimension(),
                });
            }
        }
        if !(0.0..=1.0).contains(&case.fitness) {
            return Err(CoreError::FitnessOutOfRange(case.fitness));
        }
        self.cases.push(case);
        Ok(())
    }

    /// Update the fitness of a stored case with fresh environment feedback.
    /// Nothing else about the case changes.
    pub fn revise(&mut self, index: usize, new_fitness: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&new_fitness) {
            return Err(CoreError::FitnessOutOfRange(new_fitness));
        }
        let case = self
            .cases
            .get_mut(index)
            .ok_or(CoreError::BadCaseIndex(index))?;
        case.fitness = new_fitness;
        Ok(())
    }

    /// Serialize to the versioned line format:
    /// one `case <request> | <problem values> | <x> <y> | <fitness>` per case.
    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let slots = self
            .cases
            .first()
            .map(|c| c.problem.slot_count())
            .unwrap_or(0);
        writeln!(w, "{KB_FORMAT_HEADER} slots={slots}")?;
        for c in &self.cases {
            let values: Vec<String> = c.problem.values().iter().map(|v| format!("{v}")).collect();
            writeln!(
                w,
                "case {} | {} | {} {} | {}",
                c.request_index,
                values.join(" "),
                c.action.location.x,
                c.action.location.y,
                c.fitness
            )?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::KnowledgeBaseFormat("empty file".into()))?
            .map_err(|e| CoreError::KnowledgeBaseFormat(e.to_string()))?;
        let rest = header
            .strip_prefix(KB_FORMAT_HEADER)
            .ok_or_else(|| CoreError::KnowledgeBaseFormat(format!("bad header: {header}")))?;
        let slots: usize = rest
            .trim()
            .strip_prefix("slots=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CoreError::KnowledgeBaseFormat(format!("bad header: {header}")))?;

        let mut kb = KnowledgeBase::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| CoreError::KnowledgeBaseFormat(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let body = line.strip_prefix("case ").ok_or_else(|| {
                CoreError::KnowledgeBaseFormat(format!("line {}: expected 'case'", lineno + 2))
            })?;
            let parts: Vec<&str> = body.split('|').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(CoreError::KnowledgeBaseFormat(format!(
                    "line {}: expected 4 fields, got {}",
                    lineno + 2,
                    parts.len()
                )));
            }
            let parse_f = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| {
                    CoreError::KnowledgeBaseFormat(format!("line {}: bad number '{s}'", lineno + 2))
                })
            };
            let request_index: usize = parts[0].parse().map_err(|_| {
                CoreError::KnowledgeBaseFormat(format!("line {}: bad request index", lineno + 2))
            })?;
            let values = parts[1]
                .split_whitespace()
                .map(parse_f)
                .collect::<Result<Vec<f64>>>()?;
            let problem = Problem::from_values(values, slots)?;
            let action_parts: Vec<&str> = parts[2].split_whitespace().collect();
            if action_parts.len() != 2 {
                return Err(CoreError::KnowledgeBaseFormat(format!(
                    "line {}: action needs x y",
                    lineno + 2
                )));
            }
            let action = Action {
                location: Point::new(parse_f(action_parts[0])?, parse_f(action_parts[1])?),
            };
            let fitness = parse_f(parts[3])?;
            kb.retain(Case {
                problem,
                action,
                fitness,
                request_index,
            })?;
        }
        Ok(kb)
    }
}

/// Reuse gate: the retrieved action is pushed out only when the match is
/// close (distance strictly below the threshold) and the stored action
/// performed well (fitness strictly above the floor).
pub fn decide(distance: f64, case: &Case, thresholds: &DecisionThresholds) -> Decision {
    if distance < thresholds.max_match_distance && case.fitness > thresholds.min_reuse_fitness {
        Decision::ReuseAction(case.action)
    } else {
        Decision::ComputeNewAction
    }
}
