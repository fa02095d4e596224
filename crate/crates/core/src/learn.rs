//! Measurement-driven refinement of throughput estimates and adaptation of
//! the exploration factor.
//!
//! Each measured placement defines two regions along the axis from an anchor
//! (the master for backhaul, the served users' centroid for fronthaul) to the
//! measured point: cells between anchor and measurement inherit the measured
//! value; cells beyond it decay with their extra distance. Cells outside a
//! finite corridor around the axis keep their distance-based priors. With
//! several measurements each cell listens to the nearest one, which keeps the
//! propagated regions disjoint.

use crate::channel::estimated_link_rate;
use crate::geom::Point;
use crate::mcs::McsTable;
use crate::netstate::{estimated_association, UserSpec};
use crate::radio::{ChannelParams, RadioNode};

/// Corridor half-width in grid units.
pub const CORRIDOR_HALF_WIDTH_UNITS: f64 = 2.0;

pub const OMEGA_MIN: f64 = 0.1;
pub const OMEGA_MAX: f64 = 1.0;

/// Where a cell's current estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    DistanceBased,
    RegionPropagated,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::DistanceBased => "distance",
            Provenance::RegionPropagated => "region",
        }
    }
}

/// Learned throughput figures for one candidate cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellEstimate {
    pub location: Point,
    pub backhaul_mbps: f64,
    pub fronthaul_mbps: f64,
    pub backhaul_src: Provenance,
    pub fronthaul_src: Provenance,
}

/// Per-candidate throughput estimates consumed by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedThroughputMap {
    cells: Vec<CellEstimate>,
}

impl LearnedThroughputMap {
    pub fn from_cells(cells: Vec<CellEstimate>) -> Self {
        LearnedThroughputMap { cells }
    }

    /// Blind prior over the candidate grid: free-space backhaul from the
    /// master, free-space fronthaul summed over the users that would pick a
    /// relay at each cell over the master.
    pub fn distance_based_init(
        candidates: &[Point],
        master: &RadioNode,
        relay_power_dbm: f64,
        users: &[UserSpec],
        params: &ChannelParams,
        table: &McsTable,
    ) -> Self {
        let cells = candidates
            .iter()
            .map(|&loc| {
                let backhaul =
                    estimated_link_rate(master.location, master.tx_power_dbm, loc, params, table);
                let fronthaul = users
                    .iter()
                    .filter(|u| {
                        estimated_association(loc, relay_power_dbm, master, u.location, params)
                    })
                    .map(|u| estimated_link_rate(loc, relay_power_dbm, u.location, params, table))
                    .sum();
                CellEstimate {
                    location: loc,
                    backhaul_mbps: backhaul,
                    fronthaul_mbps: fronthaul,
                    backhaul_src: Provenance::DistanceBased,
                    fronthaul_src: Provenance::DistanceBased,
                }
            })
            .collect();
        LearnedThroughputMap { cells }
    }

    pub fn cells(&self) -> &[CellEstimate] {
        &self.cells
    }

    pub fn cell_at(&self, loc: Point) -> Option<&CellEstimate> {
        self.cells.iter().find(|c| c.location.distance(loc) < 1e-9)
    }
}

/// A measured backhaul rate at a visited cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackhaulMeasurement {
    pub location: Point,
    pub rate_mbps: f64,
}

/// A measured aggregate fronthaul rate at a visited cell, together with the
/// backhaul context needed to judge its validity: a fronthaul reading taken
/// while the backhaul was the bottleneck says nothing about fronthaul radio
/// conditions and is discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FronthaulMeasurement {
    pub location: Point,
    pub rate_mbps: f64,
    pub backhaul_mbps: f64,
    pub total_demand_mbps: f64,
    /// Centroid of the served users at measurement time.
    pub user_anchor: Point,
}

impl FronthaulMeasurement {
    pub fn is_valid(&self) -> bool {
        self.backhaul_mbps >= self.total_demand_mbps || self.backhaul_mbps >= self.rate_mbps
    }
}

/// Value the region rule assigns to `cell` under a measurement at `k` seen
/// from `anchor`, or `None` when the cell is outside both regions.
fn region_value(
    anchor: Point,
    k: Point,
    rate: f64,
    cell: Point,
    grid_step: f64,
    half_width_m: f64,
) -> Option<f64> {
    let axis_len = anchor.distance(k);
    if axis_len < 1e-9 {
        // Degenerate axis: only the measured cell itself is covered.
        return (cell.distance(k) < 1e-9).then_some(rate);
    }
    let dir_x = (k.x - anchor.x) / axis_len;
    let dir_y = (k.y - anchor.y) / axis_len;
    let rel_x = cell.x - anchor.x;
    let rel_y = cell.y - anchor.y;
    let proj = rel_x * dir_x + rel_y * dir_y;
    let perp = (rel_x * dir_y - rel_y * dir_x).abs();

    if perp > half_width_m || proj < 0.0 {
        return None;
    }
    if proj <= axis_len {
        return Some(rate);
    }
    // Beyond the measurement: decay with the extra anchor distance.
    let unit_gap = ((cell.distance(anchor) - axis_len).abs() / grid_step).max(1.0);
    Some(rate / unit_gap)
}

/// Owns the estimate map for one extender and folds measurements into it.
#[derive(Debug, Clone)]
pub struct ThroughputLearner {
    grid_step: f64,
    half_width_m: f64,
    master_loc: Point,
    prior: Vec<CellEstimate>,
    backhaul_meas: Vec<BackhaulMeasurement>,
    fronthaul_meas: Vec<FronthaulMeasurement>,
    map: LearnedThroughputMap,
}

impl ThroughputLearner {
    pub fn new(prior: LearnedThroughputMap, master_loc: Point, grid_step: f64) -> Self {
        ThroughputLearner {
            grid_step,
            half_width_m: CORRIDOR_HALF_WIDTH_UNITS * grid_step,
            master_loc,
            prior: prior.cells.clone(),
            backhaul_meas: Vec::new(),
            fronthaul_meas: Vec::new(),
            map: prior,
        }
    }

    pub fn map(&self) -> &LearnedThroughputMap {
        &self.map
    }

    pub fn backhaul_measurements(&self) -> &[BackhaulMeasurement] {
        &self.backhaul_meas
    }

    /// Fold in a backhaul measurement. Re-measuring a location replaces the
    /// earlier reading.
    pub fn update_backhaul(&mut self, m: BackhaulMeasurement) {
        match self
            .backhaul_meas
            .iter_mut()
            .find(|e| e.location.distance(m.location) < 1e-9)
        {
            Some(existing) => *existing = m,
            None => self.backhaul_meas.push(m),
        }
        self.recompute();
    }

    /// Fold in a fronthaul measurement; returns false when the reading was
    /// discarded as backhaul-limited.
    pub fn update_fronthaul(&mut self, m: FronthaulMeasurement) -> bool {
        if !m.is_valid() {
            return false;
        }
        match self
            .fronthaul_meas
            .iter_mut()
            .find(|e| e.location.distance(m.location) < 1e-9)
        {
            Some(existing) => *existing = m,
            None => self.fronthaul_meas.push(m),
        }
        self.recompute();
        true
    }

    fn recompute(&mut self) {
        let mut cells = self.prior.clone();
        for cell in &mut cells {
            if let Some((m, _)) = nearest_by(&self.backhaul_meas, cell.location, |m| m.location) {
                if let Some(v) = region_value(
                    self.master_loc,
                    m.location,
                    m.rate_mbps,
                    cell.location,
                    self.grid_step,
                    self.half_width_m,
                ) {
                    cell.backhaul_mbps = v;
                    cell.backhaul_src = Provenance::RegionPropagated;
                }
            }
            if let Some((m, _)) = nearest_by(&self.fronthaul_meas, cell.location, |m| m.location) {
                if let Some(v) = region_value(
                    m.user_anchor,
                    m.location,
                    m.rate_mbps,
                    cell.location,
                    self.grid_step,
                    self.half_width_m,
                ) {
                    cell.fronthaul_mbps = v;
                    cell.fronthaul_src = Provenance::RegionPropagated;
                }
            }
        }
        self.map = LearnedThroughputMap { cells };
    }
}

fn nearest_by<T, F: Fn(&T) -> Point>(items: &[T], to: Point, loc: F) -> Option<(&T, f64)> {
    let mut best: Option<(&T, f64)> = None;
    for item in items {
        let d = loc(item).distance(to);
        match best {
            Some((_, bd)) if d >= bd => {}
            _ => best = Some((item, d)),
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Exploration factor
// ---------------------------------------------------------------------------

/// Exploration factor with the fitness history driving its adaptation:
/// stalled fitness pushes toward wide exploration, large fitness swings pull
/// back to local exploitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorationState {
    pub omega: f64,
    pub previous_fitness: Option<f64>,
    pub current_fitness: Option<f64>,
}

impl ExplorationState {
    pub fn new(omega0: f64) -> Self {
        ExplorationState {
            omega: omega0.clamp(OMEGA_MIN, OMEGA_MAX),
            previous_fitness: None,
            current_fitness: None,
        }
    }

    /// Record the fitness observed for the latest action.
    pub fn observe_fitness(&mut self, fitness: f64) {
        self.previous_fitness = self.current_fitness;
        self.current_fitness = Some(fitness);
    }

    /// Raw adaptation step: 2 - e^|dF|, in [2 - e, 1].
    pub fn delta_omega(delta_fitness: f64) -> f64 {
        2.0 - delta_fitness.abs().exp()
    }

    /// The raw step mapped affinely from [2 - e, 1] onto [0, 1].
    pub fn normalized_step(delta_fitness: f64) -> f64 {
        let low = 2.0 - std::f64::consts::E;
        (Self::delta_omega(delta_fitness) - low) / (1.0 - low)
    }

    /// Advance the factor from the last two observed fitness values; a
    /// shorter history leaves it unchanged. Result stays in [0.1, 1.0].
    pub fn update_omega(&mut self) -> f64 {
        if let (Some(prev), Some(cur)) = (self.previous_fitness, self.current_fitness) {
            let step = Self::normalized_step(cur - prev);
            self.omega = (0.5 * (self.omega + step)).clamp(OMEGA_MIN, OMEGA_MAX);
        }
        self.omega
    }
}
