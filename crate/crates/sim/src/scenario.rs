//! Scenario files: a line-oriented, sectioned key-value format describing the
//! floor plan, channel constants, managed network, unmanaged neighbors and
//! run configuration. Parsing reports the offending line on any error.
//!
//! ```text
//! [plan]
//! width = 10            # metres
//! height = 10
//! grid_step = 1
//! wall = 0,6 10,6 10    # x1,y1 x2,y2 loss_db
//!
//! [channel]
//! frequency_mhz = 5000
//! noise_floor_dbm = -90
//! rx_sensitivity_dbm = -83
//! cca_threshold_dbm = -62
//! pathloss_exponent = 3
//!
//! [master]
//! location = 1,1
//! tx_power_dbm = 20
//! channel = 36
//!
//! [extender]
//! id = ext1
//! location = 5,5
//! tx_power_dbm = 20
//! fronthaul_channel = 40
//! backhaul_channel = 36
//!
//! [user]
//! id = sta1
//! location = 8,8
//! demand_mbps = 100
//!
//! [run]
//! max_repositions = 5
//! drops = 50
//! seed = 7
//! resample_users = true
//! ```

use std::fs;
use std::path::Path;

use extplace_core::cbr::DecisionThresholds;
use extplace_core::geom::{Point, Rect, WallSegment};
use extplace_core::mcs::{McsEntry, McsTable};
use extplace_core::netstate::{Deployment, UserSpec};
use extplace_core::plan::FloorPlan;
use extplace_core::radio::{ChannelParams, Interferer, RadioNode};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Managed extender template: where it starts and how its radios are tuned.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtenderSpec {
    pub id: String,
    pub initial_location: Point,
    pub tx_power_dbm: f64,
    pub fronthaul_channel: u16,
    pub backhaul_channel: u16,
}

impl ExtenderSpec {
    pub fn node_at(&self, location: Point) -> RadioNode {
        RadioNode::extender(
            self.id.clone(),
            location,
            self.tx_power_dbm,
            self.fronthaul_channel,
            self.backhaul_channel,
        )
    }
}

/// One unmanaged neighboring network: an AP, optionally its own extender and
/// user. Only the transmitters matter to the RF model.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborNetwork {
    pub id: String,
    pub ap_location: Point,
    pub ap_channel: u16,
    pub ap_tx_power_dbm: f64,
    pub extender: Option<ExtenderSpec>,
    pub user_location: Option<Point>,
    pub saturated: bool,
}

/// Episode/campaign knobs from the `[run]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// None = unlimited optimizer-driven repositions.
    pub max_repositions: Option<usize>,
    pub drops: usize,
    pub seed: u64,
    pub resample_users: bool,
    /// Region user locations are resampled in; defaults to the full plan.
    pub user_region: Option<Rect>,
    pub resample_extenders: bool,
    pub thresholds: DecisionThresholds,
    pub demand_normalizer: f64,
    pub initial_omega: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_repositions: Some(5),
            drops: 50,
            seed: 7,
            resample_users: true,
            user_region: None,
            resample_extenders: false,
            thresholds: DecisionThresholds::default(),
            demand_normalizer: 100.0,
            initial_omega: 0.5,
        }
    }
}

/// A parsed scenario: the unit of one simulation campaign.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub plan: FloorPlan,
    pub params: ChannelParams,
    pub table: McsTable,
    pub master: RadioNode,
    pub extenders: Vec<ExtenderSpec>,
    pub users: Vec<UserSpec>,
    pub neighbors: Vec<NeighborNetwork>,
    pub run: RunConfig,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::parse(&text, &path.display().to_string())
    }

    /// Neighbor transmitters flattened for the RF model.
    pub fn interferers(&self) -> Vec<Interferer> {
        let mut out = Vec::new();
        for nb in &self.neighbors {
            out.push(Interferer {
                node: RadioNode {
                    id: format!("{}-ap", nb.id),
                    role: extplace_core::radio::Role::MasterAp,
                    location: nb.ap_location,
                    tx_power_dbm: nb.ap_tx_power_dbm,
                    channel: nb.ap_channel,
                    backhaul_channel: None,
                    managed: false,
                },
                saturated: nb.saturated,
            });
            if let Some(ext) = &nb.extender {
                let mut node = ext.node_at(ext.initial_location);
                node.managed = false;
                out.push(Interferer {
                    node,
                    saturated: nb.saturated,
                });
            }
        }
        out
    }

    /// World state with the managed extenders at the given locations.
    /// `extender_locations` must align with `self.extenders`; an empty slice
    /// yields a master-only deployment.
    pub fn deployment(&self, extender_locations: &[Point], users: &[UserSpec]) -> Deployment {
        let extenders = self
            .extenders
            .iter()
            .zip(extender_locations)
            .map(|(spec, loc)| spec.node_at(*loc))
            .collect();
        Deployment {
            plan: self.plan.clone(),
            params: self.params,
            table: self.table.clone(),
            master: self.master.clone(),
            extenders,
            users: users.to_vec(),
            neighbors: self.interferers(),
        }
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, ScenarioError> {
        Parser::new(text, path).run()
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Default)]
struct PlanSection {
    width: Option<f64>,
    height: Option<f64>,
    grid_step: Option<f64>,
    walls: Vec<WallSegment>,
    candidate_region: Option<Rect>,
}

#[derive(Default)]
struct McsSection {
    bandwidth_mhz: Option<f64>,
    rows: Vec<McsEntry>,
}

struct Parser<'a> {
    text: &'a str,
    path: String,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, path: &str) -> Self {
        Parser {
            text,
            path: path.to_string(),
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn invalid(&self, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Invalid {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn run(self) -> Result<Scenario, ScenarioError> {
        let mut plan_sec = PlanSection::default();
        let mut mcs_sec = McsSection::default();
        let mut channel: Vec<(String, String, usize)> = Vec::new();
        let mut master: Vec<(String, String, usize)> = Vec::new();
        let mut extenders: Vec<Vec<(String, String, usize)>> = Vec::new();
        let mut users: Vec<Vec<(String, String, usize)>> = Vec::new();
        let mut neighbors: Vec<Vec<(String, String, usize)>> = Vec::new();
        let mut run_sec: Vec<(String, String, usize)> = Vec::new();

        let mut section = String::new();
        for (idx, raw) in self.text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| self.err(lineno, "unterminated section header"))?
                    .trim()
                    .to_string();
                match name.as_str() {
                    "extender" => extenders.push(Vec::new()),
                    "user" => users.push(Vec::new()),
                    "neighbor" => neighbors.push(Vec::new()),
                    "plan" | "channel" | "mcs" | "master" | "run" => {}
                    other => return Err(self.err(lineno, format!("unknown section [{other}]"))),
                }
                section = name;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| self.err(lineno, "expected 'key = value'"))?;
            let entry = (key.trim().to_string(), value.trim().to_string(), lineno);
            match section.as_str() {
                "plan" => self.plan_entry(&mut plan_sec, entry)?,
                "mcs" => self.mcs_entry(&mut mcs_sec, entry)?,
                "channel" => channel.push(entry),
                "master" => master.push(entry),
                "extender" => extenders.last_mut().unwrap().push(entry),
                "user" => users.last_mut().unwrap().push(entry),
                "neighbor" => neighbors.last_mut().unwrap().push(entry),
                "run" => run_sec.push(entry),
                "" => return Err(self.err(lineno, "entry before any [section]")),
                other => {
                    return Err(self.err(lineno, format!("entry in unknown section [{other}]")))
                }
            }
        }

        let plan = self.build_plan(plan_sec)?;
        let params = self.build_channel(&channel)?;
        let table = self.build_table(mcs_sec)?;
        let master = self.build_master(&master)?;
        let extenders = extenders
            .iter()
            .enumerate()
            .map(|(i, entries)| self.build_extender(entries, i))
            .collect::<Result<Vec<_>, _>>()?;
        let mut user_specs = users
            .iter()
            .enumerate()
            .map(|(i, entries)| self.build_user(entries, i))
            .collect::<Result<Vec<_>, _>>()?;
        user_specs.sort_by(|a, b| a.id.cmp(&b.id));
        let neighbors = neighbors
            .iter()
            .enumerate()
            .map(|(i, entries)| self.build_neighbor(entries, i))
            .collect::<Result<Vec<_>, _>>()?;
        let run = self.build_run(&run_sec)?;

        let scenario = Scenario {
            plan,
            params,
            table,
            master,
            extenders: extenders.clone(),
            users: user_specs,
            neighbors,
            run,
        };
        self.check(&scenario)?;
        Ok(scenario)
    }

    fn parse_f64(&self, entry: &(String, String, usize)) -> Result<f64, ScenarioError> {
        entry
            .1
            .parse()
            .map_err(|_| self.err(entry.2, format!("bad number '{}'", entry.1)))
    }

    fn parse_point(&self, entry: &(String, String, usize)) -> Result<Point, ScenarioError> {
        let (x, y) = entry
            .1
            .split_once(',')
            .ok_or_else(|| self.err(entry.2, format!("expected 'x,y', got '{}'", entry.1)))?;
        let px = x
            .trim()
            .parse()
            .map_err(|_| self.err(entry.2, format!("bad x '{x}'")))?;
        let py = y
            .trim()
            .parse()
            .map_err(|_| self.err(entry.2, format!("bad y '{y}'")))?;
        Ok(Point::new(px, py))
    }

    fn parse_rect(&self, entry: &(String, String, usize)) -> Result<Rect, ScenarioError> {
        let parts: Vec<&str> = entry.1.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(self.err(entry.2, "expected 'x0,y0 x1,y1'"));
        }
        let a = self.parse_point(&(entry.0.clone(), parts[0].to_string(), entry.2))?;
        let b = self.parse_point(&(entry.0.clone(), parts[1].to_string(), entry.2))?;
        Ok(Rect::new(
            a.x.min(b.x),
            a.y.min(b.y),
            a.x.max(b.x),
            a.y.max(b.y),
        ))
    }

    fn parse_bool(&self, entry: &(String, String, usize)) -> Result<bool, ScenarioError> {
        match entry.1.as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.err(entry.2, format!("bad boolean '{other}'"))),
        }
    }

    fn plan_entry(
        &self,
        sec: &mut PlanSection,
        entry: (String, String, usize),
    ) -> Result<(), ScenarioError> {
        match entry.0.as_str() {
            "width" => sec.width = Some(self.parse_f64(&entry)?),
            "height" => sec.height = Some(self.parse_f64(&entry)?),
            "grid_step" => sec.grid_step = Some(self.parse_f64(&entry)?),
            "candidate_region" => sec.candidate_region = Some(self.parse_rect(&entry)?),
            "wall" => {
                let parts: Vec<&str> = entry.1.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(self.err(entry.2, "wall needs 'x1,y1 x2,y2 loss_db'"));
                }
                let a = self.parse_point(&(entry.0.clone(), parts[0].to_string(), entry.2))?;
                let b = self.parse_point(&(entry.0.clone(), parts[1].to_string(), entry.2))?;
                let loss: f64 = parts[2]
                    .parse()
                    .map_err(|_| self.err(entry.2, format!("bad wall loss '{}'", parts[2])))?;
                sec.walls.push(WallSegment::new(a, b, loss));
            }
            other => return Err(self.err(entry.2, format!("unknown plan key '{other}'"))),
        }
        Ok(())
    }

    fn mcs_entry(
        &self,
        sec: &mut McsSection,
        entry: (String, String, usize),
    ) -> Result<(), ScenarioError> {
        match entry.0.as_str() {
            "bandwidth_mhz" => sec.bandwidth_mhz = Some(self.parse_f64(&entry)?),
            "row" => {
                let parts: Vec<&str> = entry.1.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(self.err(entry.2, "row needs 'min_snr_db rate_mbps'"));
                }
                let snr: f64 = parts[0]
                    .parse()
                    .map_err(|_| self.err(entry.2, format!("bad snr '{}'", parts[0])))?;
                let rate: f64 = parts[1]
                    .parse()
                    .map_err(|_| self.err(entry.2, format!("bad rate '{}'", parts[1])))?;
                sec.rows.push(McsEntry {
                    min_snr_db: snr,
                    rate_mbps: rate,
                });
            }
            other => return Err(self.err(entry.2, format!("unknown mcs key '{other}'"))),
        }
        Ok(())
    }

    fn build_plan(&self, sec: PlanSection) -> Result<FloorPlan, ScenarioError> {
        let width = sec
            .width
            .ok_or_else(|| self.invalid("[plan] missing width"))?;
        let height = sec
            .height
            .ok_or_else(|| self.invalid("[plan] missing height"))?;
        let grid_step = sec
            .grid_step
            .ok_or_else(|| self.invalid("[plan] missing grid_step"))?;
        let mut plan = FloorPlan::new(width, height, grid_step, sec.walls)
            .map_err(|e| self.invalid(format!("[plan] {e}")))?;
        if let Some(region) = sec.candidate_region {
            plan = plan.with_candidate_region(region);
            if plan.candidates().is_empty() {
                return Err(self.invalid("[plan] candidate_region leaves no candidates"));
            }
        }
        Ok(plan)
    }

    fn build_channel(
        &self,
        entries: &[(String, String, usize)],
    ) -> Result<ChannelParams, ScenarioError> {
        let mut freq = None;
        let mut noise = None;
        let mut sens = None;
        let mut cca = None;
        let mut exponent = None;
        let mut hidden = None;
        let mut fixed_mcs = None;
        for e in entries {
            match e.0.as_str() {
                "frequency_mhz" => freq = Some(self.parse_f64(e)?),
                "noise_floor_dbm" => noise = Some(self.parse_f64(e)?),
                "rx_sensitivity_dbm" => sens = Some(self.parse_f64(e)?),
                "cca_threshold_dbm" => cca = Some(self.parse_f64(e)?),
                "pathloss_exponent" => exponent = Some(self.parse_f64(e)?),
                "hidden_node_penalty" => hidden = Some(self.parse_f64(e)?),
                "fixed_mcs_index" => {
                    fixed_mcs = Some(
                        e.1.parse::<usize>()
                            .map_err(|_| self.err(e.2, format!("bad fixed_mcs_index '{}'", e.1)))?,
                    )
                }
                other => return Err(self.err(e.2, format!("unknown channel key '{other}'"))),
            }
        }
        let missing = |k: &str| self.invalid(format!("[channel] missing {k}"));
        let mut params = ChannelParams::new(
            freq.ok_or_else(|| missing("frequency_mhz"))?,
            noise.ok_or_else(|| missing("noise_floor_dbm"))?,
            sens.ok_or_else(|| missing("rx_sensitivity_dbm"))?,
            cca.ok_or_else(|| missing("cca_threshold_dbm"))?,
            exponent.ok_or_else(|| missing("pathloss_exponent"))?,
        )
        .map_err(|e| self.invalid(format!("[channel] {e}")))?;
        if let Some(h) = hidden {
            params = params.with_hidden_node_penalty(h);
        }
        params.fixed_mcs_index = fixed_mcs;
        Ok(params)
    }

    fn build_table(&self, sec: McsSection) -> Result<McsTable, ScenarioError> {
        if sec.rows.is_empty() {
            return Ok(McsTable::default_80mhz());
        }
        let bw = sec
            .bandwidth_mhz
            .ok_or_else(|| self.invalid("[mcs] missing bandwidth_mhz"))?;
        McsTable::new(sec.rows, bw).map_err(|e| self.invalid(format!("[mcs] {e}")))
    }

    fn build_master(
        &self,
        entries: &[(String, String, usize)],
    ) -> Result<RadioNode, ScenarioError> {
        let mut location = None;
        let mut power = None;
        let mut channel = None;
        for e in entries {
            match e.0.as_str() {
                "location" => location = Some(self.parse_point(e)?),
                "tx_power_dbm" => power = Some(self.parse_f64(e)?),
                "channel" => {
                    channel = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                other => return Err(self.err(e.2, format!("unknown master key '{other}'"))),
            }
        }
        Ok(RadioNode::master(
            "master",
            location.ok_or_else(|| self.invalid("[master] missing location"))?,
            power.ok_or_else(|| self.invalid("[master] missing tx_power_dbm"))?,
            channel.ok_or_else(|| self.invalid("[master] missing channel"))?,
        ))
    }

    fn build_extender(
        &self,
        entries: &[(String, String, usize)],
        index: usize,
    ) -> Result<ExtenderSpec, ScenarioError> {
        let mut id = format!("ext{}", index + 1);
        let mut location = None;
        let mut power = None;
        let mut fronthaul = None;
        let mut backhaul = None;
        for e in entries {
            match e.0.as_str() {
                "id" => id = e.1.clone(),
                "location" => location = Some(self.parse_point(e)?),
                "tx_power_dbm" => power = Some(self.parse_f64(e)?),
                "fronthaul_channel" => {
                    fronthaul = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                "backhaul_channel" => {
                    backhaul = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                other => return Err(self.err(e.2, format!("unknown extender key '{other}'"))),
            }
        }
        Ok(ExtenderSpec {
            initial_location: location
                .ok_or_else(|| self.invalid(format!("[extender] {id} missing location")))?,
            tx_power_dbm: power
                .ok_or_else(|| self.invalid(format!("[extender] {id} missing tx_power_dbm")))?,
            fronthaul_channel: fronthaul.ok_or_else(|| {
                self.invalid(format!("[extender] {id} missing fronthaul_channel"))
            })?,
            backhaul_channel: backhaul
                .ok_or_else(|| self.invalid(format!("[extender] {id} missing backhaul_channel")))?,
            id,
        })
    }

    fn build_user(
        &self,
        entries: &[(String, String, usize)],
        index: usize,
    ) -> Result<UserSpec, ScenarioError> {
        let mut id = format!("sta{}", index + 1);
        let mut location = None;
        let mut demand = None;
        for e in entries {
            match e.0.as_str() {
                "id" => id = e.1.clone(),
                "location" => location = Some(self.parse_point(e)?),
                "demand_mbps" => demand = Some(self.parse_f64(e)?),
                other => return Err(self.err(e.2, format!("unknown user key '{other}'"))),
            }
        }
        Ok(UserSpec {
            location: location
                .ok_or_else(|| self.invalid(format!("[user] {id} missing location")))?,
            demand_mbps: demand
                .ok_or_else(|| self.invalid(format!("[user] {id} missing demand_mbps")))?,
            id,
        })
    }

    fn build_neighbor(
        &self,
        entries: &[(String, String, usize)],
        index: usize,
    ) -> Result<NeighborNetwork, ScenarioError> {
        let mut id = format!("nb{}", index + 1);
        let mut ap = None;
        let mut ap_channel = None;
        let mut ap_power = 20.0;
        let mut ext_loc = None;
        let mut ext_fronthaul = None;
        let mut ext_backhaul = None;
        let mut ext_power = 20.0;
        let mut user = None;
        let mut saturated = true;
        for e in entries {
            match e.0.as_str() {
                "id" => id = e.1.clone(),
                "ap" => ap = Some(self.parse_point(e)?),
                "ap_channel" => {
                    ap_channel = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                "ap_tx_power_dbm" => ap_power = self.parse_f64(e)?,
                "extender" => ext_loc = Some(self.parse_point(e)?),
                "extender_fronthaul_channel" => {
                    ext_fronthaul = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                "extender_backhaul_channel" => {
                    ext_backhaul = Some(
                        e.1.parse::<u16>()
                            .map_err(|_| self.err(e.2, format!("bad channel '{}'", e.1)))?,
                    )
                }
                "extender_tx_power_dbm" => ext_power = self.parse_f64(e)?,
                "user" => user = Some(self.parse_point(e)?),
                "saturated" => saturated = self.parse_bool(e)?,
                other => return Err(self.err(e.2, format!("unknown neighbor key '{other}'"))),
            }
        }
        let extender = match ext_loc {
            Some(loc) => Some(ExtenderSpec {
                id: format!("{id}-ext"),
                initial_location: loc,
                tx_power_dbm: ext_power,
                fronthaul_channel: ext_fronthaul.ok_or_else(|| {
                    self.invalid(format!(
                        "[neighbor] {id} extender missing fronthaul channel"
                    ))
                })?,
                backhaul_channel: ext_backhaul.ok_or_else(|| {
                    self.invalid(format!("[neighbor] {id} extender missing backhaul channel"))
                })?,
            }),
            None => None,
        };
        Ok(NeighborNetwork {
            ap_location: ap.ok_or_else(|| self.invalid(format!("[neighbor] {id} missing ap")))?,
            ap_channel: ap_channel
                .ok_or_else(|| self.invalid(format!("[neighbor] {id} missing ap_channel")))?,
            ap_tx_power_dbm: ap_power,
            extender,
            user_location: user,
            saturated,
            id,
        })
    }

    fn build_run(&self, entries: &[(String, String, usize)]) -> Result<RunConfig, ScenarioError> {
        let mut run = RunConfig::default();
        for e in entries {
            match e.0.as_str() {
                "max_repositions" => {
                    run.max_repositions =
                        if e.1 == "unlimited" {
                            None
                        } else {
                            Some(e.1.parse().map_err(|_| {
                                self.err(e.2, format!("bad max_repositions '{}'", e.1))
                            })?)
                        }
                }
                "drops" => {
                    run.drops =
                        e.1.parse()
                            .map_err(|_| self.err(e.2, format!("bad drops '{}'", e.1)))?
                }
                "seed" => {
                    run.seed =
                        e.1.parse()
                            .map_err(|_| self.err(e.2, format!("bad seed '{}'", e.1)))?
                }
                "resample_users" => run.resample_users = self.parse_bool(e)?,
                "resample_extenders" => run.resample_extenders = self.parse_bool(e)?,
                "user_region" => run.user_region = Some(self.parse_rect(e)?),
                "max_match_distance" => run.thresholds.max_match_distance = self.parse_f64(e)?,
                "min_reuse_fitness" => run.thresholds.min_reuse_fitness = self.parse_f64(e)?,
                "demand_normalizer" => run.demand_normalizer = self.parse_f64(e)?,
                "initial_omega" => run.initial_omega = self.parse_f64(e)?,
                other => return Err(self.err(e.2, format!("unknown run key '{other}'"))),
            }
        }
        Ok(run)
    }

    fn check(&self, s: &Scenario) -> Result<(), ScenarioError> {
        let mut locations = vec![("master", s.master.location)];
        locations.extend(s.extenders.iter().map(|e| ("extender", e.initial_location)));
        locations.extend(s.users.iter().map(|u| ("user", u.location)));
        locations.extend(s.neighbors.iter().map(|n| ("neighbor", n.ap_location)));
        for (kind, loc) in locations {
            if !loc.is_finite() {
                return Err(self.invalid(format!("{kind} location is not finite")));
            }
        }
        if !s.plan.contains(s.master.location) {
            return Err(self.invalid("master location outside the floor plan"));
        }
        for ext in &s.extenders {
            if !s.plan.contains(ext.initial_location) {
                return Err(self.invalid(format!("extender {} outside the floor plan", ext.id)));
            }
            if ext.backhaul_channel != s.master.channel {
                return Err(self.invalid(format!(
                    "extender {} backhaul channel {} does not match the master channel {}",
                    ext.id, ext.backhaul_channel, s.master.channel
                )));
            }
        }
        if s.users.is_empty() {
            return Err(self.invalid("no users defined"));
        }
        for u in &s.users {
            if !s.plan.contains(u.location) {
                return Err(self.invalid(format!("user {} outside the floor plan", u.id)));
            }
            if u.demand_mbps <= 0.0 {
                return Err(self.invalid(format!("user {} demand must be positive", u.id)));
            }
        }
        let mut ids: Vec<&str> = s.users.iter().map(|u| u.id.as_str()).collect();
        ids.dedup();
        if ids.len() != s.users.len() {
            return Err(self.invalid("duplicate user ids"));
        }
        for nb in &s.neighbors {
            if !s.plan.contains(nb.ap_location) {
                return Err(self.invalid(format!("neighbor {} AP outside the floor plan", nb.id)));
            }
        }
        if let Some(region) = &s.run.user_region {
            let b = s.plan.bounds();
            if region.min_x < b.min_x
                || region.min_y < b.min_y
                || region.max_x > b.max_x
                || region.max_y > b.max_y
            {
                return Err(self.invalid("user_region extends outside the floor plan"));
            }
        }
        if s.run.drops == 0 {
            return Err(self.invalid("drops must be at least 1"));
        }
        Ok(())
    }
}
