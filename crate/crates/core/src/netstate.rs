//! Network state perception: assembling per-user and per-node throughput
//! indicators from the RF surrogate, QoS fitness, and the unsatisfied-user
//! check that triggers the reasoning loop.

use crate::channel::{estimated_link_rate, free_space_loss, snr_at};
use crate::error::{CoreError, Result};
use crate::geom::Point;
use crate::link::measured_link_throughput;
use crate::mcs::McsTable;
use crate::plan::FloorPlan;
use crate::radio::{ChannelParams, Interferer, RadioNode};

/// A managed user: where it is and what it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSpec {
    pub id: String,
    pub location: Point,
    pub demand_mbps: f64,
}

/// Everything placed in the world for one evaluation: the immutable
/// environment plus the current managed placement.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub plan: FloorPlan,
    pub params: ChannelParams,
    pub table: McsTable,
    pub master: RadioNode,
    pub extenders: Vec<RadioNode>,
    pub users: Vec<UserSpec>,
    pub neighbors: Vec<Interferer>,
}

/// QoS satisfaction degree: achieved rate over demand, clipped to [0, 1].
pub fn fitness(rate_mbps: f64, demand_mbps: f64) -> Result<f64> {
    if demand_mbps <= 0.0 {
        return Err(CoreError::NonPositiveDemand(demand_mbps));
    }
    Ok((rate_mbps / demand_mbps).clamp(0.0, 1.0))
}

/// Per-user fronthaul figures at one serving node.
#[derive(Debug, Clone, PartialEq)]
pub struct UserFronthaul {
    pub user_id: String,
    pub est_mbps: f64,
    pub meas_mbps: f64,
}

/// Throughput variables of one serving node: estimated and measured backhaul,
/// per-user fronthaul, and the derived end-to-end rates. The master's
/// backhaul is wired and modelled as infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputState {
    pub est_backhaul_mbps: f64,
    pub meas_backhaul_mbps: f64,
    pub fronthaul: Vec<UserFronthaul>,
}

impl ThroughputState {
    pub fn est_fronthaul_total(&self) -> f64 {
        self.fronthaul.iter().map(|f| f.est_mbps).sum()
    }

    pub fn meas_fronthaul_total(&self) -> f64 {
        self.fronthaul.iter().map(|f| f.meas_mbps).sum()
    }

    /// End-to-end rate of one served user: the weaker of its fronthaul and
    /// its share of the backhaul. Backhaul capacity is split across users in
    /// proportion to their measured fronthaul, which reduces to
    /// min(backhaul, fronthaul) for a single user.
    pub fn e2e_rate(&self, user_id: &str) -> Result<f64> {
        let entry = self
            .fronthaul
            .iter()
            .find(|f| f.user_id == user_id)
            .ok_or_else(|| CoreError::NoServingNode(user_id.to_string()))?;
        if entry.meas_mbps <= 0.0 {
            return Ok(0.0);
        }
        let total = self.meas_fronthaul_total();
        let backhaul_share = self.meas_backhaul_mbps * (entry.meas_mbps / total);
        Ok(backhaul_share.min(entry.meas_mbps))
    }
}

/// One user's row in a perception snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPerception {
    pub id: String,
    pub location: Point,
    pub demand_mbps: f64,
    /// Id of the serving node (master or extender).
    pub serving: String,
    /// Measured signal from the serving node.
    pub rssi_dbm: f64,
    pub e2e_rate_mbps: f64,
    pub fitness: f64,
}

/// Throughput state of one serving node, tagged with its identity.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePerception {
    pub node_id: String,
    pub location: Point,
    pub state: ThroughputState,
}

/// The perception output for one request: every indicator the reasoning and
/// learning stages consume.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionSnapshot {
    pub request_index: usize,
    pub users: Vec<UserPerception>,
    /// Master first, then extenders in deployment order.
    pub nodes: Vec<NodePerception>,
}

impl PerceptionSnapshot {
    /// System-wide satisfaction: the minimum fitness across managed users.
    /// 1.0 exactly when every demand is met.
    pub fn overall_fitness(&self) -> f64 {
        self.users.iter().map(|u| u.fitness).fold(1.0, f64::min)
    }

    /// Mean fitness across managed users. Smoother than the minimum: it
    /// moves whenever any user's service changes, which makes it the signal
    /// for stall detection and exploration-factor adaptation.
    pub fn mean_fitness(&self) -> f64 {
        if self.users.is_empty() {
            return 1.0;
        }
        self.users.iter().map(|u| u.fitness).sum::<f64>() / self.users.len() as f64
    }

    pub fn node(&self, node_id: &str) -> Option<&NodePerception> {
        self.nodes.iter().find(|n| n.node_id == node_id)
    }
}

/// Users whose measured rate falls strictly short of their demand.
pub fn unsatisfied_users(snapshot: &PerceptionSnapshot) -> Vec<String> {
    snapshot
        .users
        .iter()
        .filter(|u| u.fitness < 1.0)
        .map(|u| u.id.clone())
        .collect()
}

/// Serving-node choice for each user: strongest measured signal wins, the
/// master on ties.
pub fn associate(deployment: &Deployment) -> Vec<usize> {
    // Index 0 = master, 1 + k = extender k.
    deployment
        .users
        .iter()
        .map(|u| {
            let mut best = 0usize;
            let mut best_rssi = snr_at(
                &deployment.master,
                u.location,
                &deployment.plan,
                &deployment.params,
            )
            .rssi_dbm;
            for (k, ext) in deployment.extenders.iter().enumerate() {
                let r = snr_at(ext, u.location, &deployment.plan, &deployment.params).rssi_dbm;
                if r > best_rssi {
                    best = k + 1;
                    best_rssi = r;
                }
            }
            best
        })
        .collect()
}

/// Whether a user at `user_loc` would prefer a relay at `candidate` over the
/// master, judged on the engine's blind free-space estimates. Used when
/// scoring unvisited candidate locations.
pub fn estimated_association(
    candidate: Point,
    relay_power_dbm: f64,
    master: &RadioNode,
    user_loc: Point,
    params: &ChannelParams,
) -> bool {
    let via_relay = relay_power_dbm - free_space_loss(params, candidate, user_loc);
    let via_master = master.tx_power_dbm - free_space_loss(params, master.location, user_loc);
    via_relay > via_master
}

/// Evaluate the full perception snapshot for the current placement.
/// Pure in its inputs: identical deployments yield identical snapshots.
pub fn perceive(deployment: &Deployment, request_index: usize) -> PerceptionSnapshot {
    let assoc = associate(deployment);
    let plan = &deployment.plan;
    let params = &deployment.params;
    let table = &deployment.table;

    let mut managed_nodes: Vec<RadioNode> = Vec::with_capacity(1 + deployment.extenders.len());
    managed_nodes.push(deployment.master.clone());
    managed_nodes.extend(deployment.extenders.iter().cloned());

    let mut nodes: Vec<NodePerception> = Vec::with_capacity(managed_nodes.len());
    for (node_idx, node) in managed_nodes.iter().enumerate() {
        let (est_bh, meas_bh) = if node_idx == 0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let est = estimated_link_rate(
                deployment.master.location,
                deployment.master.tx_power_dbm,
                node.location,
                params,
                table,
            );
            let meas = measured_link_throughput(
                &deployment.master,
                node.location,
                deployment.master.channel,
                &managed_nodes,
                &deployment.neighbors,
                plan,
                params,
                table,
            );
            (est, meas)
        };

        let mut fronthaul = Vec::new();
        for (u_idx, user) in deployment.users.iter().enumerate() {
            if assoc[u_idx] != node_idx {
                continue;
            }
            let est = estimated_link_rate(
                node.location,
                node.tx_power_dbm,
                user.location,
                params,
                table,
            );
            let meas = measured_link_throughput(
                node,
                user.location,
                node.channel,
                &managed_nodes,
                &deployment.neighbors,
                plan,
                params,
                table,
            );
            fronthaul.push(UserFronthaul {
                user_id: user.id.clone(),
                est_mbps: est,
                meas_mbps: meas,
            });
        }

        nodes.push(NodePerception {
            node_id: node.id.clone(),
            location: node.location,
            state: ThroughputState {
                est_backhaul_mbps: est_bh,
                meas_backhaul_mbps: meas_bh,
                fronthaul,
            },
        });
    }

    let users = deployment
        .users
        .iter()
        .enumerate()
        .map(|(u_idx, user)| {
            let node_idx = assoc[u_idx];
            let serving = &managed_nodes[node_idx];
            let rssi = snr_at(serving, user.location, plan, params).rssi_dbm;
            let rate = nodes[node_idx]
                .state
                .e2e_rate(&user.id)
                .expect("user is associated by construction");
            let fit = fitness(rate, user.demand_mbps).expect("demands validated at load");
            UserPerception {
                id: user.id.clone(),
                location: user.location,
                demand_mbps: user.demand_mbps,
                serving: serving.id.clone(),
                rssi_dbm: rssi,
                e2e_rate_mbps: rate,
                fitness: fit,
            }
        })
        .collect();

    PerceptionSnapshot {
        request_index,
        users,
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fitness_is_the_clipped_ratio() {
        assert!((fitness(50.0, 100.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((fitness(150.0, 100.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(fitness(0.0, 100.0).unwrap(), 0.0);
        assert!(fitness(50.0, 0.0).is_err());
        assert!(fitness(50.0, -1.0).is_err());
    }

    fn single_user_state(bh: f64, fh: f64) -> ThroughputState {
        ThroughputState {
            est_backhaul_mbps: bh,
            meas_backhaul_mbps: bh,
            fronthaul: vec![UserFronthaul {
                user_id: "u1".into(),
                est_mbps: fh,
                meas_mbps: fh,
            }],
        }
    }

    #[test]
    fn single_user_e2e_is_the_minimum() {
        assert!((single_user_state(100.0, 60.0).e2e_rate("u1").unwrap() - 60.0).abs() < 1e-12);
        assert!((single_user_state(60.0, 100.0).e2e_rate("u1").unwrap() - 60.0).abs() < 1e-12);
    }

    #[test]
    fn two_users_split_the_backhaul_proportionally() {
        let state = ThroughputState {
            est_backhaul_mbps: 80.0,
            meas_backhaul_mbps: 80.0,
            fronthaul: vec![
                UserFronthaul {
                    user_id: "a".into(),
                    est_mbps: 80.0,
                    meas_mbps: 80.0,
                },
                UserFronthaul {
                    user_id: "b".into(),
                    est_mbps: 80.0,
                    meas_mbps: 80.0,
                },
            ],
        };
        assert!((state.e2e_rate("a").unwrap() - 40.0).abs() < 1e-12);
        assert!((state.e2e_rate("b").unwrap() - 40.0).abs() < 1e-12);
    }

    #[test]
    fn backhaul_shares_conserve_capacity() {
        let state = ThroughputState {
            est_backhaul_mbps: 90.0,
            meas_backhaul_mbps: 90.0,
            fronthaul: vec![
                UserFronthaul {
                    user_id: "a".into(),
                    est_mbps: 120.0,
                    meas_mbps: 120.0,
                },
                UserFronthaul {
                    user_id: "b".into(),
                    est_mbps: 40.0,
                    meas_mbps: 40.0,
                },
                UserFronthaul {
                    user_id: "c".into(),
                    est_mbps: 20.0,
                    meas_mbps: 20.0,
                },
            ],
        };
        let total: f64 = ["a", "b", "c"]
            .iter()
            .map(|u| state.e2e_rate(u).unwrap())
            .sum();
        assert!(total <= 90.0 + 1e-9, "shares {total} exceed backhaul");
    }

    #[test]
    fn unknown_user_is_an_error() {
        let state = single_user_state(10.0, 10.0);
        assert!(matches!(
            state.e2e_rate("ghost"),
            Err(CoreError::NoServingNode(_))
        ));
    }

    #[test]
    fn infinite_backhaul_passes_fronthaul_through() {
        let state = ThroughputState {
            est_backhaul_mbps: f64::INFINITY,
            meas_backhaul_mbps: f64::INFINITY,
            fronthaul: vec![UserFronthaul {
                user_id: "a".into(),
                est_mbps: 70.0,
                meas_mbps: 70.0,
            }],
        };
        assert!((state.e2e_rate("a").unwrap() - 70.0).abs() < 1e-12);
    }

    fn fixture() -> Deployment {
        Deployment {
            plan: FloorPlan::open(20.0, 10.0, 1.0).unwrap(),
            params: ChannelParams::default(),
            table: McsTable::default_80mhz(),
            master: RadioNode::master("ap", Point::new(1.0, 5.0), 20.0, 36),
            extenders: vec![RadioNode::extender(
                "ext1",
                Point::new(10.0, 5.0),
                20.0,
                40,
                36,
            )],
            users: vec![
                UserSpec {
                    id: "sta1".into(),
                    location: Point::new(2.0, 5.0),
                    demand_mbps: 100.0,
                },
                UserSpec {
                    id: "sta2".into(),
                    location: Point::new(16.0, 5.0),
                    demand_mbps: 100.0,
                },
            ],
            neighbors: Vec::new(),
        }
    }

    #[test]
    fn association_follows_strongest_signal() {
        let d = fixture();
        let assoc = associate(&d);
        assert_eq!(
            assoc,
            vec![0, 1],
            "near user on master, far user on extender"
        );
    }

    #[test]
    fn perceive_matches_hand_computed_rates() {
        use crate::channel::link_phy_rate;
        let d = fixture();
        let snap = perceive(&d, 0);

        // Dual-radio isolated deployment: no contention anywhere, so each
        // measured link equals its gated PHY rate.
        let bh_phy = link_phy_rate(
            &d.master,
            d.extenders[0].location,
            &d.plan,
            &d.params,
            &d.table,
        );
        let ext_state = &snap.node("ext1").unwrap().state;
        assert!((ext_state.meas_backhaul_mbps - bh_phy).abs() < 1e-9);

        let fh_phy = link_phy_rate(
            &d.extenders[0],
            d.users[1].location,
            &d.plan,
            &d.params,
            &d.table,
        );
        assert!((ext_state.fronthaul[0].meas_mbps - fh_phy).abs() < 1e-9);

        let far = &snap.users[1];
        assert!((far.e2e_rate_mbps - bh_phy.min(fh_phy)).abs() < 1e-9);
        assert!((far.fitness - (far.e2e_rate_mbps / 100.0).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn perceive_is_idempotent() {
        let d = fixture();
        assert_eq!(perceive(&d, 3), perceive(&d, 3));
    }

    #[test]
    fn unsatisfied_lists_only_strict_shortfalls() {
        let d = fixture();
        let mut snap = perceive(&d, 0);
        snap.users[0].fitness = 1.0;
        snap.users[1].fitness = 1.0;
        assert!(unsatisfied_users(&snap).is_empty());
        snap.users[1].fitness = 0.5;
        assert_eq!(unsatisfied_users(&snap), vec!["sta2".to_string()]);
    }
}
