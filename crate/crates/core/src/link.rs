//! MAC surrogate: contention-aware measured link throughput and the
//! min-RSSI coverage objective used by the coverage baseline.
//!
//! Measured rate = PHY rate x airtime share x (1 - hidden-node penalty).
//! The airtime share splits the medium evenly among co-channel transmitters
//! audible at the sender; transmitters audible only at the receiver collide
//! blind and are charged `hidden_node_penalty` each, capped at 0.9 so a link
//! is degraded but never silenced by hidden nodes alone.

use crate::channel::{link_phy_rate, snr_at};
use crate::geom::Point;
use crate::mcs::McsTable;
use crate::plan::FloorPlan;
use crate::radio::{ChannelParams, Interferer, RadioNode};

pub const MAX_HIDDEN_PENALTY: f64 = 0.9;

/// Transmitters that can occupy the channel while the given link runs:
/// managed infrastructure is always on; unmanaged neighbors only when
/// saturated. The sender itself is excluded, the receiver is not (a relay
/// retransmitting on the link's channel steals airtime from its own
/// reception).
fn active_contenders<'a>(
    tx: &RadioNode,
    channel: u16,
    managed: &'a [RadioNode],
    neighbors: &'a [Interferer],
) -> Vec<&'a RadioNode> {
    let mut out = Vec::new();
    for n in managed {
        if n.id != tx.id && n.transmit_channel() == Some(channel) {
            out.push(n);
        }
    }
    for i in neighbors {
        if i.saturated && i.node.id != tx.id && i.node.transmit_channel() == Some(channel) {
            out.push(&i.node);
        }
    }
    out
}

/// Contention-aware throughput of the link tx -> rx_loc on `channel`.
#[allow(clippy::too_many_arguments)]
pub fn measured_link_throughput(
    tx: &RadioNode,
    rx_loc: Point,
    channel: u16,
    managed: &[RadioNode],
    neighbors: &[Interferer],
    plan: &FloorPlan,
    params: &ChannelParams,
    table: &McsTable,
) -> f64 {
    let phy = link_phy_rate(tx, rx_loc, plan, params, table);
    if phy == 0.0 {
        return 0.0;
    }

    let mut audible_at_tx = 0usize;
    let mut hidden = 0usize;
    for other in active_contenders(tx, channel, managed, neighbors) {
        let at_tx = snr_at(other, tx.location, plan, params).rssi_dbm;
        if at_tx >= params.cca_threshold_dbm {
            audible_at_tx += 1;
        } else {
            let at_rx = snr_at(other, rx_loc, plan, params).rssi_dbm;
            if at_rx >= params.rx_sensitivity_dbm {
                hidden += 1;
            }
        }
    }

    let share = 1.0 / (1.0 + audible_at_tx as f64);
    let p_hidden = (params.hidden_node_penalty * hidden as f64).clamp(0.0, MAX_HIDDEN_PENALTY);
    phy * share * (1.0 - p_hidden)
}

/// Worst-side RSSI of a candidate relay location: the weaker of the
/// master-to-candidate signal and the weakest candidate-to-user signal.
/// The coverage baseline places the extender at the grid cell maximizing
/// this value. The hypothetical relay inherits the master's transmit power.
pub fn coverage_value(
    loc: Point,
    master: &RadioNode,
    user_locs: &[Point],
    plan: &FloorPlan,
    params: &ChannelParams,
) -> f64 {
    let downlink = snr_at(master, loc, plan, params).rssi_dbm;
    let mut worst = downlink;
    let relay = RadioNode::master("coverage-probe", loc, master.tx_power_dbm, master.channel);
    for u in user_locs {
        let r = snr_at(&relay, *u, plan, params).rssi_dbm;
        if r < worst {
            worst = r;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::link_phy_rate;

    fn params() -> ChannelParams {
        ChannelParams::default()
    }

    fn table() -> McsTable {
        McsTable::default_80mhz()
    }

    fn master_at(x: f64, y: f64) -> RadioNode {
        RadioNode::master("ap", Point::new(x, y), 20.0, 36)
    }

    #[test]
    fn isolated_link_runs_at_phy_rate() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let rx = Point::new(10.0, 5.0);
        let phy = link_phy_rate(&tx, rx, &plan, &params(), &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &[],
            &plan,
            &params(),
            &table(),
        );
        assert!(phy > 0.0);
        assert_eq!(got, phy);
    }

    #[test]
    fn one_audible_contender_halves_the_rate() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let rx = Point::new(10.0, 5.0);
        let contender = Interferer {
            node: RadioNode::master("nb", Point::new(2.0, 6.0), 20.0, 36),
            saturated: true,
        };
        let phy = link_phy_rate(&tx, rx, &plan, &params(), &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &[contender],
            &plan,
            &params(),
            &table(),
        );
        assert!((got - phy / 2.0).abs() < 1e-9);
    }

    #[test]
    fn one_hidden_node_applies_the_penalty() {
        // Neighbor 70 m from the sender (below the -62 dBm CCA threshold
        // there) but 60 m from the receiver (above -83 dBm sensitivity).
        let plan = FloorPlan::open(80.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let rx = Point::new(10.0, 5.0);
        let hidden = Interferer {
            node: RadioNode::master("nb", Point::new(70.0, 5.0), 20.0, 36),
            saturated: true,
        };
        let p = params();
        let at_tx = snr_at(&hidden.node, tx.location, &plan, &p).rssi_dbm;
        let at_rx = snr_at(&hidden.node, rx, &plan, &p).rssi_dbm;
        assert!(
            at_tx < p.cca_threshold_dbm,
            "setup: must be inaudible at tx, got {at_tx}"
        );
        assert!(
            at_rx >= p.rx_sensitivity_dbm,
            "setup: must be audible at rx, got {at_rx}"
        );

        let phy = link_phy_rate(&tx, rx, &plan, &p, &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &[hidden],
            &plan,
            &p,
            &table(),
        );
        assert!((got - 0.4 * phy).abs() < 1e-9);
    }

    #[test]
    fn hidden_penalty_is_capped() {
        let plan = FloorPlan::open(80.0, 30.0, 1.0).unwrap();
        let tx = master_at(0.0, 15.0);
        let rx = Point::new(10.0, 15.0);
        let mk = |i: usize, y: f64| Interferer {
            node: RadioNode::master(format!("nb{i}"), Point::new(70.0, y), 20.0, 36),
            saturated: true,
        };
        let neighbors = vec![mk(0, 5.0), mk(1, 15.0), mk(2, 25.0)];
        let p = params();
        let phy = link_phy_rate(&tx, rx, &plan, &p, &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &neighbors,
            &plan,
            &p,
            &table(),
        );
        // Three hidden nodes would be 1.8; the cap holds the floor at 10%.
        assert!((got - 0.1 * phy).abs() < 1e-9);
    }

    #[test]
    fn idle_neighbors_are_invisible() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let rx = Point::new(10.0, 5.0);
        let idle = Interferer {
            node: RadioNode::master("nb", Point::new(2.0, 6.0), 20.0, 36),
            saturated: false,
        };
        let phy = link_phy_rate(&tx, rx, &plan, &params(), &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &[idle],
            &plan,
            &params(),
            &table(),
        );
        assert_eq!(got, phy);
    }

    #[test]
    fn off_channel_transmitters_do_not_contend() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let rx = Point::new(10.0, 5.0);
        let other = Interferer {
            node: RadioNode::master("nb", Point::new(2.0, 6.0), 20.0, 44),
            saturated: true,
        };
        let phy = link_phy_rate(&tx, rx, &plan, &params(), &table());
        let got = measured_link_throughput(
            &tx,
            rx,
            36,
            std::slice::from_ref(&tx),
            &[other],
            &plan,
            &params(),
            &table(),
        );
        assert_eq!(got, phy);
    }

    #[test]
    fn single_radio_relay_halves_its_own_backhaul() {
        // Extender fronthaul on the master's channel: its own retransmissions
        // contend with the master-to-extender link.
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let tx = master_at(0.0, 5.0);
        let ext = RadioNode::extender("ext", Point::new(10.0, 5.0), 20.0, 36, 36);
        let managed = vec![tx.clone(), ext.clone()];
        let phy = link_phy_rate(&tx, ext.location, &plan, &params(), &table());
        let got = measured_link_throughput(
            &tx,
            ext.location,
            36,
            &managed,
            &[],
            &plan,
            &params(),
            &table(),
        );
        assert!((got - phy / 2.0).abs() < 1e-9);
    }

    #[test]
    fn coverage_value_midpoint_beats_endpoints() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let master = master_at(0.0, 5.0);
        let user = [Point::new(16.0, 5.0)];
        let p = params();
        let mid = coverage_value(Point::new(8.0, 5.0), &master, &user, &plan, &p);
        let near_ap = coverage_value(Point::new(1.0, 5.0), &master, &user, &plan, &p);
        let near_user = coverage_value(Point::new(15.0, 5.0), &master, &user, &plan, &p);
        assert!(mid > near_ap);
        assert!(mid > near_user);
    }

    #[test]
    fn coverage_value_with_colocated_user() {
        // User on the candidate cell: the user-side loss collapses to the
        // clamp floor, so the master-side RSSI dominates the minimum.
        let plan = FloorPlan::open(20.0, 10.0, 1.0).unwrap();
        let master = master_at(0.0, 5.0);
        let loc = Point::new(12.0, 5.0);
        let p = params();
        let v = coverage_value(loc, &master, &[loc], &plan, &p);
        assert!((v - snr_at(&master, loc, &plan, &p).rssi_dbm).abs() < 1e-9);
    }
}
