//! Propagation model: log-distance loss with per-wall attenuation, plus the
//! naive free-space estimate the reasoning engine starts from.
//!
//! The environment truth is `path_loss` (exponent + walls); the engine's
//! prior, computed without any layout knowledge, is `free_space_loss`.

use crate::geom::Point;
use crate::mcs::{estimate_phy_rate, McsTable};
use crate::plan::FloorPlan;
use crate::radio::{ChannelParams, RadioNode};

/// Distances below this are clamped to avoid the log singularity.
pub const MIN_DISTANCE_M: f64 = 0.1;

fn base_loss_db(distance_m: f64, frequency_mhz: f64) -> f64 {
    let d = distance_m.max(MIN_DISTANCE_M);
    20.0 * d.log10() + 20.0 * frequency_mhz.log10() - 27.55
}

/// Free-space loss between two points, ignoring walls and the environment's
/// path-loss exponent. This is what the engine can compute blind.
pub fn free_space_loss(params: &ChannelParams, a: Point, b: Point) -> f64 {
    base_loss_db(a.distance(b), params.frequency_mhz)
}

/// True propagation loss: free-space term, exponent excess and wall losses.
pub fn path_loss(plan: &FloorPlan, params: &ChannelParams, a: Point, b: Point) -> f64 {
    let d = a.distance(b).max(MIN_DISTANCE_M);
    let crossing = plan.wall_count(a, b);
    base_loss_db(d, params.frequency_mhz)
        + 10.0 * (params.pathloss_exponent - 2.0) * d.log10()
        + crossing.total_loss_db
}

/// Signal observed at a receive location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalReading {
    pub rssi_dbm: f64,
    pub snr_db: f64,
}

/// RSSI and SNR at `rx_loc` from transmitter `tx`, through the real
/// environment.
pub fn snr_at(
    tx: &RadioNode,
    rx_loc: Point,
    plan: &FloorPlan,
    params: &ChannelParams,
) -> SignalReading {
    let loss = path_loss(plan, params, tx.location, rx_loc);
    let rssi = tx.tx_power_dbm - loss;
    SignalReading {
        rssi_dbm: rssi,
        snr_db: rssi - params.noise_floor_dbm,
    }
}

fn select_rate(snr_db: f64, params: &ChannelParams, table: &McsTable) -> f64 {
    match params.fixed_mcs_index {
        Some(idx) => table.fixed_rate(idx, snr_db),
        None => estimate_phy_rate(snr_db, table),
    }
}

/// PHY rate of a real link, gated on receive sensitivity.
pub fn link_phy_rate(
    tx: &RadioNode,
    rx_loc: Point,
    plan: &FloorPlan,
    params: &ChannelParams,
    table: &McsTable,
) -> f64 {
    let sig = snr_at(tx, rx_loc, plan, params);
    if sig.rssi_dbm < params.rx_sensitivity_dbm {
        return 0.0;
    }
    select_rate(sig.snr_db, params, table)
}

/// Distance-based rate estimate between two points: free-space propagation,
/// sensitivity-gated. Used wherever the engine predicts throughput at
/// locations it has not measured.
pub fn estimated_link_rate(
    tx_loc: Point,
    tx_power_dbm: f64,
    rx_loc: Point,
    params: &ChannelParams,
    table: &McsTable,
) -> f64 {
    let rssi = tx_power_dbm - base_loss_db(tx_loc.distance(rx_loc), params.frequency_mhz);
    if rssi < params.rx_sensitivity_dbm {
        return 0.0;
    }
    select_rate(rssi - params.noise_floor_dbm, params, table)
}
