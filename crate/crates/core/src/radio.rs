//! Radio nodes and channel-level parameters.

use crate::error::{CoreError, Result};
use crate::geom::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Wired-backhaul master access point.
    MasterAp,
    /// Relay with a wireless backhaul toward the master and a fronthaul
    /// toward users; the object being placed.
    Extender,
    Station,
}

/// A placed transmitter or receiver.
///
/// `channel` is the node's serving (fronthaul) channel; extenders additionally
/// carry `backhaul_channel`, the channel of the link toward their master,
/// which may equal `channel` for single-radio worst-case setups.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioNode {
    pub id: String,
    pub role: Role,
    pub location: Point,
    pub tx_power_dbm: f64,
    pub channel: u16,
    pub backhaul_channel: Option<u16>,
    pub managed: bool,
}

impl RadioNode {
    pub fn master(id: impl Into<String>, location: Point, tx_power_dbm: f64, channel: u16) -> Self {
        RadioNode {
            id: id.into(),
            role: Role::MasterAp,
            location,
            tx_power_dbm,
            channel,
            backhaul_channel: None,
            managed: true,
        }
    }

    pub fn extender(
        id: impl Into<String>,
        location: Point,
        tx_power_dbm: f64,
        fronthaul_channel: u16,
        backhaul_channel: u16,
    ) -> Self {
        RadioNode {
            id: id.into(),
            role: Role::Extender,
            location,
            tx_power_dbm,
            channel: fronthaul_channel,
            backhaul_channel: Some(backhaul_channel),
            managed: true,
        }
    }

    /// Channel this node transmits on when acting as a sender.
    ///
    /// Masters serve on their channel; extenders transmit on their fronthaul
    /// channel (the backhaul radio is reception-dominated under downlink
    /// traffic); stations are not modelled as transmitters.
    pub fn transmit_channel(&self) -> Option<u16> {
        match self.role {
            Role::MasterAp | Role::Extender => Some(self.channel),
            Role::Station => None,
        }
    }
}

/// An unmanaged neighbor transmitter. Saturated neighbors are always-on for
/// contention and hidden-node accounting; idle ones are invisible.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferer {
    pub node: RadioNode,
    pub saturated: bool,
}

/// Channel-level constants of the simulated environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub frequency_mhz: f64,
    pub noise_floor_dbm: f64,
    pub rx_sensitivity_dbm: f64,
    pub cca_threshold_dbm: f64,
    /// Path-loss exponent of the true environment; 2 is pure free space.
    pub pathloss_exponent: f64,
    /// Collision penalty applied per hidden co-channel transmitter.
    pub hidden_node_penalty: f64,
    /// When set, rate selection uses this fixed table row instead of the
    /// nearest-rate rule.
    pub fixed_mcs_index: Option<usize>,
}

impl ChannelParams {
    pub fn new(
        frequency_mhz: f64,
        noise_floor_dbm: f64,
        rx_sensitivity_dbm: f64,
        cca_threshold_dbm: f64,
        pathloss_exponent: f64,
    ) -> Result<Self> {
        if rx_sensitivity_dbm > cca_threshold_dbm {
            return Err(CoreError::InvalidParameter(format!(
                "rx sensitivity ({rx_sensitivity_dbm} dBm) must not exceed CCA threshold ({cca_threshold_dbm} dBm)"
            )));
        }
        if !(frequency_mhz > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "frequency must be positive, got {frequency_mhz}"
            )));
        }
        Ok(ChannelParams {
            frequency_mhz,
            noise_floor_dbm,
            rx_sensitivity_dbm,
            cca_threshold_dbm,
            pathloss_exponent,
            hidden_node_penalty: 0.6,
            fixed_mcs_index: None,
        })
    }

    pub fn with_hidden_node_penalty(mut self, h: f64) -> Self {
        self.hidden_node_penalty = h;
        self
    }
}

impl Default for ChannelParams {
    /// 5 GHz indoor defaults.
    fn default() -> Self {
        ChannelParams::new(5000.0, -90.0, -83.0, -62.0, 2.0).unwrap()
    }
}
