//! SNR-indexed rate table and the nearest-rate selection rule.
//!
//! The table maps a minimum SNR to an achievable PHY rate. Selection picks,
//! among rows whose threshold the SNR clears, the rate closest to the Shannon
//! capacity of the channel; this stands in for closed-loop rate adaptation.

use crate::error::{CoreError, Result};

/// SNR values are clamped here before capacity evaluation; anything above
/// the top row saturates at the highest rate.
pub const SNR_CAP_DB: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsEntry {
    pub min_snr_db: f64,
    pub rate_mbps: f64,
}

/// Ordered rate table, strictly increasing in both threshold and rate.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
    pub bandwidth_mhz: f64,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>, bandwidth_mhz: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(CoreError::InvalidMcsTable("table has no rows".into()));
        }
        if !(bandwidth_mhz > 0.0) {
            return Err(CoreError::InvalidMcsTable(format!(
                "bandwidth must be positive, got {bandwidth_mhz}"
            )));
        }
        for pair in entries.windows(2) {
            if pair[1].min_snr_db <= pair[0].min_snr_db || pair[1].rate_mbps <= pair[0].rate_mbps {
                return Err(CoreError::InvalidMcsTable(
                    "rows must be strictly increasing in min SNR and rate".into(),
                ));
            }
        }
        Ok(McsTable {
            entries,
            bandwidth_mhz,
        })
    }

    /// Built-in 16-row 80 MHz table, parsed from the bundled data file.
    pub fn default_80mhz() -> Self {
        let raw = include_str!("../data/mcs_80mhz.csv");
        let mut entries = Vec::new();
        for line in raw.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (snr, rate) = line.split_once(',').expect("bundled table row");
            entries.push(McsEntry {
                min_snr_db: snr.trim().parse().expect("bundled table snr"),
                rate_mbps: rate.trim().parse().expect("bundled table rate"),
            });
        }
        McsTable::new(entries, 80.0).expect("bundled table is valid")
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn max_rate(&self) -> f64 {
        self.entries.last().map(|e| e.rate_mbps).unwrap_or(0.0)
    }

    /// Rate for a fixed row index, gated on its own SNR threshold.
    pub fn fixed_rate(&self, index: usize, snr_db: f64) -> f64 {
        match self.entries.get(index) {
            Some(e) if snr_db >= e.min_snr_db => e.rate_mbps,
            _ => 0.0,
        }
    }
}

/// Nearest-to-capacity rate selection.
///
/// Capacity C = B * log2(1 + 10^(snr/10)) in Mbps; the returned rate is the
/// eligible row (min SNR cleared) minimizing |rate - C|, or 0 when the SNR is
/// below the lowest row.
pub fn estimate_phy_rate(snr_db: f64, table: &McsTable) -> f64 {
    let snr_db = snr_db.min(SNR_CAP_DB);
    let entries = table.entries();
    if snr_db < entries[0].min_snr_db {
        return 0.0;
    }
    let capacity = table.bandwidth_mhz * (1.0 + 10f64.powf(snr_db / 10.0)).log2();
    let mut best = entries[0].rate_mbps;
    let mut best_gap = (entries[0].rate_mbps - capacity).abs();
    for e in &entries[1..] {
        if snr_db < e.min_snr_db {
            break;
        }
        let gap = (e.rate_mbps - capacity).abs();
        if gap < best_gap {
            best = e.rate_mbps;
            best_gap = gap;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_table_shape() {
        let t = McsTable::default_80mhz();
        assert_eq!(t.entries().len(), 16);
        assert!((t.bandwidth_mhz - 80.0).abs() < 1e-12);
        assert!((t.max_rate() - 866.7).abs() < 1e-12);
    }

    #[test]
    fn below_lowest_row_gives_zero() {
        let t = McsTable::default_80mhz();
        assert_eq!(estimate_phy_rate(-3.0, &t), 0.0);
    }

    #[test]
    fn saturates_at_highest_rate() {
        let t = McsTable::default_80mhz();
        assert_eq!(estimate_phy_rate(f64::INFINITY, &t), t.max_rate());
        assert_eq!(estimate_phy_rate(SNR_CAP_DB, &t), t.max_rate());
    }

    // Independent selection scan: recompute capacity and find the closest
    // eligible row without going through estimate_phy_rate's loop shape.
    fn oracle_select(snr_db: f64, table: &McsTable) -> f64 {
        let snr_db = snr_db.min(SNR_CAP_DB);
        let c = table.bandwidth_mhz * (1.0 + 10f64.powf(snr_db / 10.0)).log2();
        table
            .entries()
            .iter()
            .filter(|e| e.min_snr_db <= snr_db)
            .min_by(|a, b| {
                (a.rate_mbps - c)
                    .abs()
                    .partial_cmp(&(b.rate_mbps - c).abs())
                    .unwrap()
            })
            .map(|e| e.rate_mbps)
            .unwrap_or(0.0)
    }

    #[test]
    fn nearest_rate_matches_oracle_at_15db() {
        let t = McsTable::default_80mhz();
        // C = 80 * log2(1 + 10^1.5) ~ 402.2 Mbps; eligible rows top out at
        // 144.1, which is the nearest eligible rate.
        let got = estimate_phy_rate(15.0, &t);
        assert_eq!(got, oracle_select(15.0, &t));
        assert!((got - 144.1).abs() < 1e-12);
    }

    #[test]
    fn nearest_rate_matches_oracle_over_sweep() {
        let t = McsTable::default_80mhz();
        let mut snr = -5.0;
        while snr <= 70.0 {
            assert_eq!(
                estimate_phy_rate(snr, &t),
                oracle_select(snr, &t),
                "snr {snr}"
            );
            snr += 0.25;
        }
    }

    #[test]
    fn fixed_index_mode_gates_on_threshold() {
        let t = McsTable::default_80mhz();
        assert_eq!(t.fixed_rate(5, 25.0), 288.2);
        assert_eq!(t.fixed_rate(5, 15.0), 0.0);
        assert_eq!(t.fixed_rate(99, 50.0), 0.0);
    }

    #[test]
    fn non_monotone_table_rejected() {
        let rows = vec![
            McsEntry {
                min_snr_db: 0.0,
                rate_mbps: 50.0,
            },
            McsEntry {
                min_snr_db: 5.0,
                rate_mbps: 40.0,
            },
        ];
        assert!(McsTable::new(rows, 80.0).is_err());
    }
}
