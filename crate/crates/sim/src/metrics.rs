//! Campaign metrics: average throughput, Jain fairness, service outage and
//! convergence statistics.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("rate list is empty")]
    EmptyRates,
}

/// Jain fairness index (sum x)^2 / (n * sum x^2), in [1/n, 1].
/// An all-zero list is defined as perfectly fair (1.0).
pub fn jain_index(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::EmptyRates);
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Fraction of (drop, user) samples delivering zero throughput.
pub fn outage(rate_lists: &[Vec<f64>]) -> f64 {
    let mut total = 0usize;
    let mut zeros = 0usize;
    for list in rate_lists {
        for &r in list {
            total += 1;
            if r == 0.0 {
                zeros += 1;
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        zeros as f64 / total as f64
    }
}

/// Repositions-to-converge distribution over drops.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStats {
    pub mean: f64,
    pub stddev: f64,
    /// Empirical CDF at integer support 0..=max.
    pub cdf: Vec<(usize, f64)>,
}

pub fn convergence_stats(repositions: &[usize]) -> Result<ConvergenceStats, MetricsError> {
    if repositions.is_empty() {
        return Err(MetricsError::EmptyRates);
    }
    let n = repositions.len() as f64;
    let mean = repositions.iter().sum::<usize>() as f64 / n;
    let var = repositions
        .iter()
        .map(|&r| {
            let d = r as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    let max = *repositions.iter().max().unwrap();
    let cdf = (0..=max)
        .map(|k| {
            let below = repositions.iter().filter(|&&r| r <= k).count();
            (k, below as f64 / n)
        })
        .collect();
    Ok(ConvergenceStats {
        mean,
        stddev: var.sqrt(),
        cdf,
    })
}

/// Summary row for one policy over a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub algo: String,
    pub avg_throughput_mbps: f64,
    pub jain_index: f64,
    pub outage_fraction: f64,
    pub mean_repositions: f64,
    /// Final per-user rates pooled across drops, drop-major.
    pub per_user_rates: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_rates_are_perfectly_fair() {
        assert!((jain_index(&[50.0, 50.0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_starved_user_halves_the_index() {
        assert!((jain_index(&[100.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn near_equal_rates_score_near_one() {
        // (88+92+90)^2 / (3 * (88^2+92^2+90^2)) = 72900 / 72924
        let expected = 72900.0 / 72924.0;
        assert!((jain_index(&[88.0, 92.0, 90.0]).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn jain_bounds_and_conventions() {
        assert!(jain_index(&[]).is_err());
        assert!((jain_index(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let single = jain_index(&[42.0]).unwrap();
        assert!((single - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outage_counts_zero_samples() {
        assert_eq!(outage(&[vec![10.0, 20.0]]), 0.0);
        assert_eq!(outage(&[vec![0.0, 0.0], vec![0.0, 0.0]]), 1.0);
        let lists: Vec<Vec<f64>> = (0..5)
            .map(|d| {
                if d == 0 {
                    vec![0.0, 5.0]
                } else {
                    vec![5.0, 5.0]
                }
            })
            .collect();
        assert!((outage(&lists) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn convergence_stats_match_hand_arithmetic() {
        let s = convergence_stats(&[3]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.stddev, 0.0);

        let s = convergence_stats(&[2, 4]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert!((s.stddev - 1.0).abs() < 1e-12);

        // CDF is monotone and reaches 1.
        let s = convergence_stats(&[0, 2, 2, 5]).unwrap();
        let values: Vec<f64> = s.cdf.iter().map(|&(_, v)| v).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*values.last().unwrap(), 1.0);
        assert_eq!(s.cdf[0], (0, 0.25));
        assert_eq!(s.cdf[2], (2, 0.75));
    }
}
