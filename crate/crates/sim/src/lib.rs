//! Scenario driver for the extender placement workbench: scenario files,
//! episode execution under several placement policies, campaign metrics and
//! CSV reporting.

pub mod campaign;
pub mod episode;
pub mod metrics;
pub mod scenario;

pub use campaign::{run_campaign, write_outputs, CampaignOutcome};
pub use episode::{run_episode, Algo, EpisodeLog, TerminalStatus};
pub use metrics::{convergence_stats, jain_index, outage, MetricsReport};
pub use scenario::{Scenario, ScenarioError};
