use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::neat::NeatParams;
use crate::novelty::NoveltyParams;
use crate::vm::{EpisodeConfig, DEFAULT_DECISION_INTERVAL, DEFAULT_MAX_TICKS};

use super::SearchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Objective only; ties broken by genome id.
    Fitness,
    /// Objective first, novelty as the tiebreaker.
    Novelty,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Fitness, Mode::Novelty];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fitness => "fitness",
            Mode::Novelty => "novelty",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fitness" => Ok(Mode::Fitness),
            "novelty" => Ok(Mode::Novelty),
            _ => Err(format!("unknown mode `{s}` (expected `fitness` or `novelty`)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub mode: Mode,
    pub seed: u64,
    /// Total generations across all targets.
    pub budget_generations: Option<u64>,
    /// Wall-clock limit. Runs cut by it are not reproducible.
    pub budget_ms: Option<u64>,
    pub max_ticks: u32,
    pub decision_interval: u32,
    /// Replays a genome must pass before its statements count as covered.
    pub robustness_reps: u32,
    /// Generations spent on one target before it is deferred.
    pub target_generations: u32,
    /// Genomes replayed for robustness per generation.
    pub robustness_checks: usize,
    pub neat: NeatParams,
    pub novelty: NoveltyParams,
    /// Evaluation threads; results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Keep per-generation rankings in the outcome.
    #[serde(skip)]
    pub record_generations: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Novelty,
            seed: 0,
            budget_generations: Some(100),
            budget_ms: None,
            max_ticks: DEFAULT_MAX_TICKS,
            decision_interval: DEFAULT_DECISION_INTERVAL,
            robustness_reps: 10,
            target_generations: 25,
            robustness_checks: 5,
            neat: NeatParams::default(),
            novelty: NoveltyParams::default(),
            workers: None,
            record_generations: false,
        }
    }
}

impl SearchConfig {
    pub fn episode(&self) -> EpisodeConfig {
        EpisodeConfig { max_ticks: self.max_ticks, decision_interval: self.decision_interval }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        match (self.budget_generations, self.budget_ms) {
            (None, None) => return bad("a generation or time budget is required"),
            (Some(0), _) | (_, Some(0)) => return bad("budgets must be positive"),
            _ => {}
        }
        if self.robustness_reps == 0 {
            return bad("robustness_reps must be at least 1");
        }
        if self.max_ticks == 0 || self.decision_interval == 0 {
            return bad("max_ticks and decision_interval must be positive");
        }
        if self.target_generations == 0 {
            return bad("target_generations must be positive");
        }
        if self.robustness_checks == 0 {
            return bad("robustness_checks must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be positive");
        }
        self.neat.validate().map_err(|e| SearchError::Config(e.to_string()))?;
        self.novelty.validate().map_err(|e| SearchError::Config(e.to_string()))?;
        Ok(())
    }

    /// The configuration as recorded in output files.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
