//! The search loop: target selection, evaluation, ranking, robustness
//! gating and suite assembly.

mod config;
mod evaluate;
pub mod seeds;
mod suite;
mod timeline;
mod run;

pub use config::{Mode, SearchConfig};
pub use evaluate::{evaluate, play, rank_candidates, EvaluationRecord, NetworkPolicy, TIE_TOLERANCE};
pub use run::{neatest_search, neatest_search_with, GenerationLog, Progress, SearchOutcome};
pub use suite::{
    replay_suite, robust_coverage, robustness_check, DynamicTestSuite, ReplayReport, SuiteEntry, TargetReplay,
};
pub use timeline::{ticks_to_ms, CoverageTimeline, TimelinePoint, TICKS_PER_SECOND, TIMELINE_HEADER};

use thiserror::Error;

use crate::neat::NeatError;
use crate::novelty::NoveltyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Neat(#[from] NeatError),
    #[error(transparent)]
    Novelty(#[from] NoveltyError),
    #[error("suite digest {suite} does not match game digest {game}")]
    Digest { suite: String, game: String },
}
