//! Deterministic tick-based interpreter for miniature sprite games.

mod action;
mod episode;
mod features;
pub mod geometry;
mod instance;
pub mod spec;
mod state;

pub use action::{Action, ActionKind};
pub use episode::{EpisodeConfig, EpisodeResult, Policy, DEFAULT_DECISION_INTERVAL, DEFAULT_MAX_TICKS};
pub use features::{
    squash, BehaviorVector, FeatureDescriptor, FeatureSchema, FeatureSource, Normalization, ProbeTarget,
};
pub use instance::{is_valid_key, GameInstance, SpecError};
pub use spec::{CmpOp, Costume, Expr, ExprNode, GameSpec, Predicate, Script, SpriteSpec, StageSpec, Statement, StmtId, StmtKind, Trigger, Value};
pub use state::{compare_distance, GameState, LocationTrace, SpriteState, Terminal, K};
