use serde::{Deserialize, Serialize};

use super::action::Action;
use super::features::BehaviorVector;
use super::instance::GameInstance;
use super::spec::StmtId;
use super::state::{GameState, LocationTrace, Terminal};

pub const DEFAULT_MAX_TICKS: u32 = 300;
pub const DEFAULT_DECISION_INTERVAL: u32 = 10;

/// Decision function queried every decision interval.
pub trait Policy {
    fn decide(&mut self, features: &BehaviorVector, state: &GameState) -> Action;
}

impl<F> Policy for F
where
    F: FnMut(&BehaviorVector, &GameState) -> Action,
{
    fn decide(&mut self, features: &BehaviorVector, state: &GameState) -> Action {
        self(features, state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub max_ticks: u32,
    pub decision_interval: u32,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig { max_ticks: DEFAULT_MAX_TICKS, decision_interval: DEFAULT_DECISION_INTERVAL }
    }
}

/// Outcome of one episode. The final state carries the coverage set, the
/// fired-script flags and the per-location predicate trace.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub final_state: GameState,
    pub end: Terminal,
    pub ticks: u64,
}

impl EpisodeResult {
    pub fn covered(&self, inst: &GameInstance, id: StmtId) -> bool {
        self.final_state.is_covered(inst, id)
    }

    pub fn covered_ids(&self, inst: &GameInstance) -> Vec<StmtId> {
        self.final_state.covered_ids(inst)
    }

    pub fn trace(&self, inst: &GameInstance, id: StmtId) -> Option<&LocationTrace> {
        self.final_state.location_trace(inst, id)
    }

    pub fn script_fired(&self, script: usize) -> bool {
        self.final_state.fired_scripts().get(script).copied().unwrap_or(false)
    }
}

impl GameInstance {
    /// Plays one episode from the initial state. The result is a pure
    /// function of (policy, spec, seed, config).
    pub fn run_episode(&self, policy: &mut dyn Policy, seed: u64, cfg: EpisodeConfig) -> EpisodeResult {
        assert!(cfg.max_ticks >= 1, "max_ticks must be positive");
        let interval = cfg.decision_interval.max(1) as u64;
        let mut state = self.initial_state(seed);
        while state.is_running() && state.tick < cfg.max_ticks as u64 {
            let action = if state.tick % interval == 0 {
                let features = self.extract_features(&state);
                policy.decide(&features, &state)
            } else {
                Action::Noop
            };
            self.step_in_place(&mut state, &action);
        }
        if state.is_running() {
            state.terminal = Terminal::Timeout;
        }
        EpisodeResult { end: state.terminal, ticks: state.tick, final_state: state }
    }
}
