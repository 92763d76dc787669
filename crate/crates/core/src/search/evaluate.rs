use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::neat::{argmax, Genome, GenomeId, Network};
use crate::objectives::{statement_fitness, ControlDependenceGraph, ObjectiveResult};
use crate::vm::{Action, ActionKind, BehaviorVector, EpisodeConfig, EpisodeResult, GameInstance, GameState, Policy, StmtId};

use super::config::Mode;

/// Drives a game with a network: features in, argmax action out.
pub struct NetworkPolicy<'a> {
    net: Network,
    alphabet: &'a [ActionKind],
    hold: u32,
}

impl<'a> NetworkPolicy<'a> {
    pub fn new(genome: &Genome, alphabet: &'a [ActionKind], hold: u32) -> Self {
        NetworkPolicy { net: Network::new(genome), alphabet, hold }
    }
}

impl Policy for NetworkPolicy<'_> {
    fn decide(&mut self, features: &BehaviorVector, _: &GameState) -> Action {
        let out = self.net.activate(&features.0);
        self.alphabet[argmax(&out)].realise(self.hold)
    }
}

pub fn play(genome: &Genome, inst: &GameInstance, seed: u64, cfg: EpisodeConfig) -> EpisodeResult {
    let mut policy = NetworkPolicy::new(genome, inst.action_alphabet(), cfg.decision_interval);
    inst.run_episode(&mut policy, seed, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub genome_id: GenomeId,
    /// `1 / (1 + f)`: 1 exactly when the target ran.
    pub fitness: f64,
    pub objective: ObjectiveResult,
    pub novelty: f64,
    pub behavior: BehaviorVector,
    pub covered: BTreeSet<StmtId>,
    pub fired_scripts: Vec<usize>,
    pub seed: u64,
    pub ticks: u64,
}

impl EvaluationRecord {
    pub fn covers(&self, target: StmtId) -> bool {
        self.covered.contains(&target)
    }
}

/// Plays `genome` once and scores it against `target`. Novelty is filled in
/// later, once the whole generation is known.
pub fn evaluate(
    genome: &Genome,
    inst: &GameInstance,
    cdg: &ControlDependenceGraph,
    target: StmtId,
    seed: u64,
    cfg: EpisodeConfig,
) -> EvaluationRecord {
    let result = play(genome, inst, seed, cfg);
    let objective = statement_fitness(&result, inst, target, cdg);
    EvaluationRecord {
        genome_id: genome.id,
        fitness: objective.maximised(),
        objective,
        novelty: 0.0,
        behavior: inst.extract_features(&result.final_state),
        covered: result.covered_ids(inst).into_iter().collect(),
        fired_scripts: (0..inst.script_count()).filter(|&s| result.script_fired(s)).collect(),
        seed,
        ticks: result.ticks,
    }
}

/// Records whose F differ by at most this much count as equally good.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Indices of `records`, best first. F descending; in novelty mode runs of
/// F within the tolerance of the run's first member are reordered by
/// novelty descending; genome id ascending settles the rest.
pub fn rank_candidates(records: &[EvaluationRecord], mode: Mode) -> Vec<usize> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&records[a], &records[b]);
        y.fitness.total_cmp(&x.fitness).then(x.genome_id.cmp(&y.genome_id))
    });
    if mode == Mode::Fitness {
        return order;
    }
    let mut out = Vec::with_capacity(order.len());
    let mut start = 0;
    while start < order.len() {
        let head = records[order[start]].fitness;
        let mut end = start + 1;
        while end < order.len() && head - records[order[end]].fitness <= TIE_TOLERANCE {
            end += 1;
        }
        let mut group = order[start..end].to_vec();
        group.sort_by(|&a, &b| {
            let (x, y) = (&records[a], &records[b]);
            y.novelty.total_cmp(&x.novelty).then(x.genome_id.cmp(&y.genome_id))
        });
        out.extend(group);
        start = end;
    }
    out
}
