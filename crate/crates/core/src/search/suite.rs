use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::neat::Genome;
use crate::vm::{EpisodeConfig, GameInstance, StmtId};

use super::evaluate::play;
use super::SearchError;

/// Statements covered in every replay of `genome` on `seeds`, plus the
/// ticks simulated.
pub fn robust_coverage(genome: &Genome, inst: &GameInstance, seeds: &[u64], cfg: EpisodeConfig) -> (BTreeSet<StmtId>, u64) {
    let runs: Vec<(Vec<StmtId>, u64)> = seeds
        .par_iter()
        .map(|&s| {
            let r = play(genome, inst, s, cfg);
            (r.covered_ids(inst), r.ticks)
        })
        .collect();
    let ticks = runs.iter().map(|r| r.1).sum();
    let mut iter = runs.into_iter();
    let Some((first, _)) = iter.next() else {
        return (BTreeSet::new(), ticks);
    };
    let mut common: BTreeSet<StmtId> = first.into_iter().collect();
    for (cov, _) in iter {
        let cov: BTreeSet<StmtId> = cov.into_iter().collect();
        common.retain(|id| cov.contains(id));
    }
    (common, ticks)
}

/// True iff `target` is covered on every one of `seeds`.
pub fn robustness_check(genome: &Genome, target: StmtId, inst: &GameInstance, seeds: &[u64], cfg: EpisodeConfig) -> bool {
    seeds.par_iter().all(|&s| play(genome, inst, s, cfg).covered(inst, target))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    /// Generation (run-wide count) in which the genome was found.
    pub generation: u64,
    /// Seeds of the robustness replays it passed.
    pub seeds: Vec<u64>,
    pub genome: Genome,
}

/// Covered statements mapped to the networks that reach them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicTestSuite {
    pub game: String,
    pub digest: String,
    pub total_statements: usize,
    pub episode: EpisodeConfig,
    pub config: serde_json::Value,
    pub tests: BTreeMap<StmtId, SuiteEntry>,
}

impl DynamicTestSuite {
    pub fn new(inst: &GameInstance, episode: EpisodeConfig, config: serde_json::Value) -> Self {
        DynamicTestSuite {
            game: inst.spec().name.clone(),
            digest: inst.digest().to_string(),
            total_statements: inst.statement_count(),
            episode,
            config,
            tests: BTreeMap::new(),
        }
    }

    pub fn covered(&self) -> usize {
        self.tests.len()
    }

    pub fn coverage(&self) -> f64 {
        if self.total_statements == 0 {
            0.0
        } else {
            self.tests.len() as f64 / self.total_statements as f64
        }
    }

    /// Distinct genomes in ascending target order.
    pub fn genomes(&self) -> Vec<&Genome> {
        let mut seen = BTreeSet::new();
        self.tests.values().map(|e| &e.genome).filter(|g| seen.insert(g.id)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetReplay {
    pub target: StmtId,
    pub passed: u32,
    pub reps: u32,
}

impl TargetReplay {
    pub fn pass(&self) -> bool {
        self.passed == self.reps
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub targets: Vec<TargetReplay>,
}

impl ReplayReport {
    pub fn all_passed(&self) -> bool {
        self.targets.iter().all(TargetReplay::pass)
    }

    pub fn failures(&self) -> Vec<StmtId> {
        self.targets.iter().filter(|t| !t.pass()).map(|t| t.target).collect()
    }
}

/// Re-runs every entry on its stored seeds (the first `reps` of them, or
/// all when `reps` is `None`).
pub fn replay_suite(suite: &DynamicTestSuite, inst: &GameInstance, reps: Option<u32>) -> Result<ReplayReport, SearchError> {
    if suite.digest != inst.digest() {
        return Err(SearchError::Digest { suite: suite.digest.clone(), game: inst.digest().to_string() });
    }
    let mut targets = Vec::new();
    for (&target, entry) in &suite.tests {
        let n = reps.map_or(entry.seeds.len(), |r| (r as usize).min(entry.seeds.len()));
        let seeds = &entry.seeds[..n];
        let passed = if inst.contains_statement(target) && entry.genome.check(inst.schema().dimension(), inst.action_alphabet().len()).is_ok() {
            seeds.par_iter().filter(|&&s| play(&entry.genome, inst, s, suite.episode).covered(inst, target)).count() as u32
        } else {
            0
        };
        targets.push(TargetReplay { target, passed, reps: n as u32 });
    }
    Ok(ReplayReport { targets })
}
