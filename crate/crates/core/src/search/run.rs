use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::neat::{evolve_generation, init_population, Genome, GenomeId, InnovationLedger};
use crate::novelty::{generation_novelty, BehaviorArchive};
use crate::objectives::ControlDependenceGraph;
use crate::vm::{BehaviorVector, GameInstance, StmtId};

use super::config::SearchConfig;
use super::evaluate::{evaluate, rank_candidates, EvaluationRecord};
use super::seeds::{derive_seed, episode_seed, robustness_seeds, ARCHIVE_STREAM, NEAT_STREAM};
use super::suite::{robust_coverage, DynamicTestSuite, SuiteEntry};
use super::timeline::{ticks_to_ms, CoverageTimeline, TimelinePoint};
use super::SearchError;

/// One evaluated generation, kept when `record_generations` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: u64,
    pub target: StmtId,
    pub genome_ids: Vec<GenomeId>,
    /// The evaluated genomes, in population order.
    pub genomes: Vec<Genome>,
    pub fitness: Vec<f64>,
    pub novelty: Vec<f64>,
    pub behaviors: Vec<BehaviorVector>,
    /// Genome ids best first.
    pub rank: Vec<GenomeId>,
}

/// Progress snapshot handed to the observer after every generation.
#[derive(Clone, Debug, PartialEq)]
pub struct Progress {
    pub generation: u64,
    pub target: StmtId,
    pub target_generation: u32,
    pub best_fitness: f64,
    pub covered: usize,
    pub total: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub suite: DynamicTestSuite,
    pub timeline: CoverageTimeline,
    pub archive: BehaviorArchive,
    pub generations: Vec<GenerationLog>,
    /// Targets in the order they were worked on.
    pub targets: Vec<StmtId>,
}

pub fn neatest_search(inst: &GameInstance, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    neatest_search_with(inst, cfg, &mut |_| {})
}

pub fn neatest_search_with(
    inst: &GameInstance,
    cfg: &SearchConfig,
    observer: &mut (dyn FnMut(&Progress) + Send),
) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| SearchError::Config(format!("thread pool: {e}")))?;
    pool.install(|| Search::new(inst, cfg).run(observer))
}

struct Search<'a> {
    inst: &'a GameInstance,
    cfg: &'a SearchConfig,
    cdg: ControlDependenceGraph,
    rng: ChaCha8Rng,
    ledger: InnovationLedger,
    archive: BehaviorArchive,
    suite: DynamicTestSuite,
    timeline: CoverageTimeline,
    logs: Vec<GenerationLog>,
    robust: BTreeSet<StmtId>,
    fired: BTreeSet<usize>,
    generation: u64,
    ticks: u64,
    started: Instant,
}

impl<'a> Search<'a> {
    fn new(inst: &'a GameInstance, cfg: &'a SearchConfig) -> Self {
        Search {
            inst,
            cfg,
            cdg: ControlDependenceGraph::build(inst.spec()),
            rng: ChaCha8Rng::seed_from_u64(derive_seed(&[cfg.seed, NEAT_STREAM])),
            ledger: InnovationLedger::new(inst.schema().dimension(), inst.action_alphabet().len()),
            archive: BehaviorArchive::new(cfg.novelty.archive_probability, derive_seed(&[cfg.seed, ARCHIVE_STREAM])),
            suite: DynamicTestSuite::new(inst, cfg.episode(), cfg.echo()),
            timeline: CoverageTimeline::default(),
            logs: Vec::new(),
            robust: BTreeSet::new(),
            fired: BTreeSet::new(),
            generation: 0,
            ticks: 0,
            started: Instant::now(),
        }
    }

    fn budget_left(&self) -> bool {
        let gens = self.cfg.budget_generations.is_none_or(|b| self.generation < b);
        let time = self.cfg.budget_ms.is_none_or(|b| self.started.elapsed().as_millis() < b as u128);
        gens && time
    }

    fn total(&self) -> usize {
        self.inst.statement_count()
    }

    /// Lowest frontier statement not deferred in the current round.
    fn next_target(&self, deferred: &mut BTreeSet<StmtId>) -> Option<StmtId> {
        let mut frontier = self.cdg.next_targets(&self.robust, &self.fired);
        if frontier.is_empty() {
            frontier = self.inst.statement_ids().into_iter().filter(|id| !self.robust.contains(id)).collect();
        }
        if frontier.is_empty() {
            return None;
        }
        if frontier.iter().all(|t| deferred.contains(t)) {
            deferred.clear();
        }
        frontier.into_iter().find(|t| !deferred.contains(t))
    }

    fn run(mut self, observer: &mut (dyn FnMut(&Progress) + Send)) -> Result<SearchOutcome, SearchError> {
        let mut deferred = BTreeSet::new();
        let mut targets = Vec::new();
        while self.budget_left() {
            let Some(target) = self.next_target(&mut deferred) else { break };
            targets.push(target);
            if !self.optimise(target, observer)? {
                deferred.insert(target);
            }
        }
        Ok(SearchOutcome {
            suite: self.suite,
            timeline: self.timeline,
            archive: self.archive,
            generations: self.logs,
            targets,
        })
    }

    /// Evolves a population for `target` until it is robustly covered, its
    /// quota runs out or the budget ends. Returns whether it got covered.
    fn optimise(&mut self, target: StmtId, observer: &mut (dyn FnMut(&Progress) + Send)) -> Result<bool, SearchError> {
        let dim = self.inst.schema().dimension();
        let outputs = self.inst.action_alphabet().len();
        let seeds: Vec<Genome> = self.suite.genomes().into_iter().cloned().collect();
        let seeds = (!seeds.is_empty()).then_some(seeds);
        let mut pop = init_population(&self.cfg.neat, dim, outputs, &mut self.ledger, &mut self.rng, seeds.as_deref())?;

        for local in 0..self.cfg.target_generations {
            if !self.budget_left() {
                return Ok(false);
            }
            let episode = self.cfg.episode();
            let (inst, cdg, master, generation) = (self.inst, &self.cdg, self.cfg.seed, self.generation);
            let mut records: Vec<EvaluationRecord> = pop
                .genomes
                .par_iter()
                .map(|g| evaluate(g, inst, cdg, target, episode_seed(master, generation, g.id), episode))
                .collect();

            let behaviors: Vec<BehaviorVector> = records.iter().map(|r| r.behavior.clone()).collect();
            let novelty = generation_novelty(&behaviors, &self.archive, self.cfg.novelty.k);
            for (r, n) in records.iter_mut().zip(novelty) {
                r.novelty = n;
                self.ticks += r.ticks;
                self.fired.extend(r.fired_scripts.iter().copied());
                self.archive.update(&r.behavior)?;
            }
            for (g, r) in pop.genomes.iter_mut().zip(&records) {
                g.fitness = r.fitness;
                g.novelty = r.novelty;
            }

            let order = rank_candidates(&records, self.cfg.mode);
            let rank: Vec<GenomeId> = order.iter().map(|&i| records[i].genome_id).collect();
            self.check_robustness(&pop.genomes, &records, &order, target);

            self.timeline.push(TimelinePoint {
                generation: self.generation,
                elapsed_ms: ticks_to_ms(self.ticks),
                covered: self.robust.len(),
                total: self.total(),
            });
            if self.cfg.record_generations {
                self.logs.push(GenerationLog {
                    generation: self.generation,
                    target,
                    genome_ids: records.iter().map(|r| r.genome_id).collect(),
                    genomes: pop.genomes.clone(),
                    fitness: records.iter().map(|r| r.fitness).collect(),
                    novelty: records.iter().map(|r| r.novelty).collect(),
                    behaviors,
                    rank: rank.clone(),
                });
            }
            observer(&Progress {
                generation: self.generation,
                target,
                target_generation: local,
                best_fitness: records[order[0]].fitness,
                covered: self.robust.len(),
                total: self.total(),
            });
            self.generation += 1;

            if self.robust.contains(&target) {
                return Ok(true);
            }
            if self.robust.len() == self.total() {
                return Ok(true);
            }
            if local + 1 < self.cfg.target_generations {
                pop = evolve_generation(&pop, &self.cfg.neat, &mut self.ledger, &rank, &mut self.rng)?;
            }
        }
        Ok(false)
    }

    /// Replays promising genomes: those covering the target first, then any
    /// that touched a statement not yet robustly covered, best ranked first.
    fn check_robustness(&mut self, genomes: &[Genome], records: &[EvaluationRecord], order: &[usize], target: StmtId) {
        let hits_target = order.iter().copied().filter(|&i| records[i].covers(target));
        let others = order.iter().copied().filter(|&i| !records[i].covers(target));
        let mut checks = 0;
        for i in hits_target.chain(others) {
            if checks == self.cfg.robustness_checks {
                break;
            }
            if records[i].covered.iter().all(|id| self.robust.contains(id)) {
                continue;
            }
            checks += 1;
            let genome = &genomes[i];
            let seeds = robustness_seeds(self.cfg.seed, genome.id, self.cfg.robustness_reps);
            let (common, ticks) = robust_coverage(genome, self.inst, &seeds, self.cfg.episode());
            self.ticks += ticks;
            for id in common {
                if self.robust.insert(id) {
                    self.suite.tests.insert(
                        id,
                        SuiteEntry { generation: self.generation, seeds: seeds.clone(), genome: genome.clone() },
                    );
                }
            }
        }
    }
}
