use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::games::milestones;
use crate::search::seeds::{derive_seed, REPETITION_STREAM};
use crate::search::{neatest_search_with, CoverageTimeline, Mode, Progress, SearchConfig};
use crate::vm::GameInstance;

use super::stats::{mann_whitney_u, vargha_delaney_a12};
use super::ExperimentError;

pub const ALPHA: f64 = 0.05;

/// One search run inside a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub repetition: usize,
    pub seed: u64,
    pub covered: usize,
    pub total: usize,
    pub coverage: f64,
    /// Milestone names whose statement ended up in the suite.
    pub events: Vec<String>,
    pub timeline: CoverageTimeline,
}

impl RunSummary {
    pub fn run_id(&self) -> String {
        format!("{}-{}", self.mode, self.repetition)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub game: String,
    pub modes: Vec<Mode>,
    pub repetitions: usize,
    pub seed: u64,
    pub config: serde_json::Value,
    /// Final coverage per repetition, keyed by mode.
    pub coverage_samples: BTreeMap<Mode, Vec<f64>>,
    /// A12 of novelty over fitness: above 0.5 favours novelty.
    pub a12: f64,
    /// U of the novelty sample.
    pub u: f64,
    pub p: f64,
    pub significant: bool,
    /// Per mode, how many repetitions reached each milestone.
    pub events: BTreeMap<Mode, BTreeMap<String, usize>>,
    pub runs: Vec<RunSummary>,
}

impl ComparisonReport {
    pub fn median(&self, mode: Mode) -> f64 {
        self.coverage_samples.get(&mode).map_or(0.0, |s| median(s))
    }

    pub fn event_count(&self, mode: Mode, event: &str) -> usize {
        self.events.get(&mode).and_then(|e| e.get(event)).copied().unwrap_or(0)
    }
}

pub fn median(xs: &[f64]) -> f64 {
    use statrs::statistics::{Data, OrderStatistics};
    if xs.is_empty() {
        return 0.0;
    }
    Data::new(xs.to_vec()).median()
}

pub fn repetition_seed(master: u64, mode: Mode, repetition: usize) -> u64 {
    let lane = Mode::ALL.iter().position(|&m| m == mode).expect("known mode") as u64;
    derive_seed(&[master, REPETITION_STREAM, lane, repetition as u64])
}

/// Runs `repetitions` searches per mode and compares final coverage.
pub fn run_comparison(
    inst: &GameInstance,
    base: &SearchConfig,
    repetitions: usize,
    master: u64,
) -> Result<ComparisonReport, ExperimentError> {
    run_comparison_with(inst, base, repetitions, master, &mut |_, _, _| {})
}

/// As [`run_comparison`], reporting each run's progress as `(mode, rep, progress)`.
pub fn run_comparison_with(
    inst: &GameInstance,
    base: &SearchConfig,
    repetitions: usize,
    master: u64,
    observer: &mut (dyn FnMut(Mode, usize, &Progress) + Send),
) -> Result<ComparisonReport, ExperimentError> {
    if repetitions < 2 {
        return Err(ExperimentError::TooFewRepetitions(repetitions));
    }
    let marks = milestones(inst.spec());
    let mut runs = Vec::new();
    for mode in Mode::ALL {
        for rep in 0..repetitions {
            let seed = repetition_seed(master, mode, rep);
            let cfg = SearchConfig { mode, seed, ..base.clone() };
            let out = neatest_search_with(inst, &cfg, &mut |p| observer(mode, rep, p))?;
            let events = marks
                .iter()
                .filter(|(_, id)| out.suite.tests.contains_key(id))
                .map(|(name, _)| name.clone())
                .collect();
            runs.push(RunSummary {
                mode,
                repetition: rep,
                seed,
                covered: out.suite.covered(),
                total: out.suite.total_statements,
                coverage: out.suite.coverage(),
                events,
                timeline: out.timeline,
            });
        }
    }

    let mut coverage_samples = BTreeMap::new();
    let mut events = BTreeMap::new();
    for mode in Mode::ALL {
        let mine: Vec<&RunSummary> = runs.iter().filter(|r| r.mode == mode).collect();
        coverage_samples.insert(mode, mine.iter().map(|r| r.coverage).collect::<Vec<f64>>());
        let counts: BTreeMap<String, usize> = marks
            .keys()
            .map(|name| (name.clone(), mine.iter().filter(|r| r.events.contains(name)).count()))
            .collect();
        events.insert(mode, counts);
    }
    let novelty = &coverage_samples[&Mode::Novelty];
    let fitness = &coverage_samples[&Mode::Fitness];
    let a12 = vargha_delaney_a12(novelty, fitness)?;
    let mw = mann_whitney_u(novelty, fitness)?;
    let mut config = base.echo();
    if let Some(obj) = config.as_object_mut() {
        // per-run mode and seed are derived; the echo records the master seed
        obj.remove("mode");
        obj.insert("seed".into(), master.into());
    }
    Ok(ComparisonReport {
        game: inst.spec().name.clone(),
        modes: Mode::ALL.to_vec(),
        repetitions,
        seed: master,
        config,
        coverage_samples,
        a12,
        u: mw.u_x,
        p: mw.p,
        significant: mw.p < ALPHA,
        events,
        runs,
    })
}
