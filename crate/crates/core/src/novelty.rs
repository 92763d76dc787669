//! Cosine behaviour distance, kNN novelty and the behaviour archive.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vm::BehaviorVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoveltyError {
    #[error("behaviour dimensions differ: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("invalid novelty parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoveltyParams {
    pub k: usize,
    /// Chance that an evaluated behaviour enters the archive.
    pub archive_probability: f64,
}

impl Default for NoveltyParams {
    fn default() -> Self {
        NoveltyParams { k: 15, archive_probability: 0.1 }
    }
}

impl NoveltyParams {
    pub fn validate(&self) -> Result<(), NoveltyError> {
        if self.k == 0 {
            return Err(NoveltyError::InvalidParams("k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.archive_probability) {
            return Err(NoveltyError::InvalidParams(format!(
                "archive_probability must be in [0, 1], got {}",
                self.archive_probability
            )));
        }
        Ok(())
    }
}

/// `1 - (cos + 1) / 2` on raw slices. A zero vector has cosine 0.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let cos = if na == 0.0 || nb == 0.0 { 0.0 } else { (dot / (na * nb).sqrt()).clamp(-1.0, 1.0) };
    1.0 - (cos + 1.0) / 2.0
}

pub fn behavior_distance(a: &BehaviorVector, b: &BehaviorVector) -> Result<f64, NoveltyError> {
    if a.dim() != b.dim() {
        return Err(NoveltyError::Dimension(a.dim(), b.dim()));
    }
    Ok(cosine_distance(&a.0, &b.0))
}

/// Mean of the `k` smallest distances from `b` to `neighbours` (all of them
/// if fewer than `k`); 1 when there are none. `b` itself must not be among
/// the neighbours.
pub fn novelty_score<'a>(b: &[f64], neighbours: impl IntoIterator<Item = &'a [f64]>, k: usize) -> f64 {
    let mut d: Vec<f64> = neighbours.into_iter().map(|n| cosine_distance(b, n)).collect();
    if d.is_empty() {
        return 1.0;
    }
    let k = k.clamp(1, d.len());
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, f64::total_cmp);
        d.truncate(k);
    }
    d.sort_by(f64::total_cmp);
    d.iter().sum::<f64>() / k as f64
}

/// Novelty of every behaviour in `generation` against the rest of the
/// generation and the archive. Each behaviour is excluded by position, so
/// identical twins still see each other.
pub fn generation_novelty(generation: &[BehaviorVector], archive: &BehaviorArchive, k: usize) -> Vec<f64> {
    use rayon::prelude::*;
    (0..generation.len())
        .into_par_iter()
        .map(|i| {
            let others = generation
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| b.as_slice())
                .chain(archive.entries().iter().map(|b| b.as_slice()));
            novelty_score(&generation[i].0, others, k)
        })
        .collect()
}

/// Append-only store of past behaviours with its own insertion stream.
#[derive(Clone, Debug)]
pub struct BehaviorArchive {
    entries: Vec<BehaviorVector>,
    probability: f64,
    rng: ChaCha8Rng,
}

impl BehaviorArchive {
    pub fn new(probability: f64, seed: u64) -> Self {
        BehaviorArchive { entries: Vec::new(), probability, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn entries(&self) -> &[BehaviorVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.first().map(|b| b.dim())
    }

    /// Draws once from the archive stream and appends `b` on success,
    /// regardless of how novel it is. Returns whether it was added.
    pub fn update(&mut self, b: &BehaviorVector) -> Result<bool, NoveltyError> {
        if let Some(d) = self.dim() {
            if d != b.dim() {
                return Err(NoveltyError::Dimension(d, b.dim()));
            }
        }
        let draw: f64 = self.rng.random();
        let add = draw < self.probability;
        if add {
            self.entries.push(b.clone());
        }
        Ok(add)
    }

    /// One behaviour per line, comma separated.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        for b in &self.entries {
            let row: Vec<String> = b.0.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Free-function form of [`BehaviorArchive::update`].
pub fn update_archive(archive: &mut BehaviorArchive, b: &BehaviorVector) -> Result<bool, NoveltyError> {
    archive.update(b)
}
