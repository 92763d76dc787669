use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::genome::{Genome, GenomeId};
use super::ledger::InnovationLedger;
use super::ops::{compatibility_distance, crossover, minimal_genome, mutate};
use super::params::NeatParams;
use super::NeatError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub id: u64,
    pub representative: Genome,
    pub members: Vec<GenomeId>,
    /// Best member fitness seen so far.
    pub best_fitness: f64,
    /// Generations since `best_fitness` last improved.
    pub staleness: u32,
}

/// A generation of genomes, partitioned into species.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub genomes: Vec<Genome>,
    pub species: Vec<Species>,
    pub generation: u32,
    next_species: u64,
}

impl Population {
    pub fn genome(&self, id: GenomeId) -> Option<&Genome> {
        self.genomes.iter().find(|g| g.id == id)
    }

    pub fn species_of(&self, id: GenomeId) -> Option<u64> {
        self.species.iter().find(|s| s.members.contains(&id)).map(|s| s.id)
    }

    /// Assigns every genome to the first species whose representative lies
    /// within the compatibility threshold, opening new species as needed.
    fn speciate(&mut self, params: &NeatParams) {
        for s in &mut self.species {
            s.members.clear();
        }
        for g in &self.genomes {
            let home = self
                .species
                .iter_mut()
                .find(|s| compatibility_distance(g, &s.representative, params) < params.compatibility_threshold);
            match home {
                Some(s) => s.members.push(g.id),
                None => {
                    self.species.push(Species {
                        id: self.next_species,
                        representative: g.clone(),
                        members: vec![g.id],
                        best_fitness: f64::NEG_INFINITY,
                        staleness: 0,
                    });
                    self.next_species += 1;
                }
            }
        }
        self.species.retain(|s| !s.members.is_empty());
    }

    fn from_genomes(genomes: Vec<Genome>, species: Vec<Species>, generation: u32, next_species: u64, params: &NeatParams) -> Self {
        let mut p = Population { genomes, species, generation, next_species };
        p.speciate(params);
        p
    }
}

/// Generation 0: mutants of `seeds` (cycled in order) when given, otherwise
/// minimal fully connected genomes.
pub fn init_population(
    params: &NeatParams,
    inputs: usize,
    outputs: usize,
    ledger: &mut InnovationLedger,
    rng: &mut dyn RngCore,
    seeds: Option<&[Genome]>,
) -> Result<Population, NeatError> {
    params.validate()?;
    if outputs == 0 {
        return Err(NeatError::EmptyShape);
    }
    let genomes = match seeds {
        Some(seeds) if !seeds.is_empty() => {
            for s in seeds {
                s.check(inputs, outputs)?;
                ledger.absorb(s);
            }
            (0..params.population_size).map(|i| mutate(&seeds[i % seeds.len()], params, ledger, rng)).collect()
        }
        _ => (0..params.population_size).map(|_| minimal_genome(inputs, outputs, ledger, rng)).collect(),
    };
    Ok(Population::from_genomes(genomes, Vec::new(), 0, 0, params))
}

fn fresh(mut g: Genome) -> Genome {
    g.fitness = 0.0;
    g.novelty = 0.0;
    g.adjusted_fitness = 0.0;
    g
}

/// Index into `members` (sorted best first) of a tournament winner.
fn tournament(len: usize, size: usize, rng: &mut dyn RngCore) -> usize {
    (0..size).map(|_| rng.random_range(0..len)).min().expect("tournament size is positive")
}

/// Largest-remainder apportionment of `total` slots by `weights`.
fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let shares: Vec<f64> = if sum > 0.0 {
        weights.iter().map(|w| w / sum * total as f64).collect()
    } else {
        vec![total as f64 / weights.len() as f64; weights.len()]
    };
    let mut quota: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut rest: Vec<usize> = (0..weights.len()).collect();
    rest.sort_by(|&a, &b| (shares[b] - shares[b].floor()).total_cmp(&(shares[a] - shares[a].floor())).then(a.cmp(&b)));
    let missing = total - quota.iter().sum::<usize>();
    for &i in rest.iter().cycle().take(missing) {
        quota[i] += 1;
    }
    quota
}

/// Produces the next generation. `rank` lists every genome id best first
/// and drives elitism, tournaments and the global-best protection; raw
/// `fitness` drives sharing and the offspring quotas.
pub fn evolve_generation(
    pop: &Population,
    params: &NeatParams,
    ledger: &mut InnovationLedger,
    rank: &[GenomeId],
    rng: &mut dyn RngCore,
) -> Result<Population, NeatError> {
    params.validate()?;
    let pos: BTreeMap<GenomeId, usize> = rank.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let ids: BTreeSet<GenomeId> = pop.genomes.iter().map(|g| g.id).collect();
    if rank.len() != pop.genomes.len() || pos.len() != rank.len() || !pos.keys().eq(ids.iter()) {
        return Err(NeatError::BadRank);
    }
    let by_id: BTreeMap<GenomeId, &Genome> = pop.genomes.iter().map(|g| (g.id, g)).collect();
    let best_id = rank[0];
    let n = params.population_size;

    let mut species = pop.species.clone();
    for s in &mut species {
        let best = s.members.iter().map(|id| by_id[id].fitness).fold(f64::NEG_INFINITY, f64::max);
        if best > s.best_fitness {
            s.best_fitness = best;
            s.staleness = 0;
        } else {
            s.staleness += 1;
        }
    }

    if species.iter().all(|s| s.staleness > params.stagnation_limit) {
        let best = by_id[&best_id];
        let mut genomes = vec![best.clone()];
        genomes.extend((1..n).map(|_| fresh(mutate(best, params, ledger, rng))));
        return Ok(Population::from_genomes(genomes, Vec::new(), pop.generation + 1, pop.next_species, params));
    }
    species.retain(|s| s.staleness <= params.stagnation_limit || s.members.contains(&best_id));

    // fitness sharing; a species' total shared fitness is its mean fitness
    let weights: Vec<f64> = species
        .iter()
        .map(|s| s.members.iter().map(|id| by_id[id].fitness / s.members.len() as f64).sum())
        .collect();
    let mut quota = apportion(&weights, n);
    let home = species.iter().position(|s| s.members.contains(&best_id)).expect("best genome has a species");
    if quota[home] == 0 {
        let donor = (0..quota.len()).max_by_key(|&i| (quota[i], std::cmp::Reverse(i))).expect("species");
        quota[donor] -= 1;
        quota[home] += 1;
    }

    let mut genomes = Vec::with_capacity(n);
    let mut next_species = Vec::new();
    for (s, &q) in species.iter().zip(&quota) {
        if q == 0 {
            continue;
        }
        let mut members: Vec<&Genome> = s.members.iter().map(|id| by_id[id]).collect();
        members.sort_by_key(|g| pos[&g.id]);
        let size = members.len();
        let share = |g: &Genome| {
            let mut g = g.clone();
            g.adjusted_fitness = g.fitness / size as f64;
            g
        };
        let elites = params.elitism.min(q).min(size);
        genomes.extend(members[..elites].iter().map(|g| share(g)));
        for _ in elites..q {
            let child = if size >= 2 && rng.random::<f64>() < params.crossover_rate {
                let a = members[tournament(size, params.tournament_size, rng)];
                let b = members[tournament(size, params.tournament_size, rng)];
                mutate(&crossover(a, b, rng), params, ledger, rng)
            } else {
                mutate(members[tournament(size, params.tournament_size, rng)], params, ledger, rng)
            };
            genomes.push(fresh(child));
        }
        let mut carried = s.clone();
        carried.representative = members[0].clone();
        next_species.push(carried);
    }
    Ok(Population::from_genomes(genomes, next_species, pop.generation + 1, pop.next_species, params))
}
