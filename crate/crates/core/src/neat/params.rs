use serde::{Deserialize, Serialize};

use super::NeatError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeatParams {
    pub population_size: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub compatibility_threshold: f64,
    /// Probability that a genome's weights are mutated at all.
    pub weight_mutation_rate: f64,
    /// Half-width of the uniform perturbation.
    pub weight_mutation_power: f64,
    /// Per-weight probability of a fresh draw instead of a perturbation.
    pub weight_replace_rate: f64,
    pub add_connection_rate: f64,
    pub add_node_rate: f64,
    pub crossover_rate: f64,
    /// Members copied unchanged per species.
    pub elitism: usize,
    pub stagnation_limit: u32,
    pub tournament_size: usize,
}

impl Default for NeatParams {
    fn default() -> Self {
        NeatParams {
            population_size: 150,
            c1: 1.0,
            c2: 1.0,
            c3: 0.4,
            compatibility_threshold: 3.0,
            weight_mutation_rate: 0.8,
            weight_mutation_power: 0.5,
            weight_replace_rate: 0.1,
            add_connection_rate: 0.1,
            add_node_rate: 0.05,
            crossover_rate: 0.75,
            elitism: 1,
            stagnation_limit: 15,
            tournament_size: 3,
        }
    }
}

impl NeatParams {
    pub fn validate(&self) -> Result<(), NeatError> {
        let rates = [
            ("weight_mutation_rate", self.weight_mutation_rate),
            ("weight_replace_rate", self.weight_replace_rate),
            ("add_connection_rate", self.add_connection_rate),
            ("add_node_rate", self.add_node_rate),
            ("crossover_rate", self.crossover_rate),
        ];
        for (name, r) in rates {
            if !(0.0..=1.0).contains(&r) {
                return Err(NeatError::InvalidParams(format!("{name} must be in [0, 1], got {r}")));
            }
        }
        let non_negative = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("compatibility_threshold", self.compatibility_threshold),
            ("weight_mutation_power", self.weight_mutation_power),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(NeatError::InvalidParams(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        if self.population_size < 2 {
            return Err(NeatError::InvalidParams("population_size must be at least 2".into()));
        }
        if self.tournament_size == 0 {
            return Err(NeatError::InvalidParams("tournament_size must be at least 1".into()));
        }
        Ok(())
    }
}
