//! NEAT: genomes, phenotypes, variation, speciation and reproduction.

mod genome;
mod ledger;
mod network;
mod ops;
mod params;
mod population;

pub use genome::{Activation, ConnGene, Genome, GenomeId, Innovation, NodeGene, NodeId, NodeRole};
pub use ledger::InnovationLedger;
pub use network::{argmax, Network};
pub use ops::{compatibility_distance, crossover, minimal_genome, mutate, REENABLE_PROBABILITY};
pub use params::NeatParams;
pub use population::{evolve_generation, init_population, Population, Species};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeatError {
    #[error(
        "genome {genome} has {inputs} inputs, {bias} bias and {outputs} outputs; \
         expected {expected_inputs} inputs, 1 bias and {expected_outputs} outputs"
    )]
    Shape {
        genome: GenomeId,
        inputs: usize,
        bias: usize,
        outputs: usize,
        expected_inputs: usize,
        expected_outputs: usize,
    },
    #[error("genome {genome}: {reason}")]
    Malformed { genome: GenomeId, reason: String },
    #[error("invalid NEAT parameters: {0}")]
    InvalidParams(String),
    #[error("networks need at least one output")]
    EmptyShape,
    #[error("rank order must list every genome of the population exactly once")]
    BadRank,
}
