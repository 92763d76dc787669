//! Control dependence, branch distance and the statement objective.

mod cdg;
mod distance;
mod fitness;

pub use cdg::{CdgNode, ControlDependenceGraph, EdgeLabel};
pub use distance::{branch_distance, evaluate};
pub use fitness::{approach_level, normalize, statement_fitness, ObjectiveResult, MAX_BRANCH_DISTANCE};
