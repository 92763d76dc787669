//! Statement objective `f = A + ω(B)`: approach level plus normalised
//! branch distance, aggregated over the best tick of an episode.

use serde::{Deserialize, Serialize};

use super::cdg::{CdgNode, ControlDependenceGraph, EdgeLabel};
use crate::vm::{EpisodeResult, GameInstance, StmtId, K};

/// Distances beyond this are treated as equal; past it `x / (x + 1)`
/// would round to 1.
pub const MAX_BRANCH_DISTANCE: f64 = 1e12;

/// `x / (x + 1)`: maps `[0, ∞)` onto `[0, 1)`.
pub fn normalize(x: f64) -> f64 {
    let x = x.min(MAX_BRANCH_DISTANCE);
    x / (x + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveResult {
    pub approach_level: u32,
    pub branch_distance: f64,
    pub fitness: f64,
    pub covered: bool,
}

impl ObjectiveResult {
    pub fn new(approach_level: u32, branch_distance: f64) -> Self {
        let fitness = approach_level as f64 + normalize(branch_distance);
        ObjectiveResult { approach_level, branch_distance, fitness, covered: fitness == 0.0 }
    }

    pub fn covered() -> Self {
        ObjectiveResult::new(0, 0.0)
    }

    /// Maximisation form `1 / (1 + f)`, equal to 1 exactly when covered.
    pub fn maximised(&self) -> f64 {
        1.0 / (1.0 + self.fitness)
    }
}

fn executed(result: &EpisodeResult, inst: &GameInstance, node: CdgNode) -> bool {
    match node {
        CdgNode::Root => true,
        CdgNode::Entry(s) => result.script_fired(s),
        CdgNode::Stmt(id) => result.covered(inst, id),
    }
}

/// Deepest executed controlling ancestor of an unexecuted target, as
/// (unexecuted levels in between, branch distance at that node).
fn divergence(result: &EpisodeResult, inst: &GameInstance, target: StmtId, cdg: &ControlDependenceGraph) -> (u32, f64) {
    for (level, (node, label)) in cdg.ancestors(CdgNode::Stmt(target)).into_iter().enumerate() {
        if !executed(result, inst, node) {
            continue;
        }
        let b = match node {
            CdgNode::Stmt(id) => {
                let t = result.trace(inst, id).expect("control statement belongs to the instance");
                match label {
                    EdgeLabel::Else => t.min_to_false,
                    _ => t.min_to_true,
                }
            }
            _ => K,
        };
        // The required outcome occurred but the target still did not run
        // (the body yielded or the game ended first).
        let b = if b > 0.0 && b.is_finite() { b } else { K };
        return (level as u32, b);
    }
    unreachable!("the root is always executed")
}

/// Approach level of `target`: zero when it ran, otherwise the number of
/// unexecuted controlling nodes between the divergence point and it.
pub fn approach_level(result: &EpisodeResult, inst: &GameInstance, target: StmtId, cdg: &ControlDependenceGraph) -> u32 {
    if result.covered(inst, target) {
        0
    } else {
        divergence(result, inst, target, cdg).0
    }
}

pub fn statement_fitness(
    result: &EpisodeResult,
    inst: &GameInstance,
    target: StmtId,
    cdg: &ControlDependenceGraph,
) -> ObjectiveResult {
    if result.covered(inst, target) {
        return ObjectiveResult::covered();
    }
    let (a, b) = divergence(result, inst, target, cdg);
    ObjectiveResult::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_endpoints() {
        assert_eq!(normalize(0.0), 0.0);
        assert_eq!(normalize(1.0), 0.5);
        assert!(normalize(crate::vm::spec::CANVAS_DIAGONAL) < 1.0);
        assert!(normalize(f64::INFINITY) < 1.0);
        assert_eq!(normalize(1e300), normalize(MAX_BRANCH_DISTANCE));
        let f = ObjectiveResult::new(0, 50.0).fitness;
        assert!((f - 50.0 / 51.0).abs() < 1e-15);
        assert!((f - 0.98039).abs() < 1e-5);
    }

    #[test]
    fn covered_iff_zero() {
        assert!(ObjectiveResult::covered().covered);
        assert_eq!(ObjectiveResult::covered().maximised(), 1.0);
        assert!(!ObjectiveResult::new(0, 1e-9).covered);
        assert!(!ObjectiveResult::new(1, 0.0).covered);
    }
}
