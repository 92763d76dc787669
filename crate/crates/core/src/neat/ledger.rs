use std::collections::BTreeMap;

use super::genome::{Genome, GenomeId, Innovation, NodeId, NodeRole};

/// Per-run bookkeeping: innovation numbers for connections, node ids for
/// connection splits, and genome ids.
#[derive(Clone, Debug, PartialEq)]
pub struct InnovationLedger {
    connections: BTreeMap<(NodeId, NodeId), Innovation>,
    splits: BTreeMap<Innovation, NodeId>,
    next_innovation: Innovation,
    next_node: NodeId,
    next_genome: GenomeId,
}

impl InnovationLedger {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        InnovationLedger {
            connections: BTreeMap::new(),
            splits: BTreeMap::new(),
            next_innovation: 0,
            next_node: (inputs + 1 + outputs) as NodeId,
            next_genome: 0,
        }
    }

    pub fn connection(&mut self, source: NodeId, target: NodeId) -> Innovation {
        *self.connections.entry((source, target)).or_insert_with(|| {
            let i = self.next_innovation;
            self.next_innovation += 1;
            i
        })
    }

    /// Hidden node inserted when splitting connection `innovation`.
    pub fn split(&mut self, innovation: Innovation) -> NodeId {
        *self.splits.entry(innovation).or_insert_with(|| {
            let n = self.next_node;
            self.next_node += 1;
            n
        })
    }

    pub fn next_genome_id(&mut self) -> GenomeId {
        let id = self.next_genome;
        self.next_genome += 1;
        id
    }

    pub fn innovation_count(&self) -> usize {
        self.connections.len()
    }

    /// Registers the structure of a genome built elsewhere (e.g. a seed
    /// loaded from a suite) so later mutations do not reuse its numbers.
    pub fn absorb(&mut self, g: &Genome) {
        for c in &g.connections {
            self.connections.entry((c.source, c.target)).or_insert(c.innovation);
            self.next_innovation = self.next_innovation.max(c.innovation + 1);
        }
        for n in &g.nodes {
            if n.role == NodeRole::Hidden {
                self.next_node = self.next_node.max(n.id + 1);
            }
        }
        self.next_genome = self.next_genome.max(g.id + 1);
    }
}
