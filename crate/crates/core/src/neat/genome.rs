use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::NeatError;

pub type NodeId = u32;
pub type Innovation = u32;
pub type GenomeId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeRole {
    Input,
    Bias,
    Hidden,
    Output,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    #[default]
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: NodeId,
    pub role: NodeRole,
    #[serde(default)]
    pub activation: Activation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnGene {
    pub innovation: Innovation,
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// A NEAT genome. Node genes are kept sorted by id and connection genes by
/// innovation number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub id: GenomeId,
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnGene>,
    #[serde(default)]
    pub fitness: f64,
    #[serde(default)]
    pub novelty: f64,
    #[serde(default)]
    pub adjusted_fitness: f64,
}

impl Genome {
    /// Inputs `0..n`, bias `n`, outputs `n+1..=n+m`.
    pub fn io_nodes(inputs: usize, outputs: usize) -> Vec<NodeGene> {
        let mut nodes = Vec::with_capacity(inputs + outputs + 1);
        for i in 0..inputs {
            nodes.push(NodeGene { id: i as NodeId, role: NodeRole::Input, activation: Activation::Tanh });
        }
        nodes.push(NodeGene { id: inputs as NodeId, role: NodeRole::Bias, activation: Activation::Tanh });
        for j in 0..outputs {
            nodes.push(NodeGene { id: (inputs + 1 + j) as NodeId, role: NodeRole::Output, activation: Activation::Tanh });
        }
        nodes
    }

    pub fn count(&self, role: NodeRole) -> usize {
        self.nodes.iter().filter(|n| n.role == role).count()
    }

    pub fn input_count(&self) -> usize {
        self.count(NodeRole::Input)
    }

    pub fn output_count(&self) -> usize {
        self.count(NodeRole::Output)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeGene> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok().map(|i| &self.nodes[i])
    }

    pub fn has_connection(&self, source: NodeId, target: NodeId) -> bool {
        self.connections.iter().any(|c| c.source == source && c.target == target)
    }

    pub fn enabled_connections(&self) -> impl Iterator<Item = &ConnGene> {
        self.connections.iter().filter(|c| c.enabled)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("genome serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub(crate) fn sort_genes(&mut self) {
        self.nodes.sort_by_key(|n| n.id);
        self.connections.sort_by_key(|c| c.innovation);
    }

    /// Checks the structural invariants against an expected I/O shape.
    pub fn check(&self, inputs: usize, outputs: usize) -> Result<(), NeatError> {
        let shape = (self.input_count(), self.count(NodeRole::Bias), self.output_count());
        if shape != (inputs, 1, outputs) {
            return Err(NeatError::Shape {
                genome: self.id,
                inputs: shape.0,
                bias: shape.1,
                outputs: shape.2,
                expected_inputs: inputs,
                expected_outputs: outputs,
            });
        }
        let bad = |reason: String| NeatError::Malformed { genome: self.id, reason };
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return Err(bad(format!("duplicate node {}", n.id)));
            }
        }
        if self.nodes.windows(2).any(|w| w[0].id > w[1].id) {
            return Err(bad("node genes out of order".into()));
        }
        let mut innovations = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for c in &self.connections {
            if !innovations.insert(c.innovation) {
                return Err(bad(format!("duplicate innovation {}", c.innovation)));
            }
            if !pairs.insert((c.source, c.target)) {
                return Err(bad(format!("duplicate connection {} -> {}", c.source, c.target)));
            }
            let target = self.node(c.target).ok_or_else(|| bad(format!("unknown node {}", c.target)))?;
            self.node(c.source).ok_or_else(|| bad(format!("unknown node {}", c.source)))?;
            if matches!(target.role, NodeRole::Input | NodeRole::Bias) {
                return Err(bad(format!("connection into {:?} node {}", target.role, c.target)));
            }
            if !c.weight.is_finite() {
                return Err(bad(format!("non-finite weight on innovation {}", c.innovation)));
            }
        }
        if self.connections.windows(2).any(|w| w[0].innovation > w[1].innovation) {
            return Err(bad("connection genes out of order".into()));
        }
        Ok(())
    }
}
