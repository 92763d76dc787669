//! Control dependence for the block-structured statement language.
//!
//! Every statement depends on exactly one controlling node: its nearest
//! enclosing `if`/`repeat`/`forever`, or its script entry when it sits at
//! the top level. Script entries depend on a virtual game root.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::vm::{GameSpec, Statement, StmtId, StmtKind, Trigger};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CdgNode {
    Root,
    Entry(usize),
    Stmt(StmtId),
}

/// Outcome of the controlling node required to reach the child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeLabel {
    /// Root to script entry: the trigger has to fire.
    Trigger,
    /// Script entry to a top-level statement.
    Entry,
    Then,
    Else,
    /// Loop statement to a statement in its body.
    Body,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControlDependenceGraph {
    parent: BTreeMap<CdgNode, (CdgNode, EdgeLabel)>,
    children: BTreeMap<CdgNode, Vec<CdgNode>>,
    depth: BTreeMap<CdgNode, u32>,
    start_entries: BTreeSet<usize>,
}

impl ControlDependenceGraph {
    pub fn build(spec: &GameSpec) -> Self {
        let mut g = ControlDependenceGraph {
            parent: BTreeMap::new(),
            children: BTreeMap::new(),
            depth: BTreeMap::new(),
            start_entries: BTreeSet::new(),
        };
        for (i, script) in spec.scripts.iter().enumerate() {
            let entry = CdgNode::Entry(i);
            g.link(entry, CdgNode::Root, EdgeLabel::Trigger, 0);
            if script.trigger == Trigger::GameStart {
                g.start_entries.insert(i);
            }
            g.add_block(&script.body, entry, EdgeLabel::Entry, 1);
        }
        g
    }

    fn link(&mut self, child: CdgNode, parent: CdgNode, label: EdgeLabel, depth: u32) {
        self.parent.insert(child, (parent, label));
        self.children.entry(parent).or_default().push(child);
        self.depth.insert(child, depth);
    }

    fn add_block(&mut self, body: &[Statement], controller: CdgNode, label: EdgeLabel, depth: u32) {
        for s in body {
            let node = CdgNode::Stmt(s.id);
            self.link(node, controller, label, depth);
            match &s.kind {
                StmtKind::If { then, otherwise, .. } => {
                    self.add_block(then, node, EdgeLabel::Then, depth + 1);
                    self.add_block(otherwise, node, EdgeLabel::Else, depth + 1);
                }
                StmtKind::Repeat { body, .. } | StmtKind::Forever { body } => {
                    self.add_block(body, node, EdgeLabel::Body, depth + 1)
                }
                _ => {}
            }
        }
    }

    /// Controlling node of `node` and the edge label; `None` for the root.
    pub fn parent(&self, node: CdgNode) -> Option<(CdgNode, EdgeLabel)> {
        self.parent.get(&node).copied()
    }

    pub fn children(&self, node: CdgNode) -> &[CdgNode] {
        self.children.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distance from the script entry (entries have depth 0). The root has
    /// no depth.
    pub fn depth(&self, node: CdgNode) -> Option<u32> {
        self.depth.get(&node).copied()
    }

    /// Controlling chain from the direct controller up to the root, each
    /// with the label of the edge leading towards `node`.
    pub fn ancestors(&self, node: CdgNode) -> Vec<(CdgNode, EdgeLabel)> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some((p, l)) = self.parent(cur) {
            out.push((p, l));
            cur = p;
        }
        out
    }

    pub fn contains(&self, node: CdgNode) -> bool {
        node == CdgNode::Root || self.parent.contains_key(&node)
    }

    pub fn statements(&self) -> Vec<StmtId> {
        self.parent
            .keys()
            .filter_map(|n| match n {
                CdgNode::Stmt(id) => Some(*id),
                _ => None,
            })
            .collect()
    }

    pub fn is_start_entry(&self, script: usize) -> bool {
        self.start_entries.contains(&script)
    }

    /// Uncovered statements whose controlling node is covered, ascending.
    /// Game-start entries always count as covered; other entries count once
    /// they appear in `fired`.
    pub fn next_targets(&self, covered: &BTreeSet<StmtId>, fired: &BTreeSet<usize>) -> Vec<StmtId> {
        self.statements()
            .into_iter()
            .filter(|id| !covered.contains(id))
            .filter(|id| match self.parent(CdgNode::Stmt(*id)) {
                Some((CdgNode::Stmt(p), _)) => covered.contains(&p),
                Some((CdgNode::Entry(e), _)) => self.is_start_entry(e) || fired.contains(&e),
                _ => false,
            })
            .collect()
    }
}
