use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use super::genome::{ConnGene, Genome, NodeGene, NodeRole, NodeId};
use super::ledger::InnovationLedger;
use super::params::NeatParams;

/// Chance that a gene disabled in either parent is enabled in the child.
pub const REENABLE_PROBABILITY: f64 = 0.25;

fn unit_weight(rng: &mut dyn RngCore) -> f64 {
    rng.random_range(-1.0..=1.0)
}

/// Inputs and bias fully connected to the outputs, weights in `[-1, 1]`.
pub fn minimal_genome(inputs: usize, outputs: usize, ledger: &mut InnovationLedger, rng: &mut dyn RngCore) -> Genome {
    let mut connections = Vec::with_capacity((inputs + 1) * outputs);
    for s in 0..=inputs {
        for t in 0..outputs {
            let (source, target) = (s as NodeId, (inputs + 1 + t) as NodeId);
            connections.push(ConnGene {
                innovation: ledger.connection(source, target),
                source,
                target,
                weight: unit_weight(rng),
                enabled: true,
            });
        }
    }
    let mut g = Genome {
        id: ledger.next_genome_id(),
        nodes: Genome::io_nodes(inputs, outputs),
        connections,
        fitness: 0.0,
        novelty: 0.0,
        adjusted_fitness: 0.0,
    };
    g.sort_genes();
    g
}

/// Copy of `g` under a fresh id with weight, add-connection and add-node
/// mutations applied at the configured rates.
pub fn mutate(g: &Genome, params: &NeatParams, ledger: &mut InnovationLedger, rng: &mut dyn RngCore) -> Genome {
    let mut child = g.clone();
    child.id = ledger.next_genome_id();
    if rng.random::<f64>() < params.weight_mutation_rate {
        for c in &mut child.connections {
            if rng.random::<f64>() < params.weight_replace_rate {
                c.weight = unit_weight(rng);
            } else {
                let p = params.weight_mutation_power;
                c.weight += if p > 0.0 { rng.random_range(-p..=p) } else { 0.0 };
            }
        }
    }
    if rng.random::<f64>() < params.add_connection_rate {
        add_connection(&mut child, ledger, rng);
    }
    if rng.random::<f64>() < params.add_node_rate {
        add_node(&mut child, ledger, rng);
    }
    child.sort_genes();
    child
}

fn add_connection(g: &mut Genome, ledger: &mut InnovationLedger, rng: &mut dyn RngCore) {
    let mut candidates = Vec::new();
    for s in &g.nodes {
        for t in g.nodes.iter().filter(|t| matches!(t.role, NodeRole::Hidden | NodeRole::Output)) {
            if !g.has_connection(s.id, t.id) {
                candidates.push((s.id, t.id));
            }
        }
    }
    if candidates.is_empty() {
        return;
    }
    let (source, target) = candidates[rng.random_range(0..candidates.len())];
    g.connections.push(ConnGene {
        innovation: ledger.connection(source, target),
        source,
        target,
        weight: unit_weight(rng),
        enabled: true,
    });
}

fn add_node(g: &mut Genome, ledger: &mut InnovationLedger, rng: &mut dyn RngCore) {
    let enabled: Vec<usize> = (0..g.connections.len()).filter(|&i| g.connections[i].enabled).collect();
    if enabled.is_empty() {
        return;
    }
    let i = enabled[rng.random_range(0..enabled.len())];
    let old = g.connections[i].clone();
    let node = ledger.split(old.innovation);
    if g.node(node).is_some() {
        // this connection was split before and later re-enabled
        return;
    }
    g.connections[i].enabled = false;
    g.nodes.push(NodeGene { id: node, role: NodeRole::Hidden, activation: Default::default() });
    g.connections.push(ConnGene {
        innovation: ledger.connection(old.source, node),
        source: old.source,
        target: node,
        weight: 1.0,
        enabled: true,
    });
    g.connections.push(ConnGene {
        innovation: ledger.connection(node, old.target),
        source: node,
        target: old.target,
        weight: old.weight,
        enabled: true,
    });
}

/// One child from two parents. Matching genes come from either parent at
/// random; disjoint and excess genes from the fitter one, or from both when
/// fitness is equal. The child's id is 0 until it is mutated.
pub fn crossover(a: &Genome, b: &Genome, rng: &mut dyn RngCore) -> Genome {
    let ga: BTreeMap<_, _> = a.connections.iter().map(|c| (c.innovation, c)).collect();
    let gb: BTreeMap<_, _> = b.connections.iter().map(|c| (c.innovation, c)).collect();
    let mut innovations: Vec<_> = ga.keys().chain(gb.keys()).copied().collect();
    innovations.sort_unstable();
    innovations.dedup();

    let mut connections: Vec<ConnGene> = Vec::new();
    let mut pairs = std::collections::BTreeSet::new();
    for inn in innovations {
        let (gene, any_disabled) = match (ga.get(&inn), gb.get(&inn)) {
            (Some(x), Some(y)) => {
                let pick = if rng.random_bool(0.5) { x } else { y };
                ((*pick).clone(), !x.enabled || !y.enabled)
            }
            (Some(x), None) if a.fitness >= b.fitness => ((*x).clone(), !x.enabled),
            (None, Some(y)) if b.fitness >= a.fitness => ((*y).clone(), !y.enabled),
            _ => continue,
        };
        let mut gene = gene;
        if any_disabled {
            gene.enabled = rng.random::<f64>() < REENABLE_PROBABILITY;
        }
        if pairs.insert((gene.source, gene.target)) {
            connections.push(gene);
        }
    }

    let mut nodes: Vec<NodeGene> = a.nodes.iter().filter(|n| n.role != NodeRole::Hidden).cloned().collect();
    let mut used: Vec<NodeId> = connections.iter().flat_map(|c| [c.source, c.target]).collect();
    used.sort_unstable();
    used.dedup();
    for id in used {
        if nodes.iter().any(|n| n.id == id) {
            continue;
        }
        let n = a.node(id).or_else(|| b.node(id)).expect("connection endpoints exist in a parent");
        nodes.push(n.clone());
    }
    let mut child = Genome { id: 0, nodes, connections, fitness: 0.0, novelty: 0.0, adjusted_fitness: 0.0 };
    child.sort_genes();
    child
}

/// `c1·E/N + c2·D/N + c3·W̄` over connection genes aligned by innovation.
pub fn compatibility_distance(a: &Genome, b: &Genome, params: &NeatParams) -> f64 {
    let (xs, ys) = (&a.connections, &b.connections);
    let max_a = xs.last().map(|c| c.innovation);
    let max_b = ys.last().map(|c| c.innovation);
    let (mut i, mut j) = (0, 0);
    let (mut excess, mut disjoint, mut matching, mut wsum) = (0usize, 0usize, 0usize, 0.0);
    let beyond = |inn, other_max: Option<u32>| other_max.is_none_or(|m| inn > m);
    while i < xs.len() || j < ys.len() {
        match (xs.get(i), ys.get(j)) {
            (Some(x), Some(y)) if x.innovation == y.innovation => {
                matching += 1;
                wsum += (x.weight - y.weight).abs();
                i += 1;
                j += 1;
            }
            (Some(x), y) if y.is_none_or(|y| x.innovation < y.innovation) => {
                if beyond(x.innovation, max_b) {
                    excess += 1;
                } else {
                    disjoint += 1;
                }
                i += 1;
            }
            (_, Some(y)) => {
                if beyond(y.innovation, max_a) {
                    excess += 1;
                } else {
                    disjoint += 1;
                }
                j += 1;
            }
            _ => unreachable!("loop condition"),
        }
    }
    let n = xs.len().max(ys.len()).max(1) as f64;
    let w = if matching > 0 { wsum / matching as f64 } else { 0.0 };
    params.c1 * excess as f64 / n + params.c2 * disjoint as f64 / n + params.c3 * w
}
