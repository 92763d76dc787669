use super::genome::{Activation, Genome, NodeRole};

/// Phenotype of a genome. Connections closing a cycle (back edges of a DFS
/// from the inputs) read the previous activation; everything else is fed
/// forward in topological order. Recurrent memory lives here, so build a
/// fresh network per episode.
#[derive(Clone, Debug)]
pub struct Network {
    inputs: Vec<usize>,
    bias: usize,
    outputs: Vec<usize>,
    /// Non-input nodes in evaluation order.
    order: Vec<usize>,
    activation: Vec<Activation>,
    /// Per node: (source index, weight, recurrent).
    incoming: Vec<Vec<(usize, f64, bool)>>,
    values: Vec<f64>,
}

impl Network {
    pub fn new(g: &Genome) -> Self {
        let n = g.nodes.len();
        let index = |id| g.nodes.binary_search_by_key(&id, |x: &super::genome::NodeGene| x.id).expect("connection endpoints exist");
        let mut out_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut edges = Vec::new();
        for c in g.enabled_connections() {
            let e = edges.len();
            let (s, t) = (index(c.source), index(c.target));
            out_edges[s].push((t, e));
            edges.push((s, t, c.weight));
        }

        // Iterative DFS in node-id order; inputs and bias come first.
        let mut recurrent = vec![false; edges.len()];
        let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
        let mut finished = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(top) = stack.last_mut() {
                let v = top.0;
                if let Some(&(t, e)) = out_edges[v].get(top.1) {
                    top.1 += 1;
                    match state[t] {
                        0 => {
                            state[t] = 1;
                            stack.push((t, 0));
                        }
                        1 => recurrent[e] = true,
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    finished.push(v);
                    stack.pop();
                }
            }
        }

        let mut incoming = vec![Vec::new(); n];
        for (e, &(s, t, w)) in edges.iter().enumerate() {
            incoming[t].push((s, w, recurrent[e]));
        }
        let order = finished
            .into_iter()
            .rev()
            .filter(|&i| matches!(g.nodes[i].role, NodeRole::Hidden | NodeRole::Output))
            .collect();
        let role_ix = |r| (0..n).filter(|&i| g.nodes[i].role == r).collect::<Vec<_>>();
        Network {
            inputs: role_ix(NodeRole::Input),
            bias: role_ix(NodeRole::Bias)[0],
            outputs: role_ix(NodeRole::Output),
            order,
            activation: g.nodes.iter().map(|x| x.activation).collect(),
            incoming,
            values: vec![0.0; n],
        }
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// One forward pass. Panics if `inputs` has the wrong length.
    pub fn activate(&mut self, inputs: &[f64]) -> Vec<f64> {
        assert_eq!(inputs.len(), self.inputs.len(), "input length");
        let prev = self.values.clone();
        for (&i, &x) in self.inputs.iter().zip(inputs) {
            self.values[i] = x;
        }
        self.values[self.bias] = 1.0;
        for &v in &self.order {
            let sum: f64 = self.incoming[v]
                .iter()
                .map(|&(s, w, rec)| w * if rec { prev[s] } else { self.values[s] })
                .sum();
            self.values[v] = self.activation[v].apply(sum);
        }
        self.outputs.iter().map(|&o| self.values[o]).collect()
    }

    pub fn reset(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Index of the largest output; the lowest index wins ties.
pub fn argmax(outputs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in outputs.iter().enumerate() {
        if v > outputs[best] {
            best = i;
        }
    }
    best
}
