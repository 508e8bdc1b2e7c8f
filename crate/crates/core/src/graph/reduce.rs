use std::collections::BTreeSet;

use super::{DepGraph, GraphError};

/// Fixed-size bitset over node indices.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

/// Removes every edge `(u, v)` for which another path from `u` to `v`
/// exists.
///
/// Nodes are visited sinks-first, each keeping the set of nodes it reaches.
/// A node's successors are examined in topological order, so a successor
/// that is reachable through an earlier successor is already in the set
/// when it comes up, and its edge is dropped.
pub fn transitive_reduction(g: &DepGraph) -> Result<DepGraph, GraphError> {
    let idx = g.indexed();
    let order = DepGraph::topological_order(&idx)?;
    let n = idx.names.len();
    let mut position = vec![0usize; n];
    for (pos, &node) in order.iter().enumerate() {
        position[node] = pos;
    }

    let mut reach = vec![Bits::new(n); n];
    let mut kept = BTreeSet::new();
    for &u in order.iter().rev() {
        let mut succ = idx.succ[u].clone();
        succ.sort_by_key(|&v| position[v]);
        let mut acc = Bits::new(n);
        for v in succ {
            if acc.get(v) {
                continue;
            }
            kept.insert((idx.names[u].clone(), idx.names[v].clone()));
            acc.set(v);
            acc.union_with(&reach[v]);
        }
        reach[u] = acc;
    }

    Ok(DepGraph { edges: kept, reduced: true, ..g.clone() })
}
