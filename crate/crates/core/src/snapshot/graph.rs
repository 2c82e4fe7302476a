use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Granularity;
use crate::automata::{Fsa, StateId, Symbol, SymbolTable, DROP_NAME, EPSILON};
use crate::frontend::LocationDb;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub loc: String,
}

/// A forwarding DAG. Every source-to-sink path is one forwarding path.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardingGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<(String, String)>,
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("nodes[{index}]: duplicate node id {id:?}")]
    DuplicateNode { index: usize, id: String },
    #[error("{field}: undeclared node {id:?}")]
    UndeclaredNode { field: String, id: String },
    #[error("nodes[{index}]: unknown location {loc:?}")]
    UnknownLocation { index: usize, loc: String },
    #[error("graph contains a cycle through node {id:?}")]
    Cycle { id: String },
    #[error("node {id:?} is not reachable from any source")]
    Unreachable { id: String },
    #[error("node {id:?} does not reach any sink")]
    DeadEnd { id: String },
    #[error("drop node {id:?} must be a sink without outgoing edges")]
    DropNotSink { id: String },
    #[error("coarsening to {granularity} creates a cycle through {entity:?}")]
    CoarsenCycle { granularity: Granularity, entity: String },
}

impl ForwardingGraph {
    /// A single path through `locs`, with node ids equal to positions.
    pub fn chain(locs: &[&str]) -> Self {
        let ids: Vec<String> = (0..locs.len()).map(|i| format!("n{i}")).collect();
        ForwardingGraph {
            nodes: ids
                .iter()
                .zip(locs)
                .map(|(id, loc)| Node {
                    id: id.clone(),
                    loc: loc.to_string(),
                })
                .collect(),
            edges: ids.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect(),
            sources: ids.first().cloned().into_iter().collect(),
            sinks: ids.last().cloned().into_iter().collect(),
        }
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    /// Checks the structural invariants, and location names against `db`
    /// when given.
    pub fn validate(&self, db: Option<&LocationDb>) -> Result<(), GraphError> {
        let mut index = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if index.insert(node.id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateNode {
                    index: i,
                    id: node.id.clone(),
                });
            }
            if let Some(db) = db {
                if node.loc != DROP_NAME && db.get(&node.loc).is_none() {
                    return Err(GraphError::UnknownLocation {
                        index: i,
                        loc: node.loc.clone(),
                    });
                }
            }
        }
        let lookup = |field: String, id: &str| {
            index.get(id).copied().ok_or(GraphError::UndeclaredNode {
                field,
                id: id.to_string(),
            })
        };
        let n = self.nodes.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (i, (u, v)) in self.edges.iter().enumerate() {
            let u = lookup(format!("edges[{i}]"), u)?;
            let v = lookup(format!("edges[{i}]"), v)?;
            succ[u].push(v);
            pred[v].push(u);
        }
        let sources = self
            .sources
            .iter()
            .enumerate()
            .map(|(i, id)| lookup(format!("sources[{i}]"), id))
            .collect::<Result<Vec<_>, _>>()?;
        let sinks = self
            .sinks
            .iter()
            .enumerate()
            .map(|(i, id)| lookup(format!("sinks[{i}]"), id))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(v) = find_cycle(&succ) {
            return Err(GraphError::Cycle {
                id: self.nodes[v].id.clone(),
            });
        }
        let forward = reachable(&succ, &sources);
        if let Some(v) = forward.iter().position(|r| !r) {
            return Err(GraphError::Unreachable {
                id: self.nodes[v].id.clone(),
            });
        }
        let backward = reachable(&pred, &sinks);
        if let Some(v) = backward.iter().position(|r| !r) {
            return Err(GraphError::DeadEnd {
                id: self.nodes[v].id.clone(),
            });
        }
        let sink_set: HashSet<usize> = sinks.into_iter().collect();
        for (v, node) in self.nodes.iter().enumerate() {
            if node.loc == DROP_NAME && (!succ[v].is_empty() || !sink_set.contains(&v)) {
                return Err(GraphError::DropNotSink { id: node.id.clone() });
            }
        }
        Ok(())
    }

    /// The number of distinct source-to-sink node sequences.
    pub fn path_count(&self) -> u128 {
        let index = self.index();
        let n = self.nodes.len();
        let mut succ = vec![Vec::new(); n];
        for (u, v) in &self.edges {
            succ[index[u.as_str()]].push(index[v.as_str()]);
        }
        let sinks: HashSet<usize> = self.sinks.iter().map(|s| index[s.as_str()]).collect();
        let order = topological_order(&succ).expect("acyclic graph");
        let mut count = vec![0u128; n];
        for &v in order.iter().rev() {
            count[v] = u128::from(sinks.contains(&v)) + succ[v].iter().map(|&w| count[w]).sum::<u128>();
        }
        let sources: HashSet<usize> = self.sources.iter().map(|s| index[s.as_str()]).collect();
        sources.into_iter().map(|s| count[s]).sum()
    }
}

fn reachable(adj: &[Vec<usize>], seeds: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = seeds.to_vec();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(adj[v].iter().copied().filter(|&w| !seen[w]));
        }
    }
    seen
}

fn topological_order(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for targets in succ {
        for &w in targets {
            indegree[w] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Some node on a cycle, if there is one.
fn find_cycle(succ: &[Vec<usize>]) -> Option<usize> {
    if topological_order(succ).is_some() {
        return None;
    }
    // Nodes left after peeling lie on or behind a cycle, and each keeps a
    // predecessor inside that set; walking predecessors must revisit a node.
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for targets in succ {
        for &w in targets {
            indegree[w] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(v) = ready.pop() {
        removed[v] = true;
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for (v, targets) in succ.iter().enumerate() {
        for &w in targets {
            pred[w].push(v);
        }
    }
    let mut v = (0..n).find(|&v| !removed[v])?;
    let mut seen = HashSet::new();
    while seen.insert(v) {
        v = *pred[v].iter().find(|&&u| !removed[u])?;
    }
    Some(v)
}

/// Merges nodes that map to the same entity at `to`, removing the self-edges
/// and parallel edges this creates. Node ids and locations of the result are
/// entity names.
pub fn coarsen(g: &ForwardingGraph, to: Granularity, db: &LocationDb) -> Result<ForwardingGraph, GraphError> {
    let entity = |loc: &str| db.project(loc, to).unwrap_or(loc).to_string();
    let index = g.index();
    let mapped: Vec<String> = g.nodes.iter().map(|n| entity(&n.loc)).collect();
    let of = |id: &str| mapped[index[id]].clone();
    let mut out = ForwardingGraph::default();
    let mut seen_nodes = HashSet::new();
    for e in &mapped {
        if seen_nodes.insert(e.clone()) {
            out.nodes.push(Node {
                id: e.clone(),
                loc: e.clone(),
            });
        }
    }
    let mut seen_edges = HashSet::new();
    for (u, v) in &g.edges {
        let (u, v) = (of(u), of(v));
        if u != v && seen_edges.insert((u.clone(), v.clone())) {
            out.edges.push((u, v));
        }
    }
    let dedup = |ids: &[String]| {
        let mut seen = HashSet::new();
        ids.iter().map(|id| of(id)).filter(|e| seen.insert(e.clone())).collect::<Vec<_>>()
    };
    out.sources = dedup(&g.sources);
    out.sinks = dedup(&g.sinks);
    let index = out.index();
    let mut succ = vec![Vec::new(); out.nodes.len()];
    for (u, v) in &out.edges {
        succ[index[u.as_str()]].push(index[v.as_str()]);
    }
    if let Some(v) = find_cycle(&succ) {
        return Err(GraphError::CoarsenCycle {
            granularity: to,
            entity: out.nodes[v].id.clone(),
        });
    }
    Ok(out)
}

fn build(g: &ForwardingGraph, symbols: &[Symbol], collapse: bool) -> Fsa {
    let index = g.index();
    let state = |id: &str| index[id] as StateId + 1;
    let mut fsa = Fsa::empty();
    for _ in &g.nodes {
        fsa.add_state(false);
    }
    for id in &g.sinks {
        fsa.set_final(state(id), true);
    }
    let mut seen = HashSet::new();
    for id in &g.sources {
        if seen.insert(id) {
            fsa.add_arc(0, Some(symbols[index[id.as_str()]]), state(id));
        }
    }
    let mut seen = HashSet::new();
    for (u, v) in &g.edges {
        if !seen.insert((u, v)) {
            continue;
        }
        let (su, sv) = (symbols[index[u.as_str()]], symbols[index[v.as_str()]]);
        let label = if collapse && su == sv { EPSILON } else { Some(sv) };
        fsa.add_arc(state(u), label, state(v));
    }
    fsa
}

/// The automaton accepting the location sequences of all source-to-sink
/// paths, endpoints included. Locations must be names in `table`.
pub fn graph_to_fsa(g: &ForwardingGraph, table: &SymbolTable) -> Result<Fsa, GraphError> {
    let symbols = g
        .nodes
        .iter()
        .enumerate()
        .map(|(index, n)| {
            table.get(&n.loc).ok_or(GraphError::UnknownLocation {
                index,
                loc: n.loc.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build(g, &symbols, false))
}

/// The automaton of `g`'s paths viewed at `granularity`: each location is
/// replaced by its entity and consecutive repeats of an entity collapse.
///
/// Unlike [`coarsen`] followed by [`graph_to_fsa`], this never introduces
/// paths that the interface-level graph does not have.
pub fn project_to_fsa(
    g: &ForwardingGraph,
    db: &LocationDb,
    granularity: Granularity,
    table: &SymbolTable,
) -> Result<Fsa, GraphError> {
    let symbols = g
        .nodes
        .iter()
        .enumerate()
        .map(|(index, n)| {
            db.project(&n.loc, granularity)
                .and_then(|e| table.get(e))
                .ok_or(GraphError::UnknownLocation {
                    index,
                    loc: n.loc.clone(),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build(g, &symbols, granularity != Granularity::Interface))
}
