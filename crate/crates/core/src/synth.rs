//! Seeded generators for synthetic location databases, forwarding DAGs and
//! FECs, used by tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automata::{SymbolTable, DROP_NAME};
use crate::frontend::{LocationDb, LocationRecord};
use crate::snapshot::{project_to_fsa, Fec, ForwardingGraph, Granularity, Node, Traffic};

/// Shape of a synthetic database: `locations` interfaces, spread over
/// devices and groups.
#[derive(Debug, Clone, Copy)]
pub struct DbShape {
    pub locations: usize,
    pub interfaces_per_device: usize,
    pub devices_per_group: usize,
}

impl Default for DbShape {
    fn default() -> Self {
        DbShape {
            locations: 1000,
            interfaces_per_device: 2,
            devices_per_group: 10,
        }
    }
}

pub fn group_name(k: usize) -> String {
    format!("G{k:03}")
}

pub fn synthetic_db(shape: DbShape) -> LocationDb {
    let records = (0..shape.locations)
        .map(|i| {
            let device = i / shape.interfaces_per_device.max(1);
            let group = device / shape.devices_per_group.max(1);
            LocationRecord::new(&format!("r{device:04}-e{i:04}"), &format!("r{device:04}"), &group_name(group))
                .with_attr("tier", if group % 2 == 0 { "core" } else { "edge" })
        })
        .collect();
    LocationDb::new(records).expect("synthetic records are valid")
}

/// Limits on a generated DAG.
#[derive(Debug, Clone, Copy)]
pub struct DagShape {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_width: usize,
    /// Probability that a sink is a drop node.
    pub drop_rate: f64,
}

impl Default for DagShape {
    fn default() -> Self {
        DagShape {
            max_nodes: 50,
            max_edges: 200,
            max_width: 4,
            drop_rate: 0.05,
        }
    }
}

/// A layered DAG: every node of a layer links to at least one node of the
/// next, and every node past the first has a predecessor. Sources are the
/// first layer, sinks the last.
pub fn random_dag<R: Rng>(db: &LocationDb, shape: DagShape, rng: &mut R) -> ForwardingGraph {
    let records = db.records();
    let width_cap = shape.max_width.max(1);
    let max_layers = (shape.max_nodes / width_cap).clamp(2, 12);
    let layers_n = rng.gen_range(2..=max_layers);
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut nodes = Vec::new();
    for layer in 0..layers_n {
        let remaining_layers = layers_n - layer - 1;
        let budget = shape.max_nodes - nodes.len() - remaining_layers;
        let width = rng.gen_range(1..=width_cap.min(budget).max(1));
        let mut ids = Vec::new();
        for _ in 0..width {
            let id = nodes.len();
            let drop = layer == layers_n - 1 && rng.gen_bool(shape.drop_rate);
            let loc = if drop {
                DROP_NAME.to_string()
            } else {
                records[rng.gen_range(0..records.len())].name.clone()
            };
            nodes.push(Node {
                id: format!("n{id}"),
                loc,
            });
            ids.push(id);
        }
        layers.push(ids);
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for pair in layers.windows(2) {
        let (from, to) = (&pair[0], &pair[1]);
        for &u in from {
            edges.push((u, *to.choose(rng).expect("non-empty layer")));
        }
        for &v in to {
            if !edges.iter().any(|&(_, w)| w == v) {
                edges.push((*from.choose(rng).expect("non-empty layer"), v));
            }
        }
        for &u in from {
            for &v in to {
                if edges.len() < shape.max_edges && rng.gen_bool(0.25) && !edges.contains(&(u, v)) {
                    edges.push((u, v));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let name = |i: usize| format!("n{i}");
    ForwardingGraph {
        nodes,
        edges: edges.into_iter().map(|(u, v)| (name(u), name(v))).collect(),
        sources: layers[0].iter().map(|&i| name(i)).collect(),
        sinks: layers[layers_n - 1].iter().map(|&i| name(i)).collect(),
    }
}

/// A FEC whose pre and post graphs are the same random DAG.
pub fn unchanged_fec<R: Rng>(id: &str, db: &LocationDb, shape: DagShape, rng: &mut R) -> Fec {
    let g = random_dag(db, shape, rng);
    let ingress = g.nodes[0].loc.clone();
    Fec {
        id: id.to_string(),
        traffic: Traffic {
            dst_prefix: format!("10.{}.{}.0/24", rng.gen_range(0..256), rng.gen_range(0..256)),
            src_prefix: None,
            ingress,
        },
        pre: g.clone(),
        post: g,
    }
}

/// Adds one edge from a non-sink node to a new sink, choosing the node
/// so that the path set at `granularity` changes. Returns false if no node
/// qualifies.
pub fn mutate_one_edge<R: Rng>(
    g: &mut ForwardingGraph,
    db: &LocationDb,
    granularity: Granularity,
    table: &SymbolTable,
    rng: &mut R,
) -> bool {
    let before = project_to_fsa(g, db, granularity, table).expect("valid graph");
    let mut candidates: Vec<usize> = (0..g.nodes.len())
        .filter(|&i| !g.sinks.contains(&g.nodes[i].id))
        .collect();
    candidates.shuffle(rng);
    let new_id = format!("n{}", g.nodes.len());
    // Location sinks first, so the new path stays inside `.*`; drop only
    // when no location changes the path set.
    let mut targets: Vec<String> = (0..4)
        .map(|_| db.records()[rng.gen_range(0..db.len())].name.clone())
        .collect();
    targets.push(DROP_NAME.to_string());
    for loc in targets {
        for &i in &candidates {
            let mut h = g.clone();
            h.nodes.push(Node {
                id: new_id.clone(),
                loc: loc.clone(),
            });
            h.edges.push((g.nodes[i].id.clone(), new_id.clone()));
            h.sinks.push(new_id.clone());
            let after = project_to_fsa(&h, db, granularity, table).expect("valid graph");
            if !after.equivalent(&before) {
                *g = h;
                return true;
            }
        }
    }
    false
}

/// A five-arm `else` chain over groups of a synthetic database, one arm per
/// modifier kind plus a catch-all.
pub fn scale_spec() -> String {
    let g = |k: usize| format!("where(group==\"{}\")", group_name(k));
    format!(
        "spec keepCore := {{ {} .* : preserve; }}\n\
         spec retire := {{ .* {} : remove(.* {} {}); }}\n\
         spec blackhole := {{ {} .* : drop; }}\n\
         spec shift := {{ {} .* : any({} .*); }}\n\
         spec rest := {{ .* : preserve; }}\n\
         spec all := keepCore else retire else blackhole else shift else rest\n",
        g(1),
        g(2),
        g(2),
        g(2),
        g(3),
        g(4),
        g(5),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dags_respect_limits_and_validate() {
        let db = synthetic_db(DbShape::default());
        assert_eq!(db.len(), 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = random_dag(&db, DagShape::default(), &mut rng);
            assert!(g.nodes.len() <= 50 && g.edges.len() <= 200);
            g.validate(Some(&db)).unwrap();
        }
    }

    #[test]
    fn mutation_changes_paths() {
        let db = synthetic_db(DbShape::default());
        let table = db.symbol_table(Granularity::Device);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = random_dag(&db, DagShape::default(), &mut rng);
            let before = g.clone();
            assert!(mutate_one_edge(&mut g, &db, Granularity::Device, &table, &mut rng));
            g.validate(Some(&db)).unwrap();
            assert_eq!(g.edges.len(), before.edges.len() + 1);
        }
    }
}
