//! Shared workloads for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rela_core::checker::CompiledProgram;
use rela_core::frontend::{parse_program, LocationDb};
use rela_core::snapshot::{Fec, Granularity};
use rela_core::synth::{mutate_one_edge, scale_spec, synthetic_db, unchanged_fec, DagShape, DbShape};

pub struct Workload {
    pub db: LocationDb,
    pub program: CompiledProgram,
    pub fecs: Vec<Fec>,
}

/// `n` random FECs over a 1,000-location database, every tenth one with a
/// changed post graph, checked against the five-arm synthetic spec.
pub fn workload(n: usize, granularity: Granularity, seed: u64) -> Workload {
    let db = synthetic_db(DbShape::default());
    let program = parse_program(&scale_spec(), &db, granularity).expect("synthetic spec parses");
    let program = CompiledProgram::new(&program, granularity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fecs = (0..n)
        .map(|i| {
            let mut fec = unchanged_fec(&format!("f{i:05}"), &db, DagShape::default(), &mut rng);
            if i % 10 == 0 {
                mutate_one_edge(&mut fec.post, &db, granularity, &program.table, &mut rng);
            }
            fec
        })
        .collect();
    Workload { db, program, fecs }
}
