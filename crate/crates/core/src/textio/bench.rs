use serde::Serialize;

/// One timed run of pure-equilibrium enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub experiment: String,
    pub m: usize,
    pub n: usize,
    pub payoff_bound: u64,
    pub seed: u64,
    pub equilibria: usize,
    pub millis: f64,
}

pub const BENCH_COLUMNS: [&str; 7] = ["experiment", "m", "n", "payoff_bound", "seed", "equilibria", "millis"];

/// Header line plus one row per record, in input order.
pub fn write_bench_csv(records: &[BenchRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(BENCH_COLUMNS).expect("writing to memory");
    for r in records {
        w.serialize(r).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}
