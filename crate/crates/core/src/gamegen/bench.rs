//! Timing of pure-equilibrium enumeration on random and constant games.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use super::bimatrix::{pure_ne, random_bimatrix, Bimatrix};
use crate::textio::BenchRecord;

/// Each timing repeats the enumeration until at least this much time has passed.
const MIN_SAMPLE: Duration = Duration::from_millis(2);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    /// Square game sizes `m = n`.
    pub sizes: RangeInclusive<usize>,
    pub trials: usize,
    /// Exclusive payoff bound; 0 selects the constant-payoff family.
    pub bound: u64,
    pub seed: u64,
}

/// Mean milliseconds per call of [`pure_ne`], and its result.
pub fn time_pure_ne(b: &Bimatrix) -> (f64, usize) {
    let start = Instant::now();
    let mut runs = 0u32;
    let mut found = 0;
    while runs == 0 || start.elapsed() < MIN_SAMPLE {
        found = std::hint::black_box(pure_ne(std::hint::black_box(b))).len();
        runs += 1;
    }
    (start.elapsed().as_secs_f64() * 1e3 / runs as f64, found)
}

/// One record per size and trial; trial `t` uses seed `seed + t`.
pub fn bench_random_2p(cfg: &BenchConfig) -> Vec<BenchRecord> {
    let (experiment, bound) = if cfg.bound == 0 { ("constant-2p", 1) } else { ("random-2p", cfg.bound) };
    let mut out = Vec::new();
    for size in cfg.sizes.clone() {
        for t in 0..cfg.trials {
            let seed = cfg.seed.wrapping_add(t as u64);
            let game = random_bimatrix(size, size, bound, seed);
            let (millis, equilibria) = time_pure_ne(&game);
            out.push(BenchRecord {
                experiment: experiment.to_string(),
                m: size,
                n: size,
                payoff_bound: bound,
                seed,
                equilibria,
                millis,
            });
        }
    }
    out
}

/// Mean millis of `numerator` over mean millis of `denominator`, per size `m`.
pub fn size_ratios(numerator: &[BenchRecord], denominator: &[BenchRecord]) -> BTreeMap<usize, f64> {
    let mean = |rs: &[BenchRecord]| {
        let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for r in rs {
            let e = acc.entry(r.m).or_default();
            e.0 += r.millis;
            e.1 += 1;
        }
        acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect::<BTreeMap<_, _>>()
    };
    let (a, b) = (mean(numerator), mean(denominator));
    a.iter()
        .filter_map(|(k, x)| b.get(k).filter(|y| **y > 0.0).map(|y| (*k, x / y)))
        .collect()
}
