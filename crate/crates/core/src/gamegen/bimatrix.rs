//! Random two-player strategic games and their pure equilibria.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Name of the payoff generator: ChaCha8 seeded with `seed_from_u64`, each
/// payoff is the next `u64` reduced modulo the bound, cells in row-major
/// order, `u1` before `u2` within a cell.
pub const GENERATOR: &str = "chacha8-mod/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bimatrix {
    pub m: usize,
    pub n: usize,
    pub u1: Vec<Vec<i64>>,
    pub u2: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Bimatrix {
    pub fn new(u1: Vec<Vec<i64>>, u2: Vec<Vec<i64>>) -> Self {
        let m = u1.len();
        let n = u1.first().map_or(0, Vec::len);
        Bimatrix { m, n, u1, u2, seed: None }
    }

    /// Whether both tables are `m × n`.
    pub fn is_well_formed(&self) -> bool {
        let ok = |t: &Vec<Vec<i64>>| t.len() == self.m && t.iter().all(|r| r.len() == self.n);
        self.m >= 1 && self.n >= 1 && ok(&self.u1) && ok(&self.u2)
    }
}

/// Payoffs drawn from `[0, bound)`; a bound of 1 gives the all-zero game.
pub fn random_bimatrix(m: usize, n: usize, bound: u64, seed: u64) -> Bimatrix {
    let bound = bound.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u1 = vec![vec![0; n]; m];
    let mut u2 = vec![vec![0; n]; m];
    for r in 0..m {
        for c in 0..n {
            u1[r][c] = (rng.next_u64() % bound) as i64;
            u2[r][c] = (rng.next_u64() % bound) as i64;
        }
    }
    Bimatrix { m, n, u1, u2, seed: Some(seed) }
}

/// Cells where each player's action is a best response to the other's, row-major.
pub fn pure_ne(b: &Bimatrix) -> Vec<(usize, usize)> {
    let col_best: Vec<i64> = (0..b.n).map(|c| (0..b.m).map(|r| b.u1[r][c]).max().unwrap_or(0)).collect();
    let row_best: Vec<i64> = b.u2.iter().map(|row| row.iter().copied().max().unwrap_or(0)).collect();
    let mut out = Vec::new();
    for r in 0..b.m {
        for c in 0..b.n {
            if b.u1[r][c] == col_best[c] && b.u2[r][c] == row_best[r] {
                out.push((r, c));
            }
        }
    }
    out
}
