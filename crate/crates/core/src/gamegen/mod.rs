//! Experiment inputs: Tic-Tac-Toe transition systems and random bimatrix games.

mod bench;
mod bimatrix;
mod tictactoe;

pub use bench::{bench_random_2p, size_ratios, time_pure_ne, BenchConfig};
pub use bimatrix::{pure_ne, random_bimatrix, Bimatrix, GENERATOR};
pub use tictactoe::{
    minimax_value, policy_actions, tictactoe_structure, Affine, Board, BoardError, Evaluator, ExactScoring, Finish,
    OpenLines, Outcome, Policy, Side,
};
