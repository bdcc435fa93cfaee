//! Explicit-state model checking for Game Analysis Logic, a many-sorted
//! first-order CTL whose states carry their own interpretations, together
//! with an extensive-game frontend that finds Nash and subgame-perfect
//! equilibria by checking equilibrium formulas.

pub mod logic;
pub mod structure;
pub mod checker;
pub mod cli;
pub mod extensive;
pub mod gamegen;
pub mod scalar;
pub mod textio;

pub use scalar::{Rational, Scalar};

/// Extensive game with exact rational utilities.
pub type Game = extensive::ExtensiveGame<Rational>;
