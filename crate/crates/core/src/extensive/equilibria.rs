//! Equilibrium enumeration, by model checking and by direct evaluation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::gal::{ne_formula, profile_valuation, spe_formula, to_gal_structure};
use super::game::{ExtensiveGame, GameError, Profile, Strategy};
use crate::checker::Checker;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Concept {
    Nash,
    SubgamePerfect,
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Nash => "ne",
            Concept::SubgamePerfect => "spe",
        })
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ne" | "nash" => Ok(Concept::Nash),
            "spe" => Ok(Concept::SubgamePerfect),
            other => Err(format!("unknown equilibrium concept `{other}` (expected ne or spe)")),
        }
    }
}

fn profile_total<U: Scalar>(game: &ExtensiveGame<U>) -> Result<usize, GameError> {
    let n = game.profile_count();
    usize::try_from(n).map_err(|_| GameError::TooManyProfiles(n))
}

/// Profiles whose equilibrium formula holds at the root, in profile order.
pub fn enumerate_equilibria<U: Scalar>(game: &ExtensiveGame<U>, concept: Concept) -> Result<Vec<Profile>, GameError> {
    let total = profile_total(game)?;
    let g = to_gal_structure(game)?;
    let checker = Checker::new(&g)?;
    let formula = match concept {
        Concept::Nash => ne_formula(game),
        Concept::SubgamePerfect => spe_formula(game),
    };
    let root = g.initial()[0];
    let hits: Vec<Option<Profile>> = (0..total)
        .into_par_iter()
        .map(|k| {
            let p = game.profile_at(k);
            let sat = checker.check(&formula, &profile_valuation(game, &p))?;
            Ok(sat.contains(root).then_some(p))
        })
        .collect::<Result<_, GameError>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Whether no player gains by deviating at any of `histories` they move at.
fn no_profitable_deviation<U: Scalar>(
    game: &ExtensiveGame<U>,
    p: &Profile,
    deviations: &[Vec<Strategy>],
    on_path_only: bool,
) -> bool {
    let outcome = game.outcome(p);
    for (i, alternatives) in deviations.iter().enumerate() {
        for &h in game.decision_histories(i) {
            if on_path_only && !game.is_prefix(h, outcome) {
                continue;
            }
            let kept = game.utility(i, game.outcome_from(h, p));
            for s in alternatives {
                let t = game.follow(h, |j| if j == i { s } else { &p.0[j] });
                if game.utility(i, t) > kept {
                    return false;
                }
            }
        }
    }
    true
}

/// Equilibria computed straight from their game-theoretic definitions.
pub fn oracle_equilibria<U: Scalar>(game: &ExtensiveGame<U>, concept: Concept) -> Result<Vec<Profile>, GameError> {
    game.ensure_valid()?;
    let total = profile_total(game)?;
    let deviations: Vec<Vec<Strategy>> = (0..game.players().len()).map(|i| game.strategies_of(i)).collect();
    let on_path_only = concept == Concept::Nash;
    Ok((0..total)
        .map(|k| game.profile_at(k))
        .filter(|p| no_profitable_deviation(game, p, &deviations, on_path_only))
        .collect())
}

/// Backward induction with ties resolved towards the first action.
pub fn backward_induction<U: Scalar>(game: &ExtensiveGame<U>) -> Result<Profile, GameError> {
    game.ensure_valid()?;
    let n = game.history_count();
    let mut best_child = vec![0u32; n];
    let mut outcome = vec![0usize; n];
    for h in (0..n).rev() {
        let node = game.node(h);
        if node.is_terminal() {
            outcome[h] = h;
            continue;
        }
        let i = game.player_index(node.to_move.as_deref().unwrap_or_default()).expect("validated mover");
        let mut best = 0;
        for (k, &c) in node.children.iter().enumerate().skip(1) {
            if game.utility(i, outcome[c]) > game.utility(i, outcome[node.children[best]]) {
                best = k;
            }
        }
        best_child[h] = best as u32;
        outcome[h] = outcome[node.children[best]];
    }
    Ok(Profile(
        (0..game.players().len())
            .map(|i| Strategy { owner: i, choices: game.decision_histories(i).iter().map(|&h| best_child[h]).collect() })
            .collect(),
    ))
}
