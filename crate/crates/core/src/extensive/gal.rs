//! Compilation of games into GAL structures and the equilibrium formulas.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::game::{ExtensiveGame, GameError, GameViolation, Profile, Strategy};
use crate::logic::{Formula, FuncId, PredId, Signature, Term, Var};
use crate::scalar::Scalar;
use crate::structure::{Elem, GalStructure, InterpError, Interpretation, Memoized, StateDecl, StateId, StructureParts, Valuation};

pub const HISTORY_SORT: &str = "H";
pub const TERMINAL_SORT: &str = "T";
pub const UTILITY_SORT: &str = "U";

pub fn strategy_sort(player: &str) -> String {
    format!("S{player}")
}

pub fn utility_fn(player: &str) -> String {
    format!("u{player}")
}

/// Free variable standing for the profile's strategy of `player`.
pub fn profile_var(player: &str) -> Var {
    Var::new(format!("v{player}"), strategy_sort(player))
}

/// Bound variable ranging over deviations of `player`.
pub fn deviation_var(player: &str) -> Var {
    Var::new(format!("w{player}"), strategy_sort(player))
}

struct GameInterp<U> {
    game: Arc<ExtensiveGame<U>>,
    strategies: Vec<Vec<Strategy>>,
    /// Index into sort T of each node, for terminals.
    terminal_ix: Vec<u32>,
    terminals: Vec<usize>,
    /// Index into sort U of each player's utility, per terminal.
    utility_ix: Vec<Vec<u32>>,
    sorts: Sorts,
    h: FuncId,
    u: Vec<FuncId>,
    o: FuncId,
    oh: FuncId,
    geq: PredId,
    onpath: PredId,
}

#[derive(Clone, Copy)]
struct Sorts {
    h: crate::logic::SortId,
    t: crate::logic::SortId,
    u: crate::logic::SortId,
}

impl<U: Scalar> GameInterp<U> {
    fn outcome(&self, from: usize, strategies: &[Elem]) -> Elem {
        let t = self.game.follow(from, |i| &self.strategies[i][strategies[i].index as usize]);
        Elem::new(self.sorts.t, self.terminal_ix[t])
    }
}

impl<U: Scalar> Interpretation for GameInterp<U> {
    fn function(&self, f: FuncId, state: StateId, args: &[Elem]) -> Result<Elem, InterpError> {
        if f == self.h {
            Ok(Elem::new(self.sorts.h, state.0))
        } else if f == self.o {
            Ok(self.outcome(0, args))
        } else if f == self.oh {
            Ok(self.outcome(args[0].index as usize, &args[1..]))
        } else if let Some(i) = self.u.iter().position(|&g| g == f) {
            Ok(Elem::new(self.sorts.u, self.utility_ix[args[0].index as usize][i]))
        } else {
            Err(InterpError::Failed(format!("no function #{}", f.0)))
        }
    }

    fn predicate(&self, p: PredId, _state: StateId, args: &[Elem]) -> Result<bool, InterpError> {
        if p == self.geq {
            Ok(args[0].index >= args[1].index)
        } else if p == self.onpath {
            Ok(self.game.is_prefix(args[0].index as usize, self.terminals[args[1].index as usize]))
        } else {
            Err(InterpError::Failed(format!("no predicate #{}", p.0)))
        }
    }
}

/// The signature used for `game`'s structure.
pub fn game_signature<U: Scalar>(game: &ExtensiveGame<U>) -> Result<Signature, crate::logic::SignatureError> {
    let sorts: Vec<String> = game.players().iter().map(|p| strategy_sort(p)).collect();
    let strat_args: Vec<&str> = sorts.iter().map(String::as_str).collect();
    let mut with_h = vec![HISTORY_SORT];
    with_h.extend(&strat_args);
    let mut b = Signature::builder()
        .sort(HISTORY_SORT)
        .sort(TERMINAL_SORT)
        .sort(UTILITY_SORT);
    for s in &sorts {
        b = b.sort(s);
    }
    b = b.function("h", &[], HISTORY_SORT, false);
    for p in game.players() {
        b = b.function(utility_fn(p), &[TERMINAL_SORT], UTILITY_SORT, true);
    }
    b = b
        .function("O", &strat_args, TERMINAL_SORT, true)
        .function("Oh", &with_h, TERMINAL_SORT, true)
        .predicate("geq", &[UTILITY_SORT, UTILITY_SORT], true)
        .predicate("onpath", &[HISTORY_SORT, TERMINAL_SORT], true);
    for p in game.players() {
        b = b.player(p);
    }
    b.build()
}

/// The GAL structure whose states are the histories of `game`.
pub fn to_gal_structure<U: Scalar>(game: &ExtensiveGame<U>) -> Result<GalStructure, GameError> {
    game.ensure_valid()?;
    let sig = game_signature(game).map_err(|e| GameError::Invalid(vec![GameViolation::NameClash(e.to_string())]))?;
    let n = game.history_count();
    let mut parts = StructureParts { sig: sig.clone(), ..Default::default() };
    for h in 0..n {
        let node = game.node(h);
        let players: Vec<&str> = match (&node.to_move, node.is_terminal()) {
            (Some(p), false) => vec![p.as_str()],
            _ => vec![],
        };
        parts.states.push(StateDecl::new(game.history_label(h), &players));
        for &c in &node.children {
            parts.actions.push((game.history_label(h), game.history_label(c)));
        }
    }
    parts.initial.push(game.history_label(0));

    let terminals: Vec<usize> = game.terminals().collect();
    let mut terminal_ix = vec![u32::MAX; n];
    for (k, &t) in terminals.iter().enumerate() {
        terminal_ix[t] = k as u32;
    }
    let values = game.utility_values();
    let utility_ix: Vec<Vec<u32>> = terminals
        .iter()
        .map(|&t| {
            (0..game.players().len())
                .map(|i| values.iter().position(|v| v == game.utility(i, t)).expect("utility listed") as u32)
                .collect()
        })
        .collect();
    let strategies: Vec<Vec<Strategy>> = (0..game.players().len()).map(|i| game.strategies_of(i)).collect();

    let mut domains = BTreeMap::new();
    domains.insert(HISTORY_SORT.to_string(), (0..n).map(|h| game.history_label(h)).collect());
    domains.insert(TERMINAL_SORT.to_string(), terminals.iter().map(|&t| game.history_label(t)).collect());
    domains.insert(UTILITY_SORT.to_string(), values.iter().map(|v| v.to_string()).collect());
    for (p, ss) in game.players().iter().zip(&strategies) {
        domains.insert(strategy_sort(p), ss.iter().map(|s| game.strategy_label(s)).collect());
    }
    parts.domains = domains;

    let sort = |name: &str| sig.sort_id(name).expect("declared sort");
    let interp = GameInterp {
        game: Arc::new(game.clone()),
        strategies,
        terminal_ix,
        terminals,
        utility_ix,
        sorts: Sorts { h: sort(HISTORY_SORT), t: sort(TERMINAL_SORT), u: sort(UTILITY_SORT) },
        h: sig.function_id("h").expect("declared"),
        u: game.players().iter().map(|p| sig.function_id(&utility_fn(p)).expect("declared")).collect(),
        o: sig.function_id("O").expect("declared"),
        oh: sig.function_id("Oh").expect("declared"),
        geq: sig.predicate_id("geq").expect("declared"),
        onpath: sig.predicate_id("onpath").expect("declared"),
    };
    Ok(GalStructure::new(parts, Arc::new(Memoized::new(interp, &sig))))
}

/// `⋀_i (@i → ∀w_i geq(u_i(Oh(h, v)), u_i(Oh(h, v[i←w_i]))))`
fn best_response_body<U: Scalar>(game: &ExtensiveGame<U>) -> Formula {
    let players = game.players();
    let profile: Vec<Term> = players.iter().map(|p| Term::Var(profile_var(p))).collect();
    let at_h = |args: Vec<Term>| {
        let mut all = vec![Term::constant("h")];
        all.extend(args);
        Term::app("Oh", all)
    };
    Formula::conjunction(players.iter().enumerate().map(|(i, p)| {
        let w = deviation_var(p);
        let mut deviated = profile.clone();
        deviated[i] = Term::Var(w.clone());
        let u = utility_fn(p);
        let keep = Term::app(&u, vec![at_h(profile.clone())]);
        let switch = Term::app(&u, vec![at_h(deviated)]);
        Formula::player(p).implies(Formula::forall(w, Formula::pred("geq", vec![keep, switch])))
    }))
}

/// Holds at the root iff the profile bound to the `v` variables is subgame perfect.
pub fn spe_formula<U: Scalar>(game: &ExtensiveGame<U>) -> Formula {
    best_response_body(game).ag()
}

/// Holds at the root iff the profile bound to the `v` variables is a Nash equilibrium.
pub fn ne_formula<U: Scalar>(game: &ExtensiveGame<U>) -> Formula {
    let profile: Vec<Term> = game.players().iter().map(|p| Term::Var(profile_var(p))).collect();
    let on_path = Formula::pred("onpath", vec![Term::constant("h"), Term::app("O", profile)]);
    on_path.and(best_response_body(game)).eg()
}

/// Binds each player's profile variable to its strategy in `p`.
pub fn profile_valuation<U: Scalar>(game: &ExtensiveGame<U>, p: &Profile) -> Valuation {
    let mut v = Valuation::new();
    for (i, s) in p.0.iter().enumerate() {
        let player = &game.players()[i];
        // sort ids follow declaration order: H, T, U, then one per player
        let sort = crate::logic::SortId(3 + i as u32);
        v.bind(profile_var(player), Elem::new(sort, game.strategy_index(s) as u32));
    }
    v
}
