//! Game trees, histories, strategies and outcomes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::logic::is_identifier;
use crate::scalar::Scalar;
use crate::structure::tuples;

/// Input form of a game tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Tree<U> {
    Move { player: Option<String>, moves: Vec<(String, Tree<U>)> },
    Leaf(BTreeMap<String, U>),
}

impl<U> Tree<U> {
    pub fn node(player: &str, moves: Vec<(&str, Tree<U>)>) -> Self {
        Tree::Move {
            player: Some(player.to_string()),
            moves: moves.into_iter().map(|(a, t)| (a.to_string(), t)).collect(),
        }
    }

    pub fn leaf(utilities: Vec<(&str, U)>) -> Self {
        Tree::Leaf(utilities.into_iter().map(|(p, u)| (p.to_string(), u)).collect())
    }
}

/// One history of the game, stored in preorder.
#[derive(Debug, Clone, PartialEq)]
pub struct GameNode<U> {
    pub parent: Option<usize>,
    /// Action leading here from the parent.
    pub action: Option<String>,
    pub to_move: Option<String>,
    /// Children sorted by action label.
    pub children: Vec<usize>,
    pub utilities: BTreeMap<String, U>,
    pub depth: usize,
}

impl<U> GameNode<U> {
    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameViolation {
    BadPlayerId(String),
    MissingMover(String),
    DuplicatePlayer(String),
    UnknownMover { history: String, player: String },
    NoMoves(String),
    MissingUtility { history: String, player: String },
    UnknownUtilityOwner { history: String, player: String },
    DuplicateAction { history: String, action: String },
    BadActionLabel(String),
    NameClash(String),
}

impl fmt::Display for GameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameViolation::BadPlayerId(p) => write!(f, "player id `{p}` is not an identifier"),
            GameViolation::DuplicatePlayer(p) => write!(f, "player `{p}` is listed twice"),
            GameViolation::UnknownMover { history, player } => {
                write!(f, "history {history} is assigned to unknown player `{player}`")
            }
            GameViolation::MissingMover(h) => write!(f, "decision history {h} has no player to move"),
            GameViolation::NoMoves(h) => write!(f, "decision history {h} has no moves"),
            GameViolation::MissingUtility { history, player } => {
                write!(f, "terminal history {history} has no utility for player `{player}`")
            }
            GameViolation::UnknownUtilityOwner { history, player } => {
                write!(f, "terminal history {history} has a utility for unknown player `{player}`")
            }
            GameViolation::DuplicateAction { history, action } => {
                write!(f, "action `{action}` appears twice at history {history}")
            }
            GameViolation::NameClash(m) => write!(f, "player ids clash with structure symbols: {m}"),
            GameViolation::BadActionLabel(a) => {
                write!(f, "action label `{a}` must be nonempty and free of `,`, `(` and `)`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<GameViolation>),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown history `{0}`")]
    UnknownHistory(String),
    #[error("{0} strategy profiles exceed the enumeration limit")]
    TooManyProfiles(u128),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
}

/// A pure strategy: one action per decision history of its owner.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    pub owner: usize,
    /// Child position chosen at each of the owner's decision histories, in preorder.
    pub choices: Vec<u32>,
}

/// One strategy per player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<Strategy>);

/// An extensive game with perfect information.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensiveGame<U> {
    players: Vec<String>,
    nodes: Vec<GameNode<U>>,
    /// For each node, its owner's index and its position among the owner's decision histories.
    decision_slot: Vec<Option<(usize, usize)>>,
    decisions: Vec<Vec<usize>>,
}

impl<U: Scalar> ExtensiveGame<U> {
    pub fn new(players: Vec<String>, root: Tree<U>) -> Self {
        let mut nodes = Vec::new();
        flatten(root, None, None, 0, &mut nodes);
        let mut decisions = vec![Vec::new(); players.len()];
        let mut decision_slot = vec![None; nodes.len()];
        for (ix, n) in nodes.iter().enumerate() {
            if n.is_terminal() {
                continue;
            }
            let owner = n.to_move.as_ref().and_then(|p| players.iter().position(|q| q == p));
            if let Some(i) = owner {
                decision_slot[ix] = Some((i, decisions[i].len()));
                decisions[i].push(ix);
            }
        }
        ExtensiveGame { players, nodes, decision_slot, decisions }
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_index(&self, id: &str) -> Option<usize> {
        self.players.iter().position(|p| p == id)
    }

    pub fn nodes(&self) -> &[GameNode<U>] {
        &self.nodes
    }

    pub fn node(&self, h: usize) -> &GameNode<U> {
        &self.nodes[h]
    }

    pub fn history_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&h| self.nodes[h].is_terminal())
    }

    /// The action sequence of a history.
    pub fn history(&self, mut h: usize) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.nodes[h].depth);
        while let Some(p) = self.nodes[h].parent {
            out.push(self.nodes[h].action.as_deref().unwrap_or(""));
            h = p;
        }
        out.reverse();
        out
    }

    /// `∅` for the root, `(a1,...,ak)` otherwise.
    pub fn history_label(&self, h: usize) -> String {
        if h == 0 {
            "∅".to_string()
        } else {
            format!("({})", self.history(h).join(","))
        }
    }

    pub fn find_history(&self, actions: &[&str]) -> Option<usize> {
        let mut h = 0;
        for a in actions {
            h = *self.nodes[h]
                .children
                .iter()
                .find(|&&c| self.nodes[c].action.as_deref() == Some(*a))?;
        }
        Some(h)
    }

    pub fn find_history_label(&self, label: &str) -> Option<usize> {
        if label == "∅" || label == "()" {
            return Some(0);
        }
        let inner = label.strip_prefix('(')?.strip_suffix(')')?;
        self.find_history(&inner.split(',').collect::<Vec<_>>())
    }

    /// Whether history `a` is a prefix of history `b`.
    pub fn is_prefix(&self, a: usize, mut b: usize) -> bool {
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.expect("non-root node has a parent");
        }
        a == b
    }

    pub fn validate(&self) -> Vec<GameViolation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for p in &self.players {
            if !is_identifier(p) {
                out.push(GameViolation::BadPlayerId(p.clone()));
            }
            if !seen.insert(p) {
                out.push(GameViolation::DuplicatePlayer(p.clone()));
            }
        }
        if out.is_empty() {
            if let Err(e) = super::gal::game_signature(self) {
                out.push(GameViolation::NameClash(e.to_string()));
            }
        }
        for (h, n) in self.nodes.iter().enumerate() {
            if let Some(a) = &n.action {
                if a.is_empty() || a.contains([',', '(', ')']) {
                    out.push(GameViolation::BadActionLabel(a.clone()));
                }
            }
            match &n.to_move {
                Some(p) => {
                    if self.player_index(p).is_none() {
                        out.push(GameViolation::UnknownMover { history: self.history_label(h), player: p.clone() });
                    }
                    if n.is_terminal() {
                        out.push(GameViolation::NoMoves(self.history_label(h)));
                    }
                    for w in n.children.windows(2) {
                        let (a, b) = (&self.nodes[w[0]].action, &self.nodes[w[1]].action);
                        if a == b {
                            out.push(GameViolation::DuplicateAction {
                                history: self.history_label(h),
                                action: a.clone().unwrap_or_default(),
                            });
                        }
                    }
                }
                None if !n.is_terminal() => out.push(GameViolation::MissingMover(self.history_label(h))),
                None => {
                    for p in &self.players {
                        if !n.utilities.contains_key(p) {
                            out.push(GameViolation::MissingUtility { history: self.history_label(h), player: p.clone() });
                        }
                    }
                    for p in n.utilities.keys() {
                        if self.player_index(p).is_none() {
                            out.push(GameViolation::UnknownUtilityOwner {
                                history: self.history_label(h),
                                player: p.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn ensure_valid(&self) -> Result<(), GameError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GameError::Invalid(v))
        }
    }

    pub fn utility(&self, player: usize, terminal: usize) -> &U {
        &self.nodes[terminal].utilities[&self.players[player]]
    }

    /// Decision histories of player `i`, in preorder.
    pub fn decision_histories(&self, i: usize) -> &[usize] {
        &self.decisions[i]
    }

    pub fn strategy_count(&self, i: usize) -> u128 {
        self.decisions[i]
            .iter()
            .map(|&h| self.nodes[h].children.len() as u128)
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX)
    }

    pub fn profile_count(&self) -> u128 {
        (0..self.players.len())
            .map(|i| self.strategy_count(i))
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX)
    }

    /// All strategies of the player with id `id`.
    pub fn strategies(&self, id: &str) -> Result<Vec<Strategy>, GameError> {
        let i = self.player_index(id).ok_or_else(|| GameError::UnknownPlayer(id.to_string()))?;
        Ok(self.strategies_of(i))
    }

    /// All strategies of player `i`, first decision history most significant.
    pub fn strategies_of(&self, i: usize) -> Vec<Strategy> {
        let sizes = self.choice_sizes(i);
        tuples(&sizes).map(|choices| Strategy { owner: i, choices }).collect()
    }

    fn choice_sizes(&self, i: usize) -> Vec<u32> {
        self.decisions[i].iter().map(|&h| self.nodes[h].children.len() as u32).collect()
    }

    /// Position of `s` in [`Self::strategies_of`].
    pub fn strategy_index(&self, s: &Strategy) -> usize {
        self.choice_sizes(s.owner)
            .iter()
            .zip(&s.choices)
            .fold(0usize, |acc, (&k, &c)| acc * k as usize + c as usize)
    }

    pub fn strategy_at(&self, i: usize, mut index: usize) -> Strategy {
        let sizes = self.choice_sizes(i);
        let mut choices = vec![0; sizes.len()];
        for (c, &k) in choices.iter_mut().zip(&sizes).rev() {
            *c = (index % k as usize) as u32;
            index /= k as usize;
        }
        Strategy { owner: i, choices }
    }

    /// The `index`-th profile, first player most significant.
    pub fn profile_at(&self, mut index: usize) -> Profile {
        let counts: Vec<usize> = (0..self.players.len()).map(|i| self.strategy_count(i) as usize).collect();
        let mut parts = vec![0; counts.len()];
        for (p, &k) in parts.iter_mut().zip(&counts).rev() {
            *p = index % k;
            index /= k;
        }
        Profile(parts.into_iter().enumerate().map(|(i, s)| self.strategy_at(i, s)).collect())
    }

    /// `⟨a1,...,ak⟩`, the chosen actions in decision-history order.
    pub fn strategy_label(&self, s: &Strategy) -> String {
        let actions: Vec<&str> = self.decisions[s.owner]
            .iter()
            .zip(&s.choices)
            .map(|(&h, &c)| self.nodes[self.nodes[h].children[c as usize]].action.as_deref().unwrap_or(""))
            .collect();
        format!("⟨{}⟩", actions.join(","))
    }

    pub fn profile_label(&self, p: &Profile) -> String {
        let parts: Vec<String> = p.0.iter().map(|s| self.strategy_label(s)).collect();
        format!("⟨{}⟩", parts.join(","))
    }

    pub fn outcome(&self, p: &Profile) -> usize {
        self.outcome_from(0, p)
    }

    /// The terminal history reached by following `p` from `h`.
    pub fn outcome_from(&self, h: usize, p: &Profile) -> usize {
        self.follow(h, |i| &p.0[i])
    }

    pub(crate) fn follow<'s>(&self, mut h: usize, strategy: impl Fn(usize) -> &'s Strategy) -> usize {
        while !self.nodes[h].is_terminal() {
            let (i, k) = self.decision_slot[h].expect("decision history of a known player");
            h = self.nodes[h].children[strategy(i).choices[k] as usize];
        }
        h
    }

    /// Distinct utility values, ascending.
    pub fn utility_values(&self) -> Vec<U> {
        let mut vals: Vec<U> = Vec::new();
        for t in self.terminals() {
            for u in self.nodes[t].utilities.values() {
                if !vals.contains(u) {
                    vals.push(u.clone());
                }
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        vals
    }
}

fn flatten<U>(tree: Tree<U>, parent: Option<usize>, action: Option<String>, depth: usize, nodes: &mut Vec<GameNode<U>>) -> usize {
    let ix = nodes.len();
    match tree {
        Tree::Leaf(utilities) => {
            nodes.push(GameNode { parent, action, to_move: None, children: Vec::new(), utilities, depth });
        }
        Tree::Move { player, mut moves } => {
            nodes.push(GameNode {
                parent,
                action,
                to_move: player,
                children: Vec::new(),
                utilities: BTreeMap::new(),
                depth,
            });
            moves.sort_by(|a, b| a.0.cmp(&b.0));
            let children = moves
                .into_iter()
                .map(|(a, t)| flatten(t, Some(ix), Some(a), depth + 1, nodes))
                .collect();
            nodes[ix].children = children;
        }
    }
    ix
}
