//! Tic-Tac-Toe positions, policies and the transition systems they induce.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{PredId, Signature};
use crate::scalar::{Rational, Scalar};
use crate::structure::{Elem, GalStructure, InterpError, Interpretation, StateDecl, StateId, StructureParts};

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    X,
    O,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::O,
            Side::O => Side::X,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Side::X => "X",
            Side::O => "O",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win(Side),
    Draw,
}

/// Result of a finished game from one side's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finish {
    Win,
    Draw,
    Loss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Board {
    cells: [Option<Side>; 9],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("board `{0}` must be nine characters from `X`, `O`, `.`")]
    Malformed(String),
    #[error("board `{0}` cannot arise in play")]
    Unreachable(String),
    #[error("cell {0} is not a legal move")]
    IllegalMove(usize),
    #[error("the game is already over")]
    Terminal,
}

impl Board {
    pub fn empty() -> Self {
        Board::default()
    }

    pub fn cell(&self, i: usize) -> Option<Side> {
        self.cells[i]
    }

    pub fn count(&self, side: Side) -> usize {
        self.cells.iter().filter(|c| **c == Some(side)).count()
    }

    /// X moves first, so X is to move whenever the counts are equal.
    pub fn mover(&self) -> Side {
        if self.count(Side::X) == self.count(Side::O) {
            Side::X
        } else {
            Side::O
        }
    }

    pub fn has_line(&self, side: Side) -> bool {
        LINES.iter().any(|l| l.iter().all(|&i| self.cells[i] == Some(side)))
    }

    pub fn outcome(&self) -> Option<Outcome> {
        for side in [Side::X, Side::O] {
            if self.has_line(side) {
                return Some(Outcome::Win(side));
            }
        }
        self.cells.iter().all(Option::is_some).then_some(Outcome::Draw)
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome().is_some()
    }

    /// Empty cells of a nonterminal board, ascending.
    pub fn moves(&self) -> Vec<usize> {
        if self.is_terminal() {
            return Vec::new();
        }
        (0..9).filter(|&i| self.cells[i].is_none()).collect()
    }

    pub fn play(&self, cell: usize) -> Result<Board, BoardError> {
        if self.is_terminal() {
            return Err(BoardError::Terminal);
        }
        if cell >= 9 || self.cells[cell].is_some() {
            return Err(BoardError::IllegalMove(cell));
        }
        let mut next = *self;
        next.cells[cell] = Some(self.mover());
        Ok(next)
    }

    /// Nine characters, `X`, `O` or `.`, row by row.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            f.write_str(match c {
                Some(Side::X) => "X",
                Some(Side::O) => "O",
                None => ".",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Board {
    type Err = BoardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 9 {
            return Err(BoardError::Malformed(s.to_string()));
        }
        let mut b = Board::empty();
        for (cell, ch) in b.cells.iter_mut().zip(chars) {
            *cell = match ch {
                'X' | 'x' => Some(Side::X),
                'O' | 'o' => Some(Side::O),
                '.' | '_' | ' ' => None,
                _ => return Err(BoardError::Malformed(s.to_string())),
            };
        }
        let (x, o) = (b.count(Side::X), b.count(Side::O));
        if !(x == o || x == o + 1) || (b.has_line(Side::X) && b.has_line(Side::O)) {
            return Err(BoardError::Unreachable(s.to_string()));
        }
        Ok(b)
    }
}

/// Scores positions for the maximizing side.
pub trait Evaluator<S>: Send + Sync {
    /// Score of a nonterminal position where the search stops.
    fn evaluate(&self, board: &Board, maximizing: Side) -> S;

    /// Score of a finished game.
    fn terminal(&self, result: Finish) -> S;
}

/// +1 / 0 / −1 at finished games and 0 elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactScoring;

impl<S: Scalar> Evaluator<S> for ExactScoring {
    fn evaluate(&self, _board: &Board, _maximizing: Side) -> S {
        S::zero()
    }

    fn terminal(&self, result: Finish) -> S {
        match result {
            Finish::Win => S::one(),
            Finish::Draw => S::zero(),
            Finish::Loss => S::zero() - S::one(),
        }
    }
}

/// Counts lines still open for the maximizing side minus those open for the opponent.
#[derive(Debug, Clone, Copy, Default)]
pub struct OpenLines;

impl<S: Scalar> Evaluator<S> for OpenLines {
    fn evaluate(&self, board: &Board, maximizing: Side) -> S {
        let open = |side: Side| {
            LINES
                .iter()
                .filter(|l| l.iter().all(|&i| board.cell(i) != Some(side.other())))
                .count()
        };
        let mut s = S::zero();
        for _ in 0..open(maximizing) {
            s = s + S::one();
        }
        for _ in 0..open(maximizing.other()) {
            s = s - S::one();
        }
        s
    }

    fn terminal(&self, result: Finish) -> S {
        let ten = (0..10).fold(S::zero(), |acc, _| acc + S::one());
        match result {
            Finish::Win => ten,
            Finish::Draw => S::zero(),
            Finish::Loss => S::zero() - ten,
        }
    }
}

/// Maps every score `s` of `inner` to `scale * s + shift`.
pub struct Affine<S> {
    pub inner: Arc<dyn Evaluator<S>>,
    pub scale: S,
    pub shift: S,
}

impl<S: Scalar> Evaluator<S> for Affine<S> {
    fn evaluate(&self, board: &Board, maximizing: Side) -> S {
        self.scale.clone() * self.inner.evaluate(board, maximizing) + self.shift.clone()
    }

    fn terminal(&self, result: Finish) -> S {
        self.scale.clone() * self.inner.terminal(result) + self.shift.clone()
    }
}

fn result_for(outcome: Outcome, side: Side) -> Finish {
    match outcome {
        Outcome::Draw => Finish::Draw,
        Outcome::Win(w) if w == side => Finish::Win,
        Outcome::Win(_) => Finish::Loss,
    }
}

type Cache<S> = HashMap<(Board, u32), S>;

fn search<S: Scalar>(b: &Board, depth: u32, eval: &dyn Evaluator<S>, max: Side, cache: &mut Cache<S>) -> S {
    if let Some(o) = b.outcome() {
        return eval.terminal(result_for(o, max));
    }
    if depth == 0 {
        return eval.evaluate(b, max);
    }
    if let Some(v) = cache.get(&(*b, depth)) {
        return v.clone();
    }
    let maximizing = b.mover() == max;
    let mut best: Option<S> = None;
    for c in b.moves() {
        let child = b.play(c).expect("legal move");
        let v = search(&child, depth - 1, eval, max, cache);
        best = Some(match best {
            None => v,
            Some(cur) if (maximizing && v > cur) || (!maximizing && v < cur) => v,
            Some(cur) => cur,
        });
    }
    let v = best.expect("nonterminal board has a move");
    cache.insert((*b, depth), v.clone());
    v
}

/// Depth-limited minimax value of `b` for `maximizing`.
pub fn minimax_value<S: Scalar>(b: &Board, depth: u32, eval: &dyn Evaluator<S>, maximizing: Side) -> S {
    search(b, depth, eval, maximizing, &mut HashMap::new())
}

#[derive(Clone)]
pub enum Policy<S> {
    SpreadAll,
    FirstAvailable,
    Minimax { depth: u32, eval: Arc<dyn Evaluator<S>> },
}

impl<S> fmt::Debug for Policy<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::SpreadAll => f.write_str("SpreadAll"),
            Policy::FirstAvailable => f.write_str("FirstAvailable"),
            Policy::Minimax { depth, .. } => write!(f, "Minimax({depth})"),
        }
    }
}

impl<S: Scalar> Policy<S> {
    /// Minimax with exact terminal scoring.
    pub fn minimax(depth: u32) -> Self {
        Policy::Minimax { depth, eval: Arc::new(ExactScoring) }
    }
}

impl FromStr for Policy<Rational> {
    type Err = String;

    /// `all`, `first` or `minimax:<depth>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Policy::SpreadAll),
            "first" => Ok(Policy::FirstAvailable),
            _ => match s.strip_prefix("minimax:").map(str::parse::<u32>) {
                Some(Ok(d)) if d >= 1 => Ok(Policy::minimax(d)),
                _ => Err(format!("bad policy `{s}` (expected all, first or minimax:<depth ≥ 1>)")),
            },
        }
    }
}

fn choose<S: Scalar>(p: &Policy<S>, b: &Board, cache: &mut Cache<S>) -> Result<Vec<usize>, BoardError> {
    let moves = b.moves();
    if moves.is_empty() {
        return Err(BoardError::Terminal);
    }
    Ok(match p {
        Policy::SpreadAll => moves,
        Policy::FirstAvailable => vec![moves[0]],
        Policy::Minimax { depth, eval } => {
            let me = b.mover();
            let mut best: Option<(usize, S)> = None;
            for c in moves {
                let child = b.play(c).expect("legal move");
                let v = search(&child, depth.saturating_sub(1), eval.as_ref(), me, cache);
                if best.as_ref().is_none_or(|(_, cur)| v > *cur) {
                    best = Some((c, v));
                }
            }
            vec![best.expect("at least one move").0]
        }
    })
}

/// Moves `p` considers at `b`.
pub fn policy_actions<S: Scalar>(p: &Policy<S>, b: &Board) -> Result<Vec<usize>, BoardError> {
    choose(p, b, &mut HashMap::new())
}

struct BoardPredicates {
    boards: Vec<Board>,
    win_x: PredId,
    win_o: PredId,
}

impl Interpretation for BoardPredicates {
    fn function(&self, f: crate::logic::FuncId, _: StateId, _: &[Elem]) -> Result<Elem, InterpError> {
        Err(InterpError::Failed(format!("no function #{}", f.0)))
    }

    fn predicate(&self, p: PredId, state: StateId, _: &[Elem]) -> Result<bool, InterpError> {
        let o = self.boards[state.index()].outcome();
        Ok(if p == self.win_x {
            o == Some(Outcome::Win(Side::X))
        } else if p == self.win_o {
            o == Some(Outcome::Win(Side::O))
        } else {
            o == Some(Outcome::Draw)
        })
    }
}

/// Boards reachable from the empty board with X following `px` and O following `po`.
pub fn tictactoe_structure<S: Scalar>(px: &Policy<S>, po: &Policy<S>) -> GalStructure {
    let mut index: HashMap<Board, usize> = HashMap::new();
    let mut boards = vec![Board::empty()];
    index.insert(Board::empty(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut actions = Vec::new();
    let mut caches = (HashMap::new(), HashMap::new());
    while let Some(i) = queue.pop_front() {
        let b = boards[i];
        if b.is_terminal() {
            continue;
        }
        let (policy, cache) = match b.mover() {
            Side::X => (px, &mut caches.0),
            Side::O => (po, &mut caches.1),
        };
        for c in choose(policy, &b, cache).expect("nonterminal board") {
            let next = b.play(c).expect("policy picks legal moves");
            let j = *index.entry(next).or_insert_with(|| {
                boards.push(next);
                queue.push_back(boards.len() - 1);
                boards.len() - 1
            });
            actions.push((i, j));
        }
    }

    let sig = Signature::builder()
        .predicate("winX", &[], false)
        .predicate("winO", &[], false)
        .predicate("Draw", &[], false)
        .player("X")
        .player("O")
        .build()
        .expect("fixed signature");
    let mut parts = StructureParts { sig: sig.clone(), ..Default::default() };
    for b in &boards {
        let players: &[&str] = if b.is_terminal() { &[] } else { &[b.mover().id()] };
        parts.states.push(StateDecl::new(b.id(), players));
    }
    parts.actions = actions.into_iter().map(|(a, b)| (boards[a].id(), boards[b].id())).collect();
    parts.initial.push(Board::empty().id());
    let interp = BoardPredicates {
        boards,
        win_x: sig.predicate_id("winX").expect("declared"),
        win_o: sig.predicate_id("winO").expect("declared"),
    };
    GalStructure::new(parts, Arc::new(interp))
}
