//! Random structures, random games and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use galcheck::extensive::{ExtensiveGame, Tree};
use galcheck::logic::{Formula, Signature, Term, Var};
use galcheck::structure::{ExplicitBuilder, GalStructure, StateId, Valuation};
use galcheck::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PLAYERS: [&str; 2] = ["1", "2"];

/// Signature used by every random structure.
///
/// `c0: S0` and `g: S1 -> S0` and `k(S1)` are rigid; `f: S0 -> S1`, `p(S0)`,
/// `q(S0, S1)` and the proposition `r` vary by state.
pub fn random_signature() -> Signature {
    Signature::builder()
        .sort("S0")
        .sort("S1")
        .function("c0", &[], "S0", true)
        .function("f", &["S0"], "S1", false)
        .function("g", &["S1"], "S0", true)
        .predicate("p", &["S0"], false)
        .predicate("q", &["S0", "S1"], false)
        .predicate("r", &[], false)
        .predicate("k", &["S1"], true)
        .player("1")
        .player("2")
        .build()
        .unwrap()
}

/// A random structure as plain data, so it can be rebuilt with its states,
/// domain elements and actions listed in any order.
#[derive(Debug, Clone)]
pub struct RandomModel {
    pub states: Vec<(String, Vec<&'static str>)>,
    pub initial: Vec<String>,
    pub actions: Vec<(String, String)>,
    pub s0: Vec<String>,
    pub s1: Vec<String>,
    pub c0: String,
    pub f: BTreeMap<(String, String), String>,
    pub g: BTreeMap<String, String>,
    pub p: BTreeSet<(String, String)>,
    pub q: BTreeSet<(String, String, String)>,
    pub r: BTreeSet<String>,
    pub k: BTreeSet<String>,
}

impl RandomModel {
    pub fn random(rng: &mut impl Rng, max_states: usize) -> RandomModel {
        let n = rng.gen_range(1..=max_states);
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let s0: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("a{i}")).collect();
        let s1: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("b{i}")).collect();
        let density = rng.gen_range(0.05..0.45);
        let mut actions = Vec::new();
        for a in &names {
            for b in &names {
                if rng.gen_bool(density) {
                    actions.push((a.clone(), b.clone()));
                }
            }
        }
        let mut states = Vec::new();
        for s in &names {
            let players: Vec<&'static str> = PLAYERS.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if !players.is_empty() && !actions.iter().any(|(a, _)| a == s) {
                actions.push((s.clone(), names.choose(rng).unwrap().clone()));
            }
            states.push((s.clone(), players));
        }
        let mut initial = vec![names.choose(rng).unwrap().clone()];
        if n > 1 && rng.gen_bool(0.3) {
            let other = names.choose(rng).unwrap().clone();
            if other != initial[0] {
                initial.push(other);
            }
        }
        let mut f = BTreeMap::new();
        let mut p = BTreeSet::new();
        let mut q = BTreeSet::new();
        let mut r = BTreeSet::new();
        for s in &names {
            for a in &s0 {
                f.insert((s.clone(), a.clone()), s1.choose(rng).unwrap().clone());
                if rng.gen_bool(0.5) {
                    p.insert((s.clone(), a.clone()));
                }
                for b in &s1 {
                    if rng.gen_bool(0.4) {
                        q.insert((s.clone(), a.clone(), b.clone()));
                    }
                }
            }
            if rng.gen_bool(0.5) {
                r.insert(s.clone());
            }
        }
        let g = s1.iter().map(|b| (b.clone(), s0.choose(rng).unwrap().clone())).collect();
        let k = s1.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        RandomModel {
            states,
            initial,
            actions,
            c0: s0.choose(rng).unwrap().clone(),
            s0,
            s1,
            f,
            g,
            p,
            q,
            r,
            k,
        }
    }

    /// The same structure with every list shuffled.
    pub fn shuffled(&self, rng: &mut impl Rng) -> RandomModel {
        let mut out = self.clone();
        out.states.shuffle(rng);
        out.initial.shuffle(rng);
        out.actions.shuffle(rng);
        out.s0.shuffle(rng);
        out.s1.shuffle(rng);
        out
    }

    pub fn build(&self) -> GalStructure {
        let mut b = ExplicitBuilder::new(random_signature());
        b.domain_owned("S0".into(), self.s0.clone());
        b.domain_owned("S1".into(), self.s1.clone());
        for (s, players) in &self.states {
            b.state(s, players);
        }
        for s in &self.initial {
            b.initial(s);
        }
        for (x, y) in &self.actions {
            b.action(x, y);
        }
        b.value(None, "c0", &[], &self.c0);
        for ((s, a), v) in &self.f {
            b.value(Some(s), "f", &[a], v);
        }
        for (x, v) in &self.g {
            b.value(None, "g", &[x], v);
        }
        for (s, a) in &self.p {
            b.holds(Some(s), "p", &[a]);
        }
        for (s, a, c) in &self.q {
            b.holds(Some(s), "q", &[a, c]);
        }
        for s in &self.r {
            b.holds(Some(s), "r", &[]);
        }
        for x in &self.k {
            b.holds(None, "k", &[x]);
        }
        let g = b.build().unwrap();
        assert!(g.validate().is_ok(), "{:?}", g.validate());
        g
    }
}

pub fn x0() -> Var {
    Var::new("x0", "S0")
}

pub fn y0() -> Var {
    Var::new("y0", "S1")
}

/// Binds the two free variables random formulas may use.
pub fn random_valuation(rng: &mut impl Rng, g: &GalStructure) -> Valuation {
    let s0 = g.signature().sort_id("S0").unwrap();
    let s1 = g.signature().sort_id("S1").unwrap();
    let a = g.literal("S0", rng.gen_range(0..g.domain(s0).len())).unwrap();
    let b = g.literal("S1", rng.gen_range(0..g.domain(s1).len())).unwrap();
    Valuation::new().with(x0(), a).with(y0(), b)
}

fn random_atom(rng: &mut impl Rng) -> Formula {
    let x = || Term::Var(x0());
    let y = || Term::Var(y0());
    let c = || Term::constant("c0");
    let f = |t: Term| Term::app("f", vec![t]);
    let g = |t: Term| Term::app("g", vec![t]);
    match rng.gen_range(0..15) {
        0 => Formula::True,
        1 => Formula::False,
        2 => Formula::player("1"),
        3 => Formula::player("2"),
        4 => Formula::prop("r"),
        5 => Formula::pred("p", vec![x()]),
        6 => Formula::pred("p", vec![c()]),
        7 => Formula::pred("p", vec![g(y())]),
        8 => Formula::pred("q", vec![x(), y()]),
        9 => Formula::pred("q", vec![c(), f(x())]),
        10 => Formula::pred("k", vec![y()]),
        11 => Formula::pred("k", vec![f(c())]),
        12 => Formula::eq(x(), c()),
        13 => Formula::eq(f(x()), y()),
        _ => Formula::eq(g(f(x())), x()),
    }
}

/// A random formula over [`random_signature`] with free variables among
/// `x0:S0` and `y0:S1`; quantifiers rebind those same names.
pub fn random_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return random_atom(rng);
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1);
    match rng.gen_range(0..14) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        3 => sub(rng).implies(sub(rng)),
        4 => sub(rng).ex(),
        5 => sub(rng).ax(),
        6 => sub(rng).ef(),
        7 => sub(rng).af(),
        8 => sub(rng).eg(),
        9 => sub(rng).ag(),
        10 => sub(rng).eu(sub(rng)),
        11 => sub(rng).au(sub(rng)),
        12 => {
            let v = if rng.gen_bool(0.5) { x0() } else { y0() };
            Formula::exists(v, sub(rng))
        }
        _ => {
            let v = if rng.gen_bool(0.5) { x0() } else { y0() };
            Formula::forall(v, sub(rng))
        }
    }
}

/// Every maximal path from every state, cut at the first repeated state.
///
/// A path ending in a deadlock is finite. A path whose last state already
/// occurs earlier stands for the infinite lasso that keeps looping; all of
/// its positions are among the listed states.
pub struct PathOracle {
    paths: Vec<Vec<Vec<StateId>>>,
}

impl PathOracle {
    pub fn new(g: &GalStructure) -> PathOracle {
        fn walk(g: &GalStructure, path: &mut Vec<StateId>, out: &mut Vec<Vec<StateId>>) {
            let last = *path.last().unwrap();
            let succ = g.succ(last);
            if succ.is_empty() {
                out.push(path.clone());
                return;
            }
            for &n in succ {
                path.push(n);
                if path[..path.len() - 1].contains(&n) {
                    out.push(path.clone());
                } else {
                    walk(g, path, out);
                }
                path.pop();
            }
        }
        let paths = g
            .states()
            .map(|e| {
                let mut out = Vec::new();
                walk(g, &mut vec![e], &mut out);
                out
            })
            .collect();
        PathOracle { paths }
    }

    pub fn from(&self, e: StateId) -> &[Vec<StateId>] {
        &self.paths[e.index()]
    }

    pub fn total(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }
}

fn until(path: &[StateId], a: &[bool], b: &[bool]) -> bool {
    for s in path {
        if b[s.index()] {
            return true;
        }
        if !a[s.index()] {
            return false;
        }
    }
    false
}

/// Evaluates `f` straight from the semantics, enumerating maximal paths for
/// every temporal connective (abbreviations included).
pub fn naive_sat(g: &GalStructure, paths: &PathOracle, f: &Formula, v: &Valuation) -> Vec<bool> {
    use Formula::*;
    let n = g.state_count();
    let sig = g.signature();
    let each = |pred: &dyn Fn(StateId) -> bool| g.states().map(pred).collect::<Vec<bool>>();
    let temporal = |a: &[bool], any_path: bool, quant: &dyn Fn(&[StateId], &[bool]) -> bool| {
        each(&|e| {
            let ps = paths.from(e);
            if any_path {
                ps.iter().any(|p| quant(p, a))
            } else {
                ps.iter().all(|p| quant(p, a))
            }
        })
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Player(p) => {
            let id = sig.player_id(p).unwrap();
            each(&|e| g.players_at(e).contains(&id))
        }
        Pred(p, args) => {
            let id = sig.predicate_id(p).unwrap();
            each(&|e| {
                let vals: Vec<_> = args.iter().map(|t| g.eval_term_at(e, t, v).unwrap()).collect();
                g.eval_predicate(id, e, &vals).unwrap()
            })
        }
        Eq(a, b) => each(&|e| g.eval_term_at(e, a, v).unwrap() == g.eval_term_at(e, b, v).unwrap()),
        Not(a) => naive_sat(g, paths, a, v).into_iter().map(|x| !x).collect(),
        And(a, b) => zip(naive_sat(g, paths, a, v), naive_sat(g, paths, b, v), |x, y| x && y),
        Or(a, b) => zip(naive_sat(g, paths, a, v), naive_sat(g, paths, b, v), |x, y| x || y),
        Implies(a, b) => zip(naive_sat(g, paths, a, v), naive_sat(g, paths, b, v), |x, y| !x || y),
        Ex(a) => temporal(&naive_sat(g, paths, a, v), true, &|p, a| p.len() > 1 && a[p[1].index()]),
        Ax(a) => temporal(&naive_sat(g, paths, a, v), false, &|p, a| p.len() < 2 || a[p[1].index()]),
        Ef(a) => temporal(&naive_sat(g, paths, a, v), true, &|p, a| p.iter().any(|s| a[s.index()])),
        Af(a) => temporal(&naive_sat(g, paths, a, v), false, &|p, a| p.iter().any(|s| a[s.index()])),
        Eg(a) => temporal(&naive_sat(g, paths, a, v), true, &|p, a| p.iter().all(|s| a[s.index()])),
        Ag(a) => temporal(&naive_sat(g, paths, a, v), false, &|p, a| p.iter().all(|s| a[s.index()])),
        Eu(a, b) | Au(a, b) => {
            let sa = naive_sat(g, paths, a, v);
            let sb = naive_sat(g, paths, b, v);
            let exists = matches!(f, Eu(..));
            each(&|e| {
                let ps = paths.from(e);
                if exists {
                    ps.iter().any(|p| until(p, &sa, &sb))
                } else {
                    ps.iter().all(|p| until(p, &sa, &sb))
                }
            })
        }
        Exists(x, a) | Forall(x, a) => {
            let sort = sig.sort_id(&x.sort).unwrap();
            let mut acc = vec![matches!(f, Forall(..)); n];
            for d in g.domain_elems(sort) {
                let inner = naive_sat(g, paths, a, &v.clone().with(x.clone(), d));
                for (slot, s) in acc.iter_mut().zip(inner) {
                    *slot = if matches!(f, Forall(..)) { *slot && s } else { *slot || s };
                }
            }
            acc
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

pub const GAME_PLAYERS: [&str; 3] = ["1", "2", "3"];

/// Profiles per corpus game are capped so that a full per-profile audit stays cheap.
pub const MAX_CORPUS_PROFILES: u128 = 512;

fn random_tree(rng: &mut impl Rng, players: &[&str], depth: usize, max_depth: usize) -> Tree<Rational> {
    let branch = depth < max_depth && (depth == 0 || rng.gen_bool(0.65));
    if !branch {
        return Tree::leaf(
            players
                .iter()
                .map(|p| (*p, Rational::from_integer(rng.gen_range(0..5))))
                .collect(),
        );
    }
    let mover = *players.choose(rng).unwrap();
    let width = rng.gen_range(1..=3);
    let labels = ["a", "b", "c"];
    let moves = (0..width)
        .map(|i| (labels[i], random_tree(rng, players, depth + 1, max_depth)))
        .collect();
    Tree::node(mover, moves)
}

/// A random finite game: 2 or 3 players, depth at most 3, at most 3 actions
/// per history, integer payoffs in `[0, 5)`. Draws are repeated until the
/// profile count is at most [`MAX_CORPUS_PROFILES`].
pub fn random_game(rng: &mut impl Rng) -> ExtensiveGame<Rational> {
    loop {
        let players = &GAME_PLAYERS[..rng.gen_range(2..=3)];
        let max_depth = rng.gen_range(1..=3);
        let tree = random_tree(rng, players, 0, max_depth);
        let game = ExtensiveGame::new(players.iter().map(|p| p.to_string()).collect(), tree);
        assert!(game.validate().is_empty(), "{:?}", game.validate());
        if game.profile_count() <= MAX_CORPUS_PROFILES {
            return game;
        }
    }
}

/// The seeded corpus used for the equilibrium audits.
pub fn game_corpus(seed: u64, count: usize) -> Vec<ExtensiveGame<Rational>> {
    let mut r = rng(seed);
    (0..count).map(|_| random_game(&mut r)).collect()
}
