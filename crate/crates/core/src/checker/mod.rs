//! Labeling model checker: computes the set of states satisfying a formula
//! under a valuation.

mod compile;
mod verify;

use std::collections::HashMap;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::logic::{Formula, Var};
use crate::structure::{Elem, EvalError, GalStructure, InterpError, StateId, Valuation, ValidationReport};
use compile::{Compiler, Node, NodeId, Program, TermIr};
pub use verify::{
    all_states, verify_au, verify_ax, verify_eu, verify_exists, verify_implies, verify_not, verify_player, Fixpoint,
};

/// Atomic subformulas are evaluated in parallel from this many states up.
const PARALLEL_STATES: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("invalid structure:\n{0}")]
    Invalid(ValidationReport),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} argument(s), got {got}")]
    Arity { symbol: String, expected: usize, got: usize },
    #[error("`{term}` has sort `{found}`, expected `{expected}`")]
    SortMismatch { term: String, expected: String, found: String },
    #[error("free variable `{}:{}` has no value", .0.name, .0.sort)]
    Unassigned(Var),
    #[error("value bound to `{}:{}` is not an element of its sort", .0.name, .0.sort)]
    BadBinding(Var),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("at state `{state}`: {source}")]
    Interp {
        state: String,
        #[source]
        source: InterpError,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckStats {
    pub states: usize,
    pub actions: usize,
    /// Ground subformula instances labeled.
    pub subformulas: usize,
    pub millis: f64,
    /// Largest number of propagation rounds taken by one until operator.
    #[serde(skip)]
    pub fixpoint_rounds: usize,
}

type EnvKey = SmallVec<[Elem; 4]>;

/// Marks computed so far, keyed by compiled subformula and the values of its
/// free variables.
#[derive(Debug, Default)]
pub struct LabelStore {
    marks: HashMap<(NodeId, EnvKey), FixedBitSet>,
}

impl LabelStore {
    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

/// The states satisfying a formula.
#[derive(Debug, Clone)]
pub struct SatSet {
    marks: FixedBitSet,
    initial: Vec<StateId>,
    pub formula: Formula,
    pub valuation: Valuation,
    pub stats: CheckStats,
}

impl SatSet {
    pub fn contains(&self, e: StateId) -> bool {
        self.marks.contains(e.index())
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.marks.ones().map(|i| StateId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.marks.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_clear()
    }

    pub fn marks(&self) -> &FixedBitSet {
        &self.marks
    }

    /// Satisfying state ids in lexicographic order.
    pub fn ids(&self, g: &GalStructure) -> Vec<String> {
        let mut v: Vec<String> = self.states().map(|e| g.state_name(e).to_string()).collect();
        v.sort();
        v
    }

    /// Satisfying initial states, in lexicographic order.
    pub fn initial_ids(&self, g: &GalStructure) -> Vec<String> {
        let mut v: Vec<String> = self
            .initial
            .iter()
            .filter(|e| self.contains(**e))
            .map(|e| g.state_name(*e).to_string())
            .collect();
        v.sort();
        v
    }

    /// True when every initial state satisfies the formula.
    pub fn holds_initially(&self) -> bool {
        self.initial.iter().all(|e| self.contains(*e))
    }
}

/// Model checker bound to one validated structure.
#[derive(Debug, Clone, Copy)]
pub struct Checker<'g> {
    g: &'g GalStructure,
}

impl<'g> Checker<'g> {
    pub fn new(g: &'g GalStructure) -> Result<Self, CheckError> {
        let report = g.validate();
        if !report.is_ok() {
            return Err(CheckError::Invalid(report));
        }
        Ok(Checker { g })
    }

    pub fn structure(&self) -> &'g GalStructure {
        self.g
    }

    pub fn check(&self, f: &Formula, v: &Valuation) -> Result<SatSet, CheckError> {
        let start = Instant::now();
        let prog = Compiler::new(self.g).compile(f)?;
        let mut env = vec![None; prog.slot_vars.len()];
        for &s in &prog.free[prog.root as usize] {
            let var = &prog.slot_vars[s as usize];
            let value = v.get(var).ok_or_else(|| CheckError::Unassigned(var.clone()))?;
            let sort = self.g.signature().sort_id(&var.sort);
            if sort != Some(value.sort) || value.index >= self.g.domain_len(value.sort) {
                return Err(CheckError::BadBinding(var.clone()));
            }
            env[s as usize] = Some(value);
        }
        let mut run = Labeler { g: self.g, prog: &prog, store: LabelStore::default(), env, rounds: 0 };
        let marks = run.label(prog.root)?;
        let stats = CheckStats {
            states: self.g.state_count(),
            actions: self.g.actions().len(),
            subformulas: run.store.len(),
            millis: start.elapsed().as_secs_f64() * 1e3,
            fixpoint_rounds: run.rounds,
        };
        Ok(SatSet {
            marks,
            initial: self.g.initial().to_vec(),
            formula: f.clone(),
            valuation: v.clone(),
            stats,
        })
    }

    pub fn holds_at(&self, state: &str, f: &Formula, v: &Valuation) -> Result<bool, CheckError> {
        let e = self.g.state(state).ok_or_else(|| CheckError::UnknownState(state.to_string()))?;
        Ok(self.check(f, v)?.contains(e))
    }
}

/// Validates `g` and checks `f` under `v`.
pub fn check(g: &GalStructure, f: &Formula, v: &Valuation) -> Result<SatSet, CheckError> {
    Checker::new(g)?.check(f, v)
}

/// Whether the named state satisfies `f` under `v`.
pub fn holds_at(g: &GalStructure, state: &str, f: &Formula, v: &Valuation) -> Result<bool, CheckError> {
    Checker::new(g)?.holds_at(state, f, v)
}

struct Labeler<'a> {
    g: &'a GalStructure,
    prog: &'a Program,
    store: LabelStore,
    env: Vec<Option<Elem>>,
    rounds: usize,
}

impl Labeler<'_> {
    fn label(&mut self, n: NodeId) -> Result<FixedBitSet, CheckError> {
        let key: EnvKey = self.prog.free[n as usize]
            .iter()
            .map(|s| self.env[*s as usize].expect("free variable bound before labeling"))
            .collect();
        if let Some(m) = self.store.marks.get(&(n, key.clone())) {
            return Ok(m.clone());
        }
        let g = self.g;
        let marks = match &self.prog.nodes[n as usize] {
            Node::True => all_states(g),
            Node::Player(i) => verify_player(g, *i),
            Node::Pred(p, args) => {
                let p = *p;
                let rigid = g.signature().predicate(p).rigid && args.iter().all(|a| a.is_rigid(g));
                self.atomic(rigid, |e, env| {
                    let vals = args.iter().map(|a| eval(g, a, e, env)).collect::<Result<SmallVec<[Elem; 4]>, _>>()?;
                    g.eval_predicate(p, e, &vals).map_err(|source| interp_error(g, e, source))
                })?
            }
            Node::Eq(a, b) => {
                let rigid = a.is_rigid(g) && b.is_rigid(g);
                self.atomic(rigid, |e, env| Ok(eval(g, a, e, env)? == eval(g, b, e, env)?))?
            }
            Node::Not(a) => verify_not(g, &self.label(*a)?),
            Node::Implies(a, b) => {
                let a = self.label(*a)?;
                verify_implies(g, &a, &self.label(*b)?)
            }
            Node::Ax(a) => verify_ax(g, &self.label(*a)?),
            Node::Eu(a, b) => {
                let a = self.label(*a)?;
                let fix = verify_eu(g, &a, &self.label(*b)?);
                self.rounds = self.rounds.max(fix.rounds);
                fix.marks
            }
            Node::Au(a, b) => {
                let a = self.label(*a)?;
                let fix = verify_au(g, &a, &self.label(*b)?);
                self.rounds = self.rounds.max(fix.rounds);
                fix.marks
            }
            Node::Exists(x, sort, body) => {
                let (x, body) = (*x as usize, *body);
                let saved = self.env[x];
                let mut acc = FixedBitSet::with_capacity(g.state_count());
                for d in g.domain_elems(*sort) {
                    self.env[x] = Some(d);
                    let inst = self.label(body);
                    if inst.is_err() {
                        self.env[x] = saved;
                    }
                    acc = verify_exists(g, [&acc, &inst?]);
                }
                self.env[x] = saved;
                acc
            }
        };
        self.store.marks.insert((n, key), marks.clone());
        Ok(marks)
    }

    fn atomic<F>(&self, rigid: bool, test: F) -> Result<FixedBitSet, CheckError>
    where
        F: Fn(StateId, &[Option<Elem>]) -> Result<bool, CheckError> + Sync,
    {
        let g = self.g;
        let env = &self.env[..];
        let n = g.state_count();
        if rigid {
            return if n > 0 && test(StateId(0), env)? {
                Ok(all_states(g))
            } else {
                Ok(FixedBitSet::with_capacity(n))
            };
        }
        let mut out = FixedBitSet::with_capacity(n);
        if n >= PARALLEL_STATES {
            let hits: Vec<bool> = (0..n as u32)
                .into_par_iter()
                .map(|e| test(StateId(e), env))
                .collect::<Result<_, _>>()?;
            for (i, h) in hits.into_iter().enumerate() {
                out.set(i, h);
            }
        } else {
            for e in g.states() {
                out.set(e.index(), test(e, env)?);
            }
        }
        Ok(out)
    }
}

fn interp_error(g: &GalStructure, e: StateId, source: InterpError) -> CheckError {
    CheckError::Interp { state: g.state_name(e).to_string(), source }
}

fn eval(g: &GalStructure, t: &TermIr, e: StateId, env: &[Option<Elem>]) -> Result<Elem, CheckError> {
    match t {
        TermIr::Var(s) => Ok(env[*s as usize].expect("variable bound before evaluation")),
        TermIr::Const(c) => Ok(*c),
        TermIr::App(f, args) => {
            let vals = args.iter().map(|a| eval(g, a, e, env)).collect::<Result<SmallVec<[Elem; 4]>, _>>()?;
            g.eval_function(*f, e, &vals).map_err(|source| interp_error(g, e, source))
        }
    }
}
