//! Finite GAL structures: a labelled directed graph of states, each carrying
//! its player set and a first-order interpretation evaluated on demand.

mod explicit;
mod interp;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{FuncId, PlayerId, PredId, Signature, SortId, Term, Var};

pub use explicit::{BuildError, ExplicitBuilder, TableInterpretation};
pub use interp::{InterpError, Interpretation, Memoized};

/// Position of a state in its structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A domain element: the `index`-th entry of its sort's domain list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub sort: SortId,
    pub index: u32,
}

impl Elem {
    pub fn new(sort: SortId, index: u32) -> Self {
        Elem { sort, index }
    }
}

/// One broken structure invariant, naming the state, edge or sort at fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    DuplicateState(String),
    UnknownInitial(String),
    DanglingAction(String, String),
    UnknownPlayer { state: String, player: String },
    /// A state with players but no outgoing action.
    NotSerial(String),
    EmptyDomain(String),
    UndeclaredSort(String),
    DuplicateElement { sort: String, element: String },
    Interpretation { state: Option<String>, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "the structure has no states"),
            Violation::DuplicateState(s) => write!(f, "state `{s}` is declared twice"),
            Violation::UnknownInitial(s) => write!(f, "initial state `{s}` is not declared"),
            Violation::DanglingAction(a, b) => write!(f, "action [`{a}`, `{b}`] uses an undeclared state"),
            Violation::UnknownPlayer { state, player } => {
                write!(f, "state `{state}` lists undeclared player `{player}`")
            }
            Violation::NotSerial(s) => write!(f, "state `{s}` has players but no outgoing action"),
            Violation::EmptyDomain(s) => write!(f, "sort `{s}` has an empty domain"),
            Violation::UndeclaredSort(s) => write!(f, "domain given for undeclared sort `{s}`"),
            Violation::DuplicateElement { sort, element } => {
                write!(f, "element `{element}` appears twice in the domain of `{sort}`")
            }
            Violation::Interpretation { state: Some(s), message } => write!(f, "at state `{s}`: {message}"),
            Violation::Interpretation { state: None, message } => write!(f, "{message}"),
        }
    }
}

/// The violations found by [`GalStructure::validate`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport(pub Vec<Violation>);

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.0.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.0
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDecl {
    pub id: String,
    pub players: Vec<String>,
}

impl StateDecl {
    pub fn new(id: impl Into<String>, players: &[&str]) -> Self {
        StateDecl { id: id.into(), players: players.iter().map(|p| p.to_string()).collect() }
    }
}

/// Everything but the interpretation, by name.
#[derive(Debug, Clone, Default)]
pub struct StructureParts {
    pub sig: Signature,
    pub states: Vec<StateDecl>,
    pub initial: Vec<String>,
    pub actions: Vec<(String, String)>,
    pub domains: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("variable `{}:{}` is not assigned", .0.name, .0.sort)]
    Unassigned(Var),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("`{sort}` has no element #{index}")]
    NoSuchElement { sort: String, index: usize },
    #[error("evaluating `{term}` at state `{state}`: {source}")]
    Interp {
        term: String,
        state: String,
        #[source]
        source: InterpError,
    },
}

/// Assignment of domain elements to sorted variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<Var, Elem>);

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn bind(&mut self, var: Var, value: Elem) -> &mut Self {
        self.0.insert(var, value);
        self
    }

    pub fn with(mut self, var: Var, value: Elem) -> Self {
        self.0.insert(var, value);
        self
    }

    pub fn get(&self, var: &Var) -> Option<Elem> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Elem)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A path from `states[0]`: finite and maximal when `loop_start` is `None`,
/// otherwise the lasso that repeats `states[loop_start..]` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub states: Vec<StateId>,
    pub loop_start: Option<usize>,
}

impl Path {
    /// Checks the path is action-connected and maximal (or a closed lasso).
    pub fn is_valid_in(&self, g: &GalStructure) -> bool {
        let Some(&last) = self.states.last() else { return false };
        let connected = self.states.windows(2).all(|w| g.has_action(w[0], w[1]));
        connected
            && match self.loop_start {
                None => g.succ[last.index()].is_empty(),
                Some(k) => k < self.states.len() && g.has_action(last, self.states[k]),
            }
    }
}

/// A finite GAL structure.
///
/// Built from [`StructureParts`] plus an [`Interpretation`]. Construction
/// never fails; malformed input is kept around so that [`GalStructure::validate`]
/// can report it.
#[derive(Clone)]
pub struct GalStructure {
    sig: Arc<Signature>,
    state_ids: Arc<[String]>,
    index: HashMap<String, StateId>,
    players_at: Vec<Vec<PlayerId>>,
    initial: Vec<StateId>,
    actions: Vec<(StateId, StateId)>,
    succ: Vec<Vec<StateId>>,
    pred: Vec<Vec<StateId>>,
    domains: Vec<Vec<String>>,
    elem_ix: Vec<HashMap<String, u32>>,
    problems: Vec<Violation>,
    interp: Arc<dyn Interpretation>,
}

impl fmt::Debug for GalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GalStructure")
            .field("states", &self.state_ids.len())
            .field("actions", &self.actions.len())
            .field("initial", &self.initial)
            .finish_non_exhaustive()
    }
}

impl GalStructure {
    pub fn new(parts: StructureParts, interp: Arc<dyn Interpretation>) -> Self {
        let StructureParts { sig, states, initial, actions, mut domains } = parts;
        let mut problems = Vec::new();
        if states.is_empty() {
            problems.push(Violation::NoStates);
        }

        let mut index = HashMap::new();
        let mut ids = Vec::new();
        let mut players_at = Vec::new();
        for decl in states {
            if index.contains_key(&decl.id) {
                problems.push(Violation::DuplicateState(decl.id));
                continue;
            }
            let mut ps = BTreeSet::new();
            for p in &decl.players {
                match sig.player_id(p) {
                    Some(id) => {
                        ps.insert(id);
                    }
                    None => problems.push(Violation::UnknownPlayer { state: decl.id.clone(), player: p.clone() }),
                }
            }
            index.insert(decl.id.clone(), StateId(ids.len() as u32));
            ids.push(decl.id);
            players_at.push(ps.into_iter().collect());
        }

        let mut init = BTreeSet::new();
        for s in initial {
            match index.get(&s) {
                Some(&id) => {
                    init.insert(id);
                }
                None => problems.push(Violation::UnknownInitial(s)),
            }
        }

        let mut edge_set = BTreeSet::new();
        for (a, b) in actions {
            match (index.get(&a), index.get(&b)) {
                (Some(&x), Some(&y)) => {
                    edge_set.insert((x, y));
                }
                _ => problems.push(Violation::DanglingAction(a, b)),
            }
        }
        let mut succ = vec![Vec::new(); ids.len()];
        let mut pred = vec![Vec::new(); ids.len()];
        for &(a, b) in &edge_set {
            succ[a.index()].push(b);
            pred[b.index()].push(a);
        }

        let mut doms = Vec::new();
        let mut elem_ix = Vec::new();
        for sort in sig.sorts() {
            let list = domains.remove(sort).unwrap_or_default();
            let mut ix = HashMap::new();
            for (i, e) in list.iter().enumerate() {
                if ix.insert(e.clone(), i as u32).is_some() {
                    problems.push(Violation::DuplicateElement { sort: sort.clone(), element: e.clone() });
                }
            }
            doms.push(list);
            elem_ix.push(ix);
        }
        problems.extend(domains.into_keys().map(Violation::UndeclaredSort));

        GalStructure {
            sig: Arc::new(sig),
            state_ids: ids.into(),
            index,
            players_at,
            initial: init.into_iter().collect(),
            actions: edge_set.into_iter().collect(),
            succ,
            pred,
            domains: doms,
            elem_ix,
            problems,
            interp,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn state_count(&self) -> usize {
        self.state_ids.len()
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> {
        (0..self.state_ids.len() as u32).map(StateId)
    }

    pub fn state_ids(&self) -> &Arc<[String]> {
        &self.state_ids
    }

    pub fn state_name(&self, e: StateId) -> &str {
        &self.state_ids[e.index()]
    }

    pub fn state(&self, id: &str) -> Option<StateId> {
        self.index.get(id).copied()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    /// The action relation, sorted and without duplicates.
    pub fn actions(&self) -> &[(StateId, StateId)] {
        &self.actions
    }

    pub fn players_at(&self, e: StateId) -> &[PlayerId] {
        &self.players_at[e.index()]
    }

    pub fn has_action(&self, a: StateId, b: StateId) -> bool {
        self.succ[a.index()].binary_search(&b).is_ok()
    }

    pub fn succ(&self, e: StateId) -> &[StateId] {
        &self.succ[e.index()]
    }

    pub fn pred(&self, e: StateId) -> &[StateId] {
        &self.pred[e.index()]
    }

    /// Successor ids of the named state, in state order.
    pub fn successors(&self, id: &str) -> Result<Vec<&str>, EvalError> {
        let e = self.state(id).ok_or_else(|| EvalError::UnknownState(id.to_string()))?;
        Ok(self.succ(e).iter().map(|s| self.state_name(*s)).collect())
    }

    pub fn is_deadlock(&self, id: &str) -> Result<bool, EvalError> {
        let e = self.state(id).ok_or_else(|| EvalError::UnknownState(id.to_string()))?;
        Ok(self.succ(e).is_empty())
    }

    pub fn domain(&self, sort: SortId) -> &[String] {
        &self.domains[sort.0 as usize]
    }

    pub fn domain_len(&self, sort: SortId) -> u32 {
        self.domains[sort.0 as usize].len() as u32
    }

    pub fn domain_elems(&self, sort: SortId) -> impl Iterator<Item = Elem> {
        (0..self.domain_len(sort)).map(move |i| Elem::new(sort, i))
    }

    /// Looks up a domain element by its label.
    pub fn element(&self, sort: SortId, label: &str) -> Option<Elem> {
        self.elem_ix[sort.0 as usize].get(label).map(|&i| Elem::new(sort, i))
    }

    pub fn element_label(&self, e: Elem) -> &str {
        &self.domains[e.sort.0 as usize][e.index as usize]
    }

    pub fn interpretation(&self) -> &dyn Interpretation {
        &*self.interp
    }

    pub fn eval_function(&self, f: FuncId, e: StateId, args: &[Elem]) -> Result<Elem, InterpError> {
        self.interp.function(f, e, args)
    }

    pub fn eval_predicate(&self, p: PredId, e: StateId, args: &[Elem]) -> Result<bool, InterpError> {
        self.interp.predicate(p, e, args)
    }

    /// Checks every structural invariant and returns the violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut out = self.problems.clone();
        for (sort, dom) in self.sig.sorts().iter().zip(&self.domains) {
            if dom.is_empty() {
                out.push(Violation::EmptyDomain(sort.clone()));
            }
        }
        for e in self.states() {
            if !self.players_at(e).is_empty() && self.succ(e).is_empty() {
                out.push(Violation::NotSerial(self.state_name(e).to_string()));
            }
        }
        out.extend(self.interp.violations(self));
        ValidationReport(out)
    }

    /// Evaluates `t` at the named state under `v`.
    pub fn eval_term(&self, state: &str, t: &Term, v: &Valuation) -> Result<Elem, EvalError> {
        let e = self.state(state).ok_or_else(|| EvalError::UnknownState(state.to_string()))?;
        self.eval_term_at(e, t, v)
    }

    pub fn eval_term_at(&self, e: StateId, t: &Term, v: &Valuation) -> Result<Elem, EvalError> {
        match t {
            Term::Var(x) => v.get(x).ok_or_else(|| EvalError::Unassigned(x.clone())),
            Term::Lit(l) => self.literal(&l.sort, l.index),
            Term::App(name, args) => {
                let f = self
                    .sig
                    .function_id(name)
                    .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
                let vals = args
                    .iter()
                    .map(|a| self.eval_term_at(e, a, v))
                    .collect::<Result<Vec<_>, _>>()?;
                self.eval_function(f, e, &vals).map_err(|source| EvalError::Interp {
                    term: t.to_string(),
                    state: self.state_name(e).to_string(),
                    source,
                })
            }
        }
    }

    /// Resolves a `#sort:index` literal.
    pub fn literal(&self, sort: &str, index: usize) -> Result<Elem, EvalError> {
        let s = self
            .sig
            .sort_id(sort)
            .ok_or_else(|| EvalError::UnknownSort(sort.to_string()))?;
        if index >= self.domain(s).len() {
            return Err(EvalError::NoSuchElement { sort: sort.to_string(), index });
        }
        Ok(Elem::new(s, index as u32))
    }

    /// States reachable from the initial states.
    pub fn reachable(&self) -> HashSet<StateId> {
        let mut seen: HashSet<StateId> = self.initial.iter().copied().collect();
        let mut stack: Vec<StateId> = self.initial.clone();
        while let Some(e) = stack.pop() {
            for &n in self.succ(e) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen
    }
}

/// Cartesian product of `0..sizes[i]`, last position fastest.
pub(crate) fn tuples(sizes: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    let total: u64 = sizes.iter().map(|&s| s as u64).product();
    (0..total).map(move |mut n| {
        let mut out = vec![0; sizes.len()];
        for (slot, &s) in out.iter_mut().zip(sizes).rev() {
            *slot = (n % s as u64) as u32;
            n /= s as u64;
        }
        out
    })
}
