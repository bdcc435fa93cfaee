//! Structures given extensionally, by interpretation tables.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use super::{tuples, Elem, GalStructure, InterpError, Interpretation, StateDecl, StateId, StructureParts, Violation};
use crate::logic::{FuncId, PredId, Signature};

type Key = SmallVec<[u32; 4]>;

/// A reference in an interpretation table that cannot be resolved.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("`{element}` is not an element of sort `{sort}`")]
    UnknownElement { sort: String, element: String },
    #[error("`{symbol}` expects {expected} argument(s), got {got}")]
    Arity { symbol: String, expected: usize, got: usize },
    #[error("`{0}` is rigid and cannot be interpreted per state")]
    RigidPerState(String),
    #[error("`{0}` is not rigid and needs a per-state interpretation")]
    NotRigid(String),
    #[error("`{symbol}` has two values for ({args})")]
    Conflict { symbol: String, args: String },
}

#[derive(Debug, Clone)]
enum Table<T> {
    Rigid(T),
    PerState(Vec<T>),
}

impl<T> Table<T> {
    fn at(&self, e: StateId) -> Option<&T> {
        match self {
            Table::Rigid(t) => Some(t),
            Table::PerState(v) => v.get(e.index()),
        }
    }
}

/// Interpretation backed by explicit lookup tables.
#[derive(Debug, Clone)]
pub struct TableInterpretation {
    sig: Arc<Signature>,
    funcs: Vec<Table<HashMap<Key, Elem>>>,
    preds: Vec<Table<HashSet<Key>>>,
}

fn key_of(args: &[Elem]) -> Key {
    args.iter().map(|a| a.index).collect()
}

impl Interpretation for TableInterpretation {
    fn function(&self, f: FuncId, state: StateId, args: &[Elem]) -> Result<Elem, InterpError> {
        self.funcs[f.0 as usize]
            .at(state)
            .and_then(|t| t.get(&key_of(args)))
            .copied()
            .ok_or_else(|| InterpError::Undefined {
                symbol: self.sig.function(f).name.clone(),
                state: state.0,
                args: args.iter().map(|a| a.index.to_string()).collect::<Vec<_>>().join(","),
            })
    }

    fn predicate(&self, p: PredId, state: StateId, args: &[Elem]) -> Result<bool, InterpError> {
        Ok(self.preds[p.0 as usize]
            .at(state)
            .is_some_and(|t| t.contains(&key_of(args))))
    }

    fn violations(&self, g: &GalStructure) -> Vec<Violation> {
        let mut out = Vec::new();
        for (fi, decl) in self.sig.functions().iter().enumerate() {
            let sizes: Vec<u32> = decl.args.iter().map(|s| g.domain_len(*s)).collect();
            let states: Vec<Option<StateId>> = match &self.funcs[fi] {
                Table::Rigid(_) => vec![None],
                Table::PerState(_) => g.states().map(Some).collect(),
            };
            for e in states {
                let table = self.funcs[fi].at(e.unwrap_or(StateId(0)));
                let missing = tuples(&sizes).find(|t| !table.is_some_and(|m| m.contains_key(&Key::from_slice(t))));
                if let Some(t) = missing {
                    let args: Vec<&str> = t
                        .iter()
                        .zip(&decl.args)
                        .map(|(&i, &s)| g.domain(s)[i as usize].as_str())
                        .collect();
                    out.push(Violation::Interpretation {
                        state: e.map(|e| g.state_name(e).to_string()),
                        message: format!("`{}` is undefined on ({})", decl.name, args.join(",")),
                    });
                }
            }
        }
        out
    }
}

/// Builds a [`GalStructure`] from tables keyed by element labels.
///
/// ```
/// use galcheck::logic::Signature;
/// use galcheck::structure::ExplicitBuilder;
///
/// let sig = Signature::builder().sort("S").predicate("p", &["S"], false).player("1").build().unwrap();
/// let mut b = ExplicitBuilder::new(sig);
/// b.domain("S", &["a", "b"]);
/// b.state("e0", &["1"]).state("e1", &[]).action("e0", "e1").initial("e0");
/// b.holds(Some("e1"), "p", &["a"]);
/// let g = b.build().unwrap();
/// assert!(g.validate().is_ok());
/// ```
#[derive(Debug, Clone)]
pub struct ExplicitBuilder {
    parts: StructureParts,
    values: Vec<(Option<String>, String, Vec<String>, String)>,
    tuples: Vec<(Option<String>, String, Vec<String>)>,
}

impl ExplicitBuilder {
    pub fn new(sig: Signature) -> Self {
        ExplicitBuilder {
            parts: StructureParts { sig, ..Default::default() },
            values: Vec::new(),
            tuples: Vec::new(),
        }
    }

    pub fn domain(&mut self, sort: &str, elems: &[&str]) -> &mut Self {
        self.parts
            .domains
            .insert(sort.to_string(), elems.iter().map(|e| e.to_string()).collect());
        self
    }

    pub fn domain_owned(&mut self, sort: String, elems: Vec<String>) -> &mut Self {
        self.parts.domains.insert(sort, elems);
        self
    }

    pub fn state(&mut self, id: &str, players: &[&str]) -> &mut Self {
        self.parts.states.push(StateDecl::new(id, players));
        self
    }

    pub fn state_decl(&mut self, decl: StateDecl) -> &mut Self {
        self.parts.states.push(decl);
        self
    }

    pub fn action(&mut self, from: &str, to: &str) -> &mut Self {
        self.parts.actions.push((from.to_string(), to.to_string()));
        self
    }

    pub fn initial(&mut self, id: &str) -> &mut Self {
        self.parts.initial.push(id.to_string());
        self
    }

    /// Sets `f(args) = value` at `state`, or everywhere when `state` is `None` (rigid).
    pub fn value(&mut self, state: Option<&str>, f: &str, args: &[&str], value: &str) -> &mut Self {
        self.values.push((
            state.map(str::to_string),
            f.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
            value.to_string(),
        ));
        self
    }

    /// Adds `args` to the relation of `p` at `state`, or everywhere when `state` is `None`.
    pub fn holds(&mut self, state: Option<&str>, p: &str, args: &[&str]) -> &mut Self {
        self.tuples.push((
            state.map(str::to_string),
            p.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
        ));
        self
    }

    pub fn build(self) -> Result<GalStructure, BuildError> {
        let sig = Arc::new(self.parts.sig.clone());
        let mut state_ix: HashMap<&str, usize> = HashMap::new();
        for d in &self.parts.states {
            let next = state_ix.len();
            state_ix.entry(d.id.as_str()).or_insert(next);
        }
        let n_states = state_ix.len();
        let elem = |sort: crate::logic::SortId, label: &str| -> Result<u32, BuildError> {
            let name = sig.sort_name(sort);
            self.parts
                .domains
                .get(name)
                .and_then(|d| d.iter().position(|e| e == label))
                .map(|i| i as u32)
                .ok_or_else(|| BuildError::UnknownElement { sort: name.to_string(), element: label.to_string() })
        };
        let resolve_state = |s: &Option<String>| -> Result<Option<usize>, BuildError> {
            s.as_ref()
                .map(|s| state_ix.get(s.as_str()).copied().ok_or_else(|| BuildError::UnknownState(s.clone())))
                .transpose()
        };

        let mut funcs: Vec<Table<HashMap<Key, Elem>>> = sig
            .functions()
            .iter()
            .map(|d| {
                if d.rigid {
                    Table::Rigid(HashMap::new())
                } else {
                    Table::PerState(vec![HashMap::new(); n_states])
                }
            })
            .collect();
        for (state, name, args, value) in &self.values {
            let f = sig.function_id(name).ok_or_else(|| BuildError::UnknownSymbol(name.clone()))?;
            let decl = sig.function(f);
            if args.len() != decl.args.len() {
                return Err(BuildError::Arity { symbol: name.clone(), expected: decl.args.len(), got: args.len() });
            }
            let key: Key = args
                .iter()
                .zip(&decl.args)
                .map(|(a, s)| elem(*s, a))
                .collect::<Result<_, _>>()?;
            let v = Elem::new(decl.result, elem(decl.result, value)?);
            let table = match (&mut funcs[f.0 as usize], resolve_state(state)?) {
                (Table::Rigid(t), None) => t,
                (Table::PerState(v), Some(e)) => &mut v[e],
                (Table::Rigid(_), Some(_)) => return Err(BuildError::RigidPerState(name.clone())),
                (Table::PerState(_), None) => return Err(BuildError::NotRigid(name.clone())),
            };
            if table.insert(key, v).is_some_and(|old| old != v) {
                return Err(BuildError::Conflict { symbol: name.clone(), args: args.join(",") });
            }
        }

        let mut preds: Vec<Table<HashSet<Key>>> = sig
            .predicates()
            .iter()
            .map(|d| {
                if d.rigid {
                    Table::Rigid(HashSet::new())
                } else {
                    Table::PerState(vec![HashSet::new(); n_states])
                }
            })
            .collect();
        for (state, name, args) in &self.tuples {
            let p = sig.predicate_id(name).ok_or_else(|| BuildError::UnknownSymbol(name.clone()))?;
            let decl = sig.predicate(p);
            if args.len() != decl.args.len() {
                return Err(BuildError::Arity { symbol: name.clone(), expected: decl.args.len(), got: args.len() });
            }
            let key: Key = args
                .iter()
                .zip(&decl.args)
                .map(|(a, s)| elem(*s, a))
                .collect::<Result<_, _>>()?;
            match (&mut preds[p.0 as usize], resolve_state(state)?) {
                (Table::Rigid(t), None) => {
                    t.insert(key);
                }
                (Table::PerState(v), Some(e)) => {
                    v[e].insert(key);
                }
                (Table::Rigid(_), Some(_)) => return Err(BuildError::RigidPerState(name.clone())),
                (Table::PerState(_), None) => return Err(BuildError::NotRigid(name.clone())),
            }
        }

        let interp = TableInterpretation { sig, funcs, preds };
        Ok(GalStructure::new(self.parts, Arc::new(interp)))
    }
}
