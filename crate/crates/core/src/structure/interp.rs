use std::sync::Arc;

use dashmap::DashMap;
use smallvec::SmallVec;
use thiserror::Error;

use super::{Elem, GalStructure, StateId, Violation};
use crate::logic::{FuncId, PredId, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("`{symbol}` is undefined on ({args}) at state {state}")]
    Undefined { symbol: String, state: u32, args: String },
    #[error("{0}")]
    Failed(String),
}

/// On-demand interpretation of function and predicate symbols.
///
/// Implementations must be total on the declared profiles and deterministic.
/// Rigid symbols are free to ignore `state`.
pub trait Interpretation: Send + Sync {
    fn function(&self, f: FuncId, state: StateId, args: &[Elem]) -> Result<Elem, InterpError>;

    fn predicate(&self, p: PredId, state: StateId, args: &[Elem]) -> Result<bool, InterpError>;

    /// Problems the provider can detect about itself once the structure is assembled.
    fn violations(&self, _g: &GalStructure) -> Vec<Violation> {
        Vec::new()
    }
}

type Args = SmallVec<[Elem; 4]>;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Func(FuncId, Option<StateId>, Args),
    Pred(PredId, Option<StateId>, Args),
}

/// Caches an interpretation per (symbol, state, arguments). Rigid symbols
/// share one entry across states.
///
/// Concurrent writers may race on a key; evaluation is deterministic so
/// whichever value lands is the right one.
pub struct Memoized<I> {
    inner: I,
    rigid_funcs: Vec<bool>,
    rigid_preds: Vec<bool>,
    funcs: DashMap<Key, Elem>,
    preds: DashMap<Key, bool>,
}

impl<I: Interpretation> Memoized<I> {
    pub fn new(inner: I, sig: &Signature) -> Self {
        Memoized {
            inner,
            rigid_funcs: sig.functions().iter().map(|d| d.rigid).collect(),
            rigid_preds: sig.predicates().iter().map(|d| d.rigid).collect(),
            funcs: DashMap::new(),
            preds: DashMap::new(),
        }
    }

    pub fn inner(&self) -> &I {
        &self.inner
    }

    pub fn cached_entries(&self) -> usize {
        self.funcs.len() + self.preds.len()
    }
}

impl<I: Interpretation> Interpretation for Memoized<I> {
    fn function(&self, f: FuncId, state: StateId, args: &[Elem]) -> Result<Elem, InterpError> {
        let at = (!self.rigid_funcs[f.0 as usize]).then_some(state);
        let key = Key::Func(f, at, Args::from_slice(args));
        if let Some(v) = self.funcs.get(&key) {
            return Ok(*v);
        }
        let v = self.inner.function(f, state, args)?;
        self.funcs.insert(key, v);
        Ok(v)
    }

    fn predicate(&self, p: PredId, state: StateId, args: &[Elem]) -> Result<bool, InterpError> {
        let at = (!self.rigid_preds[p.0 as usize]).then_some(state);
        let key = Key::Pred(p, at, Args::from_slice(args));
        if let Some(v) = self.preds.get(&key) {
            return Ok(*v);
        }
        let v = self.inner.predicate(p, state, args)?;
        self.preds.insert(key, v);
        Ok(v)
    }

    fn violations(&self, g: &GalStructure) -> Vec<Violation> {
        self.inner.violations(g)
    }
}

impl<T: Interpretation + ?Sized> Interpretation for Arc<T> {
    fn function(&self, f: FuncId, state: StateId, args: &[Elem]) -> Result<Elem, InterpError> {
        (**self).function(f, state, args)
    }

    fn predicate(&self, p: PredId, state: StateId, args: &[Elem]) -> Result<bool, InterpError> {
        (**self).predicate(p, state, args)
    }

    fn violations(&self, g: &GalStructure) -> Vec<Violation> {
        (**self).violations(g)
    }
}
