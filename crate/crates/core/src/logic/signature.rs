//! Many-sorted non-logic language: sorts, function and predicate symbols, players.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a sort in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortId(pub u32);

/// Index of a function symbol in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncId(pub u32);

/// Index of a predicate symbol in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub u32);

/// Index of a player in its [`Signature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
    /// Interpreted identically in every state.
    pub rigid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub args: Vec<SortId>,
    pub rigid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{symbol}` refers to undeclared sort `{sort}`")]
    UnknownSort { symbol: String, sort: String },
    #[error("name `{0}` is declared more than once")]
    Duplicate(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

/// The non-logic language: sorts, functions, predicates and players.
///
/// Sorts, symbols and players live in disjoint namespaces; the builder
/// rejects any name that is declared twice across them.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: Vec<String>,
    functions: Vec<FunctionDecl>,
    predicates: Vec<PredicateDecl>,
    players: Vec<String>,
    sort_ix: HashMap<String, SortId>,
    func_ix: HashMap<String, FuncId>,
    pred_ix: HashMap<String, PredId>,
    player_ix: HashMap<String, PlayerId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.sorts == other.sorts
            && self.functions == other.functions
            && self.predicates == other.predicates
            && self.players == other.players
    }
}

impl Eq for Signature {}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn builder() -> SignatureBuilder {
        SignatureBuilder::default()
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn functions(&self) -> &[FunctionDecl] {
        &self.functions
    }

    pub fn predicates(&self) -> &[PredicateDecl] {
        &self.predicates
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sort_ix.get(name).copied()
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id.0 as usize]
    }

    pub fn function_id(&self, name: &str) -> Option<FuncId> {
        self.func_ix.get(name).copied()
    }

    pub fn function(&self, id: FuncId) -> &FunctionDecl {
        &self.functions[id.0 as usize]
    }

    pub fn predicate_id(&self, name: &str) -> Option<PredId> {
        self.pred_ix.get(name).copied()
    }

    pub fn predicate(&self, id: PredId) -> &PredicateDecl {
        &self.predicates[id.0 as usize]
    }

    pub fn player_id(&self, name: &str) -> Option<PlayerId> {
        self.player_ix.get(name).copied()
    }

    pub fn player_name(&self, id: PlayerId) -> &str {
        &self.players[id.0 as usize]
    }

    /// True if `name` is already taken in any namespace.
    pub fn declares(&self, name: &str) -> bool {
        self.sort_ix.contains_key(name)
            || self.func_ix.contains_key(name)
            || self.pred_ix.contains_key(name)
            || self.player_ix.contains_key(name)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sorts {{{}}}", self.sorts.join(", "))?;
        for d in &self.functions {
            let args: Vec<_> = d.args.iter().map(|s| self.sort_name(*s)).collect();
            write!(f, "; {}: ({}) -> {}", d.name, args.join(", "), self.sort_name(d.result))?;
        }
        for d in &self.predicates {
            let args: Vec<_> = d.args.iter().map(|s| self.sort_name(*s)).collect();
            write!(f, "; {}: ({})", d.name, args.join(", "))?;
        }
        write!(f, "; players {{{}}}", self.players.join(", "))
    }
}

#[derive(Debug, Default)]
pub struct SignatureBuilder {
    sorts: Vec<String>,
    functions: Vec<(String, Vec<String>, String, bool)>,
    predicates: Vec<(String, Vec<String>, bool)>,
    players: Vec<String>,
}

impl SignatureBuilder {
    pub fn sort(mut self, name: impl Into<String>) -> Self {
        self.sorts.push(name.into());
        self
    }

    pub fn function(mut self, name: impl Into<String>, args: &[&str], result: &str, rigid: bool) -> Self {
        self.functions.push((
            name.into(),
            args.iter().map(|s| s.to_string()).collect(),
            result.to_string(),
            rigid,
        ));
        self
    }

    pub fn predicate(mut self, name: impl Into<String>, args: &[&str], rigid: bool) -> Self {
        self.predicates
            .push((name.into(), args.iter().map(|s| s.to_string()).collect(), rigid));
        self
    }

    pub fn player(mut self, name: impl Into<String>) -> Self {
        self.players.push(name.into());
        self
    }

    pub fn build(self) -> Result<Signature, SignatureError> {
        let mut sig = Signature::default();
        let claim = |sig: &Signature, name: &str| -> Result<(), SignatureError> {
            if !is_identifier(name) {
                return Err(SignatureError::BadIdentifier(name.to_string()));
            }
            if sig.declares(name) {
                return Err(SignatureError::Duplicate(name.to_string()));
            }
            Ok(())
        };
        for s in self.sorts {
            claim(&sig, &s)?;
            sig.sort_ix.insert(s.clone(), SortId(sig.sorts.len() as u32));
            sig.sorts.push(s);
        }
        let resolve = |sig: &Signature, symbol: &str, sort: &str| {
            sig.sort_id(sort).ok_or_else(|| SignatureError::UnknownSort {
                symbol: symbol.to_string(),
                sort: sort.to_string(),
            })
        };
        for (name, args, result, rigid) in self.functions {
            claim(&sig, &name)?;
            let args = args
                .iter()
                .map(|a| resolve(&sig, &name, a))
                .collect::<Result<Vec<_>, _>>()?;
            let result = resolve(&sig, &name, &result)?;
            sig.func_ix.insert(name.clone(), FuncId(sig.functions.len() as u32));
            sig.functions.push(FunctionDecl { name, args, result, rigid });
        }
        for (name, args, rigid) in self.predicates {
            claim(&sig, &name)?;
            let args = args
                .iter()
                .map(|a| resolve(&sig, &name, a))
                .collect::<Result<Vec<_>, _>>()?;
            sig.pred_ix.insert(name.clone(), PredId(sig.predicates.len() as u32));
            sig.predicates.push(PredicateDecl { name, args, rigid });
        }
        for p in self.players {
            claim(&sig, &p)?;
            sig.player_ix.insert(p.clone(), PlayerId(sig.players.len() as u32));
            sig.players.push(p);
        }
        Ok(sig)
    }
}
