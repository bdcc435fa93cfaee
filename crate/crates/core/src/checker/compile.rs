//! Lowering of core formulas to a hash-consed node arena.

use std::collections::HashMap;

use super::CheckError;
use crate::logic::{Formula, FuncId, PlayerId, PredId, SortId, Term, Var};
use crate::structure::{Elem, GalStructure};

pub(crate) type NodeId = u32;
pub(crate) type Slot = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum TermIr {
    Var(Slot),
    Const(Elem),
    App(FuncId, Vec<TermIr>),
}

impl TermIr {
    /// True when the value cannot depend on the state.
    pub(crate) fn is_rigid(&self, g: &GalStructure) -> bool {
        match self {
            TermIr::Var(_) | TermIr::Const(_) => true,
            TermIr::App(f, args) => g.signature().function(*f).rigid && args.iter().all(|a| a.is_rigid(g)),
        }
    }

    fn slots(&self, out: &mut Vec<Slot>) {
        match self {
            TermIr::Var(s) => out.push(*s),
            TermIr::Const(_) => {}
            TermIr::App(_, args) => args.iter().for_each(|a| a.slots(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    True,
    Player(PlayerId),
    Pred(PredId, Vec<TermIr>),
    Eq(TermIr, TermIr),
    Not(NodeId),
    Implies(NodeId, NodeId),
    Ax(NodeId),
    Eu(NodeId, NodeId),
    Au(NodeId, NodeId),
    Exists(Slot, SortId, NodeId),
}

#[derive(Debug)]
pub(crate) struct Program {
    pub nodes: Vec<Node>,
    /// Free variable slots of each node, ascending.
    pub free: Vec<Vec<Slot>>,
    pub slot_vars: Vec<Var>,
    pub root: NodeId,
}

pub(crate) struct Compiler<'g> {
    g: &'g GalStructure,
    nodes: Vec<Node>,
    free: Vec<Vec<Slot>>,
    dedup: HashMap<Node, NodeId>,
    slots: HashMap<Var, Slot>,
    slot_vars: Vec<Var>,
}

impl<'g> Compiler<'g> {
    pub(crate) fn new(g: &'g GalStructure) -> Self {
        Compiler {
            g,
            nodes: Vec::new(),
            free: Vec::new(),
            dedup: HashMap::new(),
            slots: HashMap::new(),
            slot_vars: Vec::new(),
        }
    }

    /// Compiles an abbreviation-free formula.
    pub(crate) fn compile(mut self, f: &Formula) -> Result<Program, CheckError> {
        let root = self.formula(f)?;
        Ok(Program { nodes: self.nodes, free: self.free, slot_vars: self.slot_vars, root })
    }

    fn slot(&mut self, v: &Var) -> Slot {
        if let Some(&s) = self.slots.get(v) {
            return s;
        }
        let s = self.slot_vars.len() as Slot;
        self.slot_vars.push(v.clone());
        self.slots.insert(v.clone(), s);
        s
    }

    fn sort(&self, name: &str) -> Result<SortId, CheckError> {
        self.g
            .signature()
            .sort_id(name)
            .ok_or_else(|| CheckError::UnknownSymbol(name.to_string()))
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.dedup.get(&node) {
            return id;
        }
        let mut free = Vec::new();
        match &node {
            Node::True | Node::Player(_) => {}
            Node::Pred(_, args) => args.iter().for_each(|a| a.slots(&mut free)),
            Node::Eq(a, b) => {
                a.slots(&mut free);
                b.slots(&mut free);
            }
            Node::Not(a) | Node::Ax(a) => free.extend(&self.free[*a as usize]),
            Node::Implies(a, b) | Node::Eu(a, b) | Node::Au(a, b) => {
                free.extend(&self.free[*a as usize]);
                free.extend(&self.free[*b as usize]);
            }
            Node::Exists(x, _, a) => free.extend(self.free[*a as usize].iter().filter(|s| *s != x)),
        }
        free.sort_unstable();
        free.dedup();
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.free.push(free);
        self.dedup.insert(node, id);
        id
    }

    fn term(&mut self, t: &Term) -> Result<(TermIr, SortId), CheckError> {
        match t {
            Term::Var(v) => {
                let sort = self.sort(&v.sort)?;
                Ok((TermIr::Var(self.slot(v)), sort))
            }
            Term::Lit(l) => {
                let e = self.g.literal(&l.sort, l.index)?;
                Ok((TermIr::Const(e), e.sort))
            }
            Term::App(name, args) => {
                let sig = self.g.signature();
                let f = sig.function_id(name).ok_or_else(|| CheckError::UnknownSymbol(name.clone()))?;
                let decl = sig.function(f);
                let (expected, result) = (decl.args.clone(), decl.result);
                let args = self.arguments(name, &expected, args)?;
                Ok((TermIr::App(f, args), result))
            }
        }
    }

    fn arguments(&mut self, symbol: &str, expected: &[SortId], args: &[Term]) -> Result<Vec<TermIr>, CheckError> {
        if expected.len() != args.len() {
            return Err(CheckError::Arity { symbol: symbol.to_string(), expected: expected.len(), got: args.len() });
        }
        let mut out = Vec::with_capacity(args.len());
        for (a, &want) in args.iter().zip(expected) {
            let (ir, got) = self.term(a)?;
            if got != want {
                return Err(self.mismatch(a, want, got));
            }
            out.push(ir);
        }
        Ok(out)
    }

    fn mismatch(&self, t: &Term, want: SortId, got: SortId) -> CheckError {
        let sig = self.g.signature();
        CheckError::SortMismatch {
            term: t.to_string(),
            expected: sig.sort_name(want).to_string(),
            found: sig.sort_name(got).to_string(),
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<NodeId, CheckError> {
        let node = match f {
            Formula::True => Node::True,
            Formula::Player(p) => {
                let id = self
                    .g
                    .signature()
                    .player_id(p)
                    .ok_or_else(|| CheckError::UnknownSymbol(format!("@{p}")))?;
                Node::Player(id)
            }
            Formula::Pred(name, args) => {
                let sig = self.g.signature();
                let p = sig.predicate_id(name).ok_or_else(|| CheckError::UnknownSymbol(name.clone()))?;
                let expected = sig.predicate(p).args.clone();
                Node::Pred(p, self.arguments(name, &expected, args)?)
            }
            Formula::Eq(a, b) => {
                let (x, sa) = self.term(a)?;
                let (y, sb) = self.term(b)?;
                if sa != sb {
                    return Err(self.mismatch(b, sa, sb));
                }
                Node::Eq(x, y)
            }
            Formula::Not(a) => Node::Not(self.formula(a)?),
            Formula::Implies(a, b) => Node::Implies(self.formula(a)?, self.formula(b)?),
            Formula::Ax(a) => Node::Ax(self.formula(a)?),
            Formula::Eu(a, b) => Node::Eu(self.formula(a)?, self.formula(b)?),
            Formula::Au(a, b) => Node::Au(self.formula(a)?, self.formula(b)?),
            Formula::Exists(x, a) => {
                let sort = self.sort(&x.sort)?;
                let slot = self.slot(x);
                Node::Exists(slot, sort, self.formula(a)?)
            }
            other => return self.formula(&other.expand_abbreviations()),
        };
        Ok(self.intern(node))
    }
}
