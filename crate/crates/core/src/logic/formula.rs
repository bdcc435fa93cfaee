//! Terms and formulas, plus the syntactic utilities the checker relies on.

use std::collections::BTreeSet;
use std::fmt;

/// A sorted variable `x_s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var { name: name.into(), sort: sort.into() }
    }
}

/// A ground domain element embedded in a term, addressed by its position in
/// the sort's domain. Prints as `#sort:index`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub sort: String,
    pub index: usize,
}

impl Literal {
    pub fn new(sort: impl Into<String>, index: usize) -> Self {
        Literal { sort: sort.into(), index }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}:{}", self.sort, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Lit(Literal),
    /// `f(t1, ..., tn)`; constants are 0-ary applications.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: &str) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn lit(sort: &str, index: usize) -> Term {
        Term::Lit(Literal::new(sort, index))
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Lit(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn substitute(&self, x: &Var, d: &Literal) -> Term {
        match self {
            Term::Var(v) if v == x => Term::Lit(d.clone()),
            Term::Var(_) | Term::Lit(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(x, d)).collect()),
        }
    }
}

/// A GAL formula, including the abbreviated connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// The player atom `i`: holds where `i` is among the state's players.
    Player(String),
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Ex(Box<Formula>),
    Ax(Box<Formula>),
    Ef(Box<Formula>),
    Af(Box<Formula>),
    Eg(Box<Formula>),
    Ag(Box<Formula>),
    Eu(Box<Formula>, Box<Formula>),
    Au(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

/// Connective counts of a formula's core form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormulaMetrics {
    pub modal_count: usize,
    pub quantifier_count: usize,
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn player(name: &str) -> Formula {
        Formula::Player(name.to_string())
    }

    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(name.to_string(), args)
    }

    pub fn prop(name: &str) -> Formula {
        Formula::Pred(name.to_string(), Vec::new())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn ex(self) -> Formula {
        Formula::Ex(Box::new(self))
    }

    pub fn ax(self) -> Formula {
        Formula::Ax(Box::new(self))
    }

    pub fn ef(self) -> Formula {
        Formula::Ef(Box::new(self))
    }

    pub fn af(self) -> Formula {
        Formula::Af(Box::new(self))
    }

    pub fn eg(self) -> Formula {
        Formula::Eg(Box::new(self))
    }

    pub fn ag(self) -> Formula {
        Formula::Ag(Box::new(self))
    }

    pub fn eu(self, until: Formula) -> Formula {
        Formula::Eu(Box::new(self), Box::new(until))
    }

    pub fn au(self, until: Formula) -> Formula {
        Formula::Au(Box::new(self), Box::new(until))
    }

    pub fn exists(var: Var, body: Formula) -> Formula {
        Formula::Exists(var, Box::new(body))
    }

    pub fn forall(var: Var, body: Formula) -> Formula {
        Formula::Forall(var, Box::new(body))
    }

    /// Left-nested conjunction; `true` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Rewrites the abbreviated connectives into the core ones
    /// (`true`, player, predicate, `=`, `!`, `->`, `AX`, `E[U]`, `A[U]`, `exists`).
    pub fn expand_abbreviations(&self) -> Formula {
        use Formula::*;
        let e = |f: &Formula| f.expand_abbreviations();
        match self {
            True | Player(_) | Pred(..) | Eq(..) => self.clone(),
            False => True.not(),
            Not(a) => e(a).not(),
            And(a, b) => e(a).implies(e(b).not()).not(),
            Or(a, b) => e(a).not().implies(e(b)),
            Implies(a, b) => e(a).implies(e(b)),
            Ex(a) => e(a).not().ax().not(),
            Ax(a) => e(a).ax(),
            Ef(a) => True.eu(e(a)),
            Af(a) => True.au(e(a)),
            Eg(a) => True.au(e(a).not()).not(),
            Ag(a) => True.eu(e(a).not()).not(),
            Eu(a, b) => e(a).eu(e(b)),
            Au(a, b) => e(a).au(e(b)),
            Exists(x, a) => Formula::exists(x.clone(), e(a)),
            Forall(x, a) => Formula::exists(x.clone(), e(a).not()).not(),
        }
    }

    /// True if the formula uses only core connectives.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | Player(_) | Pred(..) | Eq(..) => true,
            Not(a) | Ax(a) | Exists(_, a) => a.is_core(),
            Implies(a, b) | Eu(a, b) | Au(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        use Formula::*;
        match self {
            True | False | Player(_) => {}
            Pred(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Not(a) | Ex(a) | Ax(a) | Ef(a) | Af(a) | Eg(a) | Ag(a) => a.collect_free(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Eu(a, b) | Au(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Exists(x, a) | Forall(x, a) => {
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    /// `self[x <- d]`: replaces the free occurrences of `x` by the literal `d`.
    pub fn substitute(&self, x: &Var, d: &Literal) -> Formula {
        use Formula::*;
        let s = |f: &Formula| Box::new(f.substitute(x, d));
        match self {
            True | False | Player(_) => self.clone(),
            Pred(p, args) => Pred(p.clone(), args.iter().map(|t| t.substitute(x, d)).collect()),
            Eq(a, b) => Eq(a.substitute(x, d), b.substitute(x, d)),
            Not(a) => Not(s(a)),
            And(a, b) => And(s(a), s(b)),
            Or(a, b) => Or(s(a), s(b)),
            Implies(a, b) => Implies(s(a), s(b)),
            Ex(a) => Ex(s(a)),
            Ax(a) => Ax(s(a)),
            Ef(a) => Ef(s(a)),
            Af(a) => Af(s(a)),
            Eg(a) => Eg(s(a)),
            Ag(a) => Ag(s(a)),
            Eu(a, b) => Eu(s(a), s(b)),
            Au(a, b) => Au(s(a), s(b)),
            Exists(v, _) | Forall(v, _) if v == x => self.clone(),
            Exists(v, a) => Exists(v.clone(), s(a)),
            Forall(v, a) => Forall(v.clone(), s(a)),
        }
    }

    /// Counts modal and quantifier connectives of the expanded core form.
    pub fn metrics(&self) -> FormulaMetrics {
        fn walk(f: &Formula, m: &mut FormulaMetrics) {
            use Formula::*;
            match f {
                True | False | Player(_) | Pred(..) | Eq(..) => {}
                Not(a) => walk(a, m),
                Implies(a, b) | And(a, b) | Or(a, b) => {
                    walk(a, m);
                    walk(b, m);
                }
                Ax(a) | Ex(a) | Ef(a) | Af(a) | Eg(a) | Ag(a) => {
                    m.modal_count += 1;
                    walk(a, m);
                }
                Eu(a, b) | Au(a, b) => {
                    m.modal_count += 1;
                    walk(a, m);
                    walk(b, m);
                }
                Exists(_, a) | Forall(_, a) => {
                    m.quantifier_count += 1;
                    walk(a, m);
                }
            }
        }
        let mut m = FormulaMetrics::default();
        walk(&self.expand_abbreviations(), &mut m);
        m
    }

    /// Number of connectives and atoms; the labeling order key.
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Player(_) | Pred(..) | Eq(..) => 1,
            Not(a) | Ex(a) | Ax(a) | Ef(a) | Af(a) | Eg(a) | Ag(a) | Exists(_, a) | Forall(_, a) => 1 + a.size(),
            And(a, b) | Or(a, b) | Implies(a, b) | Eu(a, b) | Au(a, b) => 1 + a.size() + b.size(),
        }
    }
}

// ---------------------------------------------------------------------------
// Printing
//
// Binary operators follow `!` > `&` > `|` > `->` (right-assoc). Modalities and
// quantifiers swallow everything to their right, so one that ends a left
// operand must be parenthesized.

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn ends_open(f: &Formula) -> bool {
    use Formula::*;
    match f {
        Ex(_) | Ax(_) | Ef(_) | Af(_) | Eg(_) | Ag(_) | Exists(..) | Forall(..) => true,
        Not(a) => ends_open(a),
        And(_, b) | Or(_, b) | Implies(_, b) => ends_open(b),
        _ => false,
    }
}

struct Printer<'a> {
    bound: Vec<&'a str>,
}

impl<'a> Printer<'a> {
    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => {
                out.push_str(&v.name);
                if !self.bound.contains(&v.name.as_str()) {
                    out.push(':');
                    out.push_str(&v.sort);
                }
            }
            Term::Lit(l) => out.push_str(&l.to_string()),
            Term::App(name, args) => {
                out.push_str(name);
                if !args.is_empty() || self.bound.contains(&name.as_str()) {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        self.term(a, out);
                    }
                    out.push(')');
                }
            }
        }
    }

    fn formula(&mut self, f: &'a Formula, min_prec: u8, tail: bool, out: &mut String) {
        if prec(f) < min_prec || (!tail && ends_open(f)) {
            out.push('(');
            self.formula(f, 0, true, out);
            out.push(')');
            return;
        }
        use Formula::*;
        match f {
            True => out.push_str("true"),
            False => out.push_str("false"),
            Player(p) => {
                out.push('@');
                out.push_str(p);
            }
            Pred(p, args) => {
                out.push_str(p);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        self.term(a, out);
                    }
                    out.push(')');
                }
            }
            Eq(a, b) => {
                self.term(a, out);
                out.push_str(" = ");
                self.term(b, out);
            }
            Not(a) => {
                out.push('!');
                self.formula(a, PREC_UNARY, tail, out);
            }
            // `&` and `|` are left-assoc, `->` is right-assoc
            And(a, b) => self.binary(a, " & ", b, PREC_AND, PREC_UNARY, tail, out),
            Or(a, b) => self.binary(a, " | ", b, PREC_OR, PREC_AND, tail, out),
            Implies(a, b) => self.binary(a, " -> ", b, PREC_OR, PREC_IMPLIES, tail, out),
            Ex(a) => self.modal("EX ", a, tail, out),
            Ax(a) => self.modal("AX ", a, tail, out),
            Ef(a) => self.modal("EF ", a, tail, out),
            Af(a) => self.modal("AF ", a, tail, out),
            Eg(a) => self.modal("EG ", a, tail, out),
            Ag(a) => self.modal("AG ", a, tail, out),
            Eu(a, b) => self.until("E[", a, b, out),
            Au(a, b) => self.until("A[", a, b, out),
            Exists(x, a) => self.quantifier("exists ", x, a, tail, out),
            Forall(x, a) => self.quantifier("forall ", x, a, tail, out),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn binary(
        &mut self,
        a: &'a Formula,
        op: &str,
        b: &'a Formula,
        left_min: u8,
        right_min: u8,
        tail: bool,
        out: &mut String,
    ) {
        self.formula(a, left_min, false, out);
        out.push_str(op);
        self.formula(b, right_min, tail, out);
    }

    fn modal(&mut self, kw: &str, a: &'a Formula, tail: bool, out: &mut String) {
        out.push_str(kw);
        self.formula(a, PREC_IMPLIES, tail, out);
    }

    fn until(&mut self, open: &str, a: &'a Formula, b: &'a Formula, out: &mut String) {
        out.push_str(open);
        self.formula(a, PREC_IMPLIES, true, out);
        out.push_str(" U ");
        self.formula(b, PREC_IMPLIES, true, out);
        out.push(']');
    }

    fn quantifier(&mut self, kw: &str, x: &'a Var, a: &'a Formula, tail: bool, out: &mut String) {
        out.push_str(kw);
        out.push_str(&x.name);
        out.push(':');
        out.push_str(&x.sort);
        out.push_str(" . ");
        self.bound.push(&x.name);
        self.formula(a, PREC_IMPLIES, tail, out);
        self.bound.pop();
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        Printer { bound: Vec::new() }.formula(self, 0, true, &mut out);
        f.write_str(&out)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        Printer { bound: Vec::new() }.term(self, &mut out);
        f.write_str(&out)
    }
}
