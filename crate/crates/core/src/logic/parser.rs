//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula := "true" | "false" | "@" IDENT | IDENT ["(" [term {"," term}] ")"] | term "=" term
//!          | "!" formula | formula "&" formula | formula "|" formula | formula "->" formula
//!          | ("EX"|"AX"|"EF"|"AF"|"EG"|"AG") formula
//!          | ("E"|"A") "[" formula "U" formula "]"
//!          | ("exists"|"forall") IDENT ":" IDENT "." formula | "(" formula ")"
//! term    := IDENT | IDENT ":" SORT | IDENT "(" [term {"," term}] ")" | "#" SORT ":" INDEX
//! ```
//!
//! `!` binds tighter than `&`, then `|`, then `->` (right-assoc). Modalities
//! and quantifiers extend as far right as possible. A variable that is not
//! bound by a quantifier must carry its sort (`x:S`) on every occurrence, or
//! be declared up front through [`parse_formula_in`].
//!
//! Quantifiers that rebind a name already bound on the same path get a fresh
//! name, so substitution never has to worry about shadowing.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::formula::{Formula, Literal, Term, Var};
use super::signature::{is_identifier, Signature, SortId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax { pos: usize, expected: Vec<String>, found: String },
    #[error("sort error at offset {pos}: {message}")]
    Sort { pos: usize, message: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Equals,
    Bang,
    Amp,
    Pipe,
    Arrow,
    At,
    Hash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrack => "`[`",
            Tok::RBrack => "`]`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Equals => "`=`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::At => "`@`",
            Tok::Hash => "`#`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b':' => Tok::Colon,
            b'=' => Tok::Equals,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'@' => Tok::At,
            b'#' => Tok::Hash,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let found = text[i..].chars().next().map(|c| format!("`{c}`")).unwrap_or_default();
                return Err(ParseError::Syntax { pos: i, expected: vec!["a token".into()], found });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

const MODALITIES: [&str; 6] = ["EX", "AX", "EF", "AF", "EG", "AG"];

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
    at: usize,
    /// Bound variables in scope: (source name, renamed variable).
    scope: Vec<(String, Var)>,
    free: BTreeMap<String, String>,
    /// Every identifier in the input, so fresh names never collide.
    taken: HashSet<String>,
}

/// Parses a formula over `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_in(text, sig, &[])
}

/// Parses a formula whose free variables may appear without sort annotations.
pub fn parse_formula_in(text: &str, sig: &Signature, free: &[Var]) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let taken = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .chain(free.iter().map(|v| v.name.clone()))
        .collect();
    let mut p = Parser {
        sig,
        toks,
        at: 0,
        scope: Vec::new(),
        free: BTreeMap::new(),
        taken,
    };
    for v in free {
        if sig.sort_id(&v.sort).is_none() {
            return Err(ParseError::UnknownIdentifier { pos: 0, name: v.sort.clone() });
        }
        p.free.insert(v.name.clone(), v.sort.clone());
    }
    let f = p.implication()?;
    p.expect(Tok::Eof)?;
    Ok(f)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&tok.to_string()])
        }
    }

    fn ident(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((pos, s))
            }
            _ => self.fail(&[what]),
        }
    }

    fn sort(&mut self) -> Result<(String, SortId), ParseError> {
        let (pos, name) = self.ident("a sort name")?;
        match self.sig.sort_id(&name) {
            Some(id) => Ok((name, id)),
            None => Err(ParseError::UnknownIdentifier { pos, name }),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::At => {
                self.bump();
                let (pos, name) = self.ident("a player")?;
                if self.sig.player_id(&name).is_none() {
                    return Err(ParseError::UnknownIdentifier { pos, name });
                }
                Ok(Formula::Player(name))
            }
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "false" => {
                    self.bump();
                    Ok(Formula::False)
                }
                m if MODALITIES.contains(&m) => {
                    self.bump();
                    let body = self.implication()?;
                    Ok(match m {
                        "EX" => body.ex(),
                        "AX" => body.ax(),
                        "EF" => body.ef(),
                        "AF" => body.af(),
                        "EG" => body.eg(),
                        _ => body.ag(),
                    })
                }
                "E" | "A" if *self.peek2() == Tok::LBrack => {
                    self.bump();
                    self.bump();
                    let lhs = self.implication()?;
                    match self.peek() {
                        Tok::Ident(u) if u == "U" => {
                            self.bump();
                        }
                        _ => return self.fail(&["`U`"]),
                    }
                    let rhs = self.implication()?;
                    self.expect(Tok::RBrack)?;
                    Ok(if word == "E" { lhs.eu(rhs) } else { lhs.au(rhs) })
                }
                "exists" | "forall" => self.quantifier(&word),
                _ => self.atom(),
            },
            Tok::Hash => self.atom(),
            _ => self.fail(&["a formula"]),
        }
    }

    fn quantifier(&mut self, kw: &str) -> Result<Formula, ParseError> {
        self.bump();
        let (_, name) = self.ident("a variable")?;
        self.expect(Tok::Colon)?;
        let (sort, _) = self.sort()?;
        self.expect(Tok::Dot)?;
        let rebinding = self.scope.iter().any(|(src, _)| *src == name) || self.free.contains_key(&name);
        let bound_name = if rebinding { self.fresh(&name) } else { name.clone() };
        let var = Var::new(bound_name, sort);
        self.scope.push((name, var.clone()));
        let body = self.implication();
        self.scope.pop();
        let body = body?;
        Ok(if kw == "exists" { Formula::exists(var, body) } else { Formula::forall(var, body) })
    }

    fn fresh(&mut self, base: &str) -> String {
        let name = (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.taken.contains(n) && !self.sig.declares(n))
            .expect("unbounded counter");
        self.taken.insert(name.clone());
        name
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(id) = self.sig.predicate_id(&name) {
                if self.scope.iter().all(|(src, _)| *src != name) {
                    self.bump();
                    let args = if *self.peek() == Tok::LParen { self.arguments()? } else { Vec::new() };
                    let expected = self.sig.predicate(id).args.clone();
                    self.check_args(pos, &name, &expected, &args)?;
                    return Ok(Formula::Pred(name, args.into_iter().map(|(t, _)| t).collect()));
                }
            }
        }
        let (lhs, ls) = self.term()?;
        if *self.peek() != Tok::Equals {
            if let Term::App(name, args) = &lhs {
                if args.is_empty() && self.sig.predicate_id(name).is_none() && self.sig.function_id(name).is_none() {
                    return Err(ParseError::UnknownIdentifier { pos, name: name.clone() });
                }
            }
            return self.fail(&["`=`"]);
        }
        self.bump();
        let rpos = self.pos();
        let (rhs, rs) = self.term()?;
        if ls != rs {
            return Err(ParseError::Sort {
                pos: rpos,
                message: format!(
                    "cannot equate terms of sorts `{}` and `{}`",
                    self.sig.sort_name(ls),
                    self.sig.sort_name(rs)
                ),
            });
        }
        Ok(Formula::Eq(lhs, rhs))
    }

    fn arguments(&mut self) -> Result<Vec<(Term, SortId)>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn check_args(&self, pos: usize, name: &str, expected: &[SortId], got: &[(Term, SortId)]) -> Result<(), ParseError> {
        if expected.len() != got.len() {
            return Err(ParseError::Sort {
                pos,
                message: format!("`{name}` takes {} argument(s), got {}", expected.len(), got.len()),
            });
        }
        for (i, (want, (_, have))) in expected.iter().zip(got).enumerate() {
            if want != have {
                return Err(ParseError::Sort {
                    pos,
                    message: format!(
                        "argument {} of `{name}` has sort `{}`, expected `{}`",
                        i + 1,
                        self.sig.sort_name(*have),
                        self.sig.sort_name(*want)
                    ),
                });
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<(Term, SortId), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Hash => {
                self.bump();
                let (sort, id) = self.sort()?;
                self.expect(Tok::Colon)?;
                let (ipos, digits) = self.ident("an element index")?;
                let index = digits.parse::<usize>().map_err(|_| ParseError::Syntax {
                    pos: ipos,
                    expected: vec!["an element index".into()],
                    found: format!("`{digits}`"),
                })?;
                Ok((Term::Lit(Literal::new(sort, index)), id))
            }
            Tok::Ident(name) => {
                self.bump();
                match self.peek() {
                    Tok::LParen => {
                        let Some(id) = self.sig.function_id(&name) else {
                            return Err(ParseError::UnknownIdentifier { pos, name });
                        };
                        let args = self.arguments()?;
                        let decl = self.sig.function(id);
                        self.check_args(pos, &name, &decl.args, &args)?;
                        Ok((Term::App(name, args.into_iter().map(|(t, _)| t).collect()), decl.result))
                    }
                    Tok::Colon => {
                        self.bump();
                        let (sort, id) = self.sort()?;
                        if self.scope.iter().any(|(src, _)| *src == name) {
                            return Err(ParseError::Sort {
                                pos,
                                message: format!("bound variable `{name}` cannot carry a sort annotation"),
                            });
                        }
                        if !is_identifier(&name) || self.sig.declares(&name) {
                            return Err(ParseError::Sort {
                                pos,
                                message: format!("`{name}` is a declared symbol, not a variable"),
                            });
                        }
                        match self.free.get(&name) {
                            Some(prev) if *prev != sort => Err(ParseError::Sort {
                                pos,
                                message: format!("variable `{name}` used with sorts `{prev}` and `{sort}`"),
                            }),
                            _ => {
                                self.free.insert(name.clone(), sort.clone());
                                Ok((Term::Var(Var::new(name, sort)), id))
                            }
                        }
                    }
                    _ => {
                        if let Some((_, v)) = self.scope.iter().rev().find(|(src, _)| *src == name) {
                            let id = self.sig.sort_id(&v.sort).expect("checked at binding");
                            return Ok((Term::Var(v.clone()), id));
                        }
                        if let Some(sort) = self.free.get(&name) {
                            let id = self.sig.sort_id(sort).expect("checked at declaration");
                            return Ok((Term::Var(Var::new(name, sort.clone())), id));
                        }
                        match self.sig.function_id(&name) {
                            Some(id) => {
                                let decl = self.sig.function(id);
                                self.check_args(pos, &name, &decl.args, &[])?;
                                Ok((Term::App(name, Vec::new()), decl.result))
                            }
                            None => Err(ParseError::UnknownIdentifier { pos, name }),
                        }
                    }
                }
            }
            _ => self.fail(&["a term"]),
        }
    }
}
