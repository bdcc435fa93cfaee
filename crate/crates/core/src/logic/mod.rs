//! The logic language: signatures, terms, formulas and their surface syntax.

mod formula;
mod parser;
mod signature;

pub use formula::{Formula, FormulaMetrics, Literal, Term, Var};
pub use parser::{parse_formula, parse_formula_in, ParseError};
pub use signature::{
    FuncId, FunctionDecl, PlayerId, PredId, PredicateDecl, Signature, SignatureBuilder, SignatureError, SortId,
};
pub(crate) use signature::is_identifier;
