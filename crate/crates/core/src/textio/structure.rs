use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{from_json, token, TextError};
use crate::logic::{Signature, SortId};
use crate::structure::{tuples, Elem, ExplicitBuilder, GalStructure, StateDecl, StateId};

type FuncTable = BTreeMap<String, BTreeMap<String, String>>;
type PredTable = BTreeMap<String, Vec<Vec<String>>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    #[serde(default)]
    sorts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    players: Vec<String>,
    #[serde(default)]
    functions: BTreeMap<String, RawFunction>,
    #[serde(default)]
    predicates: BTreeMap<String, RawPredicate>,
    states: Vec<RawState>,
    #[serde(default)]
    rigid: RawRigid,
    #[serde(default)]
    actions: Vec<(String, String)>,
    initial: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    #[serde(default)]
    args: Vec<String>,
    result: String,
    #[serde(default)]
    rigid: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPredicate {
    #[serde(default)]
    args: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    id: String,
    #[serde(default)]
    players: Vec<String>,
    #[serde(default)]
    funcs: FuncTable,
    #[serde(default)]
    preds: PredTable,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRigid {
    #[serde(default)]
    funcs: FuncTable,
    #[serde(default)]
    preds: PredTable,
}

/// Splits an argument key into one element label per sort. Labels may
/// themselves contain commas, so every split is tried.
fn split_key<'a>(key: &'a str, sorts: &[&'a [String]]) -> Vec<Vec<&'a str>> {
    let Some((first, rest)) = sorts.split_first() else {
        return if key.is_empty() { vec![Vec::new()] } else { Vec::new() };
    };
    let mut out = Vec::new();
    for label in first.iter() {
        let tail = if rest.is_empty() {
            (key == label).then_some("")
        } else {
            key.strip_prefix(label.as_str()).and_then(|t| t.strip_prefix(','))
        };
        if let Some(tail) = tail {
            for mut more in split_key(tail, rest) {
                more.insert(0, &key[..label.len()]);
                out.push(more);
            }
        }
    }
    out
}

struct Loader<'a> {
    raw: &'a RawStructure,
}

impl<'a> Loader<'a> {
    fn domain(&self, sort: &str) -> &'a [String] {
        self.raw.sorts.get(sort).map_or(&[], Vec::as_slice)
    }

    fn args_of(&self, path: &str, args: &'a [String]) -> Result<Vec<&'a [String]>, TextError> {
        args.iter()
            .enumerate()
            .map(|(i, s)| {
                if self.raw.sorts.contains_key(s) {
                    Ok(self.domain(s))
                } else {
                    Err(TextError::at(format!("{path}/args/{i}"), format!("unknown sort `{s}`")))
                }
            })
            .collect()
    }

    fn key(&self, path: &str, key: &'a str, sorts: &[&'a [String]]) -> Result<Vec<&'a str>, TextError> {
        let mut parses = split_key(key, sorts);
        match parses.len() {
            1 => Ok(parses.pop().expect("one parse")),
            0 => Err(TextError::at(path, format!("`{key}` is not a tuple of {} declared element(s)", sorts.len()))),
            _ => Err(TextError::at(path, format!("`{key}` splits into elements in more than one way"))),
        }
    }

    fn element(&self, path: &str, sort: &str, label: &str) -> Result<(), TextError> {
        if self.domain(sort).iter().any(|e| e == label) {
            Ok(())
        } else {
            Err(TextError::at(path, format!("`{label}` is not an element of sort `{sort}`")))
        }
    }
}

/// Reads a structure file and validates the result.
pub fn load_structure(bytes: &[u8]) -> Result<GalStructure, TextError> {
    let raw: RawStructure = from_json(bytes)?;
    let l = Loader { raw: &raw };

    let mut sb = Signature::builder();
    for s in raw.sorts.keys() {
        sb = sb.sort(s);
    }
    for (name, f) in &raw.functions {
        let path = format!("/functions/{}", token(name));
        l.args_of(&path, &f.args)?;
        if !raw.sorts.contains_key(&f.result) {
            return Err(TextError::at(format!("{path}/result"), format!("unknown sort `{}`", f.result)));
        }
        let args: Vec<&str> = f.args.iter().map(String::as_str).collect();
        sb = sb.function(name, &args, &f.result, f.rigid);
    }
    for (name, p) in &raw.predicates {
        l.args_of(&format!("/predicates/{}", token(name)), &p.args)?;
        let args: Vec<&str> = p.args.iter().map(String::as_str).collect();
        sb = sb.predicate(name, &args, raw.rigid.preds.contains_key(name));
    }
    for p in &raw.players {
        sb = sb.player(p);
    }
    let sig = sb.build().map_err(|e| TextError::at("", e.to_string()))?;

    let mut b = ExplicitBuilder::new(sig);
    for (s, elems) in &raw.sorts {
        b.domain_owned(s.clone(), elems.clone());
    }
    for st in &raw.states {
        b.state_decl(StateDecl { id: st.id.clone(), players: st.players.clone() });
    }
    let known = |id: &str| raw.states.iter().any(|s| s.id == id);
    for (i, (from, to)) in raw.actions.iter().enumerate() {
        for end in [from, to] {
            if !known(end) {
                return Err(TextError::at(
                    format!("/actions/{i}"),
                    format!("action ({from}, {to}) refers to undeclared state `{end}`"),
                ));
            }
        }
        b.action(from, to);
    }
    for (i, id) in raw.initial.iter().enumerate() {
        if !known(id) {
            return Err(TextError::at(format!("/initial/{i}"), format!("undeclared state `{id}`")));
        }
        b.initial(id);
    }

    let tables = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (Some(s.id.as_str()), format!("/states/{i}"), &s.funcs, &s.preds))
        .chain(std::iter::once((None, "/rigid".to_string(), &raw.rigid.funcs, &raw.rigid.preds)));
    for (state, base, funcs, preds) in tables {
        for (name, entries) in funcs {
            let path = format!("{base}/funcs/{}", token(name));
            let f = raw
                .functions
                .get(name)
                .ok_or_else(|| TextError::at(&path, format!("undeclared function `{name}`")))?;
            if f.rigid != state.is_none() {
                let msg = if f.rigid {
                    format!("`{name}` is rigid; give its values under /rigid/funcs")
                } else {
                    format!("`{name}` is not rigid; give its values per state")
                };
                return Err(TextError::at(&path, msg));
            }
            let sorts = l.args_of(&format!("/functions/{}", token(name)), &f.args)?;
            for (key, value) in entries {
                let kpath = format!("{path}/{}", token(key));
                let args = l.key(&kpath, key, &sorts)?;
                l.element(&kpath, &f.result, value)?;
                b.value(state, name, &args, value);
            }
        }
        for (name, rows) in preds {
            let path = format!("{base}/preds/{}", token(name));
            let p = raw
                .predicates
                .get(name)
                .ok_or_else(|| TextError::at(&path, format!("undeclared predicate `{name}`")))?;
            if state.is_some() && raw.rigid.preds.contains_key(name) {
                return Err(TextError::at(&path, format!("`{name}` is rigid; give its tuples under /rigid/preds")));
            }
            for (i, row) in rows.iter().enumerate() {
                let rpath = format!("{path}/{i}");
                if row.len() != p.args.len() {
                    return Err(TextError::at(&rpath, format!("expected {} element(s), got {}", p.args.len(), row.len())));
                }
                for (j, (e, s)) in row.iter().zip(&p.args).enumerate() {
                    l.element(&format!("{rpath}/{j}"), s, e)?;
                }
                let args: Vec<&str> = row.iter().map(String::as_str).collect();
                b.holds(state, name, &args);
            }
        }
    }

    let g = b.build().map_err(|e| TextError::at("", e.to_string()))?;
    let report = g.validate();
    if !report.is_ok() {
        return Err(TextError::at("", format!("invalid structure:\n{report}")));
    }
    Ok(g)
}

fn labels(g: &GalStructure, elems: &[Elem]) -> Vec<String> {
    elems.iter().map(|e| g.element_label(*e).to_string()).collect()
}

fn all_args(g: &GalStructure, sorts: &[SortId]) -> Vec<Vec<Elem>> {
    let sizes: Vec<u32> = sorts.iter().map(|s| g.domain_len(*s)).collect();
    tuples(&sizes)
        .map(|t| t.iter().zip(sorts).map(|(&i, &s)| Elem::new(s, i)).collect())
        .collect()
}

/// Canonical JSON for `g`, with every interpretation entry written out.
pub fn dump_structure(g: &GalStructure) -> Result<String, TextError> {
    let sig = g.signature();
    let fail = |e: StateId, err: crate::structure::InterpError| {
        TextError::at("", format!("at state `{}`: {err}", g.state_name(e)))
    };
    let mut raw = RawStructure {
        sorts: BTreeMap::new(),
        players: sig.players().to_vec(),
        functions: BTreeMap::new(),
        predicates: BTreeMap::new(),
        states: Vec::new(),
        rigid: RawRigid::default(),
        actions: g
            .actions()
            .iter()
            .map(|(a, b)| (g.state_name(*a).to_string(), g.state_name(*b).to_string()))
            .collect(),
        initial: g.initial().iter().map(|e| g.state_name(*e).to_string()).collect(),
    };
    raw.players.sort();
    raw.actions.sort();
    raw.initial.sort();
    for (i, s) in sig.sorts().iter().enumerate() {
        raw.sorts.insert(s.clone(), g.domain(SortId(i as u32)).to_vec());
    }
    let sort_names = |ids: &[SortId]| ids.iter().map(|s| sig.sort_name(*s).to_string()).collect::<Vec<_>>();
    for d in sig.functions() {
        raw.functions.insert(
            d.name.clone(),
            RawFunction { args: sort_names(&d.args), result: sig.sort_name(d.result).to_string(), rigid: d.rigid },
        );
    }
    for d in sig.predicates() {
        raw.predicates.insert(d.name.clone(), RawPredicate { args: sort_names(&d.args) });
    }

    let func_table = |e: StateId, f: usize| -> Result<BTreeMap<String, String>, TextError> {
        let d = &sig.functions()[f];
        let mut out = BTreeMap::new();
        for args in all_args(g, &d.args) {
            let v = g.eval_function(crate::logic::FuncId(f as u32), e, &args).map_err(|err| fail(e, err))?;
            out.insert(labels(g, &args).join(","), g.element_label(v).to_string());
        }
        Ok(out)
    };
    let pred_rows = |e: StateId, p: usize| -> Result<Vec<Vec<String>>, TextError> {
        let d = &sig.predicates()[p];
        let mut out = Vec::new();
        for args in all_args(g, &d.args) {
            if g.eval_predicate(crate::logic::PredId(p as u32), e, &args).map_err(|err| fail(e, err))? {
                out.push(labels(g, &args));
            }
        }
        out.sort();
        Ok(out)
    };

    for e in g.states() {
        let mut funcs = FuncTable::new();
        for (f, d) in sig.functions().iter().enumerate() {
            if !d.rigid {
                funcs.insert(d.name.clone(), func_table(e, f)?);
            }
        }
        let mut preds = PredTable::new();
        for (p, d) in sig.predicates().iter().enumerate() {
            if !d.rigid {
                let rows = pred_rows(e, p)?;
                if !rows.is_empty() {
                    preds.insert(d.name.clone(), rows);
                }
            }
        }
        let mut players: Vec<String> = g.players_at(e).iter().map(|p| sig.player_name(*p).to_string()).collect();
        players.sort();
        raw.states.push(RawState { id: g.state_name(e).to_string(), players, funcs, preds });
    }
    if g.state_count() > 0 {
        let e = StateId(0);
        for (f, d) in sig.functions().iter().enumerate() {
            if d.rigid {
                raw.rigid.funcs.insert(d.name.clone(), func_table(e, f)?);
            }
        }
        for (p, d) in sig.predicates().iter().enumerate() {
            if d.rigid {
                raw.rigid.preds.insert(d.name.clone(), pred_rows(e, p)?);
            }
        }
    }
    let value = serde_json::to_value(&raw).map_err(|e| TextError::at("", e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| TextError::at("", e.to_string()))?;
    text.push('\n');
    Ok(text)
}
