use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use super::{from_json, token, TextError};
use crate::extensive::{ExtensiveGame, GameViolation, Tree};
use crate::gamegen::Bimatrix;
use crate::scalar::Rational;

/// A JSON object read in document order that rejects repeated keys.
#[derive(Debug)]
struct Entries<V>(Vec<(String, V)>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Entries<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V2<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V2<V> {
            type Value = Entries<V>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out: Vec<(String, V)> = Vec::new();
                while let Some(k) = map.next_key::<String>()? {
                    if out.iter().any(|(seen, _)| *seen == k) {
                        return Err(serde::de::Error::custom(format!("duplicate key `{k}`")));
                    }
                    let v = map.next_value()?;
                    out.push((k, v));
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V2(PhantomData))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Pair([i64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    player: Option<String>,
    moves: Option<Entries<RawNode>>,
    utilities: Option<Entries<Number>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    players: Vec<String>,
    root: RawNode,
}

fn to_tree(node: RawNode, path: &str) -> Result<Tree<Rational>, TextError> {
    match (node.player, node.moves, node.utilities) {
        (player, Some(moves), None) => {
            let mut out = Vec::with_capacity(moves.0.len());
            for (a, child) in moves.0 {
                let sub = format!("{path}/moves/{}", token(&a));
                out.push((a, to_tree(child, &sub)?));
            }
            Ok(Tree::Move { player, moves: out })
        }
        (None, None, Some(utilities)) => {
            let mut out = BTreeMap::new();
            for (p, n) in utilities.0 {
                let value = match n {
                    Number::Int(v) => Rational::from_integer(v),
                    Number::Pair([_, 0]) => {
                        return Err(TextError::at(
                            format!("{path}/utilities/{}", token(&p)),
                            "zero denominator",
                        ))
                    }
                    Number::Pair([num, den]) => Rational::new(num, den),
                };
                out.insert(p, value);
            }
            Ok(Tree::Leaf(out))
        }
        (Some(_), None, _) => Err(TextError::at(path, "a node with a player needs `moves`")),
        (None, None, None) => Err(TextError::at(path, "a node needs `moves` or `utilities`")),
        _ => {
            Err(TextError::at(path, "a node cannot have both `moves` and `utilities`"))
        }
    }
}

fn node_path(game: &ExtensiveGame<Rational>, history: &str) -> String {
    let mut path = "/root".to_string();
    if let Some(h) = game.find_history_label(history) {
        for a in game.history(h) {
            path.push_str(&format!("/moves/{}", token(a)));
        }
    }
    path
}

fn locate(game: &ExtensiveGame<Rational>, v: &GameViolation) -> String {
    match v {
        GameViolation::BadPlayerId(_) | GameViolation::DuplicatePlayer(_) | GameViolation::NameClash(_) => {
            "/players".to_string()
        }
        GameViolation::MissingMover(h) | GameViolation::NoMoves(h) => node_path(game, h),
        GameViolation::UnknownMover { history, .. } => format!("{}/player", node_path(game, history)),
        GameViolation::MissingUtility { history, .. } => format!("{}/utilities", node_path(game, history)),
        GameViolation::UnknownUtilityOwner { history, player } => {
            format!("{}/utilities/{}", node_path(game, history), token(player))
        }
        GameViolation::DuplicateAction { history, .. } => format!("{}/moves", node_path(game, history)),
        GameViolation::BadActionLabel(_) => "/root".to_string(),
    }
}

/// Reads a game file and validates the game.
pub fn load_game(bytes: &[u8]) -> Result<ExtensiveGame<Rational>, TextError> {
    let raw: RawGame = from_json(bytes)?;
    let game = ExtensiveGame::new(raw.players, to_tree(raw.root, "/root")?);
    if let Some(v) = game.validate().first() {
        return Err(TextError::at(locate(&game, v), v.to_string()));
    }
    Ok(game)
}

fn node_json(game: &ExtensiveGame<Rational>, h: usize) -> serde_json::Value {
    let node = game.node(h);
    if node.is_terminal() {
        let utilities: serde_json::Map<String, serde_json::Value> = node
            .utilities
            .iter()
            .map(|(p, u)| {
                let v = if *u.denom() == 1 {
                    serde_json::json!(u.numer())
                } else {
                    serde_json::json!([u.numer(), u.denom()])
                };
                (p.clone(), v)
            })
            .collect();
        serde_json::json!({ "utilities": utilities })
    } else {
        let moves: serde_json::Map<String, serde_json::Value> = node
            .children
            .iter()
            .map(|&c| (game.node(c).action.clone().unwrap_or_default(), node_json(game, c)))
            .collect();
        serde_json::json!({ "player": node.to_move, "moves": moves })
    }
}

/// Canonical JSON for a game: keys sorted, integers written plainly.
pub fn dump_game(game: &ExtensiveGame<Rational>) -> String {
    let v = serde_json::json!({ "players": game.players(), "root": node_json(game, 0) });
    let mut text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn load_bimatrix(bytes: &[u8]) -> Result<Bimatrix, TextError> {
    let b: Bimatrix = from_json(bytes)?;
    if !b.is_well_formed() {
        return Err(TextError::at("", format!("payoff tables must both be {} × {} with m, n ≥ 1", b.m, b.n)));
    }
    Ok(b)
}

pub fn dump_bimatrix(b: &Bimatrix) -> String {
    let mut text = serde_json::to_string(b).expect("bimatrix serializes");
    text.push('\n');
    text
}
