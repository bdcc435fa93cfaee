use serde_json::{json, Value};

use crate::checker::SatSet;
use crate::structure::GalStructure;

/// `{"formula", "sat", "initial_sat", "stats"}` for one check.
pub fn check_result_json(g: &GalStructure, sat: &SatSet) -> Value {
    json!({
        "formula": sat.formula.to_string(),
        "sat": sat.ids(g),
        "initial_sat": sat.initial_ids(g),
        "stats": sat.stats,
    })
}
