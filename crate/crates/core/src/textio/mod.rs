//! File formats: structures, games and bimatrix games as JSON, check results
//! and benchmark CSV.

mod bench;
mod game;
mod results;
mod structure;

use std::fmt;

use thiserror::Error;

pub use bench::{write_bench_csv, BenchRecord, BENCH_COLUMNS};
pub use game::{dump_game, load_bimatrix, load_game, dump_bimatrix};
pub use results::check_result_json;
pub use structure::{dump_structure, load_structure};

/// A load failure, located by a JSON pointer into the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct TextError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "at {}: {}", self.path, self.message)
        }
    }
}

impl TextError {
    pub(crate) fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        TextError { path: path.into(), message: message.into() }
    }
}

/// Escapes one JSON pointer reference token.
pub(crate) fn token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

/// Deserializes `bytes`, reporting errors with the JSON pointer where they occurred.
pub(crate) fn from_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, TextError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        use serde_path_to_error::Segment;
        let pointer: String = e
            .path()
            .iter()
            .map(|seg| match seg {
                Segment::Seq { index } => format!("/{index}"),
                Segment::Map { key } => format!("/{}", token(key)),
                Segment::Enum { variant } => format!("/{}", token(variant)),
                Segment::Unknown => "/?".to_string(),
            })
            .collect();
        TextError::at(pointer, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| TextError::at("", e.to_string()))?;
    Ok(value)
}
