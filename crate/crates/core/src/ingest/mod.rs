//! Knot tables and the on-disk invariant cache.
//!
//! Tables are delimited text with a header row. `name` and `seifert_matrix`
//! are required; `crossing_number`, `signature`, `determinant`,
//! `s_invariant`, `tau_invariant`, `unknotting_number`, `alternating`,
//! `bridge_index` and `amphicheiral` are optional and may be empty per row.

mod cache;
mod literal;
mod table;

pub use cache::{CachedInvariants, InvariantCache, CACHE_VERSION};
pub use literal::{parse_matrix_literal, LiteralError};
pub use table::{
    load_table, parse_table, KnotRecord, KnotTable, LoadOptions, RecordError, TableError, URange,
    BUNDLED_TABLE, BUNDLED_TABLE_NAME,
};
