//! Exact linking-form obstructions for the Gordian distance of knots.

pub mod exactmat;
pub mod ingest;
pub mod knots;
pub mod linkform;
pub mod obstruct;
pub mod scan;

mod serde_bigint;
