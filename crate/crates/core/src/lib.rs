//! Erasure codes over graphs.
//!
//! A codeword is an edge labeling of the complete graph on `n` nodes with
//! self loops, labels drawn from a finite field. A node failure erases every
//! edge incident to the failed node. This crate provides:
//!
//! * [`field`]: GF(q) arithmetic for q = p^m ≤ 2^16 and small dense linear
//!   algebra ([`FieldMatrix`], [`LinearSolver`]).
//! * [`graph`]: edge indexing, neighborhoods, failure sets and the
//!   [`LabeledGraph`] value type together with its file format.
//! * [`code`]: linear codes over graphs as parity-check systems, the
//!   reference (oracle) erasure decoder, systematic encoding and exhaustive
//!   verification.
//! * [`single`], [`double`], [`triple`], [`extreme`]: the concrete code
//!   families correcting one, two, three and `n - 2` node failures.

pub mod code;
pub mod double;
mod error;
pub mod extreme;
pub mod field;
pub mod graph;
pub mod single;
pub mod triple;

pub use code::{
    code_metrics, verify_exhaustive, CodeMetrics, Constraint, DecodeReport, Family, GraphCode, GraphCodeSpec,
    OracleDecoder, Recovery, Stage, VerifyOptions, VerifyReport,
};
pub use double::DoublePrimeCode;
pub use error::{Error, Result};
pub use extreme::{ExtremeCode, ExtremeGenerator};
pub use field::{Field, FieldElement, FieldMatrix, LinearSolver};
pub use graph::{EdgeId, EdgeSet, LabeledGraph};
pub use single::SingleParityCode;
pub use triple::TripleCode;
