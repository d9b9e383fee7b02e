//! Desk-scale laboratory for the combinatorics behind list-decoding
//! Reed-Solomon codes: exact prime-field arithmetic, Nash-Williams-Tutte
//! tree packings, t-wise intersection matrices with tree-packing
//! nonsingularity certificates, hypergraph weak partition connectivity
//! and tree-decomposition signatures, the randomized subset sieve,
//! strongly perfect hash matrices, brute-force list-decoding oracles,
//! and a counterexample-search harness.
//!
//! Everything is exact or explicitly randomized with caller-owned seeds;
//! every randomized claim is backed by a machine-checkable certificate
//! or a statistical acceptance test. See the `examples/` directory for
//! one runnable walkthrough per capability.

pub mod codes;
pub mod error;
pub mod fields;
pub mod graphs;
pub mod hypergraphs;
pub mod intmat;
pub mod lab;
pub mod sieve;

pub use error::{Error, Result};
pub use fields::{FieldElement, FieldSpec};
pub use graphs::{MultiGraph, Partition, TreePacking};
pub use hypergraphs::{Hypergraph, LabeledGraph, Signature, TreeDecomposition};
pub use intmat::{CycleBasis, IntersectionMatrix, SetSystem};
pub use sieve::{SieveConfig, SieveTrace};
