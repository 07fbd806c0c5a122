//! Spectra of concept and role cardinality queries over description logic
//! knowledge bases.
//!
//! The spectrum of an atomic counting query `q` on a knowledge base `K` is
//! the set of answers `#q` across all models of `K`, a subset of N ∪ {∞}.
//! For the supported logics these sets are closed under addition and
//! ultimately periodic, so they have a finite canonical representation
//! ([`spectrum::SpectrumRep`]). This crate provides:
//!
//! - [`kb`]: the knowledge base data model, a line-oriented text format,
//!   normal forms and fragment detection;
//! - [`interp`]: finite interpretations, model checking, answer counting and
//!   a bounded brute-force model enumerator used as a test oracle;
//! - [`spectrum`]: the canonical representation with membership, generator
//!   conversions and closure checks;
//! - [`horn`]: saturation-based reasoning for the Horn fragments, inverse
//!   functional paths, cycle reversion, and the model completion machinery
//!   that produces finite witnesses;
//! - [`solver`]: the end-to-end spectrum computation with closed-predicate
//!   membership probes and per-fragment shape validation;
//! - [`realize`]: constructors that emit knowledge bases realizing prescribed
//!   spectra, graph reductions for stress testing and the built-in fixture
//!   corpus.

pub mod interp;
pub mod kb;
pub mod spectrum;
pub mod horn;
pub mod realize;
pub mod solver;

pub use kb::{parse_kb, serialize_kb, CardinalityQuery, Fragment, Kb};
pub use spectrum::{Card, SpectrumRep};
