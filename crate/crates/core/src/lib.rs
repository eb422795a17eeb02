//! Computing with finite positive modal algebras: bounded distributive
//! lattices with a box and a diamond operator.
//!
//! The crate is organized bottom-up. [`algebra`] holds the carrier type and
//! axiom checks, [`syntax`] the term language, [`congruence`] and
//! [`constructions`] the universal-algebra toolkit, and the remaining modules
//! build free algebras, enumerate small algebras, compare finitely generated
//! varieties and decide structural-completeness properties at desk scale.

pub mod algebra;
pub mod completeness;
pub mod congruence;
pub mod constructions;
pub mod corpus;
pub mod enumerate;
pub mod error;
pub mod free;
pub mod syntax;
pub mod varieties;

pub use algebra::{AlgebraData, Elem, FiniteAlgebra, Kind, ValidationReport, Violation};
pub use error::{Error, Result};
