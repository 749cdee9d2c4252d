//! Exact integer algebra for spectral sequences of Z^n-actions on K-theory:
//! integer matrices, finitely generated abelian groups, homological algebra
//! and the page-by-page spectral sequence engine.

pub mod abgrp;
pub mod error;
pub mod homalg;
pub mod intmat;
pub mod specseq;

pub use abgrp::{FgAbGroup, GroupHom, Invariants, Subgroup, Subquotient};
pub use homalg::{CochainComplex, ExactCouple, ExtensionReport, Resolution};
pub use error::{Error, Result};
pub use intmat::IntMatrix;
pub use specseq::{ActionSpec, BigradedPage, D2Data, RunOptions, SpecFlags, TupleIndex};
