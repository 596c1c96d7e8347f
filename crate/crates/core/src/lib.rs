//! Finite directed systems of finite-dimensional C*-algebras.
//!
//! A finite-dimensional C*-algebra is a direct sum of full matrix blocks
//! ([`FdAlgebra`]). Surjective *-homomorphisms between them are block
//! selections followed by unitary conjugation ([`StarMorphism`]), and closed
//! two-sided *-ideals are block supports ([`BlockIdeal`]). A finite directed
//! family of such algebras with compatible connecting surjections
//! ([`DirectedSystem`]) models a locally C*-algebra through its coherent
//! tuples ([`CoherentElement`]).
//!
//! The positive-cone machinery (spectra, positive and negative parts, square
//! roots) lives in [`fdalg`]; the decomposition `(I+J)⁺ = I⁺ + J⁺` at one
//! level is [`decompose_positive`] and at the limit is
//! [`limit_decompose_positive`].

pub mod error;
pub mod fdalg;
pub mod ideals;
pub mod json;
pub mod kernel;
pub mod lemmas;
pub mod limit;
pub mod random;
pub mod report;

pub use error::{Error, Result};
pub use fdalg::{AlgElement, FdAlgebra, PosNegParts, PositivityRoutes, SpectrumReport};
pub use ideals::{decompose_positive, BlockIdeal, StarMorphism};
pub use kernel::{apply_spectral, eig_hermitian, operator_norm, CMatrix, EigResult, MatrixOp, C64};
pub use lemmas::{lemma_suite, LemmaReport};
pub use limit::{
    limit_decompose_positive, BoundNorm, CoherentElement, CoherentIdeal, DirectedSystem, LevelId,
};
pub use random::SampleRng;
pub use report::{LawOutcome, LawTally};

/// Default relative tolerance for positivity, Hermitian and membership tests.
pub const DEFAULT_TOL: f64 = 1e-9;
