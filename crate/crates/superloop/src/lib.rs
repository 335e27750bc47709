//! Gaussian Hermitian supermatrix models with sources and external field:
//! exact tiny-size Berezin oracles, the graded-Wick fatgraph expansion of
//! supertrace moments, rational genus-0 spectral curves, topological-
//! recursion free energies, and the x↔y duality check, all at desk scale.
//!
//! The algebraic layer is generic over the coefficient [`scalar::Scalar`];
//! exact identities run over [`CQ`] (complex rationals) and the analytic
//! curve/recursion layer over [`C64`].

pub mod curve;
pub mod fatgraph;
pub mod grassmann;
pub mod invariants;
pub mod loopcheck;
pub mod oracle;
pub mod partition;
pub mod scalar;
pub mod series;
pub mod supermatrix;
pub mod sympoly;
pub mod testutil;
pub mod toprec;

pub use scalar::{cq, cqi, Scalar, C64, CQ, CR128, Q};

/// Grassmann element over exact complex rationals.
pub type Ga = grassmann::GrassmannElement<CQ>;
/// Supermatrix over exact complex rationals.
pub type SMat = supermatrix::SuperMatrix<CQ>;
