//! Exact construction and verification of Lax pairs for the q-Painlevé
//! equations on the A5 surface, obtained from a reduced hypercube of coupled
//! H3/D4 quad-equations on Z^4.

pub mod exactfield;
pub mod lattice4d;
pub mod laxbuild;
pub mod laxverify;
pub mod matrix;
pub mod painleve;
pub mod quadcat;
pub mod parallel;
pub mod reduction;

pub use exactfield::{Field, FieldError, GaussianRational, Polynomial, RationalExpr, Symbol};
pub use matrix::Matrix2;
pub use painleve::{MapId, PainleveConfig};
