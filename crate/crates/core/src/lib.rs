//! Exact counting of lattice points in partition polytopes.
//!
//! Given a list of integer vectors spanning a pointed cone, the number of
//! ways to write `λ` as a nonnegative integer combination of them is a
//! quasi-polynomial on each chamber of the arrangement the vectors cut
//! out.  This crate computes those closed forms exactly, together with
//! their continuous counterparts (volumes), weighted versions with
//! polynomial or exponential weights, and the dilation counting functions
//! of rational polytopes presented as partition polytopes.

pub mod arrangement;
pub mod cyclotomic;
pub mod error;
pub mod formula;
pub mod linalg;
pub mod oracle;
pub mod residue;
pub mod separation;
pub mod series;

pub use arrangement::{Chamber, Location, System};
pub use cyclotomic::CycNumber;
pub use error::Error;
pub use formula::{EhrhartQP, QuasiPolynomial};
pub use linalg::{IntMat, IntVec, Rat, RatMat, RatVec};
pub use oracle::{Embedding, InequalityPolytope};
pub use residue::{Pole, SimpleFractionVector};
pub use separation::{AdmissibleTerm, Decomposition, MeroFunction};
pub use series::{SymbolicPoly, TruncSeries};
