//! Exact arithmetic kernel.

pub mod gauss;
pub mod jet;
pub mod matrix;
pub mod numeric;
pub mod poly;
pub mod ratfun;

pub use gauss::GaussRat;
pub use jet::{ratfun_jet, Jet};
pub use numeric::NumPoly;
pub use matrix::{exact_rank, hermitian_inertia, HermitianMatrix, Inertia};
pub use poly::{Exps, Poly, VarSet};
pub use ratfun::RatFun;
