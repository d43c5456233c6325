//! Exact operator algebra of the superintegrable τ₂(t) chiral Potts chain.
//!
//! The crate is generic over the scalar ring: operators are built over
//! [`Cyclotomic`] elements whose coefficients may be arbitrary-precision
//! rationals, overflow-checked integers or floats. The aliases below fix the
//! common choices.

pub mod cache;
pub mod check;
pub mod cyclotomic;
pub mod divided;
pub mod drinfeld;
pub mod error;
pub mod loop_algebra;
pub mod poly;
pub mod scalar;
pub mod sl2;
pub mod sparse;
pub mod state;
pub mod transfer;

pub use cache::{CacheOutcome, OperatorCache};
pub use check::{CheckResult, Status};
pub use divided::GenLabel;
pub use drinfeld::DrinfeldData;
pub use loop_algebra::{Family, LoopGenerators};
pub use cyclotomic::{q_factorial, q_integer, CycloContext, Cyclotomic};
pub use error::{ArithError, Error, Result};
pub use poly::Poly;
pub use scalar::{CheckedI64, CheckedRational, ExactLift, Field, RealCoeff, Ring};
pub use sl2::{RootSet, Sl2Decomposition};
pub use sparse::{OpPoly, SparseOp};
pub use state::{EdgeState, LatticeConfig, Sector, StateVector};

pub use num_rational::BigRational;

/// ℚ(ω) with arbitrary-precision rational coefficients.
pub type Cyclo<const N: usize> = Cyclotomic<BigRational, N>;
/// ℚ(ω) over overflow-checked 64-bit rationals.
pub type FastCyclo<const N: usize> = Cyclotomic<CheckedRational, N>;
/// ℤ[ω] over overflow-checked 64-bit integers.
pub type IntCyclo<const N: usize> = Cyclotomic<CheckedI64, N>;
/// ℚ(ω) approximated with `f64` coefficients.
pub type FloatCyclo<const N: usize> = Cyclotomic<f64, N>;

/// Exact operator over ℚ(ω).
pub type ExactOp<const N: usize> = SparseOp<Cyclo<N>>;
/// Exact operator-valued polynomial over ℚ(ω).
pub type ExactOpPoly<const N: usize> = OpPoly<Cyclo<N>>;
/// Polynomial in t over ℚ(ω).
pub type TPoly<const N: usize> = Poly<Cyclo<N>>;
