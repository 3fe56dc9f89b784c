//! A desk-scale numerical laboratory for the metric geometry of
//! representations of finite-dimensional C*-algebras.
//!
//! The crate builds up in layers:
//!
//! * [`linalg`]: dense complex matrices, operator norms, spectral radii,
//!   Haar-random and permutation unitaries.
//! * [`algebra`]: multi-matrix algebras, their elements, star-polynomial
//!   words, and a checker that a finite set generates.
//! * [`reps`]: finite-dimensional representations, the sup-over-a-set
//!   distance between them, homomorphisms and pullbacks, and a reproducible
//!   sampler of representation pairs.
//! * [`modulus`]: empirical moduli of continuity (running-max step functions
//!   and their least concave majorants) together with the calculus those
//!   moduli obey.
//! * [`duality`]: Fenchel conjugates of moduli, the induced approximation
//!   profile, and Lipschitz regularisation of functions on finite metric
//!   spaces.
//! * [`transport`]: finite metric spaces, Kantorovich distance by linear
//!   programming with an independent primal solver as cross-check, and the
//!   embedding of a space into representations of a commutative algebra.
//! * [`gallery`]: small self-certifying scenarios exercising the whole stack.
//!
//! All randomness flows through explicit `u64` seeds and a ChaCha stream, so
//! every number the crate produces is reproducible bit for bit, with or
//! without the `parallel` feature.

pub mod algebra;
pub mod duality;
pub mod error;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod modulus;
mod par;
pub mod reps;
mod simplex;
pub mod transport;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Unitary};

pub use num_complex::Complex64;
