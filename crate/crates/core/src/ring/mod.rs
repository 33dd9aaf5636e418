//! Exact scalar arithmetic: Laurent polynomials over big integers, their
//! text form, modular residues with CRT reconstruction, and exact
//! interpolation. Everything downstream (category data, engine backends,
//! the evaluation pipeline) builds on these types.

mod interp;
mod modular;
mod poly;
pub mod text;

pub use interp::interpolate_integer_points;
pub use modular::{
    add_mod, crt_reconstruct, mul_mod, neg_mod, select_primes, Residue, PRIME_LIMIT,
};
pub use poly::{LaurentPoly, VarSym};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("variable mismatch: `{left}` vs `{right}`")]
    VariableMismatch { left: String, right: String },
    #[error("polynomial text error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
    #[error("CRT failure: {0}")]
    Crt(String),
    #[error("interpolation failure: {0}")]
    Interpolation(String),
}
