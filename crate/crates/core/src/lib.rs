//! Qutrit circuit simulation with the ternary quantum one-time pad and
//! symmetric homomorphic evaluation by key conjugation.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, states, density matrices and metrics
//! - [`gates`]: the ternary gate library
//! - [`circuit`]: wire placement, circuit unitaries, circuit text format
//! - [`cartan`]: nine-parameter factorization of 3×3 unitaries
//! - [`synthesis`]: exact GCX-sequence search for two-qutrit permutations
//! - [`otp`]: keys, the encryption operator, encrypt/decrypt
//! - [`qhe`]: the four homomorphic evaluation schemes
//! - [`security`]: key-guessing and ciphertext-mixedness experiments
//! - [`formats`]: key, state and job file formats

pub mod cartan;
pub mod circuit;
pub mod error;
pub mod formats;
pub mod gates;
pub mod linalg;
mod optim;
pub mod otp;
pub mod qhe;
pub mod sampling;
pub mod security;
pub mod synthesis;

pub use error::{Error, Result};
pub use linalg::{CMat, DensityMatrix, QState, C64};
