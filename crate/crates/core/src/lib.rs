#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod catalog;
pub mod elliptic;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod poly;
pub mod qes;
pub mod roots;
mod math;

pub use elliptic::{complete_k, jacobi, JacobiEvaluator, JacobiTriple, Modulus};
pub use error::{Error, Result};
