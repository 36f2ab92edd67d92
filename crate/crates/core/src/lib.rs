//! Exact computations for the cluster (supercharacter) theory of the
//! unipotent upper-triangular group U(n, F_q).

pub mod characters;
pub mod clusters;
pub mod config;
pub mod cyclotomic;
pub mod discrete;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod matrix;
pub mod oracle;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement};
