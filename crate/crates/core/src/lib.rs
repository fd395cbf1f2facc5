pub mod error;
pub mod ext;
pub mod gen;
pub mod group;
pub mod hermite;
pub mod json;
pub mod laurent;
pub mod map;
pub mod matrix;
pub mod nt;
pub mod poset;
pub mod scalar;
pub mod smith;
pub mod solve;
pub mod uct;

pub use error::{Error, Result};
pub use scalar::{Int, Scalar};

pub type IntMatrix = matrix::Matrix<Int>;
