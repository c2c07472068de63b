// Guards written as `!(x > 0.0)` reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod groups;
pub mod image;
pub mod interp;
pub mod io;
pub mod phantom;
pub mod radon;
pub mod shearlet;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;
