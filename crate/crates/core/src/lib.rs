#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ballgeom;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod mc;
pub mod measures;
pub mod orthopoly;
pub mod polyalg;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod tensorspec;
pub mod verify;

pub use coeff::Coefficient;
pub use error::{Error, Result};
pub use polyalg::{parse_poly, MultiIndex, Polynomial};
