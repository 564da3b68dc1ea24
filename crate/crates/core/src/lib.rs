#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod config;
pub mod curve;
pub mod darboux;
pub mod energy;
pub mod error;
pub mod ivp;
pub mod pipeline;
pub mod quadrature;
pub mod ribbon;
pub mod table;
pub mod validate;

pub use curve::{ArcLengthCurve, HelixParams, TorusKnotParams, Vec3};
pub use error::{Result, RibbonError};
