// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod cli;
pub mod error;
pub mod laxlink;
pub mod qcalc;
pub mod qheun;
pub mod rvd;
pub mod shiftops;

pub use error::{Error, Result};
