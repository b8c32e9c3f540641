#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amg;
pub mod bench;
pub mod krylov;
pub mod partition;
pub mod smoothers;
pub mod sparse;
