#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod expr;
pub mod frame;
pub mod geodesics;
pub mod jets;
pub mod linalg;
pub mod metrics;
pub mod omega;
pub mod report;
