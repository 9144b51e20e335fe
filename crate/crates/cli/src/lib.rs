//! Harness library behind the `lipscale` binary: problem files, report
//! structures, the verification campaign and the demonstrations.

pub mod demos;
pub mod problem;
pub mod report;
pub mod verify;
