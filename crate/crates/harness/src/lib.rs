//! Experiment harness for the first-order query model: bound formulas,
//! configuration, experiment runs, file formats, output tables and the
//! acceptance checks shared by the `mql` binary and the test suite.

pub mod bounds;
pub mod config;
pub mod emit;
pub mod experiment;
pub mod io;
pub mod verify;
