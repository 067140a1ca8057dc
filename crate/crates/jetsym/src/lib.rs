//! jetsym: a symbolic workbench for Lie symmetry prolongation and
//! superalgebra verification of coupled matrix Schrödinger-type systems.
//!
//! The crate is organized around an exact symbolic expression core
//! ([`expr`]), an algebra of matrix differential operators ([`operator`]),
//! the prolongation machinery for jet-space vector fields ([`prolong`]),
//! built-in model definitions ([`models`]), structure-constant verification
//! ([`algebra`]) and numeric cross-checks of finite transformations
//! ([`numcheck`]). The `jetsym` binary exposes all of it on the command
//! line.

pub mod algebra;
pub mod expr;
pub mod models;
pub mod numcheck;
pub mod operator;
pub mod prolong;
pub mod report;
