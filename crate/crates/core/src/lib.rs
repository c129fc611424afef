//! Multitasking multiobjective optimization by decomposition with internal
//! and external neighborhoods, plus the benchmark suite, quality metrics and
//! an experiment harness around it.

pub mod algorithm;
pub mod decomposition;
pub mod gra;
pub mod harness;
pub mod metrics;
pub mod problems;
pub mod space;
pub mod variation;
