//! Command-line front end: scenario files, an expression language for
//! metrics/fields/weights, a registry of named checks, embedded preset
//! experiments, and a deterministic JSON report format.

pub mod checks;
pub mod expr;
pub mod presets;
pub mod report;
pub mod runner;
pub mod scenario;
