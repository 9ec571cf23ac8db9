//! Generators, adversaries, Monte Carlo harness, verification suites, and
//! file formats around the `rocrs-core` algorithms.

pub mod adversary;
pub mod fileio;
pub mod gen;
pub mod harness;
pub mod verify;

pub use adversary::Strategy;
pub use harness::{estimate_selectability, mofs_run, HarnessConfig, SchemeId, SelectabilityReport};
pub use verify::Suite;
