//! Standard-library companion to `hiersel-core`: configuration parsing,
//! factorial sweeps, sweep analysis, synthetic corpus generation, corpus
//! loading, CSV serialization, and gnuplot script emission. The `hiersel`
//! binary is a thin wrapper over these modules.

pub mod analysis;
pub mod config;
pub mod csvio;
pub mod gencorpus;
pub mod gnuplot;
pub mod loader;
pub mod presets;
pub mod sweep;
