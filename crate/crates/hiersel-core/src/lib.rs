//! Core numerics for a hierarchical-selection rank/frequency model.
//!
//! Objects are partitioned into `M` hierarchies; every selection first picks a
//! hierarchy (weights `fc`), then an object within it (weights `fw`), while the
//! hierarchy sizes themselves follow a third weight family (`fm`). Repeating the
//! two-step selection produces rank/frequency tables whose log-log straightness
//! and slope are what the rest of the toolkit measures.
//!
//! The crate is `no_std` (with `alloc`); everything that touches files, CSV, or
//! the command line lives in the companion `hiersel-cli` crate.
//!
//! Module map:
//! * [`dist`] — weight families over ranked supports and seeded sampling,
//! * [`hsmodel`] — model instances, Monte-Carlo simulation, exact expectations,
//! * [`fitkit`] — rank-series construction and the least-squares fits,
//! * [`statkit`] — correlations, KDE, one-way ANOVA, linear regression,
//! * [`corpus`] — topic-labelled corpora: ranks, NT groups, density curves,
//! * [`rng`] — the deterministic random-stream plumbing shared by all of it.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod dist;
pub mod fitkit;
pub mod hsmodel;
mod numeric;
pub mod rng;
pub mod statkit;
