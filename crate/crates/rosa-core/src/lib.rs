//! Core engine for knowledge-driven task-and-architecture co-adaptation.
//!
//! The crate is organized around a central knowledge base: a typed
//! entity-relation-attribute store ([`era`]) holding both the design-time
//! adaptation model ([`model`]) and everything produced at runtime.
//! Status rules ([`inference`]) derive element feasibility from monitored
//! measurements; the MAPE components ([`mapek`]) plan and execute
//! architectural reconfiguration through knowledge-base services only; a
//! behavior-tree task layer ([`bt`]) gates actions on their inferred
//! feasibility; and a deterministic tick simulator ([`sim`]) drives the
//! whole loop against scripted scenarios.
//!
//! The crate is `no_std` compatible (with `alloc`). File formats, IO and
//! the command line live in the companion `rosa-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bt;
pub mod era;
pub mod inference;
pub mod kb;
pub mod mapek;
pub mod model;
pub mod sim;
pub mod trace;
