//! The managing subsystem's MAPE components.
//!
//! Monitoring data enters through [`crate::kb::KnowledgeBase::ingest_diagnostic`];
//! the analyze step is the knowledge base's rule inference; the
//! [`Planner`] selects configurations; the [`Executor`] applies
//! reconfiguration plans to the managed processes. Components are
//! stateless: they hold no fields and exchange data exclusively through
//! knowledge-base services and the events queue, so tearing one down and
//! rebuilding it between events cannot change behavior.

mod engine;
mod executor;
mod planner;

pub use engine::{Engine, EventLogEntry};
pub use executor::{Executor, ProcessControl, StartRefused};
pub use planner::Planner;
