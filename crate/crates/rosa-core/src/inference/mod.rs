//! Status inference over the knowledge model.
//!
//! The rule set is fixed: constraint satisfaction, component-configuration
//! feasibility, component status, function-design feasibility, function
//! status and action status. Dependencies between the rules form an
//! acyclic chain, so one stratified pass per store epoch computes the
//! fixpoint. Evaluation is a pure function of store contents: recomputing
//! at the same epoch yields an identical snapshot.

mod rules;
mod snapshot;

pub use rules::evaluate;
pub use snapshot::{Analysis, StatusSnapshot};
