//! The adaptation knowledge model instantiated on the typed store.
//!
//! Covers the model schema (actions, functions, components, designs,
//! configurations, measures, constraints, estimations and the runtime
//! relations), scenario documents, loading a document into a store,
//! element counting for development-effort comparison, and the generator
//! for hypothetical models used in the overhead growth study.

mod count;
mod document;
mod hypothetical;
mod index;
mod load;
mod schema;

pub use count::{count_elements, fingerprint, ElementCounts};
pub use document::{
    MeasureKind, MissionNode, ModelDecl, PlantParams, ScenarioDocument, TargetKind,
    TimelineEvent, TimelineKind,
};
pub use hypothetical::{generate_hypothetical, hypothetical_element_count};
pub use index::{
    ActionInfo, ComponentInfo, ConfigInfo, ConstraintInfo, DesignInfo, EstimationInfo,
    EstimationKind, FunctionInfo, MeasureInfo, ModelIndex, PlanInfo, RequiredActionInfo,
};
pub use load::{load_model, validate_document, LoadError, LoadErrorKind};
pub use schema::{attrs, roles, rosa_schema, status, types, CmpOp, Status};
