//! Generic typed entity-relation-attribute store.
//!
//! The store keeps entities and relationships as uniform [`Instance`]s:
//! relationships get the same identity and attribute machinery as entities,
//! so n-ary, many-to-many and higher-order relationships (relations whose
//! role players are themselves relations) need no reification. Attributes
//! may be owned by entities and relations alike.

mod pattern;
mod schema;
mod store;
mod value;

pub use pattern::{AttrPredicate, Clause, Cmp, Negation, Pattern, PatternError};
pub use schema::{AttrDef, RoleDef, Schema, SchemaDef, SchemaError, TypeDef, TypeKind};
pub use store::{AttrOverlay, Instance, InstanceId, Store, StoreError};
pub use value::{Value, ValueKind};
