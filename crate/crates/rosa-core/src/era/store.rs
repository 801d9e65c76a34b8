use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::pattern::PatternError;
use super::schema::{Schema, SchemaDef, SchemaError};
use super::value::Value;

/// Opaque instance identifier. Ids are assigned sequentially, so sorting
/// by id reproduces insertion order and keeps every iteration deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct InstanceId(pub u64);

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An entity or relationship instance. Relations carry role fillers;
/// both carry attributes as a multimap preserving write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: InstanceId,
    pub type_name: String,
    pub attrs: BTreeMap<String, Vec<Value>>,
    pub roles: BTreeMap<String, BTreeSet<InstanceId>>,
}

impl Instance {
    /// Latest value by write order, which is the logical value of the
    /// attribute under replace-on-write semantics.
    pub fn latest(&self, attr: &str) -> Option<&Value> {
        self.attrs.get(attr).and_then(|vs| vs.last())
    }

    pub fn players(&self, role: &str) -> impl Iterator<Item = InstanceId> + '_ {
        self.roles.get(role).into_iter().flatten().copied()
    }

    pub fn all_players(&self) -> impl Iterator<Item = InstanceId> + '_ {
        self.roles.values().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreError {
    Schema(SchemaError),
    SchemaAlreadyDefined,
    UnknownType(String),
    UnknownAttr { type_name: String, attr: String },
    ValueKindMismatch { type_name: String, attr: String },
    MissingKey { type_name: String },
    KeyCollision { type_name: String, key: String },
    KeyImmutable { type_name: String, attr: String },
    UnknownRole { type_name: String, role: String },
    RolesOnEntity { type_name: String },
    NoRoleFillers { type_name: String },
    PlayerTypeNotAllowed { type_name: String, role: String, player_type: String },
    UnknownInstance(InstanceId),
    InstanceReferenced { id: InstanceId, by: InstanceId },
    Pattern(PatternError),
}

impl fmt::Display for StoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreError::Schema(e) => write!(f, "schema error: {e}"),
            StoreError::SchemaAlreadyDefined => write!(f, "schema already defined"),
            StoreError::UnknownType(t) => write!(f, "unknown type '{t}'"),
            StoreError::UnknownAttr { type_name, attr } => {
                write!(f, "attribute '{attr}' not defined for type '{type_name}'")
            }
            StoreError::ValueKindMismatch { type_name, attr } => {
                write!(f, "value kind mismatch for '{type_name}.{attr}'")
            }
            StoreError::MissingKey { type_name } => {
                write!(f, "missing key attribute for type '{type_name}'")
            }
            StoreError::KeyCollision { type_name, key } => {
                write!(f, "key '{key}' already taken for type '{type_name}'")
            }
            StoreError::KeyImmutable { type_name, attr } => {
                write!(f, "key attribute '{attr}' of '{type_name}' is immutable")
            }
            StoreError::UnknownRole { type_name, role } => {
                write!(f, "relation '{type_name}' has no role '{role}'")
            }
            StoreError::RolesOnEntity { type_name } => {
                write!(f, "entity type '{type_name}' cannot take role fillers")
            }
            StoreError::NoRoleFillers { type_name } => {
                write!(f, "relation '{type_name}' needs at least one role filler")
            }
            StoreError::PlayerTypeNotAllowed { type_name, role, player_type } => {
                write!(f, "type '{player_type}' may not play role '{role}' of '{type_name}'")
            }
            StoreError::UnknownInstance(id) => write!(f, "unknown instance {id}"),
            StoreError::InstanceReferenced { id, by } => {
                write!(f, "instance {id} is still referenced by relation {by}")
            }
            StoreError::Pattern(e) => write!(f, "pattern error: {e}"),
        }
    }
}

impl core::error::Error for StoreError {}

impl From<SchemaError> for StoreError {
    fn from(e: SchemaError) -> Self {
        StoreError::Schema(e)
    }
}

impl From<PatternError> for StoreError {
    fn from(e: PatternError) -> Self {
        StoreError::Pattern(e)
    }
}

/// Virtual attributes layered over the store during matching. An overlay
/// entry shadows every stored value of that attribute, which is how
/// rule-inferred facts (statuses, requiredness) become visible to queries
/// without being written back.
#[derive(Debug, Clone, Default)]
pub struct AttrOverlay {
    entries: BTreeMap<InstanceId, BTreeMap<String, Value>>,
}

impl AttrOverlay {
    pub fn new() -> Self {
        AttrOverlay::default()
    }

    pub fn set(&mut self, id: InstanceId, attr: impl Into<String>, value: Value) {
        self.entries.entry(id).or_default().insert(attr.into(), value);
    }

    pub fn get(&self, id: InstanceId, attr: &str) -> Option<&Value> {
        self.entries.get(&id).and_then(|m| m.get(attr))
    }
}

/// Single source of truth for all MAPE components.
///
/// Contract: single writer, multiple readers. All mutations go through
/// `&mut self` and bump a mutation counter (`epoch`) used to invalidate
/// derived caches; readers working from one epoch see a consistent state.
#[derive(Debug, Clone, Default)]
pub struct Store {
    schema: Option<Schema>,
    instances: BTreeMap<InstanceId, Instance>,
    key_index: BTreeMap<(String, Value), InstanceId>,
    next_id: u64,
    epoch: u64,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// Defines the schema all subsequent inserts are validated against.
    /// Redefinition is rejected.
    pub fn define_schema(&mut self, defs: &SchemaDef) -> Result<(), StoreError> {
        if self.schema.is_some() {
            return Err(StoreError::SchemaAlreadyDefined);
        }
        self.schema = Some(Schema::validate(defs)?);
        self.epoch += 1;
        Ok(())
    }

    pub fn schema(&self) -> Option<&Schema> {
        self.schema.as_ref()
    }

    /// Mutation counter. Bumped by every successful write.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, id: InstanceId) -> Option<&Instance> {
        self.instances.get(&id)
    }

    /// All instances in id order.
    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.instances.values()
    }

    pub fn instances_of<'a>(
        &'a self,
        type_name: &'a str,
    ) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.values().filter(move |i| i.type_name == type_name)
    }

    /// Key lookup: at most one instance per (type, key value).
    pub fn by_key(&self, type_name: &str, key: &Value) -> Option<InstanceId> {
        self.key_index.get(&(String::from(type_name), key.clone())).copied()
    }

    pub fn latest_attr(&self, id: InstanceId, attr: &str) -> Option<&Value> {
        self.get(id).and_then(|i| i.latest(attr))
    }

    pub fn insert(
        &mut self,
        type_name: &str,
        attrs: Vec<(String, Value)>,
        role_fillers: Vec<(String, Vec<InstanceId>)>,
    ) -> Result<InstanceId, StoreError> {
        let info = self
            .schema
            .as_ref()
            .and_then(|s| s.type_info(type_name))
            .ok_or_else(|| StoreError::UnknownType(String::from(type_name)))?
            .clone();

        let mut attr_map: BTreeMap<String, Vec<Value>> = BTreeMap::new();
        for (name, value) in attrs {
            let def = info.attrs.get(&name).ok_or_else(|| StoreError::UnknownAttr {
                type_name: info.name.clone(),
                attr: name.clone(),
            })?;
            if def.kind != value.kind() {
                return Err(StoreError::ValueKindMismatch {
                    type_name: info.name.clone(),
                    attr: name,
                });
            }
            attr_map.entry(name).or_default().push(value);
        }

        let key_value = match &info.key_attr {
            Some(key) => {
                let v = attr_map
                    .get(key)
                    .and_then(|vs| vs.last())
                    .ok_or_else(|| StoreError::MissingKey { type_name: info.name.clone() })?
                    .clone();
                if self.key_index.contains_key(&(info.name.clone(), v.clone())) {
                    return Err(StoreError::KeyCollision {
                        type_name: info.name.clone(),
                        key: alloc::format!("{v}"),
                    });
                }
                Some(v)
            }
            None => None,
        };

        let mut role_map: BTreeMap<String, BTreeSet<InstanceId>> = BTreeMap::new();
        if info.is_relation {
            let mut filler_count = 0usize;
            for (role, players) in role_fillers {
                let allowed = info.roles.get(&role).ok_or_else(|| StoreError::UnknownRole {
                    type_name: info.name.clone(),
                    role: role.clone(),
                })?;
                for p in players {
                    let player = self
                        .instances
                        .get(&p)
                        .ok_or(StoreError::UnknownInstance(p))?;
                    if !allowed.contains(&player.type_name) {
                        return Err(StoreError::PlayerTypeNotAllowed {
                            type_name: info.name.clone(),
                            role: role.clone(),
                            player_type: player.type_name.clone(),
                        });
                    }
                    role_map.entry(role.clone()).or_default().insert(p);
                    filler_count += 1;
                }
            }
            if filler_count == 0 && !info.allow_empty_roles {
                return Err(StoreError::NoRoleFillers { type_name: info.name.clone() });
            }
        } else if !role_fillers.is_empty() {
            return Err(StoreError::RolesOnEntity { type_name: info.name.clone() });
        }

        let id = InstanceId(self.next_id);
        self.next_id += 1;
        if let Some(v) = key_value {
            self.key_index.insert((info.name.clone(), v), id);
        }
        self.instances.insert(
            id,
            Instance { id, type_name: info.name, attrs: attr_map, roles: role_map },
        );
        self.epoch += 1;
        Ok(id)
    }

    /// Replace-on-write: after this call the attribute holds exactly one
    /// value. Key attributes are immutable.
    pub fn set_attribute(
        &mut self,
        id: InstanceId,
        attr: &str,
        value: Value,
    ) -> Result<(), StoreError> {
        let type_name = self
            .instances
            .get(&id)
            .ok_or(StoreError::UnknownInstance(id))?
            .type_name
            .clone();
        let info = self
            .schema
            .as_ref()
            .and_then(|s| s.type_info(&type_name))
            .ok_or_else(|| StoreError::UnknownType(type_name.clone()))?;
        let def = info.attrs.get(attr).ok_or_else(|| StoreError::UnknownAttr {
            type_name: type_name.clone(),
            attr: String::from(attr),
        })?;
        if def.is_key {
            return Err(StoreError::KeyImmutable { type_name, attr: String::from(attr) });
        }
        if def.kind != value.kind() {
            return Err(StoreError::ValueKindMismatch { type_name, attr: String::from(attr) });
        }
        let inst = self.instances.get_mut(&id).expect("checked above");
        let slot = inst.attrs.entry(String::from(attr)).or_default();
        slot.clear();
        slot.push(value);
        self.epoch += 1;
        Ok(())
    }

    /// Removes one specific value; the attribute disappears once no values
    /// remain. Key attributes are immutable.
    pub fn delete_attribute(
        &mut self,
        id: InstanceId,
        attr: &str,
        value: &Value,
    ) -> Result<(), StoreError> {
        let type_name = self
            .instances
            .get(&id)
            .ok_or(StoreError::UnknownInstance(id))?
            .type_name
            .clone();
        let info = self
            .schema
            .as_ref()
            .and_then(|s| s.type_info(&type_name))
            .ok_or_else(|| StoreError::UnknownType(type_name.clone()))?;
        let def = info.attrs.get(attr).ok_or_else(|| StoreError::UnknownAttr {
            type_name: type_name.clone(),
            attr: String::from(attr),
        })?;
        if def.is_key {
            return Err(StoreError::KeyImmutable { type_name, attr: String::from(attr) });
        }
        let inst = self.instances.get_mut(&id).expect("checked above");
        if let Some(vs) = inst.attrs.get_mut(attr) {
            vs.retain(|v| v != value);
            if vs.is_empty() {
                inst.attrs.remove(attr);
            }
        }
        self.epoch += 1;
        Ok(())
    }

    /// Restricted deletion: an instance still playing a role somewhere
    /// cannot be removed (no cascade).
    pub fn delete_instance(&mut self, id: InstanceId) -> Result<(), StoreError> {
        if !self.instances.contains_key(&id) {
            return Err(StoreError::UnknownInstance(id));
        }
        for other in self.instances.values() {
            if other.id != id && other.all_players().any(|p| p == id) {
                return Err(StoreError::InstanceReferenced { id, by: other.id });
            }
        }
        let removed = self.instances.remove(&id).expect("checked above");
        if let Some(info) = self.schema.as_ref().and_then(|s| s.type_info(&removed.type_name)) {
            if let Some(key) = &info.key_attr {
                if let Some(v) = removed.latest(key) {
                    self.key_index.remove(&(removed.type_name.clone(), v.clone()));
                }
            }
        }
        self.epoch += 1;
        Ok(())
    }

    /// Effective latest attribute value under an optional overlay: the
    /// overlay shadows stored values for the attributes it carries.
    pub fn effective_latest<'a>(
        &'a self,
        overlay: Option<&'a AttrOverlay>,
        id: InstanceId,
        attr: &str,
    ) -> Option<&'a Value> {
        if let Some(ov) = overlay {
            if let Some(v) = ov.get(id, attr) {
                return Some(v);
            }
        }
        self.latest_attr(id, attr)
    }
}
