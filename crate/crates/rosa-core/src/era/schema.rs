use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::value::ValueKind;

/// Attribute definition: name, value kind and whether it is the unique key
/// of its owning type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrDef {
    pub name: String,
    pub kind: ValueKind,
    pub is_key: bool,
}

impl AttrDef {
    pub fn new(name: impl Into<String>, kind: ValueKind) -> Self {
        AttrDef { name: name.into(), kind, is_key: false }
    }

    pub fn key(name: impl Into<String>, kind: ValueKind) -> Self {
        AttrDef { name: name.into(), kind, is_key: true }
    }
}

/// A role of a relation type together with the set of types allowed to
/// play it. Players may be entity types or relation types, which is what
/// makes higher-order relationships expressible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleDef {
    pub name: String,
    pub players: BTreeSet<String>,
}

impl RoleDef {
    pub fn new<I, S>(name: impl Into<String>, players: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RoleDef {
            name: name.into(),
            players: players.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeKind {
    Entity,
    Relation {
        roles: Vec<RoleDef>,
        /// Whether instances may exist with zero role fillers. Off for
        /// every type except ones that explicitly opt in (reconfiguration
        /// plans record no-op reconfigurations as empty instances).
        allow_empty: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub kind: TypeKind,
    pub attrs: Vec<AttrDef>,
}

/// A schema definition: the raw, unvalidated description of entity types,
/// relation types with their roles, and per-type attribute definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaDef {
    pub types: Vec<TypeDef>,
}

impl SchemaDef {
    pub fn new() -> Self {
        SchemaDef::default()
    }

    pub fn entity(mut self, name: impl Into<String>, attrs: Vec<AttrDef>) -> Self {
        self.types.push(TypeDef { name: name.into(), kind: TypeKind::Entity, attrs });
        self
    }

    pub fn relation(
        mut self,
        name: impl Into<String>,
        roles: Vec<RoleDef>,
        attrs: Vec<AttrDef>,
    ) -> Self {
        self.types.push(TypeDef {
            name: name.into(),
            kind: TypeKind::Relation { roles, allow_empty: false },
            attrs,
        });
        self
    }

    pub fn relation_allow_empty(
        mut self,
        name: impl Into<String>,
        roles: Vec<RoleDef>,
        attrs: Vec<AttrDef>,
    ) -> Self {
        self.types.push(TypeDef {
            name: name.into(),
            kind: TypeKind::Relation { roles, allow_empty: true },
            attrs,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    DuplicateType(String),
    DuplicateAttr { type_name: String, attr: String },
    MultipleKeys(String),
    DuplicateRole { relation: String, role: String },
    EmptyRolePlayers { relation: String, role: String },
    UnknownPlayerType { relation: String, role: String, player: String },
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::DuplicateType(t) => write!(f, "duplicate type name '{t}'"),
            SchemaError::DuplicateAttr { type_name, attr } => {
                write!(f, "duplicate attribute '{attr}' on type '{type_name}'")
            }
            SchemaError::MultipleKeys(t) => {
                write!(f, "type '{t}' declares more than one key attribute")
            }
            SchemaError::DuplicateRole { relation, role } => {
                write!(f, "duplicate role '{role}' on relation '{relation}'")
            }
            SchemaError::EmptyRolePlayers { relation, role } => {
                write!(f, "role '{role}' of relation '{relation}' allows no player types")
            }
            SchemaError::UnknownPlayerType { relation, role, player } => {
                write!(f, "role '{role}' of relation '{relation}' references unknown type '{player}'")
            }
        }
    }
}

impl core::error::Error for SchemaError {}

/// Validated type information, indexed for lookups.
#[derive(Debug, Clone)]
pub struct TypeInfo {
    pub name: String,
    pub is_relation: bool,
    pub allow_empty_roles: bool,
    pub roles: BTreeMap<String, BTreeSet<String>>,
    pub attrs: BTreeMap<String, AttrDef>,
    pub key_attr: Option<String>,
}

/// A validated schema.
#[derive(Debug, Clone)]
pub struct Schema {
    types: BTreeMap<String, TypeInfo>,
}

impl Schema {
    pub fn validate(def: &SchemaDef) -> Result<Schema, SchemaError> {
        let mut types: BTreeMap<String, TypeInfo> = BTreeMap::new();
        let declared: BTreeSet<&str> = def.types.iter().map(|t| t.name.as_str()).collect();

        for td in &def.types {
            if types.contains_key(&td.name) {
                return Err(SchemaError::DuplicateType(td.name.clone()));
            }
            let mut attrs = BTreeMap::new();
            let mut key_attr = None;
            for a in &td.attrs {
                if attrs.contains_key(&a.name) {
                    return Err(SchemaError::DuplicateAttr {
                        type_name: td.name.clone(),
                        attr: a.name.clone(),
                    });
                }
                if a.is_key {
                    if key_attr.is_some() {
                        return Err(SchemaError::MultipleKeys(td.name.clone()));
                    }
                    key_attr = Some(a.name.clone());
                }
                attrs.insert(a.name.clone(), a.clone());
            }
            let (is_relation, allow_empty_roles, roles) = match &td.kind {
                TypeKind::Entity => (false, false, BTreeMap::new()),
                TypeKind::Relation { roles, allow_empty } => {
                    let mut map = BTreeMap::new();
                    for r in roles {
                        if map.contains_key(&r.name) {
                            return Err(SchemaError::DuplicateRole {
                                relation: td.name.clone(),
                                role: r.name.clone(),
                            });
                        }
                        if r.players.is_empty() {
                            return Err(SchemaError::EmptyRolePlayers {
                                relation: td.name.clone(),
                                role: r.name.clone(),
                            });
                        }
                        for p in &r.players {
                            if !declared.contains(p.as_str()) {
                                return Err(SchemaError::UnknownPlayerType {
                                    relation: td.name.clone(),
                                    role: r.name.clone(),
                                    player: p.clone(),
                                });
                            }
                        }
                        map.insert(r.name.clone(), r.players.clone());
                    }
                    (true, *allow_empty, map)
                }
            };
            types.insert(
                td.name.clone(),
                TypeInfo {
                    name: td.name.clone(),
                    is_relation,
                    allow_empty_roles,
                    roles,
                    attrs,
                    key_attr,
                },
            );
        }
        Ok(Schema { types })
    }

    pub fn type_info(&self, name: &str) -> Option<&TypeInfo> {
        self.types.get(name)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.keys().map(String::as_str)
    }
}
