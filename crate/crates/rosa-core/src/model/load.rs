use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::era::{InstanceId, Store, StoreError, Value};

use super::document::{
    MeasureKind, ModelDecl, ScenarioDocument, TargetKind, TimelineKind,
};
use super::schema::{attrs, roles, rosa_schema, types};

#[derive(Debug, Clone, PartialEq)]
pub enum LoadErrorKind {
    Store(StoreError),
    UnknownReference { kind: &'static str, name: String },
    DuplicateName(String),
    DuplicateParameterLabel(String),
    EmptyList { what: &'static str },
    FunctionWithoutDesign(String),
    NonMonotonicTimeline { tick: i64 },
    NegativeTick { tick: i64 },
    NonFiniteNumber,
}

/// A model or document validation error, pointing back at the declaration
/// (by index into the model section) or timeline event that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadError {
    pub decl: Option<usize>,
    pub kind: LoadErrorKind,
}

impl LoadError {
    fn at(decl: usize, kind: LoadErrorKind) -> Self {
        LoadError { decl: Some(decl), kind }
    }

    fn general(kind: LoadErrorKind) -> Self {
        LoadError { decl: None, kind }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LoadErrorKind::Store(e) => write!(f, "{e}"),
            LoadErrorKind::UnknownReference { kind, name } => {
                write!(f, "unknown {kind} '{name}'")
            }
            LoadErrorKind::DuplicateName(n) => write!(f, "duplicate name '{n}'"),
            LoadErrorKind::DuplicateParameterLabel(l) => {
                write!(f, "duplicate parameter label '{l}'")
            }
            LoadErrorKind::EmptyList { what } => write!(f, "{what} must not be empty"),
            LoadErrorKind::FunctionWithoutDesign(n) => {
                write!(f, "function '{n}' is required by an action but has no function design")
            }
            LoadErrorKind::NonMonotonicTimeline { tick } => {
                write!(f, "timeline ticks must be non-decreasing (at tick {tick})")
            }
            LoadErrorKind::NegativeTick { tick } => write!(f, "negative tick {tick}"),
            LoadErrorKind::NonFiniteNumber => write!(f, "number must be finite"),
        }
    }
}

impl core::error::Error for LoadError {}

impl From<StoreError> for LoadErrorKind {
    fn from(e: StoreError) -> Self {
        LoadErrorKind::Store(e)
    }
}

fn measure_type(kind: MeasureKind) -> &'static str {
    match kind {
        MeasureKind::Measure => types::MEASURE,
        MeasureKind::Quality => types::QUALITY_ATTRIBUTE,
        MeasureKind::Environmental => types::ENVIRONMENTAL_ATTRIBUTE,
    }
}

struct Resolver {
    actions: BTreeMap<String, InstanceId>,
    functions: BTreeMap<String, InstanceId>,
    components: BTreeMap<String, InstanceId>,
    parameters: BTreeMap<String, InstanceId>,
    measures: BTreeMap<String, InstanceId>,
    designs: BTreeMap<String, InstanceId>,
    configs: BTreeMap<String, InstanceId>,
}

impl Resolver {
    fn target(
        &self,
        kind: TargetKind,
        name: &str,
    ) -> Result<InstanceId, LoadErrorKind> {
        let (map, what): (&BTreeMap<String, InstanceId>, &'static str) = match kind {
            TargetKind::Action => (&self.actions, "action"),
            TargetKind::Component => (&self.components, "component"),
            TargetKind::Design => (&self.designs, "function design"),
            TargetKind::Config => (&self.configs, "component configuration"),
        };
        map.get(name).copied().ok_or(LoadErrorKind::UnknownReference {
            kind: what,
            name: String::from(name),
        })
    }
}

/// Loads the model section into a fresh store. The load is total: any
/// error leaves nothing behind because the partially filled store is
/// dropped by the caller.
pub fn load_model(decls: &[ModelDecl]) -> Result<Store, LoadError> {
    let mut store = Store::new();
    store
        .define_schema(&rosa_schema())
        .map_err(|e| LoadError::general(e.into()))?;

    let mut r = Resolver {
        actions: BTreeMap::new(),
        functions: BTreeMap::new(),
        components: BTreeMap::new(),
        parameters: BTreeMap::new(),
        measures: BTreeMap::new(),
        designs: BTreeMap::new(),
        configs: BTreeMap::new(),
    };

    // Measure names must be unique across all measure subtypes, and keyed
    // names across element kinds referenced by targets must stay
    // resolvable, so duplicates are rejected per namespace here (the store
    // additionally enforces per-type key uniqueness).
    let dup = |name: &str| LoadErrorKind::DuplicateName(String::from(name));

    // Entities first.
    for (i, decl) in decls.iter().enumerate() {
        let res: Result<(), LoadErrorKind> = (|| {
            match decl {
                ModelDecl::Action { name } => {
                    let id = store.insert(
                        types::ACTION,
                        vec![(String::from(attrs::NAME), Value::Str(name.clone()))],
                        vec![],
                    )?;
                    if r.actions.insert(name.clone(), id).is_some() {
                        return Err(dup(name));
                    }
                }
                ModelDecl::Function { name, always_improve } => {
                    let id = store.insert(
                        types::FUNCTION,
                        vec![
                            (String::from(attrs::NAME), Value::Str(name.clone())),
                            (String::from(attrs::ALWAYS_IMPROVE), Value::Bool(*always_improve)),
                        ],
                        vec![],
                    )?;
                    if r.functions.insert(name.clone(), id).is_some() {
                        return Err(dup(name));
                    }
                }
                ModelDecl::Component { name, always_improve, package, executable, lifecycle } => {
                    let mut a = vec![
                        (String::from(attrs::NAME), Value::Str(name.clone())),
                        (String::from(attrs::ALWAYS_IMPROVE), Value::Bool(*always_improve)),
                    ];
                    if let Some(p) = package {
                        a.push((String::from(attrs::PACKAGE), Value::Str(p.clone())));
                    }
                    if let Some(e) = executable {
                        a.push((String::from(attrs::EXECUTABLE), Value::Str(e.clone())));
                    }
                    if let Some(l) = lifecycle {
                        a.push((String::from(attrs::LIFECYCLE_MANAGED), Value::Bool(*l)));
                    }
                    let id = store.insert(types::COMPONENT, a, vec![])?;
                    if r.components.insert(name.clone(), id).is_some() {
                        return Err(dup(name));
                    }
                }
                ModelDecl::Parameter { label, key, value } => {
                    let id = store.insert(
                        types::COMPONENT_PARAMETER,
                        vec![
                            (String::from(attrs::KEY), Value::Str(key.clone())),
                            (String::from(attrs::VALUE), Value::Str(value.clone())),
                        ],
                        vec![],
                    )?;
                    if r.parameters.insert(label.clone(), id).is_some() {
                        return Err(LoadErrorKind::DuplicateParameterLabel(label.clone()));
                    }
                }
                ModelDecl::Measure { name, kind } => {
                    if r.measures.contains_key(name) {
                        return Err(dup(name));
                    }
                    let id = store.insert(
                        measure_type(*kind),
                        vec![(String::from(attrs::NAME), Value::Str(name.clone()))],
                        vec![],
                    )?;
                    r.measures.insert(name.clone(), id);
                }
                _ => {}
            }
            Ok(())
        })();
        res.map_err(|k| LoadError::at(i, k))?;
    }

    // Relations that only reference entities.
    for (i, decl) in decls.iter().enumerate() {
        let res: Result<(), LoadErrorKind> = (|| {
            match decl {
                ModelDecl::FunctionalRequirement { action, functions } => {
                    if functions.is_empty() {
                        return Err(LoadErrorKind::EmptyList { what: "required functions" });
                    }
                    let action_id = *r.actions.get(action).ok_or_else(|| {
                        LoadErrorKind::UnknownReference {
                            kind: "action",
                            name: action.clone(),
                        }
                    })?;
                    let mut fn_ids = Vec::new();
                    for f in functions {
                        fn_ids.push(*r.functions.get(f).ok_or_else(|| {
                            LoadErrorKind::UnknownReference {
                                kind: "function",
                                name: f.clone(),
                            }
                        })?);
                    }
                    store.insert(
                        types::FUNCTIONAL_REQUIREMENT,
                        vec![],
                        vec![
                            (String::from(roles::ACTION), vec![action_id]),
                            (String::from(roles::REQUIRED_FUNCTION), fn_ids),
                        ],
                    )?;
                }
                ModelDecl::FunctionDesign { name, function, components, priority } => {
                    if components.is_empty() {
                        return Err(LoadErrorKind::EmptyList { what: "design components" });
                    }
                    let fn_id = *r.functions.get(function).ok_or_else(|| {
                        LoadErrorKind::UnknownReference {
                            kind: "function",
                            name: function.clone(),
                        }
                    })?;
                    let mut comp_ids = Vec::new();
                    for c in components {
                        comp_ids.push(*r.components.get(c).ok_or_else(|| {
                            LoadErrorKind::UnknownReference {
                                kind: "component",
                                name: c.clone(),
                            }
                        })?);
                    }
                    let id = store.insert(
                        types::FUNCTION_DESIGN,
                        vec![
                            (String::from(attrs::NAME), Value::Str(name.clone())),
                            (String::from(attrs::PRIORITY), Value::Int(*priority)),
                        ],
                        vec![
                            (String::from(roles::FUNCTION), vec![fn_id]),
                            (String::from(roles::REQUIRED_COMPONENT), comp_ids),
                        ],
                    )?;
                    if r.designs.insert(name.clone(), id).is_some() {
                        return Err(dup(name));
                    }
                }
                ModelDecl::ComponentConfiguration { name, component, parameters, priority } => {
                    if parameters.is_empty() {
                        return Err(LoadErrorKind::EmptyList { what: "configuration parameters" });
                    }
                    let comp_id = *r.components.get(component).ok_or_else(|| {
                        LoadErrorKind::UnknownReference {
                            kind: "component",
                            name: component.clone(),
                        }
                    })?;
                    let mut param_ids = Vec::new();
                    for p in parameters {
                        param_ids.push(*r.parameters.get(p).ok_or_else(|| {
                            LoadErrorKind::UnknownReference {
                                kind: "parameter",
                                name: p.clone(),
                            }
                        })?);
                    }
                    let id = store.insert(
                        types::COMPONENT_CONFIGURATION,
                        vec![
                            (String::from(attrs::NAME), Value::Str(name.clone())),
                            (String::from(attrs::PRIORITY), Value::Int(*priority)),
                        ],
                        vec![
                            (String::from(roles::COMPONENT), vec![comp_id]),
                            (String::from(roles::PARAMETER), param_ids),
                        ],
                    )?;
                    if r.configs.insert(name.clone(), id).is_some() {
                        return Err(dup(name));
                    }
                }
                _ => {}
            }
            Ok(())
        })();
        res.map_err(|k| LoadError::at(i, k))?;
    }

    // Constraints and estimations may target designs and configurations,
    // so they resolve last.
    for (i, decl) in decls.iter().enumerate() {
        let res: Result<(), LoadErrorKind> = (|| {
            match decl {
                ModelDecl::Constraint { target_kind, target, measure, operator, value } => {
                    if !value.is_finite() {
                        return Err(LoadErrorKind::NonFiniteNumber);
                    }
                    let target_id = r.target(*target_kind, target)?;
                    let measure_id = *r.measures.get(measure).ok_or_else(|| {
                        LoadErrorKind::UnknownReference {
                            kind: "measure",
                            name: measure.clone(),
                        }
                    })?;
                    store.insert(
                        types::CONSTRAINT,
                        vec![
                            (
                                String::from(attrs::OPERATOR),
                                Value::Str(String::from(operator.as_str())),
                            ),
                            (String::from(attrs::VALUE), Value::Double(*value)),
                        ],
                        vec![
                            (String::from(roles::MEASURE), vec![measure_id]),
                            (String::from(roles::CONSTRAINED), vec![target_id]),
                        ],
                    )?;
                }
                ModelDecl::Estimation { target_kind, target, measure, value, kind } => {
                    if !value.is_finite() {
                        return Err(LoadErrorKind::NonFiniteNumber);
                    }
                    if *target_kind == TargetKind::Action {
                        return Err(LoadErrorKind::UnknownReference {
                            kind: "estimation target (actions cannot be estimated)",
                            name: target.clone(),
                        });
                    }
                    let target_id = r.target(*target_kind, target)?;
                    let measure_id = *r.measures.get(measure).ok_or_else(|| {
                        LoadErrorKind::UnknownReference {
                            kind: "measure",
                            name: measure.clone(),
                        }
                    })?;
                    store.insert(
                        types::ESTIMATION,
                        vec![
                            (String::from(attrs::VALUE), Value::Double(*value)),
                            (
                                String::from(attrs::TYPE),
                                Value::Str(String::from(kind.as_str())),
                            ),
                        ],
                        vec![
                            (String::from(roles::MEASURE), vec![measure_id]),
                            (String::from(roles::ESTIMATED), vec![target_id]),
                        ],
                    )?;
                }
                _ => {}
            }
            Ok(())
        })();
        res.map_err(|k| LoadError::at(i, k))?;
    }

    // Every function pulled in by a functional requirement needs at least
    // one design, otherwise it can never be solved at runtime.
    let designed: BTreeSet<InstanceId> = decls
        .iter()
        .filter_map(|d| match d {
            ModelDecl::FunctionDesign { function, .. } => r.functions.get(function).copied(),
            _ => None,
        })
        .collect();
    for decl in decls {
        if let ModelDecl::FunctionalRequirement { functions, .. } = decl {
            for f in functions {
                let id = r.functions[f];
                if !designed.contains(&id) {
                    return Err(LoadError::general(LoadErrorKind::FunctionWithoutDesign(
                        f.clone(),
                    )));
                }
            }
        }
    }

    Ok(store)
}

/// Cross-checks the timeline and mission sections against a loaded model:
/// every referenced name must exist and timeline ticks must be
/// non-negative and non-decreasing.
pub fn validate_document(doc: &ScenarioDocument, store: &Store) -> Result<(), LoadError> {
    let has = |type_name: &str, name: &str| {
        store.by_key(type_name, &Value::Str(String::from(name))).is_some()
    };
    let has_measure = |name: &str| types::MEASURE_TYPES.iter().any(|t| has(t, name));

    let mut last_tick = 0i64;
    for ev in &doc.timeline {
        if ev.tick < 0 {
            return Err(LoadError::general(LoadErrorKind::NegativeTick { tick: ev.tick }));
        }
        if ev.tick < last_tick {
            return Err(LoadError::general(LoadErrorKind::NonMonotonicTimeline {
                tick: ev.tick,
            }));
        }
        last_tick = ev.tick;
        match &ev.kind {
            TimelineKind::Measure { name, value } => {
                if !value.is_finite() {
                    return Err(LoadError::general(LoadErrorKind::NonFiniteNumber));
                }
                if !has_measure(name) {
                    return Err(LoadError::general(LoadErrorKind::UnknownReference {
                        kind: "measure",
                        name: name.clone(),
                    }));
                }
            }
            TimelineKind::Fail { component } | TimelineKind::Recover { component } => {
                if !has(types::COMPONENT, component) {
                    return Err(LoadError::general(LoadErrorKind::UnknownReference {
                        kind: "component",
                        name: component.clone(),
                    }));
                }
            }
        }
    }

    if let Some(mission) = &doc.mission {
        let mut err = None;
        mission.for_each_action(&mut |action, prefer| {
            if err.is_none() && !has(types::ACTION, action) {
                err = Some(LoadErrorKind::UnknownReference {
                    kind: "action",
                    name: String::from(action),
                });
            }
            if let Some(m) = prefer {
                if err.is_none() && !has_measure(m) {
                    err = Some(LoadErrorKind::UnknownReference {
                        kind: "measure",
                        name: String::from(m),
                    });
                }
            }
        });
        if let Some(k) = err {
            return Err(LoadError::general(k));
        }
    }
    Ok(())
}
