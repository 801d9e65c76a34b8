use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::era::{InstanceId, Store, Value};

use super::schema::{attrs, roles, status, types, CmpOp};

/// Estimation direction: whether larger or smaller estimated values are
/// better for the related measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationKind {
    Maximize,
    Minimize,
}

impl EstimationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimationKind::Maximize => "maximize",
            EstimationKind::Minimize => "minimize",
        }
    }
}

impl FromStr for EstimationKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "maximize" => Ok(EstimationKind::Maximize),
            "minimize" => Ok(EstimationKind::Minimize),
            _ => Err(()),
        }
    }
}

impl fmt::Display for EstimationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct ActionInfo {
    pub id: InstanceId,
    pub name: String,
    /// Functions pulled in through functional requirements.
    pub required_functions: Vec<InstanceId>,
}

#[derive(Debug, Clone)]
pub struct FunctionInfo {
    pub id: InstanceId,
    pub name: String,
    pub always_improve: bool,
    pub designs: Vec<InstanceId>,
}

#[derive(Debug, Clone)]
pub struct ComponentInfo {
    pub id: InstanceId,
    pub name: String,
    pub always_improve: bool,
    pub configurations: Vec<InstanceId>,
    pub is_active: bool,
    pub pid: Option<i64>,
    /// Monitor-written failure flag (stored `status` attribute).
    pub failure_flag: bool,
}

#[derive(Debug, Clone)]
pub struct DesignInfo {
    pub id: InstanceId,
    pub name: String,
    pub function: InstanceId,
    pub components: Vec<InstanceId>,
    pub priority: i64,
    pub is_selected: bool,
}

#[derive(Debug, Clone)]
pub struct ConfigInfo {
    pub id: InstanceId,
    pub name: String,
    pub component: InstanceId,
    pub parameters: Vec<(String, String)>,
    pub priority: i64,
    pub is_selected: bool,
}

#[derive(Debug, Clone)]
pub struct MeasureInfo {
    pub id: InstanceId,
    pub name: String,
    pub type_name: String,
}

#[derive(Debug, Clone)]
pub struct ConstraintInfo {
    pub id: InstanceId,
    pub measure: InstanceId,
    pub constrained: InstanceId,
    pub operator: CmpOp,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct EstimationInfo {
    pub id: InstanceId,
    pub measure: InstanceId,
    pub estimated: InstanceId,
    pub value: f64,
    pub kind: EstimationKind,
}

#[derive(Debug, Clone)]
pub struct RequiredActionInfo {
    pub id: InstanceId,
    pub action: InstanceId,
    pub preferred_measure: Option<InstanceId>,
    pub start: i64,
    pub end: Option<i64>,
    pub result: Option<String>,
}

impl RequiredActionInfo {
    pub fn is_open(&self) -> bool {
        self.end.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct PlanInfo {
    pub id: InstanceId,
    pub activations: Vec<InstanceId>,
    pub deactivations: Vec<InstanceId>,
    pub adaptations: Vec<InstanceId>,
    pub start: i64,
    pub end: Option<i64>,
    pub result: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexError {
    MalformedInstance { id: InstanceId, reason: &'static str },
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexError::MalformedInstance { id, reason } => {
                write!(f, "malformed instance {id}: {reason}")
            }
        }
    }
}

impl core::error::Error for IndexError {}

/// Typed projection over the store: every model element resolved into an
/// adjacency-indexed view. Rebuilt per store epoch and consumed by the
/// status rules and the knowledge-base services.
#[derive(Debug, Clone, Default)]
pub struct ModelIndex {
    pub actions: BTreeMap<InstanceId, ActionInfo>,
    pub functions: BTreeMap<InstanceId, FunctionInfo>,
    pub components: BTreeMap<InstanceId, ComponentInfo>,
    pub designs: BTreeMap<InstanceId, DesignInfo>,
    pub configs: BTreeMap<InstanceId, ConfigInfo>,
    pub measures: BTreeMap<InstanceId, MeasureInfo>,
    pub constraints: BTreeMap<InstanceId, ConstraintInfo>,
    pub estimations: BTreeMap<InstanceId, EstimationInfo>,
    pub required_actions: BTreeMap<InstanceId, RequiredActionInfo>,
    pub plans: BTreeMap<InstanceId, PlanInfo>,

    /// Constraints grouped by the element they gate.
    pub constraints_on: BTreeMap<InstanceId, Vec<InstanceId>>,
    /// Estimations grouped by (estimated element, measure).
    pub estimations_on: BTreeMap<(InstanceId, InstanceId), InstanceId>,
    /// Latest measurement per measure: (value, time, measurement id).
    pub latest_measurement: BTreeMap<InstanceId, (f64, i64, InstanceId)>,

    pub action_by_name: BTreeMap<String, InstanceId>,
    pub function_by_name: BTreeMap<String, InstanceId>,
    pub component_by_name: BTreeMap<String, InstanceId>,
    pub design_by_name: BTreeMap<String, InstanceId>,
    pub config_by_name: BTreeMap<String, InstanceId>,
    pub measure_by_name: BTreeMap<String, InstanceId>,
}

fn str_attr(store: &Store, id: InstanceId, attr: &str) -> Option<String> {
    store.latest_attr(id, attr).and_then(|v| v.as_str()).map(String::from)
}

fn bool_attr(store: &Store, id: InstanceId, attr: &str) -> bool {
    store.latest_attr(id, attr).and_then(Value::as_bool).unwrap_or(false)
}

fn f64_attr(store: &Store, id: InstanceId, attr: &str) -> Option<f64> {
    store.latest_attr(id, attr).and_then(Value::as_f64)
}

fn i64_attr(store: &Store, id: InstanceId, attr: &str) -> Option<i64> {
    store.latest_attr(id, attr).and_then(Value::as_i64)
}

fn single_player(
    store: &Store,
    id: InstanceId,
    role: &str,
) -> Result<InstanceId, IndexError> {
    let inst = store.get(id).expect("indexed instance exists");
    let mut it = inst.players(role);
    let first = it.next().ok_or(IndexError::MalformedInstance {
        id,
        reason: "missing role player",
    })?;
    if it.next().is_some() {
        return Err(IndexError::MalformedInstance { id, reason: "role expects one player" });
    }
    Ok(first)
}

impl ModelIndex {
    pub fn build(store: &Store) -> Result<ModelIndex, IndexError> {
        let mut ix = ModelIndex::default();

        // Entities first so relation passes can resolve them.
        for inst in store.instances() {
            let id = inst.id;
            match inst.type_name.as_str() {
                types::ACTION => {
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.action_by_name.insert(name.clone(), id);
                    ix.actions.insert(id, ActionInfo { id, name, required_functions: Vec::new() });
                }
                types::FUNCTION => {
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.function_by_name.insert(name.clone(), id);
                    ix.functions.insert(
                        id,
                        FunctionInfo {
                            id,
                            name,
                            always_improve: bool_attr(store, id, attrs::ALWAYS_IMPROVE),
                            designs: Vec::new(),
                        },
                    );
                }
                types::COMPONENT => {
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.component_by_name.insert(name.clone(), id);
                    ix.components.insert(
                        id,
                        ComponentInfo {
                            id,
                            name,
                            always_improve: bool_attr(store, id, attrs::ALWAYS_IMPROVE),
                            configurations: Vec::new(),
                            is_active: bool_attr(store, id, attrs::IS_ACTIVE),
                            pid: i64_attr(store, id, attrs::PID),
                            failure_flag: str_attr(store, id, attrs::STATUS).as_deref()
                                == Some(status::FAILURE),
                        },
                    );
                }
                t if types::MEASURE_TYPES.contains(&t) => {
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.measure_by_name.insert(name.clone(), id);
                    ix.measures.insert(
                        id,
                        MeasureInfo { id, name, type_name: inst.type_name.clone() },
                    );
                }
                _ => {}
            }
        }

        for inst in store.instances() {
            let id = inst.id;
            match inst.type_name.as_str() {
                types::FUNCTIONAL_REQUIREMENT => {
                    let action = single_player(store, id, roles::ACTION)?;
                    let mut fns: Vec<InstanceId> = inst.players(roles::REQUIRED_FUNCTION).collect();
                    fns.sort_unstable();
                    if let Some(a) = ix.actions.get_mut(&action) {
                        a.required_functions.extend(fns);
                        a.required_functions.sort_unstable();
                        a.required_functions.dedup();
                    }
                }
                types::FUNCTION_DESIGN => {
                    let function = single_player(store, id, roles::FUNCTION)?;
                    let mut comps: Vec<InstanceId> =
                        inst.players(roles::REQUIRED_COMPONENT).collect();
                    comps.sort_unstable();
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.design_by_name.insert(name.clone(), id);
                    ix.designs.insert(
                        id,
                        DesignInfo {
                            id,
                            name,
                            function,
                            components: comps,
                            priority: i64_attr(store, id, attrs::PRIORITY).unwrap_or(i64::MAX),
                            is_selected: bool_attr(store, id, attrs::IS_SELECTED),
                        },
                    );
                    if let Some(f) = ix.functions.get_mut(&function) {
                        f.designs.push(id);
                    }
                }
                types::COMPONENT_CONFIGURATION => {
                    let component = single_player(store, id, roles::COMPONENT)?;
                    let mut params: Vec<(String, String)> = inst
                        .players(roles::PARAMETER)
                        .map(|p| {
                            (
                                str_attr(store, p, attrs::KEY).unwrap_or_default(),
                                str_attr(store, p, attrs::VALUE).unwrap_or_default(),
                            )
                        })
                        .collect();
                    params.sort_unstable();
                    let name = str_attr(store, id, attrs::NAME).unwrap_or_default();
                    ix.config_by_name.insert(name.clone(), id);
                    ix.configs.insert(
                        id,
                        ConfigInfo {
                            id,
                            name,
                            component,
                            parameters: params,
                            priority: i64_attr(store, id, attrs::PRIORITY).unwrap_or(i64::MAX),
                            is_selected: bool_attr(store, id, attrs::IS_SELECTED),
                        },
                    );
                    if let Some(c) = ix.components.get_mut(&component) {
                        c.configurations.push(id);
                    }
                }
                types::MEASUREMENT => {
                    let measure = single_player(store, id, roles::MEASURE)?;
                    let value = f64_attr(store, id, attrs::VALUE).ok_or(
                        IndexError::MalformedInstance { id, reason: "measurement without value" },
                    )?;
                    let time = i64_attr(store, id, attrs::TIME).unwrap_or(0);
                    // Latest by time, ties broken by insertion order.
                    let newer = match ix.latest_measurement.get(&measure) {
                        Some(&(_, t, mid)) => (time, id) >= (t, mid),
                        None => true,
                    };
                    if newer {
                        ix.latest_measurement.insert(measure, (value, time, id));
                    }
                }
                types::CONSTRAINT => {
                    let measure = single_player(store, id, roles::MEASURE)?;
                    let constrained = single_player(store, id, roles::CONSTRAINED)?;
                    let op_str = str_attr(store, id, attrs::OPERATOR).unwrap_or_default();
                    let operator = CmpOp::from_str(&op_str).map_err(|_| {
                        IndexError::MalformedInstance { id, reason: "unknown operator" }
                    })?;
                    let value = f64_attr(store, id, attrs::VALUE).ok_or(
                        IndexError::MalformedInstance { id, reason: "constraint without value" },
                    )?;
                    ix.constraints.insert(
                        id,
                        ConstraintInfo { id, measure, constrained, operator, value },
                    );
                    ix.constraints_on.entry(constrained).or_default().push(id);
                }
                types::ESTIMATION => {
                    let measure = single_player(store, id, roles::MEASURE)?;
                    let estimated = single_player(store, id, roles::ESTIMATED)?;
                    let value = f64_attr(store, id, attrs::VALUE).ok_or(
                        IndexError::MalformedInstance { id, reason: "estimation without value" },
                    )?;
                    let kind_str = str_attr(store, id, attrs::TYPE).unwrap_or_default();
                    let kind = EstimationKind::from_str(&kind_str).map_err(|_| {
                        IndexError::MalformedInstance { id, reason: "unknown estimation type" }
                    })?;
                    ix.estimations
                        .insert(id, EstimationInfo { id, measure, estimated, value, kind });
                    ix.estimations_on.insert((estimated, measure), id);
                }
                types::REQUIRED_ACTION => {
                    let action = single_player(store, id, roles::ACTION)?;
                    let preferred_measure =
                        store.get(id).and_then(|i| i.players(roles::PREFERRED_MEASURE).next());
                    ix.required_actions.insert(
                        id,
                        RequiredActionInfo {
                            id,
                            action,
                            preferred_measure,
                            start: i64_attr(store, id, attrs::START_TIME).unwrap_or(0),
                            end: i64_attr(store, id, attrs::END_TIME),
                            result: str_attr(store, id, attrs::RESULT),
                        },
                    );
                }
                types::RECONFIGURATION_PLAN => {
                    let inst = store.get(id).expect("indexed instance exists");
                    let mut activations: Vec<InstanceId> =
                        inst.players(roles::COMPONENT_ACTIVATION).collect();
                    let mut deactivations: Vec<InstanceId> =
                        inst.players(roles::COMPONENT_DEACTIVATION).collect();
                    let mut adaptations: Vec<InstanceId> =
                        inst.players(roles::PARAMETER_ADAPTATION).collect();
                    activations.sort_unstable();
                    deactivations.sort_unstable();
                    adaptations.sort_unstable();
                    ix.plans.insert(
                        id,
                        PlanInfo {
                            id,
                            activations,
                            deactivations,
                            adaptations,
                            start: i64_attr(store, id, attrs::START_TIME).unwrap_or(0),
                            end: i64_attr(store, id, attrs::END_TIME),
                            result: str_attr(store, id, attrs::RESULT),
                        },
                    );
                }
                _ => {}
            }
        }

        for f in ix.functions.values_mut() {
            f.designs.sort_unstable();
        }
        for c in ix.components.values_mut() {
            c.configurations.sort_unstable();
        }
        for v in ix.constraints_on.values_mut() {
            v.sort_unstable();
        }
        Ok(ix)
    }

    /// Open required-action instances, in id order.
    pub fn open_required_actions(&self) -> impl Iterator<Item = &RequiredActionInfo> {
        self.required_actions.values().filter(|ra| ra.is_open())
    }

    pub fn open_required_action_of(&self, action: InstanceId) -> Option<&RequiredActionInfo> {
        self.open_required_actions().find(|ra| ra.action == action)
    }

    pub fn selected_design_of(&self, function: InstanceId) -> Option<&DesignInfo> {
        self.functions.get(&function).and_then(|f| {
            f.designs
                .iter()
                .filter_map(|d| self.designs.get(d))
                .find(|d| d.is_selected)
        })
    }

    pub fn selected_config_of(&self, component: InstanceId) -> Option<&ConfigInfo> {
        self.components.get(&component).and_then(|c| {
            c.configurations
                .iter()
                .filter_map(|cc| self.configs.get(cc))
                .find(|cc| cc.is_selected)
        })
    }

    /// Latest reconfiguration plan by (start time, id).
    pub fn latest_plan(&self) -> Option<&PlanInfo> {
        self.plans.values().max_by_key(|p| (p.start, p.id))
    }
}
