//! The knowledge-base component.
//!
//! Owns the store, memoizes analysis per store epoch, ingests monitoring
//! diagnostics, and exposes the service surface the MAPE components and
//! the task layer talk to. Every write publishes an event describing what
//! kind of data changed; components never share state outside this KB.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::era::{InstanceId, Pattern, PatternError, Store, StoreError, Value};
use crate::inference::{evaluate, Analysis, StatusSnapshot};
use crate::model::{attrs, roles, types, EstimationKind, ModelIndex, Status};

/// Event kinds published on the events topic when data is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    MonitoringData,
    ActionUpdate,
    ReconfigurationPlan,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::MonitoringData => "insert monitoring data",
            EventKind::ActionUpdate => "action update",
            EventKind::ReconfigurationPlan => "reconfiguration plan",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub kind: EventKind,
    pub epoch: u64,
    pub tick: i64,
}

/// Monitoring message kinds accepted on the diagnostics channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    QaMeasurement,
    EaMeasurement,
    ComponentStatus,
}

impl DiagnosticKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticKind::QaMeasurement => "QA measurement",
            DiagnosticKind::EaMeasurement => "EA measurement",
            DiagnosticKind::ComponentStatus => "Component status",
        }
    }
}

/// One monitoring message: measurements carry the value as text of a
/// double, component status carries a status word.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub source: String,
    pub kind: DiagnosticKind,
    pub key: String,
    pub value: String,
    pub tick: i64,
}

/// Requested selection changes: per function the design to select, per
/// component the configuration to select.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionDelta {
    pub designs: Vec<(String, String)>,
    pub configs: Vec<(String, String)>,
}

impl SelectionDelta {
    pub fn is_empty(&self) -> bool {
        self.designs.is_empty() && self.configs.is_empty()
    }
}

/// A reconfiguration plan readable by the execute component.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanRecord {
    pub id: InstanceId,
    pub start: i64,
    pub end: Option<i64>,
    pub result: Option<String>,
    pub activations: Vec<String>,
    pub deactivations: Vec<String>,
    /// (component name, newly selected configuration name)
    pub adaptations: Vec<(String, String)>,
}

impl PlanRecord {
    pub fn is_noop(&self) -> bool {
        self.activations.is_empty()
            && self.deactivations.is_empty()
            && self.adaptations.is_empty()
    }
}

/// One selectable candidate as reported by the KB, carrying everything the
/// planner needs to rank it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub priority: i64,
    /// Estimated impact on the preferred measure, when both exist.
    pub estimate: Option<(f64, EstimationKind)>,
}

/// Response of the selectable services: candidates sorted by (priority,
/// name) plus the preferred measure of the open required action driving
/// the element, when any.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectableList {
    pub owner: String,
    pub preferred_measure: Option<String>,
    pub candidates: Vec<Candidate>,
}

/// Request payloads for the knowledge-base services.
#[derive(Debug, Clone, PartialEq)]
pub enum ServiceRequest {
    FunctionAdaptable,
    FunctionDesignsSelectable { function: String },
    FunctionDesignsPriority { design: String },
    ComponentAdaptable,
    ComponentConfigurationSelectable { component: String },
    ComponentConfigurationPriority { config: String },
    SelectConfiguration { delta: SelectionDelta, tick: i64 },
    ReconfigurationPlanGetLatest,
    ReconfigurationPlanResultSet { plan: InstanceId, result: String, tick: i64 },
    ComponentActiveSet { component: String, active: bool, pid: Option<i64> },
    ComponentParametersGet { component: String },
    ActionSelectable,
    ActionRequest { action: String, request: ActionRequest },
    Query { pattern: Pattern },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionRequest {
    Start { tick: i64, preferred_measure: Option<String> },
    Stop { tick: i64, result: String },
}

impl ServiceRequest {
    /// The service name each request answers to.
    pub fn service_name(&self) -> &'static str {
        match self {
            ServiceRequest::FunctionAdaptable => "function/adaptable",
            ServiceRequest::FunctionDesignsSelectable { .. } => "function_designs/selectable",
            ServiceRequest::FunctionDesignsPriority { .. } => "function_designs/priority",
            ServiceRequest::ComponentAdaptable => "component/adaptable",
            ServiceRequest::ComponentConfigurationSelectable { .. } => {
                "component_configuration/selectable"
            }
            ServiceRequest::ComponentConfigurationPriority { .. } => {
                "component_configuration/priority"
            }
            ServiceRequest::SelectConfiguration { .. } => "select_configuration",
            ServiceRequest::ReconfigurationPlanGetLatest => "reconfiguration_plan/get_latest",
            ServiceRequest::ReconfigurationPlanResultSet { .. } => {
                "reconfiguration_plan/result/set"
            }
            ServiceRequest::ComponentActiveSet { .. } => "component/active/set",
            ServiceRequest::ComponentParametersGet { .. } => "component_parameters/get",
            ServiceRequest::ActionSelectable => "action/selectable",
            ServiceRequest::ActionRequest { .. } => "action/request",
            ServiceRequest::Query { .. } => "query",
        }
    }

    pub const ALL_SERVICE_NAMES: [&'static str; 14] = [
        "function/adaptable",
        "function_designs/selectable",
        "function_designs/priority",
        "component/adaptable",
        "component_configuration/selectable",
        "component_configuration/priority",
        "select_configuration",
        "reconfiguration_plan/get_latest",
        "reconfiguration_plan/result/set",
        "component/active/set",
        "component_parameters/get",
        "action/selectable",
        "action/request",
        "query",
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServiceResponse {
    Names(Vec<String>),
    Selectable(SelectableList),
    Priority(i64),
    PlanId(InstanceId),
    Plan(Option<PlanRecord>),
    Parameters(Vec<(String, String)>),
    RequestAck(InstanceId),
    Bindings(Vec<alloc::collections::BTreeMap<String, InstanceId>>),
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KbError {
    UnknownService(String),
    ServiceMismatch { name: String, expected: &'static str },
    UnknownMeasure(String),
    UnknownComponent(String),
    UnknownFunction(String),
    UnknownDesign(String),
    UnknownConfig(String),
    UnknownAction(String),
    DesignNotOfFunction { design: String, function: String },
    ConfigNotOfComponent { config: String, component: String },
    ConflictingDelta { owner: String },
    ActionAlreadyOpen(String),
    ActionNotOpen(String),
    PlanNotFound(InstanceId),
    ResultAlreadySet(InstanceId),
    NonMonotonicMeasurement { measure: String, tick: i64 },
    BadDiagnosticValue(String),
    Store(StoreError),
    Pattern(PatternError),
    MalformedModel(String),
}

impl fmt::Display for KbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KbError::UnknownService(n) => write!(f, "unknown service name '{n}'"),
            KbError::ServiceMismatch { name, expected } => {
                write!(f, "service name '{name}' does not accept this request (expected '{expected}')")
            }
            KbError::UnknownMeasure(n) => write!(f, "unknown measure '{n}'"),
            KbError::UnknownComponent(n) => write!(f, "unknown component '{n}'"),
            KbError::UnknownFunction(n) => write!(f, "unknown function '{n}'"),
            KbError::UnknownDesign(n) => write!(f, "unknown function design '{n}'"),
            KbError::UnknownConfig(n) => write!(f, "unknown component configuration '{n}'"),
            KbError::UnknownAction(n) => write!(f, "unknown action '{n}'"),
            KbError::DesignNotOfFunction { design, function } => {
                write!(f, "design '{design}' does not belong to function '{function}'")
            }
            KbError::ConfigNotOfComponent { config, component } => {
                write!(f, "configuration '{config}' does not belong to component '{component}'")
            }
            KbError::ConflictingDelta { owner } => {
                write!(f, "conflicting delta: two selections for '{owner}'")
            }
            KbError::ActionAlreadyOpen(a) => {
                write!(f, "action '{a}' already has an open required action")
            }
            KbError::ActionNotOpen(a) => write!(f, "action '{a}' has no open required action"),
            KbError::PlanNotFound(id) => write!(f, "no reconfiguration plan {id}"),
            KbError::ResultAlreadySet(id) => {
                write!(f, "result of reconfiguration plan {id} already set")
            }
            KbError::NonMonotonicMeasurement { measure, tick } => {
                write!(f, "measurement for '{measure}' at tick {tick} is older than the latest")
            }
            KbError::BadDiagnosticValue(v) => write!(f, "bad diagnostic value '{v}'"),
            KbError::Store(e) => write!(f, "{e}"),
            KbError::Pattern(e) => write!(f, "{e}"),
            KbError::MalformedModel(m) => write!(f, "malformed model: {m}"),
        }
    }
}

impl core::error::Error for KbError {}

impl From<StoreError> for KbError {
    fn from(e: StoreError) -> Self {
        KbError::Store(e)
    }
}

impl From<PatternError> for KbError {
    fn from(e: PatternError) -> Self {
        KbError::Pattern(e)
    }
}

/// Knowledge-side happenings, drained by the run loop for tracing.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditEvent {
    MeasurementStored { measure: String, value: f64, tick: i64 },
    ComponentFlag { component: String, failure: bool, tick: i64 },
    ActionOpened { action: String, tick: i64 },
    ActionClosed { action: String, result: String, tick: i64 },
    Selected { owner: String, chosen: String, design: bool },
    PlanCreated { plan: PlanRecord },
    PlanClosed { id: InstanceId, result: String, tick: i64 },
}

/// The central knowledge base.
pub struct KnowledgeBase {
    store: Store,
    memo: RefCell<Option<Rc<Analysis>>>,
    events: Vec<Event>,
    audit: Vec<AuditEvent>,
    tick: i64,
}

impl KnowledgeBase {
    pub fn new(store: Store) -> Self {
        KnowledgeBase {
            store,
            memo: RefCell::new(None),
            events: Vec::new(),
            audit: Vec::new(),
            tick: 0,
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn epoch(&self) -> u64 {
        self.store.epoch()
    }

    /// The current simulation tick; timestamps of inserted runtime
    /// relations use it.
    pub fn set_tick(&mut self, tick: i64) {
        self.tick = tick;
    }

    pub fn take_events(&mut self) -> Vec<Event> {
        core::mem::take(&mut self.events)
    }

    pub fn take_audit(&mut self) -> Vec<AuditEvent> {
        core::mem::take(&mut self.audit)
    }

    fn publish(&mut self, kind: EventKind) {
        self.events.push(Event { kind, epoch: self.store.epoch(), tick: self.tick });
    }

    /// Analysis memoized per store epoch: the rules run at most once per
    /// mutation, mirroring inference at query time.
    pub fn analysis(&self) -> Rc<Analysis> {
        if let Some(a) = self.memo.borrow().as_ref() {
            if a.snapshot.epoch == self.store.epoch() {
                return Rc::clone(a);
            }
        }
        // Every write path into this KB validates shape, so the index
        // cannot fail here; an empty index would only surface for stores
        // mutated outside the KB.
        let index = ModelIndex::build(&self.store).unwrap_or_default();
        let snapshot = evaluate(&self.store, &index);
        let analysis = Rc::new(Analysis { index, snapshot });
        *self.memo.borrow_mut() = Some(Rc::clone(&analysis));
        analysis
    }

    pub fn snapshot(&self) -> StatusSnapshot {
        self.analysis().snapshot.clone()
    }

    fn lookup(&self, type_name: &str, name: &str) -> Option<InstanceId> {
        self.store.by_key(type_name, &Value::Str(String::from(name)))
    }

    fn lookup_measure(&self, name: &str) -> Option<InstanceId> {
        types::MEASURE_TYPES.iter().find_map(|t| self.lookup(t, name))
    }

    /// Ingests one monitoring diagnostic: measurements become measurement
    /// relations, component status messages set or clear the stored
    /// failure flag. Publishes a monitoring-data event on success; invalid
    /// diagnostics are rejected without touching the store.
    pub fn ingest_diagnostic(&mut self, d: &Diagnostic) -> Result<(), KbError> {
        match d.kind {
            DiagnosticKind::QaMeasurement | DiagnosticKind::EaMeasurement => {
                let expected = match d.kind {
                    DiagnosticKind::QaMeasurement => types::QUALITY_ATTRIBUTE,
                    _ => types::ENVIRONMENTAL_ATTRIBUTE,
                };
                let id = self
                    .lookup(expected, &d.key)
                    .or_else(|| self.lookup(types::MEASURE, &d.key))
                    .ok_or_else(|| KbError::UnknownMeasure(d.key.clone()))?;
                let value: f64 = d
                    .value
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| KbError::BadDiagnosticValue(d.value.clone()))?;
                let latest = self.analysis().index.latest_measurement.get(&id).map(|&(_, t, _)| t);
                if let Some(t) = latest {
                    if d.tick < t {
                        return Err(KbError::NonMonotonicMeasurement {
                            measure: d.key.clone(),
                            tick: d.tick,
                        });
                    }
                }
                self.store.insert(
                    types::MEASUREMENT,
                    vec![
                        (String::from(attrs::VALUE), Value::Double(value)),
                        (String::from(attrs::TIME), Value::DateTime(d.tick)),
                    ],
                    vec![(String::from(roles::MEASURE), vec![id])],
                )?;
                self.audit.push(AuditEvent::MeasurementStored {
                    measure: d.key.clone(),
                    value,
                    tick: d.tick,
                });
            }
            DiagnosticKind::ComponentStatus => {
                let id = self
                    .lookup(types::COMPONENT, &d.key)
                    .ok_or_else(|| KbError::UnknownComponent(d.key.clone()))?;
                let failure = d.value == Status::Failure.as_str();
                if failure {
                    self.store.set_attribute(
                        id,
                        attrs::STATUS,
                        Value::Str(String::from(Status::Failure.as_str())),
                    )?;
                } else {
                    // Any non-failure word clears the flag.
                    self.store.delete_attribute(
                        id,
                        attrs::STATUS,
                        &Value::Str(String::from(Status::Failure.as_str())),
                    )?;
                }
                self.audit.push(AuditEvent::ComponentFlag {
                    component: d.key.clone(),
                    failure,
                    tick: d.tick,
                });
            }
        }
        self.publish(EventKind::MonitoringData);
        Ok(())
    }

    /// Dispatches a request by service name, rejecting unknown names and
    /// mismatched payloads.
    pub fn kb_services(
        &mut self,
        name: &str,
        request: ServiceRequest,
    ) -> Result<ServiceResponse, KbError> {
        if !ServiceRequest::ALL_SERVICE_NAMES.contains(&name) {
            return Err(KbError::UnknownService(String::from(name)));
        }
        if name != request.service_name() {
            return Err(KbError::ServiceMismatch {
                name: String::from(name),
                expected: request.service_name(),
            });
        }
        self.service(request)
    }

    pub fn service(&mut self, request: ServiceRequest) -> Result<ServiceResponse, KbError> {
        match request {
            ServiceRequest::FunctionAdaptable => {
                Ok(ServiceResponse::Names(self.analysis().adaptable_functions()))
            }
            ServiceRequest::ComponentAdaptable => {
                Ok(ServiceResponse::Names(self.analysis().adaptable_components()))
            }
            ServiceRequest::ActionSelectable => {
                Ok(ServiceResponse::Names(self.analysis().selectable_actions()))
            }
            ServiceRequest::FunctionDesignsSelectable { function } => {
                let a = self.analysis();
                let f = *a
                    .index
                    .function_by_name
                    .get(&function)
                    .ok_or_else(|| KbError::UnknownFunction(function.clone()))?;
                let preferred = self.preferred_measure_for_function(&a, f);
                let candidates = a
                    .selectable_designs(f)
                    .into_iter()
                    .filter_map(|d| a.index.designs.get(&d))
                    .map(|d| Candidate {
                        name: d.name.clone(),
                        priority: d.priority,
                        estimate: preferred.and_then(|m| {
                            a.index
                                .estimations_on
                                .get(&(d.id, m))
                                .and_then(|e| a.index.estimations.get(e))
                                .map(|e| (e.value, e.kind))
                        }),
                    })
                    .collect();
                Ok(ServiceResponse::Selectable(SelectableList {
                    owner: function,
                    preferred_measure: preferred
                        .and_then(|m| a.index.measures.get(&m))
                        .map(|m| m.name.clone()),
                    candidates,
                }))
            }
            ServiceRequest::ComponentConfigurationSelectable { component } => {
                let a = self.analysis();
                let c = *a
                    .index
                    .component_by_name
                    .get(&component)
                    .ok_or_else(|| KbError::UnknownComponent(component.clone()))?;
                let preferred = self.preferred_measure_for_component(&a, c);
                let candidates = a
                    .selectable_configs(c)
                    .into_iter()
                    .filter_map(|cc| a.index.configs.get(&cc))
                    .map(|cc| Candidate {
                        name: cc.name.clone(),
                        priority: cc.priority,
                        estimate: preferred.and_then(|m| {
                            a.index
                                .estimations_on
                                .get(&(cc.id, m))
                                .and_then(|e| a.index.estimations.get(e))
                                .map(|e| (e.value, e.kind))
                        }),
                    })
                    .collect();
                Ok(ServiceResponse::Selectable(SelectableList {
                    owner: component,
                    preferred_measure: preferred
                        .and_then(|m| a.index.measures.get(&m))
                        .map(|m| m.name.clone()),
                    candidates,
                }))
            }
            ServiceRequest::FunctionDesignsPriority { design } => {
                let a = self.analysis();
                let d = a
                    .index
                    .design_by_name
                    .get(&design)
                    .and_then(|d| a.index.designs.get(d))
                    .ok_or_else(|| KbError::UnknownDesign(design.clone()))?;
                Ok(ServiceResponse::Priority(d.priority))
            }
            ServiceRequest::ComponentConfigurationPriority { config } => {
                let a = self.analysis();
                let c = a
                    .index
                    .config_by_name
                    .get(&config)
                    .and_then(|c| a.index.configs.get(c))
                    .ok_or_else(|| KbError::UnknownConfig(config.clone()))?;
                Ok(ServiceResponse::Priority(c.priority))
            }
            ServiceRequest::SelectConfiguration { delta, tick } => {
                self.select_configuration(&delta, tick).map(ServiceResponse::PlanId)
            }
            ServiceRequest::ReconfigurationPlanGetLatest => {
                let a = self.analysis();
                Ok(ServiceResponse::Plan(
                    a.index.latest_plan().map(|p| self.plan_record(&a, p)),
                ))
            }
            ServiceRequest::ReconfigurationPlanResultSet { plan, result, tick } => {
                let info = self
                    .analysis()
                    .index
                    .plans
                    .get(&plan)
                    .cloned()
                    .ok_or(KbError::PlanNotFound(plan))?;
                if info.result.is_some() {
                    return Err(KbError::ResultAlreadySet(plan));
                }
                self.store.set_attribute(plan, attrs::RESULT, Value::Str(result.clone()))?;
                self.store.set_attribute(plan, attrs::END_TIME, Value::DateTime(tick))?;
                self.audit.push(AuditEvent::PlanClosed { id: plan, result, tick });
                Ok(ServiceResponse::Unit)
            }
            ServiceRequest::ComponentActiveSet { component, active, pid } => {
                let id = self
                    .lookup(types::COMPONENT, &component)
                    .ok_or_else(|| KbError::UnknownComponent(component.clone()))?;
                self.store.set_attribute(id, attrs::IS_ACTIVE, Value::Bool(active))?;
                match pid {
                    Some(p) if active => {
                        self.store.set_attribute(id, attrs::PID, Value::Int(p))?;
                    }
                    _ => {
                        if let Some(v) = self.store.latest_attr(id, attrs::PID).cloned() {
                            self.store.delete_attribute(id, attrs::PID, &v)?;
                        }
                    }
                }
                Ok(ServiceResponse::Unit)
            }
            ServiceRequest::ComponentParametersGet { component } => {
                let a = self.analysis();
                let c = *a
                    .index
                    .component_by_name
                    .get(&component)
                    .ok_or_else(|| KbError::UnknownComponent(component.clone()))?;
                let params = a
                    .index
                    .selected_config_of(c)
                    .map(|cc| cc.parameters.clone())
                    .unwrap_or_default();
                Ok(ServiceResponse::Parameters(params))
            }
            ServiceRequest::ActionRequest { action, request } => {
                self.action_request(&action, request).map(ServiceResponse::RequestAck)
            }
            ServiceRequest::Query { pattern } => {
                let overlay = self.analysis().overlay();
                let bindings = self.store.match_with_overlay(&overlay, &pattern)?;
                Ok(ServiceResponse::Bindings(bindings))
            }
        }
    }

    /// The preferred measure for reconfiguring a function: taken from the
    /// open required action (lowest action name first) whose functional
    /// requirement covers the function.
    fn preferred_measure_for_function(
        &self,
        a: &Analysis,
        function: InstanceId,
    ) -> Option<InstanceId> {
        let mut candidates: Vec<(&String, InstanceId)> = a
            .index
            .open_required_actions()
            .filter_map(|ra| {
                let m = ra.preferred_measure?;
                let act = a.index.actions.get(&ra.action)?;
                act.required_functions.contains(&function).then_some((&act.name, m))
            })
            .collect();
        candidates.sort();
        candidates.first().map(|&(_, m)| m)
    }

    /// Same, for a component, reached through the required function whose
    /// selected design contains it.
    fn preferred_measure_for_component(
        &self,
        a: &Analysis,
        component: InstanceId,
    ) -> Option<InstanceId> {
        let mut owners: Vec<InstanceId> = a
            .index
            .functions
            .values()
            .filter(|f| a.snapshot.is_required(f.id))
            .filter(|f| {
                a.index
                    .selected_design_of(f.id)
                    .map(|d| d.components.contains(&component))
                    .unwrap_or(false)
            })
            .map(|f| f.id)
            .collect();
        owners.sort_unstable();
        owners
            .into_iter()
            .find_map(|f| self.preferred_measure_for_function(a, f))
    }

    fn plan_record(&self, a: &Analysis, p: &crate::model::PlanInfo) -> PlanRecord {
        let comp_name = |id: &InstanceId| {
            a.index.components.get(id).map(|c| c.name.clone()).unwrap_or_default()
        };
        PlanRecord {
            id: p.id,
            start: p.start,
            end: p.end,
            result: p.result.clone(),
            activations: p.activations.iter().map(comp_name).collect(),
            deactivations: p.deactivations.iter().map(comp_name).collect(),
            adaptations: p
                .adaptations
                .iter()
                .filter_map(|cc| a.index.configs.get(cc))
                .map(|cc| (comp_name(&cc.component), cc.name.clone()))
                .collect(),
        }
    }

    /// Applies a selection delta and derives the reconfiguration plan that
    /// brings the managed system to the goal configuration.
    ///
    /// The goal component set is the union of required components of the
    /// selected designs of all required functions; activations and
    /// deactivations are the set differences against the currently active
    /// components, and parameter adaptations are the components whose
    /// selected configuration changed. A no-op plan is recorded with its
    /// result set to completed immediately.
    pub fn select_configuration(
        &mut self,
        delta: &SelectionDelta,
        tick: i64,
    ) -> Result<InstanceId, KbError> {
        let a = self.analysis();

        // Validate the delta before mutating anything.
        let mut seen_functions = BTreeSet::new();
        let mut design_updates: Vec<(InstanceId, InstanceId)> = Vec::new();
        for (function, design) in &delta.designs {
            let f = *a
                .index
                .function_by_name
                .get(function)
                .ok_or_else(|| KbError::UnknownFunction(function.clone()))?;
            let d = a
                .index
                .design_by_name
                .get(design)
                .and_then(|d| a.index.designs.get(d))
                .ok_or_else(|| KbError::UnknownDesign(design.clone()))?;
            if d.function != f {
                return Err(KbError::DesignNotOfFunction {
                    design: design.clone(),
                    function: function.clone(),
                });
            }
            if !seen_functions.insert(f) {
                return Err(KbError::ConflictingDelta { owner: function.clone() });
            }
            design_updates.push((f, d.id));
        }
        let mut seen_components = BTreeSet::new();
        let mut config_updates: Vec<(InstanceId, InstanceId)> = Vec::new();
        for (component, config) in &delta.configs {
            let c = *a
                .index
                .component_by_name
                .get(component)
                .ok_or_else(|| KbError::UnknownComponent(component.clone()))?;
            let cc = a
                .index
                .config_by_name
                .get(config)
                .and_then(|cc| a.index.configs.get(cc))
                .ok_or_else(|| KbError::UnknownConfig(config.clone()))?;
            if cc.component != c {
                return Err(KbError::ConfigNotOfComponent {
                    config: config.clone(),
                    component: component.clone(),
                });
            }
            if !seen_components.insert(c) {
                return Err(KbError::ConflictingDelta { owner: component.clone() });
            }
            config_updates.push((c, cc.id));
        }

        // Remember which configuration each touched component had, to
        // derive the parameter adaptations.
        let prev_config: Vec<(InstanceId, Option<InstanceId>)> = config_updates
            .iter()
            .map(|&(c, _)| (c, a.index.selected_config_of(c).map(|cc| cc.id)))
            .collect();

        // Apply: clear the current selection of each owner, set the new one.
        for &(f, d) in &design_updates {
            if let Some(cur) = a.index.selected_design_of(f) {
                if cur.id != d {
                    self.store.set_attribute(cur.id, attrs::IS_SELECTED, Value::Bool(false))?;
                }
            }
            self.store.set_attribute(d, attrs::IS_SELECTED, Value::Bool(true))?;
        }
        for &(c, cc) in &config_updates {
            if let Some(cur) = a.index.selected_config_of(c) {
                if cur.id != cc {
                    self.store.set_attribute(cur.id, attrs::IS_SELECTED, Value::Bool(false))?;
                }
            }
            self.store.set_attribute(cc, attrs::IS_SELECTED, Value::Bool(true))?;
        }

        // Audit the applied selections.
        let post = self.analysis();
        for &(f, d) in &design_updates {
            self.audit.push(AuditEvent::Selected {
                owner: post.index.functions[&f].name.clone(),
                chosen: post.index.designs[&d].name.clone(),
                design: true,
            });
        }
        for &(c, cc) in &config_updates {
            self.audit.push(AuditEvent::Selected {
                owner: post.index.components[&c].name.clone(),
                chosen: post.index.configs[&cc].name.clone(),
                design: false,
            });
        }

        // Goal set from the post-delta state of the world.
        let goal = post.goal_components();
        let active: BTreeSet<InstanceId> = post
            .index
            .components
            .values()
            .filter(|c| c.is_active)
            .map(|c| c.id)
            .collect();
        let activations: Vec<InstanceId> = goal.difference(&active).copied().collect();
        let deactivations: Vec<InstanceId> = active.difference(&goal).copied().collect();
        let adaptations: Vec<InstanceId> = config_updates
            .iter()
            .zip(&prev_config)
            .filter(|(&(_, new_cc), &(_, old))| old != Some(new_cc))
            .map(|(&(_, new_cc), _)| new_cc)
            .collect();

        let noop = activations.is_empty() && deactivations.is_empty() && adaptations.is_empty();
        let mut attrs_list = vec![(String::from(attrs::START_TIME), Value::DateTime(tick))];
        if noop {
            attrs_list.push((
                String::from(attrs::RESULT),
                Value::Str(String::from("completed")),
            ));
            attrs_list.push((String::from(attrs::END_TIME), Value::DateTime(tick)));
        }
        let plan = self.store.insert(
            types::RECONFIGURATION_PLAN,
            attrs_list,
            vec![
                (String::from(roles::COMPONENT_ACTIVATION), activations),
                (String::from(roles::COMPONENT_DEACTIVATION), deactivations),
                (String::from(roles::PARAMETER_ADAPTATION), adaptations),
            ],
        )?;

        let a = self.analysis();
        let record = a
            .index
            .plans
            .get(&plan)
            .map(|p| self.plan_record(&a, p))
            .expect("plan just inserted");
        self.audit.push(AuditEvent::PlanCreated { plan: record });
        self.publish(EventKind::ReconfigurationPlan);
        Ok(plan)
    }

    fn action_request(
        &mut self,
        action: &str,
        request: ActionRequest,
    ) -> Result<InstanceId, KbError> {
        let a = self.analysis();
        let action_id = *a
            .index
            .action_by_name
            .get(action)
            .ok_or_else(|| KbError::UnknownAction(String::from(action)))?;
        let open = a.index.open_required_action_of(action_id).map(|ra| ra.id);
        match request {
            ActionRequest::Start { tick, preferred_measure } => {
                if open.is_some() {
                    return Err(KbError::ActionAlreadyOpen(String::from(action)));
                }
                let mut roles_list =
                    vec![(String::from(roles::ACTION), vec![action_id])];
                if let Some(m) = &preferred_measure {
                    let mid = self
                        .lookup_measure(m)
                        .ok_or_else(|| KbError::UnknownMeasure(m.clone()))?;
                    roles_list.push((String::from(roles::PREFERRED_MEASURE), vec![mid]));
                }
                let id = self.store.insert(
                    types::REQUIRED_ACTION,
                    vec![(String::from(attrs::START_TIME), Value::DateTime(tick))],
                    roles_list,
                )?;
                self.audit.push(AuditEvent::ActionOpened {
                    action: String::from(action),
                    tick,
                });
                self.publish(EventKind::ActionUpdate);
                Ok(id)
            }
            ActionRequest::Stop { tick, result } => {
                let ra = open.ok_or_else(|| KbError::ActionNotOpen(String::from(action)))?;
                self.store.set_attribute(ra, attrs::END_TIME, Value::DateTime(tick))?;
                self.store.set_attribute(ra, attrs::RESULT, Value::Str(result.clone()))?;
                self.audit.push(AuditEvent::ActionClosed {
                    action: String::from(action),
                    result,
                    tick,
                });
                self.publish(EventKind::ActionUpdate);
                Ok(ra)
            }
        }
    }

    /// Whether the named action currently has an open required action.
    pub fn has_open_required_action(&self, action: &str) -> Result<bool, KbError> {
        let a = self.analysis();
        let id = *a
            .index
            .action_by_name
            .get(action)
            .ok_or_else(|| KbError::UnknownAction(String::from(action)))?;
        Ok(a.index.open_required_action_of(id).is_some())
    }

    /// Helper for tools: format a service-response name list.
    pub fn names_of(resp: &ServiceResponse) -> Vec<String> {
        match resp {
            ServiceResponse::Names(n) => n.clone(),
            ServiceResponse::Selectable(s) => {
                s.candidates.iter().map(|c| c.name.clone()).collect()
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Debug for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnowledgeBase")
            .field("epoch", &self.store.epoch())
            .field("instances", &self.store.len())
            .finish()
    }
}

pub fn format_binding_names(
    store: &Store,
    bindings: &[alloc::collections::BTreeMap<String, InstanceId>],
) -> Vec<String> {
    bindings
        .iter()
        .map(|b| {
            let parts: Vec<String> = b
                .iter()
                .map(|(var, id)| {
                    let name = store
                        .latest_attr(*id, attrs::NAME)
                        .map(|v| format!("{v}"))
                        .unwrap_or_else(|| format!("{id}"));
                    format!("{var}={name}")
                })
                .collect();
            parts.join(" ")
        })
        .collect()
}
