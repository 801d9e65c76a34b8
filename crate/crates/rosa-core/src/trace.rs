//! Structured run records and their stable text rendering.
//!
//! One record per happening, grouped under `tick` markers. The rendering
//! is byte-deterministic for a given run, which is what golden-trace tests
//! and replay comparisons diff against.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::kb::{EventKind, PlanRecord};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceLine {
    Tick(i64),
    /// Plant state snapshot: sorted key=value pairs.
    Plant(Vec<(String, String)>),
    Diag { kind: &'static str, key: String, value: String, label: Option<String> },
    Reject { reason: String },
    Event { kind: EventKind, epoch: u64 },
    Measurement { measure: String, value: f64 },
    ComponentFlag { component: String, failure: bool },
    ActionOpen { action: String },
    ActionClose { action: String, result: String },
    Select { owner: String, chosen: String, design: bool },
    Plan { plan: PlanRecord },
    PlanResult { id: u64, result: String },
    ProcStart { component: String, pid: i64 },
    ProcStop { component: String },
    ProcParams { component: String, params: Vec<(String, String)> },
    Bt { path: String, what: String, result: &'static str },
    BtRoot { result: &'static str },
    Corridor { name: String, position: String },
    MissionEnd { result: &'static str },
}

fn kind_token(kind: EventKind) -> &'static str {
    match kind {
        EventKind::MonitoringData => "insert-monitoring-data",
        EventKind::ActionUpdate => "action-update",
        EventKind::ReconfigurationPlan => "reconfiguration-plan",
    }
}

fn join_names(names: &[String]) -> String {
    names.join(",")
}

fn join_pairs(pairs: &[(String, String)]) -> String {
    let parts: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    parts.join(",")
}

impl TraceLine {
    pub fn render(&self) -> String {
        match self {
            TraceLine::Tick(t) => format!("tick {t}"),
            TraceLine::Plant(kv) => {
                let parts: Vec<String> =
                    kv.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("  plant {}", parts.join(" "))
            }
            TraceLine::Diag { kind, key, value, label } => match label {
                Some(l) => format!("  diag {kind} {key} {value} label={l}"),
                None => format!("  diag {kind} {key} {value}"),
            },
            TraceLine::Reject { reason } => format!("  reject {reason}"),
            TraceLine::Event { kind, epoch } => {
                format!("  event {} epoch={epoch}", kind_token(*kind))
            }
            TraceLine::Measurement { measure, value } => {
                format!("  measurement {measure}={value}")
            }
            TraceLine::ComponentFlag { component, failure } => {
                let state = if *failure { "failure" } else { "ok" };
                format!("  component-status {component} {state}")
            }
            TraceLine::ActionOpen { action } => format!("  action open {action}"),
            TraceLine::ActionClose { action, result } => {
                format!("  action close {action} result={result}")
            }
            TraceLine::Select { owner, chosen, design } => {
                let kind = if *design { "design" } else { "config" };
                format!("  select {kind} {owner}={chosen}")
            }
            TraceLine::Plan { plan } => format!(
                "  plan {} activate=[{}] deactivate=[{}] adapt=[{}]",
                plan.id,
                join_names(&plan.activations),
                join_names(&plan.deactivations),
                join_pairs(&plan.adaptations),
            ),
            TraceLine::PlanResult { id, result } => format!("  plan-result {id} {result}"),
            TraceLine::ProcStart { component, pid } => {
                format!("  proc start {component} pid={pid}")
            }
            TraceLine::ProcStop { component } => format!("  proc stop {component}"),
            TraceLine::ProcParams { component, params } => {
                format!("  proc params {component} [{}]", join_pairs(params))
            }
            TraceLine::Bt { path, what, result } => format!("  bt {path} {what} {result}"),
            TraceLine::BtRoot { result } => format!("  bt root {result}"),
            TraceLine::Corridor { name, position } => {
                format!("  corridor {name} position={position}")
            }
            TraceLine::MissionEnd { result } => format!("  mission {result}"),
        }
    }
}

/// Renders a full trace, one line per record, with a versioned header.
pub fn render_trace(lines: &[TraceLine]) -> String {
    let mut out = String::from("trace v1\n");
    for line in lines {
        out.push_str(&line.render());
        out.push('\n');
    }
    out
}

/// Run metrics with stable field names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub result: String,
    pub ticks: i64,
    /// Tick at which the searched-for target was found, when the scenario
    /// models a search.
    pub search_time: Option<i64>,
    pub distance_inspected: Option<f64>,
    /// Reaction time in ticks per labeled uncertainty.
    pub reaction_ticks: Vec<(String, i64)>,
    /// Scenario-specific extras (e.g. the route taken), sorted by key.
    pub extras: Vec<(String, String)>,
}

/// Renders the metrics summary as a flat structured-text document.
pub fn render_metrics(m: &Metrics) -> String {
    let mut out = String::from("metrics v1\n");
    out.push_str(&format!("result {}\n", m.result));
    out.push_str(&format!("ticks {}\n", m.ticks));
    if let Some(t) = m.search_time {
        out.push_str(&format!("search_time {t}\n"));
    }
    if let Some(d) = m.distance_inspected {
        out.push_str(&format!("distance_inspected {d}\n"));
    }
    for (label, t) in &m.reaction_ticks {
        out.push_str(&format!("reaction {label} {t}\n"));
    }
    for (k, v) in &m.extras {
        out.push_str(&format!("{k} {v}\n"));
    }
    out
}
