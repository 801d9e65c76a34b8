use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bt::{BtError, BtNode, BtTrace, TickResult};
use crate::kb::{AuditEvent, KbError, KnowledgeBase};
use crate::mapek::Engine;
use crate::model::{load_model, validate_document, LoadError, MissionNode, ScenarioDocument};
use crate::trace::{Metrics, TraceLine};

use super::process::{ProcAudit, ProcessTable};
use super::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissionResult {
    Success,
    Failure,
    Timeout,
}

impl MissionResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            MissionResult::Success => "success",
            MissionResult::Failure => "failure",
            MissionResult::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Load(LoadError),
    Setup(String),
    Kb(KbError),
    Bt(BtError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Load(e) => write!(f, "{e}"),
            RunError::Setup(s) => write!(f, "{s}"),
            RunError::Kb(e) => write!(f, "{e}"),
            RunError::Bt(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for RunError {}

impl From<LoadError> for RunError {
    fn from(e: LoadError) -> Self {
        RunError::Load(e)
    }
}

impl From<KbError> for RunError {
    fn from(e: KbError) -> Self {
        RunError::Kb(e)
    }
}

impl From<BtError> for RunError {
    fn from(e: BtError) -> Self {
        RunError::Bt(e)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: MissionResult,
    pub metrics: Metrics,
    pub trace: Vec<TraceLine>,
}

struct BtLineBuffer {
    lines: Vec<TraceLine>,
}

impl BtTrace for BtLineBuffer {
    fn node(&mut self, path: &str, what: &str, result: TickResult) {
        self.lines.push(TraceLine::Bt {
            path: String::from(path),
            what: String::from(what),
            result: result.as_str(),
        });
    }
}

fn audit_to_lines(audits: Vec<AuditEvent>, trace: &mut Vec<TraceLine>, responded: &mut bool) {
    for a in audits {
        match a {
            AuditEvent::MeasurementStored { measure, value, .. } => {
                trace.push(TraceLine::Measurement { measure, value });
            }
            AuditEvent::ComponentFlag { component, failure, .. } => {
                trace.push(TraceLine::ComponentFlag { component, failure });
            }
            AuditEvent::ActionOpened { action, .. } => {
                *responded = true;
                trace.push(TraceLine::ActionOpen { action });
            }
            AuditEvent::ActionClosed { action, result, .. } => {
                *responded = true;
                trace.push(TraceLine::ActionClose { action, result });
            }
            AuditEvent::Selected { owner, chosen, design } => {
                trace.push(TraceLine::Select { owner, chosen, design });
            }
            AuditEvent::PlanCreated { plan } => {
                if !plan.is_noop() {
                    *responded = true;
                }
                trace.push(TraceLine::Plan { plan });
            }
            AuditEvent::PlanClosed { id, result, .. } => {
                trace.push(TraceLine::PlanResult { id: id.0, result });
            }
        }
    }
}

fn proc_to_lines(audits: Vec<ProcAudit>, trace: &mut Vec<TraceLine>) {
    for a in audits {
        match a {
            ProcAudit::Start { component, pid } => {
                trace.push(TraceLine::ProcStart { component, pid });
            }
            ProcAudit::Stop { component } => trace.push(TraceLine::ProcStop { component }),
            ProcAudit::Params { component, params } => {
                trace.push(TraceLine::ProcParams { component, params });
            }
        }
    }
}

/// Run options beyond the scenario itself.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_ticks: i64,
    pub seed: u64,
    /// Tear down and rebuild the planner and executor before every event.
    /// All their state lives in the knowledge base, so this must not
    /// change any run.
    pub rebuild_components_each_event: bool,
}

impl RunOptions {
    pub fn new(max_ticks: i64, seed: u64) -> Self {
        RunOptions { max_ticks, seed, rebuild_components_each_event: false }
    }
}

/// Runs a scenario deterministically: identical document, tick budget and
/// seed produce a byte-identical trace.
///
/// Each tick proceeds in lockstep: the plant advances and emits
/// diagnostics; the engine drains events to quiescence; the behavior tree
/// ticks once; the engine drains again. Mission success or failure at the
/// root ends the run, as does exhausting the tick budget.
pub fn run_scenario(
    doc: &ScenarioDocument,
    max_ticks: i64,
    seed: u64,
) -> Result<RunOutput, RunError> {
    run_scenario_with(doc, &RunOptions::new(max_ticks, seed))
}

pub fn run_scenario_with(
    doc: &ScenarioDocument,
    options: &RunOptions,
) -> Result<RunOutput, RunError> {
    let max_ticks = options.max_ticks;
    let seed = options.seed;
    let store = load_model(&doc.model)?;
    validate_document(doc, &store)?;

    let mut world = World::new(doc, &store, seed).map_err(RunError::Setup)?;
    let component_names: Vec<String> = store
        .instances_of(crate::model::types::COMPONENT)
        .filter_map(|i| i.latest(crate::model::attrs::NAME))
        .filter_map(|v| v.as_str().map(String::from))
        .collect();
    let mut procs = ProcessTable::new(component_names);
    for (component, tick) in world.config.start_failures.clone() {
        procs.script_start_failure(&component, tick);
    }

    if let Some(mission) = &doc.mission {
        let mut err = None;
        mission.for_each_behavior(&mut |b| {
            if err.is_none() {
                if let Err(e) = world.validate_behavior(b) {
                    err = Some(e);
                }
            }
        });
        if let Some(e) = err {
            return Err(RunError::Setup(e));
        }
    }

    let mut kb = KnowledgeBase::new(store);
    let mut engine = Engine::new();
    engine.rebuild_components_each_event = options.rebuild_components_each_event;
    let mut bt = doc.mission.as_ref().map(BtNode::from_mission);

    let mut trace: Vec<TraceLine> = Vec::new();
    let mut pending: BTreeMap<String, i64> = BTreeMap::new();
    let mut reactions: Vec<(String, i64)> = Vec::new();
    let mut result = MissionResult::Timeout;
    let mut ticks_run = 0;

    for tick in 0..max_ticks {
        ticks_run = tick + 1;
        kb.set_tick(tick);
        procs.set_tick(tick);
        let mut responded = false;

        let diags = world.step(tick, &procs);
        trace.push(TraceLine::Tick(tick));
        trace.push(TraceLine::Plant(world.snapshot()));

        for (diag, label) in diags {
            trace.push(TraceLine::Diag {
                kind: match diag.kind {
                    crate::kb::DiagnosticKind::QaMeasurement => "qa",
                    crate::kb::DiagnosticKind::EaMeasurement => "ea",
                    crate::kb::DiagnosticKind::ComponentStatus => "component",
                },
                key: diag.key.clone(),
                value: diag.value.clone(),
                label: label.clone(),
            });
            match kb.ingest_diagnostic(&diag) {
                Ok(()) => {
                    if let Some(l) = label {
                        pending.insert(l, tick);
                    }
                }
                Err(e) => trace.push(TraceLine::Reject { reason: format!("{e}") }),
            }
        }
        audit_to_lines(kb.take_audit(), &mut trace, &mut responded);

        let log_before = engine.log().len();
        engine.drain(&mut kb, &mut procs, tick)?;
        for entry in &engine.log()[log_before..] {
            trace.push(TraceLine::Event { kind: entry.kind, epoch: entry.epoch });
        }
        audit_to_lines(kb.take_audit(), &mut trace, &mut responded);
        proc_to_lines(procs.take_audit(), &mut trace);

        let mut mission_done = None;
        if let Some(root) = bt.as_mut() {
            world.clear_flags();
            let route_len = world.route.len();
            let mut sink = BtLineBuffer { lines: Vec::new() };
            let r = root.tick(&mut kb, &mut world, &mut sink, tick)?;
            trace.extend(sink.lines);
            trace.push(TraceLine::BtRoot { result: r.as_str() });
            let position = world.position.clone().unwrap_or_default();
            for c in &world.route[route_len..] {
                trace.push(TraceLine::Corridor { name: c.clone(), position: position.clone() });
            }
            audit_to_lines(kb.take_audit(), &mut trace, &mut responded);

            let log_before = engine.log().len();
            engine.drain(&mut kb, &mut procs, tick)?;
            for entry in &engine.log()[log_before..] {
                trace.push(TraceLine::Event { kind: entry.kind, epoch: entry.epoch });
            }
            audit_to_lines(kb.take_audit(), &mut trace, &mut responded);
            proc_to_lines(procs.take_audit(), &mut trace);

            match r {
                TickResult::Success => mission_done = Some(MissionResult::Success),
                TickResult::Failure => mission_done = Some(MissionResult::Failure),
                TickResult::Running => {}
            }
        } else {
            // No mission: nothing to do beyond event handling.
            mission_done = Some(MissionResult::Success);
        }

        if responded {
            for (label, injected_at) in core::mem::take(&mut pending) {
                reactions.push((label, tick - injected_at));
            }
        }

        if let Some(r) = mission_done {
            result = r;
            trace.push(TraceLine::MissionEnd { result: r.as_str() });
            break;
        }
    }

    if result == MissionResult::Timeout {
        trace.push(TraceLine::MissionEnd { result: result.as_str() });
    }

    reactions.sort();
    let mut extras: Vec<(String, String)> = Vec::new();
    if !world.config.corridors.is_empty() {
        extras.push((String::from("route"), world.route.join(",")));
    }

    let metrics = Metrics {
        result: String::from(result.as_str()),
        ticks: ticks_run,
        search_time: world.found_at,
        distance_inspected: world
            .config
            .inspect_process
            .is_some()
            .then_some(world.inspected_distance),
        reaction_ticks: reactions,
        extras,
    };

    Ok(RunOutput { result, metrics, trace })
}

impl MissionNode {
    pub fn for_each_behavior<F: FnMut(&str)>(&self, f: &mut F) {
        match self {
            MissionNode::Sequence(cs) | MissionNode::Fallback(cs) => {
                for c in cs {
                    c.for_each_behavior(f);
                }
            }
            MissionNode::Feasible(_) => {}
            MissionNode::Action { behavior, .. } => f(behavior),
            MissionNode::Leaf(b) => f(b),
        }
    }
}
