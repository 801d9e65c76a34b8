use alloc::string::String;
use alloc::vec::Vec;

use crate::kb::{
    Diagnostic, DiagnosticKind, KbError, KnowledgeBase, ServiceRequest, ServiceResponse,
};
use crate::model::status;

/// A managed process refused to start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartRefused {
    pub component: String,
}

/// What the execute component does to the managed subsystem: start and
/// stop component processes and push parameters into running ones.
pub trait ProcessControl {
    fn start(&mut self, component: &str, params: &[(String, String)])
        -> Result<i64, StartRefused>;
    fn stop(&mut self, component: &str);
    fn set_params(&mut self, component: &str, params: &[(String, String)]);
}

/// The execute component.
///
/// On a reconfiguration-plan event it fetches the latest plan, applies
/// deactivations, activations and parameter adaptations to the managed
/// processes, mirrors the component state back into the KB, and records
/// the plan result. A refused activation marks the plan failed and
/// reports the component failure through the diagnostics path, which
/// triggers replanning through the normal inference rules.
#[derive(Debug, Default)]
pub struct Executor;

impl Executor {
    pub fn new() -> Self {
        Executor
    }

    pub fn on_event(
        &mut self,
        kb: &mut KnowledgeBase,
        procs: &mut dyn ProcessControl,
        tick: i64,
    ) -> Result<(), KbError> {
        let plan = match kb.kb_services(
            "reconfiguration_plan/get_latest",
            ServiceRequest::ReconfigurationPlanGetLatest,
        )? {
            ServiceResponse::Plan(Some(p)) => p,
            _ => return Ok(()),
        };
        if plan.result.is_some() {
            // No-op plans are recorded completed at creation; nothing to do.
            return Ok(());
        }

        let mut failed: Vec<String> = Vec::new();

        let mut deactivations = plan.deactivations.clone();
        deactivations.sort();
        for component in &deactivations {
            procs.stop(component);
            kb.kb_services(
                "component/active/set",
                ServiceRequest::ComponentActiveSet {
                    component: component.clone(),
                    active: false,
                    pid: None,
                },
            )?;
        }

        let mut activations = plan.activations.clone();
        activations.sort();
        for component in &activations {
            let params = match kb.kb_services(
                "component_parameters/get",
                ServiceRequest::ComponentParametersGet { component: component.clone() },
            )? {
                ServiceResponse::Parameters(p) => p,
                _ => Vec::new(),
            };
            match procs.start(component, &params) {
                Ok(pid) => {
                    kb.kb_services(
                        "component/active/set",
                        ServiceRequest::ComponentActiveSet {
                            component: component.clone(),
                            active: true,
                            pid: Some(pid),
                        },
                    )?;
                }
                Err(_) => failed.push(component.clone()),
            }
        }

        let mut adaptations = plan.adaptations.clone();
        adaptations.sort();
        for (component, _config) in &adaptations {
            let params = match kb.kb_services(
                "component_parameters/get",
                ServiceRequest::ComponentParametersGet { component: component.clone() },
            )? {
                ServiceResponse::Parameters(p) => p,
                _ => Vec::new(),
            };
            procs.set_params(component, &params);
        }

        let result = if failed.is_empty() { "completed" } else { "failed" };
        kb.kb_services(
            "reconfiguration_plan/result/set",
            ServiceRequest::ReconfigurationPlanResultSet {
                plan: plan.id,
                result: String::from(result),
                tick,
            },
        )?;

        // Report refused starts as component failures so the planner falls
        // back through the ordinary status rules.
        for component in failed {
            kb.ingest_diagnostic(&Diagnostic {
                source: String::from("executor"),
                kind: DiagnosticKind::ComponentStatus,
                key: component,
                value: String::from(status::FAILURE),
                tick,
            })?;
        }
        Ok(())
    }
}
