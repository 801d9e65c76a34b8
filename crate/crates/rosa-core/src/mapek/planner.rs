use alloc::string::String;
use alloc::vec::Vec;

use crate::kb::{
    Candidate, KbError, KnowledgeBase, SelectableList, SelectionDelta, ServiceRequest,
    ServiceResponse,
};
use crate::model::EstimationKind;

/// The configuration planner.
///
/// On a monitoring-data or action-update event it asks the KB which
/// functions and components must be adapted, ranks the selectable
/// candidates for each, and submits the selection delta. Ranking uses the
/// estimation strategy when the driving required action names a preferred
/// measure and candidates carry estimations on it, otherwise the lowest
/// priority integer wins, with ties broken by name.
#[derive(Debug, Default)]
pub struct Planner;

fn best(list: &SelectableList) -> Option<&Candidate> {
    if list.candidates.is_empty() {
        return None;
    }
    if list.preferred_measure.is_some() {
        let mut estimated: Vec<&Candidate> =
            list.candidates.iter().filter(|c| c.estimate.is_some()).collect();
        if !estimated.is_empty() {
            estimated.sort_by(|a, b| {
                let score = |c: &Candidate| {
                    let (v, kind) = c.estimate.expect("filtered on estimate");
                    match kind {
                        EstimationKind::Maximize => -v,
                        EstimationKind::Minimize => v,
                    }
                };
                score(a)
                    .total_cmp(&score(b))
                    .then_with(|| (a.priority, &a.name).cmp(&(b.priority, &b.name)))
            });
            return estimated.first().copied();
        }
    }
    // Candidates arrive sorted by (priority, name) already.
    list.candidates.first()
}

impl Planner {
    pub fn new() -> Self {
        Planner
    }

    /// One planning pass. Returns the plan id when a selection delta was
    /// submitted.
    pub fn on_event(
        &mut self,
        kb: &mut KnowledgeBase,
        tick: i64,
    ) -> Result<Option<crate::era::InstanceId>, KbError> {
        let mut delta = SelectionDelta::default();

        let adaptable_functions =
            match kb.kb_services("function/adaptable", ServiceRequest::FunctionAdaptable)? {
                ServiceResponse::Names(n) => n,
                _ => Vec::new(),
            };
        for function in adaptable_functions {
            let resp = kb.kb_services(
                "function_designs/selectable",
                ServiceRequest::FunctionDesignsSelectable { function: function.clone() },
            )?;
            let ServiceResponse::Selectable(list) = resp else { continue };
            // Nothing selectable: leave the current selection untouched;
            // the function stays unfeasible and the task layer handles it.
            let Some(chosen) = best(&list) else { continue };
            if !currently_selected_design(kb, &function)
                .map(|cur| cur == chosen.name)
                .unwrap_or(false)
            {
                delta.designs.push((function, chosen.name.clone()));
            }
        }

        let adaptable_components =
            match kb.kb_services("component/adaptable", ServiceRequest::ComponentAdaptable)? {
                ServiceResponse::Names(n) => n,
                _ => Vec::new(),
            };
        for component in adaptable_components {
            let resp = kb.kb_services(
                "component_configuration/selectable",
                ServiceRequest::ComponentConfigurationSelectable {
                    component: component.clone(),
                },
            )?;
            let ServiceResponse::Selectable(list) = resp else { continue };
            let Some(chosen) = best(&list) else { continue };
            if !currently_selected_config(kb, &component)
                .map(|cur| cur == chosen.name)
                .unwrap_or(false)
            {
                delta.configs.push((component, chosen.name.clone()));
            }
        }

        if delta.is_empty() {
            return Ok(None);
        }
        match kb.kb_services(
            "select_configuration",
            ServiceRequest::SelectConfiguration { delta, tick },
        )? {
            ServiceResponse::PlanId(id) => Ok(Some(id)),
            _ => Ok(None),
        }
    }
}

fn currently_selected_design(kb: &KnowledgeBase, function: &str) -> Option<String> {
    let a = kb.analysis();
    let f = *a.index.function_by_name.get(function)?;
    a.index.selected_design_of(f).map(|d| d.name.clone())
}

fn currently_selected_config(kb: &KnowledgeBase, component: &str) -> Option<String> {
    let a = kb.analysis();
    let c = *a.index.component_by_name.get(component)?;
    a.index.selected_config_of(c).map(|cc| cc.name.clone())
}
