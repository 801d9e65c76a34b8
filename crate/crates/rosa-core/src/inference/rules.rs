use alloc::collections::BTreeSet;

use crate::era::{InstanceId, Store};
use crate::model::{ModelIndex, Status};

use super::snapshot::StatusSnapshot;

/// Evaluates all status rules in dependency strata:
/// requiredness, then constraints, configurations, components, designs,
/// functions, actions. The dependency graph is acyclic by construction, so
/// a single ordered pass reaches the fixpoint.
pub fn evaluate(store: &Store, index: &ModelIndex) -> StatusSnapshot {
    let mut snap = StatusSnapshot { epoch: store.epoch(), ..StatusSnapshot::default() };

    // Requiredness: an open required action marks its action required; the
    // action's functional requirements mark functions required; selected
    // designs of required functions mark their components required.
    let mut required: BTreeSet<InstanceId> = BTreeSet::new();
    for ra in index.open_required_actions() {
        required.insert(ra.action);
        if let Some(a) = index.actions.get(&ra.action) {
            required.extend(a.required_functions.iter().copied());
        }
    }
    for f in index.functions.values() {
        if !required.contains(&f.id) {
            continue;
        }
        if let Some(d) = index.selected_design_of(f.id) {
            required.extend(d.components.iter().copied());
        }
    }
    snap.required = required;

    // Constraint status: violated exactly when a measurement exists for
    // the constraint's measure and the satisfaction predicate fails on the
    // latest one. Before the first measurement a constraint is satisfied,
    // so missions can start before monitors report.
    for c in index.constraints.values() {
        let st = match index.latest_measurement.get(&c.measure) {
            Some(&(value, _, _)) if !c.operator.eval(value, c.value) => Status::Violated,
            _ => Status::Satisfied,
        };
        snap.status.insert(c.id, st);
    }

    let violated_on = |snap: &StatusSnapshot, id: InstanceId| {
        index
            .constraints_on
            .get(&id)
            .map(|cs| cs.iter().any(|c| snap.status_of(*c) == Some(Status::Violated)))
            .unwrap_or(false)
    };

    // Component configuration status.
    for cc in index.configs.values() {
        let st = if violated_on(&snap, cc.id) { Status::Unfeasible } else { Status::Feasible };
        snap.status.insert(cc.id, st);
    }

    // Component status, evaluated in priority order: a monitor-reported
    // failure wins; then the component's own violated constraints; then a
    // selected-but-unfeasible configuration (configuration error); then a
    // configurable component with nothing selected (unsolved). The last
    // two only apply to required components.
    for comp in index.components.values() {
        let st = if comp.failure_flag {
            Status::Failure
        } else if violated_on(&snap, comp.id) {
            Status::Unfeasible
        } else if snap.required.contains(&comp.id) {
            match index.selected_config_of(comp.id) {
                Some(cc) if snap.status_of(cc.id) == Some(Status::Unfeasible) => {
                    Status::ConfigurationError
                }
                Some(_) => Status::Feasible,
                None if !comp.configurations.is_empty() => Status::Unsolved,
                None => Status::Feasible,
            }
        } else {
            Status::Feasible
        };
        snap.status.insert(comp.id, st);
    }

    // Function design status: unfeasible when gated out by a constraint or
    // when any required component has failed or is unfeasible.
    for d in index.designs.values() {
        let component_blocked = d.components.iter().any(|c| {
            matches!(snap.status_of(*c), Some(Status::Failure | Status::Unfeasible))
        });
        let st = if violated_on(&snap, d.id) || component_blocked {
            Status::Unfeasible
        } else {
            Status::Feasible
        };
        snap.status.insert(d.id, st);
    }

    // Function status. Design exhaustion makes a function unfeasible
    // whether or not it is currently required: action feasibility must be
    // answerable for actions the task layer has not selected yet, which is
    // what the feasibility gates ask. The adaptation triggers (unsolved,
    // configuration error) only apply to required functions; anything else
    // reads solved.
    for f in index.functions.values() {
        let designs: alloc::vec::Vec<&crate::model::DesignInfo> =
            f.designs.iter().filter_map(|d| index.designs.get(d)).collect();
        let exhausted = !designs.is_empty()
            && designs
                .iter()
                .all(|d| snap.status_of(d.id) == Some(Status::Unfeasible));
        let st = if exhausted {
            Status::Unfeasible
        } else if !snap.required.contains(&f.id) {
            Status::Solved
        } else {
            let selected = designs.iter().find(|d| d.is_selected);
            match selected {
                Some(sel) if snap.status_of(sel.id) == Some(Status::Unfeasible) => {
                    Status::ConfigurationError
                }
                Some(_) => Status::Solved,
                None if designs.is_empty() => Status::Unfeasible,
                None => Status::Unsolved,
            }
        };
        snap.status.insert(f.id, st);
    }

    // Action status: unfeasible when one of the action's own constraints
    // is violated or a function it requires is unfeasible.
    for a in index.actions.values() {
        let fn_blocked = a
            .required_functions
            .iter()
            .any(|f| snap.status_of(*f) == Some(Status::Unfeasible));
        let st = if violated_on(&snap, a.id) || fn_blocked {
            Status::Unfeasible
        } else {
            Status::Feasible
        };
        snap.status.insert(a.id, st);
    }

    snap
}
