use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::era::{AttrOverlay, InstanceId, Value};
use crate::model::{attrs, ModelIndex, Status};

/// The inferred statuses at one store epoch, plus the requiredness sets
/// derived from open required actions and current selections.
#[derive(Debug, Clone, Default)]
pub struct StatusSnapshot {
    pub epoch: u64,
    pub status: BTreeMap<InstanceId, Status>,
    pub required: BTreeSet<InstanceId>,
}

impl StatusSnapshot {
    pub fn status_of(&self, id: InstanceId) -> Option<Status> {
        self.status.get(&id).copied()
    }

    pub fn is_required(&self, id: InstanceId) -> bool {
        self.required.contains(&id)
    }
}

/// Index and snapshot bundled per epoch: everything derived reads come
/// through.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub index: ModelIndex,
    pub snapshot: StatusSnapshot,
}

impl Analysis {
    /// Actions whose status is not unfeasible, by name.
    pub fn selectable_actions(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .index
            .actions
            .values()
            .filter(|a| self.snapshot.status_of(a.id) != Some(Status::Unfeasible))
            .map(|a| a.name.clone())
            .collect();
        out.sort();
        out
    }

    /// Required functions needing structural adaptation: unsolved or in
    /// configuration error, plus always-improve functions.
    pub fn adaptable_functions(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .index
            .functions
            .values()
            .filter(|f| self.snapshot.is_required(f.id))
            .filter(|f| {
                f.always_improve
                    || matches!(
                        self.snapshot.status_of(f.id),
                        Some(Status::Unsolved | Status::ConfigurationError)
                    )
            })
            .map(|f| f.name.clone())
            .collect();
        out.sort();
        out
    }

    /// Required components needing parameter adaptation, analogous to
    /// [`Self::adaptable_functions`].
    pub fn adaptable_components(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .index
            .components
            .values()
            .filter(|c| self.snapshot.is_required(c.id))
            .filter(|c| {
                c.always_improve
                    || matches!(
                        self.snapshot.status_of(c.id),
                        Some(Status::Unsolved | Status::ConfigurationError)
                    )
            })
            .map(|c| c.name.clone())
            .collect();
        out.sort();
        out
    }

    /// Feasible designs of a function, best first (priority, then name).
    pub fn selectable_designs(&self, function: InstanceId) -> Vec<InstanceId> {
        let Some(f) = self.index.functions.get(&function) else { return Vec::new() };
        let mut ds: Vec<&crate::model::DesignInfo> = f
            .designs
            .iter()
            .filter_map(|d| self.index.designs.get(d))
            .filter(|d| self.snapshot.status_of(d.id) == Some(Status::Feasible))
            .collect();
        ds.sort_by(|a, b| (a.priority, &a.name).cmp(&(b.priority, &b.name)));
        ds.into_iter().map(|d| d.id).collect()
    }

    /// Feasible configurations of a component, best first.
    pub fn selectable_configs(&self, component: InstanceId) -> Vec<InstanceId> {
        let Some(c) = self.index.components.get(&component) else { return Vec::new() };
        let mut cs: Vec<&crate::model::ConfigInfo> = c
            .configurations
            .iter()
            .filter_map(|cc| self.index.configs.get(cc))
            .filter(|cc| self.snapshot.status_of(cc.id) == Some(Status::Feasible))
            .collect();
        cs.sort_by(|a, b| (a.priority, &a.name).cmp(&(b.priority, &b.name)));
        cs.into_iter().map(|c| c.id).collect()
    }

    /// The goal component set: the union of required components of the
    /// selected designs of all required functions.
    pub fn goal_components(&self) -> BTreeSet<InstanceId> {
        let mut goal = BTreeSet::new();
        for f in self.index.functions.values() {
            if !self.snapshot.is_required(f.id) {
                continue;
            }
            if let Some(d) = self.index.selected_design_of(f.id) {
                goal.extend(d.components.iter().copied());
            }
        }
        goal
    }

    /// The overlay exposing inferred facts (status words and requiredness)
    /// to pattern matching, shadowing any stored values.
    pub fn overlay(&self) -> AttrOverlay {
        let mut ov = AttrOverlay::new();
        for (&id, &st) in &self.snapshot.status {
            ov.set(id, attrs::STATUS, Value::Str(String::from(st.as_str())));
        }
        for a in self.index.actions.values() {
            ov.set(a.id, attrs::IS_REQUIRED, Value::Bool(self.snapshot.is_required(a.id)));
        }
        for f in self.index.functions.values() {
            ov.set(f.id, attrs::IS_REQUIRED, Value::Bool(self.snapshot.is_required(f.id)));
        }
        for c in self.index.components.values() {
            ov.set(c.id, attrs::IS_REQUIRED, Value::Bool(self.snapshot.is_required(c.id)));
        }
        ov
    }
}
