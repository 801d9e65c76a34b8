//! Shared test support: a small model builder and store helpers.
#![allow(dead_code)]

use rosa_core::era::{InstanceId, Store, Value};
use rosa_core::inference::{evaluate, Analysis};
use rosa_core::model::{
    attrs, load_model, roles, types, CmpOp, EstimationKind, MeasureKind, ModelDecl,
    ModelIndex, Status, TargetKind,
};

#[derive(Default)]
pub struct TestModel {
    pub decls: Vec<ModelDecl>,
}

impl TestModel {
    pub fn new() -> Self {
        TestModel::default()
    }

    pub fn action(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Action { name: name.into() });
        self
    }

    pub fn function(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Function { name: name.into(), always_improve: false });
        self
    }

    pub fn function_ai(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Function { name: name.into(), always_improve: true });
        self
    }

    pub fn component(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Component {
            name: name.into(),
            always_improve: false,
            package: None,
            executable: None,
            lifecycle: None,
        });
        self
    }

    pub fn component_ai(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Component {
            name: name.into(),
            always_improve: true,
            package: None,
            executable: None,
            lifecycle: None,
        });
        self
    }

    pub fn parameter(mut self, label: &str, key: &str, value: &str) -> Self {
        self.decls.push(ModelDecl::Parameter {
            label: label.into(),
            key: key.into(),
            value: value.into(),
        });
        self
    }

    pub fn qa(mut self, name: &str) -> Self {
        self.decls.push(ModelDecl::Measure { name: name.into(), kind: MeasureKind::Quality });
        self
    }

    pub fn ea(mut self, name: &str) -> Self {
        self.decls
            .push(ModelDecl::Measure { name: name.into(), kind: MeasureKind::Environmental });
        self
    }

    pub fn fr(mut self, action: &str, functions: &[&str]) -> Self {
        self.decls.push(ModelDecl::FunctionalRequirement {
            action: action.into(),
            functions: functions.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn fd(mut self, name: &str, function: &str, components: &[&str], priority: i64) -> Self {
        self.decls.push(ModelDecl::FunctionDesign {
            name: name.into(),
            function: function.into(),
            components: components.iter().map(|s| s.to_string()).collect(),
            priority,
        });
        self
    }

    pub fn cc(mut self, name: &str, component: &str, params: &[&str], priority: i64) -> Self {
        self.decls.push(ModelDecl::ComponentConfiguration {
            name: name.into(),
            component: component.into(),
            parameters: params.iter().map(|s| s.to_string()).collect(),
            priority,
        });
        self
    }

    pub fn constraint(
        mut self,
        kind: TargetKind,
        target: &str,
        measure: &str,
        op: CmpOp,
        value: f64,
    ) -> Self {
        self.decls.push(ModelDecl::Constraint {
            target_kind: kind,
            target: target.into(),
            measure: measure.into(),
            operator: op,
            value,
        });
        self
    }

    pub fn estimation(
        mut self,
        kind: TargetKind,
        target: &str,
        measure: &str,
        value: f64,
        ekind: EstimationKind,
    ) -> Self {
        self.decls.push(ModelDecl::Estimation {
            target_kind: kind,
            target: target.into(),
            measure: measure.into(),
            value,
            kind: ekind,
        });
        self
    }

    pub fn build(self) -> Store {
        load_model(&self.decls).expect("test model loads")
    }
}

pub fn id_of(store: &Store, type_name: &str, name: &str) -> InstanceId {
    store
        .by_key(type_name, &Value::Str(name.into()))
        .unwrap_or_else(|| panic!("no {type_name} named {name}"))
}

pub fn measure_id(store: &Store, name: &str) -> InstanceId {
    types::MEASURE_TYPES
        .iter()
        .find_map(|t| store.by_key(t, &Value::Str(name.into())))
        .unwrap_or_else(|| panic!("no measure named {name}"))
}

/// Inserts a measurement relation directly.
pub fn measure(store: &mut Store, name: &str, value: f64, tick: i64) {
    let m = measure_id(store, name);
    store
        .insert(
            types::MEASUREMENT,
            vec![
                (attrs::VALUE.into(), Value::Double(value)),
                (attrs::TIME.into(), Value::DateTime(tick)),
            ],
            vec![(roles::MEASURE.into(), vec![m])],
        )
        .expect("measurement inserts");
}

/// Opens a required action directly (no preferred measure).
pub fn open_action(store: &mut Store, action: &str, tick: i64) -> InstanceId {
    let a = id_of(store, types::ACTION, action);
    store
        .insert(
            types::REQUIRED_ACTION,
            vec![(attrs::START_TIME.into(), Value::DateTime(tick))],
            vec![(roles::ACTION.into(), vec![a])],
        )
        .expect("required action inserts")
}

pub fn select_design(store: &mut Store, name: &str) {
    let d = id_of(store, types::FUNCTION_DESIGN, name);
    store
        .set_attribute(d, attrs::IS_SELECTED, Value::Bool(true))
        .expect("design selects");
}

pub fn select_config(store: &mut Store, name: &str) {
    let c = id_of(store, types::COMPONENT_CONFIGURATION, name);
    store
        .set_attribute(c, attrs::IS_SELECTED, Value::Bool(true))
        .expect("config selects");
}

pub fn set_failure(store: &mut Store, component: &str) {
    let c = id_of(store, types::COMPONENT, component);
    store
        .set_attribute(c, attrs::STATUS, Value::Str(Status::Failure.as_str().into()))
        .expect("failure flag sets");
}

pub fn clear_failure(store: &mut Store, component: &str) {
    let c = id_of(store, types::COMPONENT, component);
    store
        .delete_attribute(c, attrs::STATUS, &Value::Str(Status::Failure.as_str().into()))
        .expect("failure flag clears");
}

pub fn analyze(store: &Store) -> Analysis {
    let index = ModelIndex::build(store).expect("index builds");
    let snapshot = evaluate(store, &index);
    Analysis { index, snapshot }
}

pub fn status_of(store: &Store, type_name: &str, name: &str) -> Status {
    let a = analyze(store);
    let id = id_of(store, type_name, name);
    a.snapshot.status_of(id).unwrap_or_else(|| panic!("no status for {name}"))
}
