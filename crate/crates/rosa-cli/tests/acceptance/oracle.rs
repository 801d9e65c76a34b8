//! Independent status-inference oracle: naive repeated rule application
//! to fixpoint, walking the store directly and concluding a status only
//! once all of its inputs are known. Shares no code with the stratified
//! evaluator it checks.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rosa_core::era::{InstanceId, Store, Value};
use rosa_core::model::{
    attrs, load_model, roles, types, CmpOp, MeasureKind, ModelDecl, Status, TargetKind,
};

fn latest_str(store: &Store, id: InstanceId, attr: &str) -> Option<String> {
    store.latest_attr(id, attr).and_then(|v| v.as_str()).map(String::from)
}

fn latest_bool(store: &Store, id: InstanceId, attr: &str) -> bool {
    store.latest_attr(id, attr).and_then(Value::as_bool).unwrap_or(false)
}

fn players(store: &Store, id: InstanceId, role: &str) -> Vec<InstanceId> {
    store.get(id).map(|i| i.players(role).collect()).unwrap_or_default()
}

/// Requiredness by repeated application of the three marking rules until
/// nothing changes.
fn required_fixpoint(store: &Store) -> BTreeSet<InstanceId> {
    let mut required = BTreeSet::new();
    loop {
        let before = required.len();
        for inst in store.instances() {
            match inst.type_name.as_str() {
                types::REQUIRED_ACTION => {
                    if inst.latest(attrs::END_TIME).is_none() {
                        required.extend(inst.players(roles::ACTION));
                    }
                }
                types::FUNCTIONAL_REQUIREMENT => {
                    if inst.players(roles::ACTION).any(|a| required.contains(&a)) {
                        required.extend(inst.players(roles::REQUIRED_FUNCTION));
                    }
                }
                types::FUNCTION_DESIGN => {
                    let function_required =
                        inst.players(roles::FUNCTION).any(|f| required.contains(&f));
                    if function_required && latest_bool(store, inst.id, attrs::IS_SELECTED) {
                        required.extend(inst.players(roles::REQUIRED_COMPONENT));
                    }
                }
                _ => {}
            }
        }
        if required.len() == before {
            return required;
        }
    }
}

/// Naive fixpoint evaluation of all six status rules.
pub fn naive_statuses(store: &Store) -> (BTreeMap<InstanceId, Status>, BTreeSet<InstanceId>) {
    let required = required_fixpoint(store);
    let mut status: BTreeMap<InstanceId, Status> = BTreeMap::new();

    // Latest measurement per measure, straight off the store.
    let mut latest: BTreeMap<InstanceId, (i64, InstanceId, f64)> = BTreeMap::new();
    for inst in store.instances() {
        if inst.type_name == types::MEASUREMENT {
            let value = inst.latest(attrs::VALUE).and_then(Value::as_f64).unwrap_or(0.0);
            let time = inst.latest(attrs::TIME).and_then(Value::as_i64).unwrap_or(0);
            for m in inst.players(roles::MEASURE) {
                let candidate = (time, inst.id, value);
                let replace = latest.get(&m).map(|cur| candidate >= *cur).unwrap_or(true);
                if replace {
                    latest.insert(m, candidate);
                }
            }
        }
    }

    let constraints_of = |target: InstanceId| -> Vec<InstanceId> {
        store
            .instances()
            .filter(|i| i.type_name == types::CONSTRAINT)
            .filter(|i| i.players(roles::CONSTRAINED).any(|t| t == target))
            .map(|i| i.id)
            .collect()
    };

    // Repeated application: each pass tries every rule on every instance
    // and records a status once its inputs are decided. The rule graph is
    // acyclic, so this terminates.
    loop {
        let mut changed = false;
        let set = |status: &mut BTreeMap<InstanceId, Status>,
                       id: InstanceId,
                       st: Status,
                       changed: &mut bool| {
            if status.insert(id, st) != Some(st) {
                *changed = true;
            }
        };

        for inst in store.instances() {
            let id = inst.id;
            match inst.type_name.as_str() {
                types::CONSTRAINT => {
                    let op: CmpOp = latest_str(store, id, attrs::OPERATOR)
                        .and_then(|s| s.parse().ok())
                        .expect("operator validated at load");
                    let threshold =
                        inst.latest(attrs::VALUE).and_then(Value::as_f64).unwrap_or(0.0);
                    let measure = players(store, id, roles::MEASURE);
                    let st = match measure.first().and_then(|m| latest.get(m)) {
                        Some(&(_, _, v)) if !op.eval(v, threshold) => Status::Violated,
                        _ => Status::Satisfied,
                    };
                    set(&mut status, id, st, &mut changed);
                }
                types::COMPONENT_CONFIGURATION => {
                    let cs = constraints_of(id);
                    if cs.iter().all(|c| status.contains_key(c)) {
                        let st = if cs.iter().any(|c| status[c] == Status::Violated) {
                            Status::Unfeasible
                        } else {
                            Status::Feasible
                        };
                        set(&mut status, id, st, &mut changed);
                    }
                }
                types::COMPONENT => {
                    let failure =
                        latest_str(store, id, attrs::STATUS).as_deref() == Some("failure");
                    let cs = constraints_of(id);
                    let configs: Vec<InstanceId> = store
                        .instances()
                        .filter(|i| i.type_name == types::COMPONENT_CONFIGURATION)
                        .filter(|i| i.players(roles::COMPONENT).any(|c| c == id))
                        .map(|i| i.id)
                        .collect();
                    let inputs_ready = cs.iter().all(|c| status.contains_key(c))
                        && configs.iter().all(|c| status.contains_key(c));
                    if inputs_ready {
                        let st = if failure {
                            Status::Failure
                        } else if cs.iter().any(|c| status[c] == Status::Violated) {
                            Status::Unfeasible
                        } else if required.contains(&id) {
                            let selected = configs
                                .iter()
                                .find(|c| latest_bool(store, **c, attrs::IS_SELECTED));
                            match selected {
                                Some(sel) if status[sel] == Status::Unfeasible => {
                                    Status::ConfigurationError
                                }
                                Some(_) => Status::Feasible,
                                None if !configs.is_empty() => Status::Unsolved,
                                None => Status::Feasible,
                            }
                        } else {
                            Status::Feasible
                        };
                        set(&mut status, id, st, &mut changed);
                    }
                }
                types::FUNCTION_DESIGN => {
                    let cs = constraints_of(id);
                    let comps = players(store, id, roles::REQUIRED_COMPONENT);
                    let ready = cs.iter().all(|c| status.contains_key(c))
                        && comps.iter().all(|c| status.contains_key(c));
                    if ready {
                        let blocked = comps.iter().any(|c| {
                            matches!(status[c], Status::Failure | Status::Unfeasible)
                        });
                        let st = if cs.iter().any(|c| status[c] == Status::Violated) || blocked
                        {
                            Status::Unfeasible
                        } else {
                            Status::Feasible
                        };
                        set(&mut status, id, st, &mut changed);
                    }
                }
                types::FUNCTION => {
                    let designs: Vec<InstanceId> = store
                        .instances()
                        .filter(|i| i.type_name == types::FUNCTION_DESIGN)
                        .filter(|i| i.players(roles::FUNCTION).any(|f| f == id))
                        .map(|i| i.id)
                        .collect();
                    if designs.iter().all(|d| status.contains_key(d)) {
                        let exhausted = !designs.is_empty()
                            && designs.iter().all(|d| status[d] == Status::Unfeasible);
                        let st = if exhausted {
                            Status::Unfeasible
                        } else if !required.contains(&id) {
                            Status::Solved
                        } else {
                            let selected = designs
                                .iter()
                                .find(|d| latest_bool(store, **d, attrs::IS_SELECTED));
                            match selected {
                                Some(sel) if status[sel] == Status::Unfeasible => {
                                    Status::ConfigurationError
                                }
                                Some(_) => Status::Solved,
                                None if designs.is_empty() => Status::Unfeasible,
                                None => Status::Unsolved,
                            }
                        };
                        set(&mut status, id, st, &mut changed);
                    }
                }
                types::ACTION => {
                    let cs = constraints_of(id);
                    let functions: Vec<InstanceId> = store
                        .instances()
                        .filter(|i| i.type_name == types::FUNCTIONAL_REQUIREMENT)
                        .filter(|i| i.players(roles::ACTION).any(|a| a == id))
                        .flat_map(|i| i.players(roles::REQUIRED_FUNCTION).collect::<Vec<_>>())
                        .collect();
                    let ready = cs.iter().all(|c| status.contains_key(c))
                        && functions.iter().all(|f| status.contains_key(f));
                    if ready {
                        let st = if cs.iter().any(|c| status[c] == Status::Violated)
                            || functions.iter().any(|f| status[f] == Status::Unfeasible)
                        {
                            Status::Unfeasible
                        } else {
                            Status::Feasible
                        };
                        set(&mut status, id, st, &mut changed);
                    }
                }
                _ => {}
            }
        }
        if !changed {
            return (status, required);
        }
    }
}

/// A random small model with runtime state: at most 4 actions, 3 designs
/// per function, 3 configurations per component.
pub fn random_model(seed: u64) -> Store {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_actions = rng.gen_range(1..=4);
    let n_functions = rng.gen_range(1..=4usize);
    let n_components = rng.gen_range(1..=5usize);
    let n_measures = rng.gen_range(1..=3usize);

    let mut decls: Vec<ModelDecl> = Vec::new();
    for a in 0..n_actions {
        decls.push(ModelDecl::Action { name: format!("a{a}") });
    }
    for f in 0..n_functions {
        decls.push(ModelDecl::Function {
            name: format!("f{f}"),
            always_improve: rng.gen_bool(0.2),
        });
    }
    for c in 0..n_components {
        decls.push(ModelDecl::Component {
            name: format!("c{c}"),
            always_improve: rng.gen_bool(0.2),
            package: None,
            executable: None,
            lifecycle: None,
        });
    }
    for m in 0..n_measures {
        decls.push(ModelDecl::Measure {
            name: format!("m{m}"),
            kind: if rng.gen_bool(0.5) { MeasureKind::Quality } else { MeasureKind::Environmental },
        });
    }

    // Designs: every function gets at least one.
    let mut design_names = Vec::new();
    for f in 0..n_functions {
        for d in 0..rng.gen_range(1..=3usize) {
            let name = format!("fd{f}_{d}");
            let n_comps = rng.gen_range(1..=2usize.min(n_components));
            let mut comps = BTreeSet::new();
            while comps.len() < n_comps {
                comps.insert(format!("c{}", rng.gen_range(0..n_components)));
            }
            decls.push(ModelDecl::FunctionDesign {
                name: name.clone(),
                function: format!("f{f}"),
                components: comps.into_iter().collect(),
                priority: rng.gen_range(1..=3),
            });
            design_names.push(name);
        }
    }

    // Configurations for a random subset of components.
    let mut config_names = Vec::new();
    let mut param_idx = 0;
    for c in 0..n_components {
        for k in 0..rng.gen_range(0..=3usize) {
            let label = format!("p{param_idx}");
            param_idx += 1;
            decls.push(ModelDecl::Parameter {
                label: label.clone(),
                key: "mode".into(),
                value: format!("{k}"),
            });
            let name = format!("cc{c}_{k}");
            decls.push(ModelDecl::ComponentConfiguration {
                name: name.clone(),
                component: format!("c{c}"),
                parameters: vec![label],
                priority: rng.gen_range(1..=3),
            });
            config_names.push(name);
        }
    }

    // Every action requires one or two functions.
    for a in 0..n_actions {
        let n = rng.gen_range(1..=2usize.min(n_functions));
        let mut fns = BTreeSet::new();
        while fns.len() < n {
            fns.insert(format!("f{}", rng.gen_range(0..n_functions)));
        }
        decls.push(ModelDecl::FunctionalRequirement {
            action: format!("a{a}"),
            functions: fns.into_iter().collect(),
        });
    }

    // Random constraints over every target kind.
    let ops = [CmpOp::Gt, CmpOp::Ge, CmpOp::Lt, CmpOp::Le];
    for _ in 0..rng.gen_range(0..=6usize) {
        let measure = format!("m{}", rng.gen_range(0..n_measures));
        let op = ops[rng.gen_range(0..ops.len())];
        let value = rng.gen_range(0.0..5.0f64);
        let (kind, target) = match rng.gen_range(0..4) {
            0 => (TargetKind::Action, format!("a{}", rng.gen_range(0..n_actions))),
            1 => (TargetKind::Component, format!("c{}", rng.gen_range(0..n_components))),
            2 => (
                TargetKind::Design,
                design_names[rng.gen_range(0..design_names.len())].clone(),
            ),
            _ => match config_names.len() {
                0 => (TargetKind::Action, format!("a{}", rng.gen_range(0..n_actions))),
                n => (TargetKind::Config, config_names[rng.gen_range(0..n)].clone()),
            },
        };
        decls.push(ModelDecl::Constraint {
            target_kind: kind,
            target,
            measure,
            operator: op,
            value,
        });
    }

    let mut store = load_model(&decls).expect("random model loads");

    // Runtime state: measurements, open required actions, selections,
    // failure flags.
    for m in 0..n_measures {
        if rng.gen_bool(0.7) {
            let id = types::MEASURE_TYPES
                .iter()
                .find_map(|t| store.by_key(t, &Value::Str(format!("m{m}"))))
                .unwrap();
            store
                .insert(
                    types::MEASUREMENT,
                    vec![
                        (attrs::VALUE.into(), Value::Double(rng.gen_range(0.0..5.0))),
                        (attrs::TIME.into(), Value::DateTime(rng.gen_range(0..10))),
                    ],
                    vec![(roles::MEASURE.into(), vec![id])],
                )
                .unwrap();
        }
    }
    for a in 0..n_actions {
        if rng.gen_bool(0.5) {
            let id = store.by_key(types::ACTION, &Value::Str(format!("a{a}"))).unwrap();
            store
                .insert(
                    types::REQUIRED_ACTION,
                    vec![(attrs::START_TIME.into(), Value::DateTime(0))],
                    vec![(roles::ACTION.into(), vec![id])],
                )
                .unwrap();
        }
    }
    // At most one selected design per function and one selected
    // configuration per component, matching the invariant the planner
    // maintains.
    for f in 0..n_functions {
        if rng.gen_bool(0.6) {
            let of_function: Vec<&String> = design_names
                .iter()
                .filter(|n| n.starts_with(&format!("fd{f}_")))
                .collect();
            if !of_function.is_empty() {
                let pick = of_function[rng.gen_range(0..of_function.len())];
                let id =
                    store.by_key(types::FUNCTION_DESIGN, &Value::Str(pick.clone())).unwrap();
                store.set_attribute(id, attrs::IS_SELECTED, Value::Bool(true)).unwrap();
            }
        }
    }
    for c in 0..n_components {
        if rng.gen_bool(0.6) {
            let of_component: Vec<&String> = config_names
                .iter()
                .filter(|n| n.starts_with(&format!("cc{c}_")))
                .collect();
            if !of_component.is_empty() {
                let pick = of_component[rng.gen_range(0..of_component.len())];
                let id = store
                    .by_key(types::COMPONENT_CONFIGURATION, &Value::Str(pick.clone()))
                    .unwrap();
                store.set_attribute(id, attrs::IS_SELECTED, Value::Bool(true)).unwrap();
            }
        }
    }
    for c in 0..n_components {
        if rng.gen_bool(0.2) {
            let id = store.by_key(types::COMPONENT, &Value::Str(format!("c{c}"))).unwrap();
            store
                .set_attribute(id, attrs::STATUS, Value::Str("failure".into()))
                .unwrap();
        }
    }
    store
}
