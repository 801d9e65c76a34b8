use std::fmt::Write;

use rosa_core::model::{
    MeasureKind, MissionNode, ModelDecl, ScenarioDocument, TargetKind, TimelineKind,
};

use super::parse::HEADER;

fn kind_token(k: TargetKind) -> &'static str {
    match k {
        TargetKind::Action => "action",
        TargetKind::Component => "component",
        TargetKind::Design => "design",
        TargetKind::Config => "config",
    }
}

fn emit_decl(out: &mut String, d: &ModelDecl) {
    match d {
        ModelDecl::Action { name } => writeln!(out, "  action {name}").unwrap(),
        ModelDecl::Function { name, always_improve } => {
            let ai = if *always_improve { " always-improve" } else { "" };
            writeln!(out, "  function {name}{ai}").unwrap();
        }
        ModelDecl::Component { name, always_improve, package, executable, lifecycle } => {
            let mut line = format!("  component {name}");
            if *always_improve {
                line.push_str(" always-improve");
            }
            if let Some(p) = package {
                line.push_str(&format!(" package {p}"));
            }
            if let Some(e) = executable {
                line.push_str(&format!(" executable {e}"));
            }
            if let Some(l) = lifecycle {
                line.push_str(&format!(" lifecycle {l}"));
            }
            writeln!(out, "{line}").unwrap();
        }
        ModelDecl::Parameter { label, key, value } => {
            writeln!(out, "  parameter {label} {key} {value}").unwrap();
        }
        ModelDecl::Measure { name, kind } => {
            let kw = match kind {
                MeasureKind::Measure => "measure",
                MeasureKind::Quality => "quality-attribute",
                MeasureKind::Environmental => "environmental-attribute",
            };
            writeln!(out, "  {kw} {name}").unwrap();
        }
        ModelDecl::FunctionalRequirement { action, functions } => {
            writeln!(
                out,
                "  functional-requirement action {action} requires {}",
                functions.join(" ")
            )
            .unwrap();
        }
        ModelDecl::FunctionDesign { name, function, components, priority } => {
            writeln!(
                out,
                "  function-design {name} function {function} components {} priority {priority}",
                components.join(" ")
            )
            .unwrap();
        }
        ModelDecl::ComponentConfiguration { name, component, parameters, priority } => {
            writeln!(
                out,
                "  component-configuration {name} component {component} parameters {} priority {priority}",
                parameters.join(" ")
            )
            .unwrap();
        }
        ModelDecl::Constraint { target_kind, target, measure, operator, value } => {
            writeln!(
                out,
                "  constraint on {} {target} measure {measure} {operator} {value}",
                kind_token(*target_kind)
            )
            .unwrap();
        }
        ModelDecl::Estimation { target_kind, target, measure, value, kind } => {
            writeln!(
                out,
                "  estimation of {} {target} measure {measure} value {value} type {kind}",
                kind_token(*target_kind)
            )
            .unwrap();
        }
    }
}

fn emit_mission(out: &mut String, node: &MissionNode, depth: usize) {
    let pad = "  ".repeat(depth);
    match node {
        MissionNode::Sequence(cs) => {
            writeln!(out, "{pad}sequence {{").unwrap();
            for c in cs {
                emit_mission(out, c, depth + 1);
            }
            writeln!(out, "{pad}}}").unwrap();
        }
        MissionNode::Fallback(cs) => {
            writeln!(out, "{pad}fallback {{").unwrap();
            for c in cs {
                emit_mission(out, c, depth + 1);
            }
            writeln!(out, "{pad}}}").unwrap();
        }
        MissionNode::Feasible(a) => writeln!(out, "{pad}feasible {a}").unwrap(),
        MissionNode::Action { action, behavior, prefer } => match prefer {
            Some(m) => {
                writeln!(out, "{pad}action {action} prefer {m} do {behavior}").unwrap()
            }
            None => writeln!(out, "{pad}action {action} do {behavior}").unwrap(),
        },
        MissionNode::Leaf(b) => writeln!(out, "{pad}leaf {b}").unwrap(),
    }
}

/// Serializes a document in the same format the parser reads. Reparsing
/// the output loads an identical store.
pub fn emit(doc: &ScenarioDocument) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "model {{").unwrap();
    for d in &doc.model {
        emit_decl(&mut out, d);
    }
    writeln!(out, "}}").unwrap();

    if !doc.timeline.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "timeline {{").unwrap();
        for e in &doc.timeline {
            let label = e.label.as_ref().map(|l| format!(" label {l}")).unwrap_or_default();
            match &e.kind {
                TimelineKind::Measure { name, value } => {
                    writeln!(out, "  at {} measure {name} {value}{label}", e.tick).unwrap();
                }
                TimelineKind::Fail { component } => {
                    writeln!(out, "  at {} fail {component}{label}", e.tick).unwrap();
                }
                TimelineKind::Recover { component } => {
                    writeln!(out, "  at {} recover {component}{label}", e.tick).unwrap();
                }
            }
        }
        writeln!(out, "}}").unwrap();
    }

    if !doc.plant.lines.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "plant {{").unwrap();
        for (key, vals) in &doc.plant.lines {
            if vals.is_empty() {
                writeln!(out, "  {key}").unwrap();
            } else {
                writeln!(out, "  {key} {}", vals.join(" ")).unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
    }

    if let Some(mission) = &doc.mission {
        writeln!(out).unwrap();
        writeln!(out, "mission {{").unwrap();
        emit_mission(&mut out, mission, 1);
        writeln!(out, "}}").unwrap();
    }
    out
}
