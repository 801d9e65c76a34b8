use rosa_core::model::{
    CmpOp, EstimationKind, MeasureKind, MissionNode, ModelDecl, PlantParams, ScenarioDocument,
    TargetKind, TimelineEvent, TimelineKind,
};

use super::ScenarioError;

pub const HEADER: &str = "rosa-scenario v1";

fn syntax(line: usize, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax { line, msg: msg.into() }
}

struct Lines<'a> {
    /// (1-based line number, tokens)
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let content = raw.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = content.split_whitespace().collect();
                if tokens.is_empty() {
                    None
                } else {
                    Some((i + 1, tokens))
                }
            })
            .collect();
        Lines { items, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }
}

fn parse_f64(line: usize, s: &str) -> Result<f64, ScenarioError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| syntax(line, format!("expected a finite number, got '{s}'")))
}

fn parse_i64(line: usize, s: &str) -> Result<i64, ScenarioError> {
    s.parse::<i64>()
        .map_err(|_| syntax(line, format!("expected an integer, got '{s}'")))
}

fn parse_bool(line: usize, s: &str) -> Result<bool, ScenarioError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(syntax(line, format!("expected true or false, got '{s}'"))),
    }
}

fn target_kind(line: usize, s: &str) -> Result<TargetKind, ScenarioError> {
    match s {
        "action" => Ok(TargetKind::Action),
        "component" => Ok(TargetKind::Component),
        "design" => Ok(TargetKind::Design),
        "config" => Ok(TargetKind::Config),
        _ => Err(syntax(
            line,
            format!("expected one of action|component|design|config, got '{s}'"),
        )),
    }
}

/// Splits a token list at each occurrence of the given keywords, returning
/// (keyword, following tokens) groups after the leading tokens.
fn keyword_groups<'a>(
    tokens: &[&'a str],
    keywords: &[&str],
) -> (Vec<&'a str>, Vec<(&'a str, Vec<&'a str>)>) {
    let mut lead = Vec::new();
    let mut groups: Vec<(&str, Vec<&str>)> = Vec::new();
    for &t in tokens {
        if keywords.contains(&t) {
            groups.push((t, Vec::new()));
        } else if let Some((_, last)) = groups.last_mut() {
            last.push(t);
        } else {
            lead.push(t);
        }
    }
    (lead, groups)
}

fn parse_model_decl(line: usize, tokens: &[&str]) -> Result<ModelDecl, ScenarioError> {
    match tokens[0] {
        "action" => match tokens {
            [_, name] => Ok(ModelDecl::Action { name: (*name).into() }),
            _ => Err(syntax(line, "expected: action <name>")),
        },
        "function" => match tokens {
            [_, name] => Ok(ModelDecl::Function { name: (*name).into(), always_improve: false }),
            [_, name, "always-improve"] => {
                Ok(ModelDecl::Function { name: (*name).into(), always_improve: true })
            }
            _ => Err(syntax(line, "expected: function <name> [always-improve]")),
        },
        "component" => {
            if tokens.len() < 2 {
                return Err(syntax(line, "expected: component <name> [always-improve] [package <p>] [executable <e>] [lifecycle <bool>]"));
            }
            let name = tokens[1].to_string();
            let mut rest = &tokens[2..];
            let mut always_improve = false;
            if rest.first() == Some(&"always-improve") {
                always_improve = true;
                rest = &rest[1..];
            }
            let mut package = None;
            let mut executable = None;
            let mut lifecycle = None;
            let mut it = rest.iter();
            while let Some(&kw) = it.next() {
                let Some(&val) = it.next() else {
                    return Err(syntax(line, format!("'{kw}' needs a value")));
                };
                match kw {
                    "package" => package = Some(val.to_string()),
                    "executable" => executable = Some(val.to_string()),
                    "lifecycle" => lifecycle = Some(parse_bool(line, val)?),
                    _ => return Err(syntax(line, format!("unknown component field '{kw}'"))),
                }
            }
            Ok(ModelDecl::Component { name, always_improve, package, executable, lifecycle })
        }
        "parameter" => match tokens {
            [_, label, key, value] => Ok(ModelDecl::Parameter {
                label: (*label).into(),
                key: (*key).into(),
                value: (*value).into(),
            }),
            _ => Err(syntax(line, "expected: parameter <label> <key> <value>")),
        },
        "measure" => match tokens {
            [_, name] => {
                Ok(ModelDecl::Measure { name: (*name).into(), kind: MeasureKind::Measure })
            }
            _ => Err(syntax(line, "expected: measure <name>")),
        },
        "quality-attribute" => match tokens {
            [_, name] => {
                Ok(ModelDecl::Measure { name: (*name).into(), kind: MeasureKind::Quality })
            }
            _ => Err(syntax(line, "expected: quality-attribute <name>")),
        },
        "environmental-attribute" => match tokens {
            [_, name] => Ok(ModelDecl::Measure {
                name: (*name).into(),
                kind: MeasureKind::Environmental,
            }),
            _ => Err(syntax(line, "expected: environmental-attribute <name>")),
        },
        "functional-requirement" => {
            // functional-requirement action <a> requires <f1> [f2 ...]
            let (lead, groups) = keyword_groups(&tokens[1..], &["action", "requires"]);
            let ok = lead.is_empty()
                && groups.len() == 2
                && groups[0].0 == "action"
                && groups[0].1.len() == 1
                && groups[1].0 == "requires"
                && !groups[1].1.is_empty();
            if !ok {
                return Err(syntax(
                    line,
                    "expected: functional-requirement action <a> requires <f1> [f2 ...]",
                ));
            }
            Ok(ModelDecl::FunctionalRequirement {
                action: groups[0].1[0].into(),
                functions: groups[1].1.iter().map(|s| s.to_string()).collect(),
            })
        }
        "function-design" => {
            // function-design <name> function <f> components <c...> priority <n>
            let (lead, groups) =
                keyword_groups(&tokens[1..], &["function", "components", "priority"]);
            let ok = lead.len() == 1
                && groups.len() == 3
                && groups[0].0 == "function"
                && groups[0].1.len() == 1
                && groups[1].0 == "components"
                && !groups[1].1.is_empty()
                && groups[2].0 == "priority"
                && groups[2].1.len() == 1;
            if !ok {
                return Err(syntax(
                    line,
                    "expected: function-design <name> function <f> components <c...> priority <n>",
                ));
            }
            Ok(ModelDecl::FunctionDesign {
                name: lead[0].into(),
                function: groups[0].1[0].into(),
                components: groups[1].1.iter().map(|s| s.to_string()).collect(),
                priority: parse_i64(line, groups[2].1[0])?,
            })
        }
        "component-configuration" => {
            // component-configuration <name> component <c> parameters <p...> priority <n>
            let (lead, groups) =
                keyword_groups(&tokens[1..], &["component", "parameters", "priority"]);
            let ok = lead.len() == 1
                && groups.len() == 3
                && groups[0].0 == "component"
                && groups[0].1.len() == 1
                && groups[1].0 == "parameters"
                && !groups[1].1.is_empty()
                && groups[2].0 == "priority"
                && groups[2].1.len() == 1;
            if !ok {
                return Err(syntax(
                    line,
                    "expected: component-configuration <name> component <c> parameters <p...> priority <n>",
                ));
            }
            Ok(ModelDecl::ComponentConfiguration {
                name: lead[0].into(),
                component: groups[0].1[0].into(),
                parameters: groups[1].1.iter().map(|s| s.to_string()).collect(),
                priority: parse_i64(line, groups[2].1[0])?,
            })
        }
        "constraint" => match tokens {
            // constraint on <kind> <target> measure <m> <op> <value>
            [_, "on", kind, target, "measure", measure, op, value] => Ok(ModelDecl::Constraint {
                target_kind: target_kind(line, kind)?,
                target: (*target).into(),
                measure: (*measure).into(),
                operator: op
                    .parse::<CmpOp>()
                    .map_err(|_| syntax(line, format!("unknown operator '{op}'")))?,
                value: parse_f64(line, value)?,
            }),
            _ => Err(syntax(
                line,
                "expected: constraint on <kind> <target> measure <m> <op> <value>",
            )),
        },
        "estimation" => match tokens {
            // estimation of <kind> <target> measure <m> value <v> type <maximize|minimize>
            [_, "of", kind, target, "measure", measure, "value", value, "type", etype] => {
                let ekind = match *etype {
                    "maximize" => EstimationKind::Maximize,
                    "minimize" => EstimationKind::Minimize,
                    other => {
                        return Err(syntax(line, format!("unknown estimation type '{other}'")))
                    }
                };
                Ok(ModelDecl::Estimation {
                    target_kind: target_kind(line, kind)?,
                    target: (*target).into(),
                    measure: (*measure).into(),
                    value: parse_f64(line, value)?,
                    kind: ekind,
                })
            }
            _ => Err(syntax(
                line,
                "expected: estimation of <kind> <target> measure <m> value <v> type <maximize|minimize>",
            )),
        },
        other => Err(syntax(line, format!("unknown model declaration '{other}'"))),
    }
}

fn parse_timeline_event(line: usize, tokens: &[&str]) -> Result<TimelineEvent, ScenarioError> {
    if tokens[0] != "at" || tokens.len() < 3 {
        return Err(syntax(line, "expected: at <tick> <measure|fail|recover> ..."));
    }
    let tick = parse_i64(line, tokens[1])?;
    let (body, label) = match tokens.iter().position(|&t| t == "label") {
        Some(i) => {
            if i + 2 != tokens.len() {
                return Err(syntax(line, "label must be the final field"));
            }
            (&tokens[2..i], Some(tokens[i + 1].to_string()))
        }
        None => (&tokens[2..], None),
    };
    let kind = match body {
        ["measure", name, value] => TimelineKind::Measure {
            name: (*name).into(),
            value: parse_f64(line, value)?,
        },
        ["fail", component] => TimelineKind::Fail { component: (*component).into() },
        ["recover", component] => TimelineKind::Recover { component: (*component).into() },
        _ => {
            return Err(syntax(
                line,
                "expected: measure <m> <value> | fail <component> | recover <component>",
            ))
        }
    };
    Ok(TimelineEvent { tick, kind, label })
}

fn parse_mission(lines: &mut Lines<'_>) -> Result<MissionNode, ScenarioError> {
    let Some((line, tokens)) = lines.next() else {
        return Err(syntax(0, "mission section ended unexpectedly"));
    };
    match tokens.as_slice() {
        ["sequence", "{"] => parse_children(lines, line, true),
        ["fallback", "{"] => parse_children(lines, line, false),
        ["feasible", action] => Ok(MissionNode::Feasible((*action).into())),
        ["action", action, "do", behavior] => Ok(MissionNode::Action {
            action: (*action).into(),
            behavior: (*behavior).into(),
            prefer: None,
        }),
        ["action", action, "prefer", measure, "do", behavior] => Ok(MissionNode::Action {
            action: (*action).into(),
            behavior: (*behavior).into(),
            prefer: Some((*measure).into()),
        }),
        ["leaf", behavior] => Ok(MissionNode::Leaf((*behavior).into())),
        _ => Err(syntax(line, "expected: sequence {| fallback {| feasible <a> | action <a> [prefer <m>] do <b> | leaf <b>")),
    }
}

fn parse_children(
    lines: &mut Lines<'_>,
    open_line: usize,
    sequence: bool,
) -> Result<MissionNode, ScenarioError> {
    let mut children = Vec::new();
    loop {
        match lines.peek() {
            None => return Err(syntax(open_line, "unclosed mission block")),
            Some((_, tokens)) if tokens.as_slice() == ["}"] => {
                lines.next();
                break;
            }
            Some(_) => children.push(parse_mission(lines)?),
        }
    }
    if children.is_empty() {
        return Err(syntax(open_line, "mission blocks must have children"));
    }
    Ok(if sequence { MissionNode::Sequence(children) } else { MissionNode::Fallback(children) })
}

/// Parses scenario text into a document plus, for error reporting, the
/// source line of every model declaration (by declaration index).
pub fn parse(text: &str) -> Result<(ScenarioDocument, Vec<usize>), ScenarioError> {
    let mut lines = Lines::new(text);

    match lines.next() {
        Some((_, tokens)) if tokens == HEADER.split_whitespace().collect::<Vec<_>>() => {}
        Some((line, _)) => return Err(syntax(line, format!("expected header '{HEADER}'"))),
        None => return Err(syntax(1, format!("expected header '{HEADER}'"))),
    }

    let mut doc = ScenarioDocument::default();
    let mut decl_lines = Vec::new();
    let mut seen_model = false;
    let mut seen = std::collections::BTreeSet::new();

    while let Some((line, tokens)) = lines.next() {
        let section = tokens[0];
        if tokens.len() != 2 || tokens[1] != "{" {
            return Err(syntax(line, format!("expected '{section} {{'")));
        }
        if !seen.insert(section.to_string()) {
            return Err(syntax(line, format!("duplicate section '{section}'")));
        }
        match section {
            "model" => {
                seen_model = true;
                loop {
                    let Some((l, toks)) = lines.next() else {
                        return Err(syntax(line, "unclosed model section"));
                    };
                    if toks.as_slice() == ["}"] {
                        break;
                    }
                    doc.model.push(parse_model_decl(l, &toks)?);
                    decl_lines.push(l);
                }
            }
            "timeline" => loop {
                let Some((l, toks)) = lines.next() else {
                    return Err(syntax(line, "unclosed timeline section"));
                };
                if toks.as_slice() == ["}"] {
                    break;
                }
                doc.timeline.push(parse_timeline_event(l, &toks)?);
            },
            "plant" => {
                let mut params = PlantParams::default();
                loop {
                    let Some((_, toks)) = lines.next() else {
                        return Err(syntax(line, "unclosed plant section"));
                    };
                    if toks.as_slice() == ["}"] {
                        break;
                    }
                    params.lines.push((
                        toks[0].to_string(),
                        toks[1..].iter().map(|s| s.to_string()).collect(),
                    ));
                }
                doc.plant = params;
            }
            "mission" => {
                let root = parse_mission(&mut lines)?;
                match lines.next() {
                    Some((_, toks)) if toks.as_slice() == ["}"] => {}
                    _ => return Err(syntax(line, "mission section must contain one node")),
                }
                doc.mission = Some(root);
            }
            other => return Err(syntax(line, format!("unknown section '{other}'"))),
        }
    }

    if !seen_model {
        return Err(syntax(1, "missing model section"));
    }
    Ok((doc, decl_lines))
}
