use alloc::string::String;
use alloc::vec::Vec;

/// Kind of measure entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Measure,
    Quality,
    Environmental,
}

/// What a constraint or estimation points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Action,
    Component,
    Design,
    Config,
}

/// One declaration of the model section, in file order. Parameters carry a
/// file-local label used only for cross-referencing inside the document;
/// the label is not stored as model knowledge.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelDecl {
    Action {
        name: String,
    },
    Function {
        name: String,
        always_improve: bool,
    },
    Component {
        name: String,
        always_improve: bool,
        package: Option<String>,
        executable: Option<String>,
        lifecycle: Option<bool>,
    },
    Parameter {
        label: String,
        key: String,
        value: String,
    },
    Measure {
        name: String,
        kind: MeasureKind,
    },
    FunctionalRequirement {
        action: String,
        functions: Vec<String>,
    },
    FunctionDesign {
        name: String,
        function: String,
        components: Vec<String>,
        priority: i64,
    },
    ComponentConfiguration {
        name: String,
        component: String,
        parameters: Vec<String>,
        priority: i64,
    },
    Constraint {
        target_kind: TargetKind,
        target: String,
        measure: String,
        operator: super::CmpOp,
        value: f64,
    },
    Estimation {
        target_kind: TargetKind,
        target: String,
        measure: String,
        value: f64,
        kind: super::EstimationKind,
    },
}

/// Scripted uncertainty injection and environment changes.
#[derive(Debug, Clone, PartialEq)]
pub enum TimelineKind {
    /// Sets the plant value of the named measure and emits a measurement
    /// diagnostic at that tick.
    Measure { name: String, value: f64 },
    /// Component failure diagnostic.
    Fail { component: String },
    /// Component recovery diagnostic.
    Recover { component: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEvent {
    pub tick: i64,
    pub kind: TimelineKind,
    /// Labeled events are tracked uncertainties: the run records a
    /// reaction time for each label.
    pub label: Option<String>,
}

/// Plant parameters as raw key/value-list lines. Typed interpretation
/// happens at simulation setup so the document stays format-agnostic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlantParams {
    pub lines: Vec<(String, Vec<String>)>,
}

impl PlantParams {
    pub fn values(&self, key: &str) -> Option<&[String]> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a [String]> + 'a {
        self.lines.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    pub fn scalar(&self, key: &str) -> Option<&str> {
        match self.values(key) {
            Some([v]) => Some(v.as_str()),
            _ => None,
        }
    }
}

/// Mission description: the behavior tree driving task decisions.
#[derive(Debug, Clone, PartialEq)]
pub enum MissionNode {
    Sequence(Vec<MissionNode>),
    Fallback(Vec<MissionNode>),
    /// Condition gating on the named action's inferred feasibility.
    Feasible(String),
    /// Knowledge-registered action wrapping a domain behavior.
    Action {
        action: String,
        behavior: String,
        prefer: Option<String>,
    },
    /// Bare domain behavior without knowledge registration.
    Leaf(String),
}

impl MissionNode {
    pub fn for_each_action<F: FnMut(&str, Option<&str>)>(&self, f: &mut F) {
        match self {
            MissionNode::Sequence(cs) | MissionNode::Fallback(cs) => {
                for c in cs {
                    c.for_each_action(f);
                }
            }
            MissionNode::Feasible(a) => f(a, None),
            MissionNode::Action { action, prefer, .. } => f(action, prefer.as_deref()),
            MissionNode::Leaf(_) => {}
        }
    }
}

/// A parsed scenario: model, event timeline, plant parameters and mission.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioDocument {
    pub model: Vec<ModelDecl>,
    pub timeline: Vec<TimelineEvent>,
    pub plant: PlantParams,
    pub mission: Option<MissionNode>,
}

impl Default for MissionNode {
    fn default() -> Self {
        MissionNode::Sequence(Vec::new())
    }
}
