use alloc::vec;
use core::fmt;
use core::str::FromStr;

use crate::era::{AttrDef, RoleDef, SchemaDef, ValueKind};

/// Type names of the knowledge model.
pub mod types {
    pub const ACTION: &str = "Action";
    pub const FUNCTION: &str = "Function";
    pub const COMPONENT: &str = "Component";
    pub const COMPONENT_PARAMETER: &str = "ComponentParameter";
    pub const MEASURE: &str = "Measure";
    pub const QUALITY_ATTRIBUTE: &str = "QualityAttribute";
    pub const ENVIRONMENTAL_ATTRIBUTE: &str = "EnvironmentalAttribute";

    pub const FUNCTIONAL_REQUIREMENT: &str = "functional-requirement";
    pub const FUNCTION_DESIGN: &str = "function-design";
    pub const COMPONENT_CONFIGURATION: &str = "component-configuration";
    pub const MEASUREMENT: &str = "measurement";
    pub const CONSTRAINT: &str = "constraint";
    pub const ESTIMATION: &str = "estimation";
    pub const REQUIRED_ACTION: &str = "required-action";
    pub const RECONFIGURATION_PLAN: &str = "reconfiguration-plan";

    /// Every measure subtype usable wherever a measure is expected.
    pub const MEASURE_TYPES: [&str; 3] =
        [MEASURE, QUALITY_ATTRIBUTE, ENVIRONMENTAL_ATTRIBUTE];

    /// Design-time entity types, counted as model overhead.
    pub const DESIGN_TIME_ENTITIES: [&str; 7] = [
        ACTION,
        FUNCTION,
        COMPONENT,
        COMPONENT_PARAMETER,
        MEASURE,
        QUALITY_ATTRIBUTE,
        ENVIRONMENTAL_ATTRIBUTE,
    ];

    /// Design-time relation types, counted as model overhead.
    pub const DESIGN_TIME_RELATIONS: [&str; 5] = [
        FUNCTIONAL_REQUIREMENT,
        FUNCTION_DESIGN,
        COMPONENT_CONFIGURATION,
        CONSTRAINT,
        ESTIMATION,
    ];
}

/// Attribute names of the knowledge model.
pub mod attrs {
    pub const NAME: &str = "name";
    pub const STATUS: &str = "status";
    pub const IS_REQUIRED: &str = "is-required";
    pub const ALWAYS_IMPROVE: &str = "always-improve";
    pub const IS_ACTIVE: &str = "is-active";
    pub const PID: &str = "pid";
    pub const KEY: &str = "key";
    pub const VALUE: &str = "value";
    pub const PRIORITY: &str = "priority";
    pub const IS_SELECTED: &str = "is-selected";
    pub const OPERATOR: &str = "operator";
    pub const START_TIME: &str = "start-time";
    pub const END_TIME: &str = "end-time";
    pub const RESULT: &str = "result";
    pub const TIME: &str = "time";
    pub const TYPE: &str = "type";

    // Process descriptor knowledge, simplified from the middleware-specific
    // component taxonomy.
    pub const PACKAGE: &str = "package";
    pub const EXECUTABLE: &str = "executable";
    pub const LIFECYCLE_MANAGED: &str = "lifecycle-managed";
}

/// Role names of the knowledge model.
pub mod roles {
    pub const ACTION: &str = "action";
    pub const REQUIRED_FUNCTION: &str = "required-function";
    pub const FUNCTION: &str = "function";
    pub const REQUIRED_COMPONENT: &str = "required-component";
    pub const COMPONENT: &str = "component";
    pub const PARAMETER: &str = "parameter";
    pub const MEASURE: &str = "measure";
    pub const CONSTRAINED: &str = "constrained";
    pub const ESTIMATED: &str = "estimated";
    pub const PREFERRED_MEASURE: &str = "preferred-measure";
    pub const COMPONENT_ACTIVATION: &str = "component-activation";
    pub const COMPONENT_DEACTIVATION: &str = "component-deactivation";
    pub const PARAMETER_ADAPTATION: &str = "parameter-adaptation";
}

/// Canonical status words.
pub mod status {
    pub const FEASIBLE: &str = "feasible";
    pub const UNFEASIBLE: &str = "unfeasible";
    pub const FAILURE: &str = "failure";
    pub const CONFIGURATION_ERROR: &str = "configuration error";
    pub const UNSOLVED: &str = "unsolved";
    pub const SOLVED: &str = "solved";
    pub const VIOLATED: &str = "violated";
    pub const SATISFIED: &str = "satisfied";
}

/// Canonical inferred state of a model element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Feasible,
    Unfeasible,
    Failure,
    ConfigurationError,
    Unsolved,
    Solved,
    Violated,
    Satisfied,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Feasible => status::FEASIBLE,
            Status::Unfeasible => status::UNFEASIBLE,
            Status::Failure => status::FAILURE,
            Status::ConfigurationError => status::CONFIGURATION_ERROR,
            Status::Unsolved => status::UNSOLVED,
            Status::Solved => status::SOLVED,
            Status::Violated => status::VIOLATED,
            Status::Satisfied => status::SATISFIED,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Constraint operator. Equality on doubles uses an absolute tolerance as
/// a safety net; the models in scope only use ordering operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

pub const EQ_TOLERANCE: f64 = 1e-9;

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

impl CmpOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
        }
    }

    pub fn eval(&self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => abs(lhs - rhs) <= EQ_TOLERANCE,
        }
    }
}

impl FromStr for CmpOp {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            ">" => Ok(CmpOp::Gt),
            ">=" => Ok(CmpOp::Ge),
            "<" => Ok(CmpOp::Lt),
            "<=" => Ok(CmpOp::Le),
            "==" => Ok(CmpOp::Eq),
            _ => Err(()),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The knowledge-model schema on the generic store.
///
/// Measure subtypes are flattened into the role player sets (the store has
/// no subtyping), and loaders enforce name uniqueness across them.
pub fn rosa_schema() -> SchemaDef {
    use ValueKind::*;

    let measure_players = || types::MEASURE_TYPES;

    SchemaDef::new()
        .entity(
            types::ACTION,
            vec![
                AttrDef::key(attrs::NAME, Str),
                AttrDef::new(attrs::STATUS, Str),
                AttrDef::new(attrs::IS_REQUIRED, Bool),
            ],
        )
        .entity(
            types::FUNCTION,
            vec![
                AttrDef::key(attrs::NAME, Str),
                AttrDef::new(attrs::ALWAYS_IMPROVE, Bool),
                AttrDef::new(attrs::STATUS, Str),
                AttrDef::new(attrs::IS_REQUIRED, Bool),
            ],
        )
        .entity(
            types::COMPONENT,
            vec![
                AttrDef::key(attrs::NAME, Str),
                AttrDef::new(attrs::ALWAYS_IMPROVE, Bool),
                AttrDef::new(attrs::STATUS, Str),
                AttrDef::new(attrs::IS_REQUIRED, Bool),
                AttrDef::new(attrs::IS_ACTIVE, Bool),
                AttrDef::new(attrs::PID, Int),
                AttrDef::new(attrs::PACKAGE, Str),
                AttrDef::new(attrs::EXECUTABLE, Str),
                AttrDef::new(attrs::LIFECYCLE_MANAGED, Bool),
            ],
        )
        .entity(
            types::COMPONENT_PARAMETER,
            vec![AttrDef::new(attrs::KEY, Str), AttrDef::new(attrs::VALUE, Str)],
        )
        .entity(types::MEASURE, vec![AttrDef::key(attrs::NAME, Str)])
        .entity(types::QUALITY_ATTRIBUTE, vec![AttrDef::key(attrs::NAME, Str)])
        .entity(types::ENVIRONMENTAL_ATTRIBUTE, vec![AttrDef::key(attrs::NAME, Str)])
        .relation(
            types::FUNCTIONAL_REQUIREMENT,
            vec![
                RoleDef::new(roles::ACTION, [types::ACTION]),
                RoleDef::new(roles::REQUIRED_FUNCTION, [types::FUNCTION]),
            ],
            vec![],
        )
        .relation(
            types::FUNCTION_DESIGN,
            vec![
                RoleDef::new(roles::FUNCTION, [types::FUNCTION]),
                RoleDef::new(roles::REQUIRED_COMPONENT, [types::COMPONENT]),
            ],
            vec![
                AttrDef::key(attrs::NAME, Str),
                AttrDef::new(attrs::PRIORITY, Int),
                AttrDef::new(attrs::STATUS, Str),
                AttrDef::new(attrs::IS_SELECTED, Bool),
            ],
        )
        .relation(
            types::COMPONENT_CONFIGURATION,
            vec![
                RoleDef::new(roles::COMPONENT, [types::COMPONENT]),
                RoleDef::new(roles::PARAMETER, [types::COMPONENT_PARAMETER]),
            ],
            vec![
                AttrDef::key(attrs::NAME, Str),
                AttrDef::new(attrs::PRIORITY, Int),
                AttrDef::new(attrs::STATUS, Str),
                AttrDef::new(attrs::IS_SELECTED, Bool),
            ],
        )
        .relation(
            types::MEASUREMENT,
            vec![RoleDef::new(roles::MEASURE, measure_players())],
            vec![AttrDef::new(attrs::VALUE, Double), AttrDef::new(attrs::TIME, DateTime)],
        )
        .relation(
            types::CONSTRAINT,
            vec![
                RoleDef::new(roles::MEASURE, measure_players()),
                // Higher-order: constraints may gate relations as well as
                // entities.
                RoleDef::new(
                    roles::CONSTRAINED,
                    [
                        types::ACTION,
                        types::COMPONENT,
                        types::FUNCTION_DESIGN,
                        types::COMPONENT_CONFIGURATION,
                    ],
                ),
            ],
            vec![
                AttrDef::new(attrs::OPERATOR, Str),
                AttrDef::new(attrs::VALUE, Double),
                AttrDef::new(attrs::STATUS, Str),
            ],
        )
        .relation(
            types::ESTIMATION,
            vec![
                RoleDef::new(roles::MEASURE, measure_players()),
                RoleDef::new(
                    roles::ESTIMATED,
                    [types::FUNCTION_DESIGN, types::COMPONENT, types::COMPONENT_CONFIGURATION],
                ),
            ],
            vec![AttrDef::new(attrs::VALUE, Double), AttrDef::new(attrs::TYPE, Str)],
        )
        .relation(
            types::REQUIRED_ACTION,
            vec![
                RoleDef::new(roles::ACTION, [types::ACTION]),
                RoleDef::new(roles::PREFERRED_MEASURE, measure_players()),
            ],
            vec![
                AttrDef::new(attrs::START_TIME, DateTime),
                AttrDef::new(attrs::END_TIME, DateTime),
                AttrDef::new(attrs::RESULT, Str),
            ],
        )
        .relation_allow_empty(
            types::RECONFIGURATION_PLAN,
            vec![
                RoleDef::new(roles::COMPONENT_ACTIVATION, [types::COMPONENT]),
                RoleDef::new(roles::COMPONENT_DEACTIVATION, [types::COMPONENT]),
                RoleDef::new(roles::PARAMETER_ADAPTATION, [types::COMPONENT_CONFIGURATION]),
            ],
            vec![
                AttrDef::new(attrs::START_TIME, DateTime),
                AttrDef::new(attrs::END_TIME, DateTime),
                AttrDef::new(attrs::RESULT, Str),
            ],
        )
}
