//! Behavior-tree task-decision layer.
//!
//! Trees follow the feasibility-gating pattern: a condition node asking
//! the knowledge base whether an action is feasible precedes the action
//! node, and composites are memory-less, so feasibility is re-checked on
//! every tick. Action nodes register a required action in the KB while
//! running and close it on success, failure or halt, which is what couples
//! task decisions to architectural reconfiguration.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::kb::{ActionRequest, KbError, KnowledgeBase, ServiceRequest, ServiceResponse};
use crate::model::MissionNode;

/// Result of ticking a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TickResult {
    Success,
    Failure,
    Running,
}

impl TickResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            TickResult::Success => "success",
            TickResult::Failure => "failure",
            TickResult::Running => "running",
        }
    }
}

impl fmt::Display for TickResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where domain behaviors run. The simulator implements this; behavior
/// state is keyed by node path so two leaves with the same behavior stay
/// independent.
pub trait BehaviorHost {
    fn tick_behavior(&mut self, behavior: &str, path: &str) -> TickResult;
    fn halt_behavior(&mut self, behavior: &str, path: &str);
}

/// Sink for per-tick node trace lines.
pub trait BtTrace {
    fn node(&mut self, path: &str, what: &str, result: TickResult);
}

/// No-op trace sink.
pub struct NoTrace;

impl BtTrace for NoTrace {
    fn node(&mut self, _path: &str, _what: &str, _result: TickResult) {}
}

#[derive(Debug, Clone, PartialEq)]
enum NodeKind {
    Sequence,
    Fallback,
    /// Succeeds exactly when the action's inferred status is not
    /// unfeasible.
    IsActionFeasible(String),
    /// Wraps a domain behavior and mirrors its execution into the KB as a
    /// required action.
    RosaAction { action: String, behavior: String, prefer: Option<String> },
    /// A bare domain behavior with no knowledge registration.
    DomainLeaf(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtNode {
    kind: NodeKind,
    children: Vec<BtNode>,
    /// For action nodes: whether this node opened the currently open
    /// required action. Keeps sibling nodes naming the same action from
    /// closing records they did not open.
    owns_required_action: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BtError {
    Kb(KbError),
    LeafWithChildren,
}

impl fmt::Display for BtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BtError::Kb(e) => write!(f, "{e}"),
            BtError::LeafWithChildren => write!(f, "leaf nodes cannot have children"),
        }
    }
}

impl core::error::Error for BtError {}

impl From<KbError> for BtError {
    fn from(e: KbError) -> Self {
        BtError::Kb(e)
    }
}

impl BtNode {
    fn new(kind: NodeKind, children: Vec<BtNode>) -> BtNode {
        BtNode { kind, children, owns_required_action: false }
    }

    pub fn from_mission(mission: &MissionNode) -> BtNode {
        match mission {
            MissionNode::Sequence(cs) => BtNode::new(
                NodeKind::Sequence,
                cs.iter().map(BtNode::from_mission).collect(),
            ),
            MissionNode::Fallback(cs) => BtNode::new(
                NodeKind::Fallback,
                cs.iter().map(BtNode::from_mission).collect(),
            ),
            MissionNode::Feasible(a) => {
                BtNode::new(NodeKind::IsActionFeasible(a.clone()), Vec::new())
            }
            MissionNode::Action { action, behavior, prefer } => BtNode::new(
                NodeKind::RosaAction {
                    action: action.clone(),
                    behavior: behavior.clone(),
                    prefer: prefer.clone(),
                },
                Vec::new(),
            ),
            MissionNode::Leaf(b) => BtNode::new(NodeKind::DomainLeaf(b.clone()), Vec::new()),
        }
    }

    /// Ticks the tree. Composites tick children in order and halt the
    /// running remainder as soon as one child decides the composite's
    /// result, so a failed feasibility gate halts the action it guards.
    pub fn tick(
        &mut self,
        kb: &mut KnowledgeBase,
        host: &mut dyn BehaviorHost,
        trace: &mut dyn BtTrace,
        tick: i64,
    ) -> Result<TickResult, BtError> {
        self.tick_at(kb, host, trace, tick, &mut Vec::new())
    }

    fn tick_at(
        &mut self,
        kb: &mut KnowledgeBase,
        host: &mut dyn BehaviorHost,
        trace: &mut dyn BtTrace,
        tick: i64,
        path: &mut Vec<usize>,
    ) -> Result<TickResult, BtError> {
        let path_str = render_path(path);
        match &mut self.kind {
            NodeKind::Sequence => {
                let n = self.children.len();
                let mut decided: Option<(usize, TickResult)> = None;
                for i in 0..n {
                    path.push(i);
                    let r = self.children[i].tick_at(kb, host, trace, tick, path)?;
                    path.pop();
                    if r != TickResult::Success {
                        decided = Some((i, r));
                        break;
                    }
                }
                match decided {
                    Some((i, r)) => {
                        halt_range(&mut self.children, i + 1.., kb, host, tick, path)?;
                        Ok(r)
                    }
                    None => Ok(TickResult::Success),
                }
            }
            NodeKind::Fallback => {
                let n = self.children.len();
                let mut decided: Option<(usize, TickResult)> = None;
                for i in 0..n {
                    path.push(i);
                    let r = self.children[i].tick_at(kb, host, trace, tick, path)?;
                    path.pop();
                    if r != TickResult::Failure {
                        decided = Some((i, r));
                        break;
                    }
                }
                match decided {
                    Some((i, r)) => {
                        halt_range(&mut self.children, i + 1.., kb, host, tick, path)?;
                        Ok(r)
                    }
                    None => Ok(TickResult::Failure),
                }
            }
            NodeKind::IsActionFeasible(action) => {
                let selectable = match kb
                    .kb_services("action/selectable", ServiceRequest::ActionSelectable)?
                {
                    ServiceResponse::Names(n) => n,
                    _ => Vec::new(),
                };
                let r = if selectable.iter().any(|a| a == action) {
                    TickResult::Success
                } else {
                    TickResult::Failure
                };
                trace.node(&path_str, &format!("feasible({action})"), r);
                Ok(r)
            }
            NodeKind::RosaAction { action, behavior, prefer } => {
                let r = host.tick_behavior(behavior, &path_str);
                match r {
                    TickResult::Running => {
                        if !self.owns_required_action && !kb.has_open_required_action(action)? {
                            kb.kb_services(
                                "action/request",
                                ServiceRequest::ActionRequest {
                                    action: action.clone(),
                                    request: ActionRequest::Start {
                                        tick,
                                        preferred_measure: prefer.clone(),
                                    },
                                },
                            )?;
                            self.owns_required_action = true;
                        }
                    }
                    TickResult::Success | TickResult::Failure => {
                        if self.owns_required_action {
                            let result = if r == TickResult::Success {
                                "completed"
                            } else {
                                "failed"
                            };
                            kb.kb_services(
                                "action/request",
                                ServiceRequest::ActionRequest {
                                    action: action.clone(),
                                    request: ActionRequest::Stop {
                                        tick,
                                        result: String::from(result),
                                    },
                                },
                            )?;
                            self.owns_required_action = false;
                        }
                    }
                }
                trace.node(&path_str, &format!("action({action})"), r);
                Ok(r)
            }
            NodeKind::DomainLeaf(behavior) => {
                let r = host.tick_behavior(behavior, &path_str);
                trace.node(&path_str, &format!("leaf({behavior})"), r);
                Ok(r)
            }
        }
    }

    /// Halts the subtree: every open required action of a contained
    /// action node is closed with result "halted" and behavior state is
    /// reset. Idempotent.
    pub fn halt(
        &mut self,
        kb: &mut KnowledgeBase,
        host: &mut dyn BehaviorHost,
        tick: i64,
    ) -> Result<(), BtError> {
        self.halt_at(kb, host, tick, &mut Vec::new())
    }

    fn halt_at(
        &mut self,
        kb: &mut KnowledgeBase,
        host: &mut dyn BehaviorHost,
        tick: i64,
        path: &mut Vec<usize>,
    ) -> Result<(), BtError> {
        let path_str = render_path(path);
        match &mut self.kind {
            NodeKind::Sequence | NodeKind::Fallback => {
                for i in 0..self.children.len() {
                    path.push(i);
                    self.children[i].halt_at(kb, host, tick, path)?;
                    path.pop();
                }
            }
            NodeKind::IsActionFeasible(_) => {}
            NodeKind::RosaAction { action, behavior, .. } => {
                if self.owns_required_action {
                    kb.kb_services(
                        "action/request",
                        ServiceRequest::ActionRequest {
                            action: action.clone(),
                            request: ActionRequest::Stop {
                                tick,
                                result: String::from("halted"),
                            },
                        },
                    )?;
                    self.owns_required_action = false;
                }
                host.halt_behavior(behavior, &path_str);
            }
            NodeKind::DomainLeaf(behavior) => {
                host.halt_behavior(behavior, &path_str);
            }
        }
        Ok(())
    }
}

fn halt_range(
    children: &mut [BtNode],
    range: core::ops::RangeFrom<usize>,
    kb: &mut KnowledgeBase,
    host: &mut dyn BehaviorHost,
    tick: i64,
    path: &mut Vec<usize>,
) -> Result<(), BtError> {
    let start = range.start;
    for (offset, child) in children[start..].iter_mut().enumerate() {
        path.push(start + offset);
        child.halt_at(kb, host, tick, path)?;
        path.pop();
    }
    Ok(())
}

fn render_path(path: &[usize]) -> String {
    if path.is_empty() {
        return String::from("root");
    }
    let parts: Vec<String> = path.iter().map(|i| format!("{i}")).collect();
    format!("root.{}", parts.join("."))
}
