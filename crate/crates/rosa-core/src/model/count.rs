use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::era::{Store, Value};

use super::schema::types;

/// Development-effort element counts: design-time entities and relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementCounts {
    pub entities: usize,
    pub relations: usize,
}

impl ElementCounts {
    pub fn total(&self) -> usize {
        self.entities + self.relations
    }
}

/// Counts the design-time instances of a loaded model. Runtime relations
/// (measurements, required actions, reconfiguration plans) are excluded:
/// they are produced by the running system, not modeled by hand.
pub fn count_elements(store: &Store) -> ElementCounts {
    let mut entities = 0;
    let mut relations = 0;
    for inst in store.instances() {
        let t = inst.type_name.as_str();
        if types::DESIGN_TIME_ENTITIES.contains(&t) {
            entities += 1;
        } else if types::DESIGN_TIME_RELATIONS.contains(&t) {
            relations += 1;
        }
    }
    ElementCounts { entities, relations }
}

/// Canonical textual form of a store's contents, independent of instance
/// ids: one sorted line per instance with attributes and role fillers
/// (fillers named by their key attribute where available, else by a
/// structural placeholder). Two stores with equal fingerprints hold the
/// same knowledge.
pub fn fingerprint(store: &Store) -> Vec<String> {
    let describe = |id| -> String {
        match store.get(id) {
            Some(inst) => match inst.latest("name") {
                Some(Value::Str(n)) => format!("{}:{}", inst.type_name, n),
                _ => {
                    // Keyless instances (e.g. parameters) described by content.
                    let mut parts: Vec<String> = inst
                        .attrs
                        .iter()
                        .map(|(a, vs)| {
                            let vals: Vec<String> =
                                vs.iter().map(|v| format!("{v}")).collect();
                            format!("{a}={}", vals.join("|"))
                        })
                        .collect();
                    parts.sort();
                    format!("{}({})", inst.type_name, parts.join(","))
                }
            },
            None => String::from("?"),
        }
    };

    let mut lines: Vec<String> = store
        .instances()
        .map(|inst| {
            let mut attrs: Vec<String> = inst
                .attrs
                .iter()
                .map(|(a, vs)| {
                    let vals: Vec<String> = vs.iter().map(|v| format!("{v}")).collect();
                    format!("{a}={}", vals.join("|"))
                })
                .collect();
            attrs.sort();
            let mut roles: Vec<String> = inst
                .roles
                .iter()
                .map(|(role, players)| {
                    let mut names: Vec<String> =
                        players.iter().map(|p| describe(*p)).collect();
                    names.sort();
                    format!("{role}->[{}]", names.join(","))
                })
                .collect();
            roles.sort();
            format!("{} {{{}}} {{{}}}", inst.type_name, attrs.join(","), roles.join(","))
        })
        .collect();
    lines.sort();
    lines
}
