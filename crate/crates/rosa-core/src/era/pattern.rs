use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::store::{AttrOverlay, InstanceId, Store};
use super::value::Value;

/// Comparison operator for attribute predicates. Comparisons between
/// values of different kinds never match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    fn eval(&self, lhs: &Value, rhs: &Value) -> bool {
        if lhs.kind() != rhs.kind() {
            return false;
        }
        match self {
            Cmp::Eq => lhs == rhs,
            Cmp::Ne => lhs != rhs,
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
        }
    }
}

/// Predicate over the latest value of an attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrPredicate {
    /// The attribute carries at least one value.
    Has(String),
    /// The latest value compares as stated.
    Compare(String, Cmp, Value),
}

/// One conjunct of a pattern: a variable with an optional type constraint,
/// attribute predicates and, for relation variables, role-membership
/// constraints binding player variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Clause {
    pub var: String,
    pub isa: Option<String>,
    pub preds: Vec<AttrPredicate>,
    /// (role name, player variable): the instance bound to `var` must have
    /// the player variable's instance among the fillers of that role.
    pub roles: Vec<(String, String)>,
}

impl Clause {
    pub fn var(name: impl Into<String>) -> Self {
        Clause { var: name.into(), ..Clause::default() }
    }

    pub fn isa(mut self, type_name: impl Into<String>) -> Self {
        self.isa = Some(type_name.into());
        self
    }

    pub fn has(mut self, attr: impl Into<String>) -> Self {
        self.preds.push(AttrPredicate::Has(attr.into()));
        self
    }

    pub fn compare(mut self, attr: impl Into<String>, cmp: Cmp, value: Value) -> Self {
        self.preds.push(AttrPredicate::Compare(attr.into(), cmp, value));
        self
    }

    pub fn eq(self, attr: impl Into<String>, value: Value) -> Self {
        self.compare(attr, Cmp::Eq, value)
    }

    pub fn role(mut self, role: impl Into<String>, player_var: impl Into<String>) -> Self {
        self.roles.push((role.into(), player_var.into()));
        self
    }
}

/// A pattern that must not match for a candidate binding to survive.
/// Variables shared with the positive part stay bound; variables local to
/// the negation are existential.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Negation {
    pub clauses: Vec<Clause>,
}

/// Conjunctive match pattern with negation blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pattern {
    pub clauses: Vec<Clause>,
    pub negations: Vec<Negation>,
}

impl Pattern {
    pub fn new() -> Self {
        Pattern::default()
    }

    pub fn clause(mut self, c: Clause) -> Self {
        self.clauses.push(c);
        self
    }

    pub fn not(mut self, clauses: Vec<Clause>) -> Self {
        self.negations.push(Negation { clauses });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternError {
    /// A negation references a variable that is neither generated inside
    /// the negation nor bound by the positive part.
    UnboundNegationVar(String),
    /// A role constraint references a player variable that no clause binds.
    UnboundPlayerVar(String),
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternError::UnboundNegationVar(v) => {
                write!(f, "negation references unbound variable '{v}'")
            }
            PatternError::UnboundPlayerVar(v) => {
                write!(f, "role constraint references unbound variable '{v}'")
            }
        }
    }
}

impl core::error::Error for PatternError {}

/// A complete assignment of pattern variables to instances.
pub type Bindings = BTreeMap<String, InstanceId>;

fn clause_vars(clauses: &[Clause]) -> BTreeSet<&str> {
    clauses.iter().map(|c| c.var.as_str()).collect()
}

fn validate(pattern: &Pattern) -> Result<(), PatternError> {
    let positive = clause_vars(&pattern.clauses);
    for c in &pattern.clauses {
        for (_, player) in &c.roles {
            if !positive.contains(player.as_str()) {
                return Err(PatternError::UnboundPlayerVar(player.clone()));
            }
        }
    }
    for neg in &pattern.negations {
        let local = clause_vars(&neg.clauses);
        for c in &neg.clauses {
            for (_, player) in &c.roles {
                if !local.contains(player.as_str()) && !positive.contains(player.as_str()) {
                    return Err(PatternError::UnboundNegationVar(player.clone()));
                }
            }
        }
    }
    Ok(())
}

fn satisfies_clause(
    store: &Store,
    overlay: Option<&AttrOverlay>,
    clause: &Clause,
    id: InstanceId,
) -> bool {
    let Some(inst) = store.get(id) else { return false };
    if let Some(t) = &clause.isa {
        if &inst.type_name != t {
            return false;
        }
    }
    for pred in &clause.preds {
        let ok = match pred {
            AttrPredicate::Has(attr) => store.effective_latest(overlay, id, attr).is_some(),
            AttrPredicate::Compare(attr, cmp, value) => store
                .effective_latest(overlay, id, attr)
                .map(|v| cmp.eval(v, value))
                .unwrap_or(false),
        };
        if !ok {
            return false;
        }
    }
    true
}

fn role_constraints_hold(
    store: &Store,
    bindings: &Bindings,
    clauses: &[Clause],
) -> bool {
    for c in clauses {
        let Some(&rel_id) = bindings.get(&c.var) else { continue };
        for (role, player_var) in &c.roles {
            let Some(&player_id) = bindings.get(player_var) else { continue };
            let Some(rel) = store.get(rel_id) else { return false };
            if !rel.players(role).any(|p| p == player_id) {
                return false;
            }
        }
    }
    true
}

/// Backtracking join over the clause variables. Variables are assigned in
/// sorted order and candidates enumerated in id order, so the result list
/// is deterministic.
fn solve(
    store: &Store,
    overlay: Option<&AttrOverlay>,
    clauses: &[Clause],
    seed: &Bindings,
    out: &mut Vec<Bindings>,
    stop_at_first: bool,
) {
    let mut vars: Vec<&str> = clause_vars(clauses)
        .into_iter()
        .filter(|v| !seed.contains_key(*v))
        .collect();
    vars.sort_unstable();

    fn rec(
        store: &Store,
        overlay: Option<&AttrOverlay>,
        clauses: &[Clause],
        vars: &[&str],
        bindings: &mut Bindings,
        out: &mut Vec<Bindings>,
        stop_at_first: bool,
    ) -> bool {
        let Some((var, rest)) = vars.split_first() else {
            if role_constraints_hold(store, bindings, clauses) {
                out.push(bindings.clone());
                return stop_at_first;
            }
            return false;
        };
        let var_clauses: Vec<&Clause> =
            clauses.iter().filter(|c| c.var == *var).collect();
        for inst in store.instances() {
            if !var_clauses
                .iter()
                .all(|c| satisfies_clause(store, overlay, c, inst.id))
            {
                continue;
            }
            bindings.insert(String::from(*var), inst.id);
            // Early role check against already-bound vars prunes the search.
            if role_constraints_hold(store, bindings, clauses)
                && rec(store, overlay, clauses, rest, bindings, out, stop_at_first)
            {
                bindings.remove(*var);
                return true;
            }
            bindings.remove(*var);
        }
        false
    }

    let mut bindings = seed.clone();
    // Seeded variables must still satisfy their own clauses.
    let seeded_ok = clauses
        .iter()
        .filter(|c| seed.contains_key(&c.var))
        .all(|c| satisfies_clause(store, overlay, c, seed[&c.var]));
    if seeded_ok {
        rec(store, overlay, clauses, &vars, &mut bindings, out, stop_at_first);
    }
}

/// Evaluates a pattern against the store, with rule-inferred facts
/// supplied through an optional attribute overlay. Returns all binding
/// sets over the positive variables, in deterministic order.
pub fn match_pattern(
    store: &Store,
    overlay: Option<&AttrOverlay>,
    pattern: &Pattern,
) -> Result<Vec<Bindings>, PatternError> {
    validate(pattern)?;
    let mut positive = Vec::new();
    solve(store, overlay, &pattern.clauses, &Bindings::new(), &mut positive, false);

    let mut result = Vec::new();
    'outer: for bindings in positive {
        for neg in &pattern.negations {
            // Seed every binding the negation references, whether as a
            // clause subject or as a role player.
            let referenced: BTreeSet<&str> = neg
                .clauses
                .iter()
                .flat_map(|c| {
                    core::iter::once(c.var.as_str())
                        .chain(c.roles.iter().map(|(_, p)| p.as_str()))
                })
                .collect();
            let shared: Bindings = bindings
                .iter()
                .filter(|(v, _)| referenced.contains(v.as_str()))
                .map(|(v, id)| (v.clone(), *id))
                .collect();
            let mut hits = Vec::new();
            solve(store, overlay, &neg.clauses, &shared, &mut hits, true);
            if !hits.is_empty() {
                continue 'outer;
            }
        }
        result.push(bindings);
    }
    result.dedup();
    Ok(result)
}

impl Store {
    /// Pattern match over stored facts only.
    pub fn match_pattern(&self, pattern: &Pattern) -> Result<Vec<Bindings>, PatternError> {
        match_pattern(self, None, pattern)
    }

    /// Pattern match over stored facts plus an overlay of inferred facts.
    pub fn match_with_overlay(
        &self,
        overlay: &AttrOverlay,
        pattern: &Pattern,
    ) -> Result<Vec<Bindings>, PatternError> {
        match_pattern(self, Some(overlay), pattern)
    }
}
