//! Command implementations shared by the binary and the test suites.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use rosa_core::kb::{Diagnostic, DiagnosticKind, KnowledgeBase, ServiceRequest, ServiceResponse};
use rosa_core::model::{count_elements, generate_hypothetical, types, ElementCounts};
use rosa_core::sim::{run_scenario, MissionResult};
use rosa_core::trace::{render_metrics, render_trace};

use crate::format::{emit, load_scenario};

/// Exit codes: 0 success, 1 validation error, 2 mission failure or
/// timeout, 3 internal error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_MISSION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub struct ValidateReport {
    pub counts: ElementCounts,
}

/// Loads and fully validates a scenario file, reporting element counts.
/// Validation acceptance matches what `run` would accept: the simulation
/// setup (plant parameters, mission behaviors) is checked too.
pub fn cmd_validate(path: &Path) -> Result<ValidateReport> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let (doc, store) =
        load_scenario(&text).map_err(|e| anyhow!("{}: {}", path.display(), e.describe()))?;
    // Dry-run the simulation setup so `validate` accepts exactly the files
    // `run` accepts.
    run_scenario(&doc, 1, 0).map_err(|e| anyhow!("{}: {}", path.display(), e))?;
    Ok(ValidateReport { counts: count_elements(&store) })
}

pub struct RunConfig<'a> {
    pub scenario: &'a Path,
    pub max_ticks: i64,
    pub seed: u64,
    pub trace_out: Option<&'a Path>,
    pub metrics_out: Option<&'a Path>,
    pub quiet: bool,
}

pub struct RunReport {
    pub result: MissionResult,
    pub metrics_text: String,
    pub trace_text: String,
}

pub fn cmd_run(config: &RunConfig<'_>) -> Result<RunReport> {
    if config.max_ticks < 1 {
        return Err(anyhow!("--ticks must be at least 1"));
    }
    let text = fs::read_to_string(config.scenario)
        .with_context(|| format!("cannot read {}", config.scenario.display()))?;
    let (doc, _) = load_scenario(&text)
        .map_err(|e| anyhow!("{}: {}", config.scenario.display(), e.describe()))?;
    let out = run_scenario(&doc, config.max_ticks, config.seed)
        .map_err(|e| anyhow!("{}: {}", config.scenario.display(), e))?;

    let trace_text = render_trace(&out.trace);
    let metrics_text = render_metrics(&out.metrics);
    if let Some(p) = config.trace_out {
        fs::write(p, &trace_text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = config.metrics_out {
        fs::write(p, &metrics_text)
            .with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(RunReport { result: out.result, metrics_text, trace_text })
}

/// Loads a model, applies measurement overrides, and prints a derived set.
pub fn cmd_query(
    path: &Path,
    query: &str,
    owner: Option<&str>,
    overrides: &[(String, f64)],
) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let (_, store) =
        load_scenario(&text).map_err(|e| anyhow!("{}: {}", path.display(), e.describe()))?;
    let mut kb = KnowledgeBase::new(store);

    for (measure, value) in overrides {
        let kind = measure_kind(&kb, measure)
            .ok_or_else(|| anyhow!("unknown measure '{measure}'"))?;
        kb.ingest_diagnostic(&Diagnostic {
            source: "query".into(),
            kind,
            key: measure.clone(),
            value: format!("{value}"),
            tick: 0,
        })
        .map_err(|e| anyhow!("{e}"))?;
    }

    let need_owner =
        || owner.map(String::from).ok_or_else(|| anyhow!("query '{query}' needs a name"));
    let resp = match query {
        "selectable-actions" => kb.service(ServiceRequest::ActionSelectable),
        "adaptable-functions" => kb.service(ServiceRequest::FunctionAdaptable),
        "adaptable-components" => kb.service(ServiceRequest::ComponentAdaptable),
        "selectable-designs" => {
            kb.service(ServiceRequest::FunctionDesignsSelectable { function: need_owner()? })
        }
        "selectable-configs" => kb.service(ServiceRequest::ComponentConfigurationSelectable {
            component: need_owner()?,
        }),
        other => return Err(anyhow!("unknown query '{other}'")),
    }
    .map_err(|e| anyhow!("{e}"))?;

    Ok(match resp {
        ServiceResponse::Names(n) => n,
        ServiceResponse::Selectable(s) => s.candidates.into_iter().map(|c| c.name).collect(),
        _ => Vec::new(),
    })
}

fn measure_kind(kb: &KnowledgeBase, name: &str) -> Option<DiagnosticKind> {
    let v = rosa_core::era::Value::Str(name.into());
    if kb.store().by_key(types::QUALITY_ATTRIBUTE, &v).is_some()
        || kb.store().by_key(types::MEASURE, &v).is_some()
    {
        Some(DiagnosticKind::QaMeasurement)
    } else if kb.store().by_key(types::ENVIRONMENTAL_ATTRIBUTE, &v).is_some() {
        Some(DiagnosticKind::EaMeasurement)
    } else {
        None
    }
}

pub struct GenerateReport {
    pub predicted: usize,
    pub counted: usize,
}

/// Generates a hypothetical minimal-adaptation scenario and cross-checks
/// the counted elements against the growth formula.
pub fn cmd_generate(
    n_actions: u32,
    n_sa: u32,
    n_pa: u32,
    out: &Path,
) -> Result<GenerateReport> {
    if n_actions < 1 {
        return Err(anyhow!("--actions must be at least 1"));
    }
    let per_action: Vec<(u32, u32)> = (0..n_actions).map(|_| (n_sa, n_pa)).collect();
    let doc = generate_hypothetical(&per_action);
    let text = emit(&doc);
    fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;

    let (_, store) = load_scenario(&text)
        .map_err(|e| anyhow!("generated scenario failed to reload: {}", e.describe()))?;
    let predicted = n_actions as usize
        * rosa_core::model::hypothetical_element_count(n_sa, n_pa);
    Ok(GenerateReport { predicted, counted: count_elements(&store).total() })
}
