use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::document::{MeasureKind, ModelDecl, ScenarioDocument, TargetKind};
use super::schema::CmpOp;

/// Closed-form element count of one generated action block: the base
/// pattern plus the per-adaptation overhead.
pub fn hypothetical_element_count(n_sa: u32, n_pa: u32) -> usize {
    10 + 6 * n_sa as usize + 3 * n_pa as usize
}

/// Generates a minimal hypothetical adaptation model.
///
/// Each action gets one function with one design over a single
/// process-descriptor component, one configuration with one parameter, one
/// quality attribute, and constraints plus priorities on every design and
/// configuration (10 elements). Each structural adaptation adds an
/// alternative design with its own component, configuration, parameter and
/// constraints (6 elements); each parameter adaptation adds an alternative
/// configuration with its parameter and constraint (3 elements).
pub fn generate_hypothetical(per_action: &[(u32, u32)]) -> ScenarioDocument {
    let mut model = Vec::new();
    let qa_threshold = 0.0;

    for (i, &(n_sa, n_pa)) in per_action.iter().enumerate() {
        let action = format!("action_{i}");
        let function = format!("function_{i}");
        let qa = format!("qa_{i}");
        model.push(ModelDecl::Action { name: action.clone() });
        model.push(ModelDecl::Function { name: function.clone(), always_improve: false });
        model.push(ModelDecl::Measure { name: qa.clone(), kind: MeasureKind::Quality });
        model.push(ModelDecl::FunctionalRequirement {
            action,
            functions: alloc::vec![function.clone()],
        });

        // The base design (index 0) plus one extra design per structural
        // adaptation, each backed by its own component and configuration.
        for d in 0..=n_sa {
            let component = format!("component_{i}_{d}");
            let design = format!("design_{i}_{d}");
            let config = format!("config_{i}_{d}");
            let param = format!("param_{i}_{d}");
            model.push(ModelDecl::Component {
                name: component.clone(),
                always_improve: false,
                package: Some(String::from("hypothetical")),
                executable: Some(component.clone()),
                lifecycle: Some(true),
            });
            model.push(ModelDecl::Parameter {
                label: param.clone(),
                key: String::from("mode"),
                value: format!("{d}"),
            });
            model.push(ModelDecl::FunctionDesign {
                name: design.clone(),
                function: function.clone(),
                components: alloc::vec![component.clone()],
                priority: d as i64 + 1,
            });
            model.push(ModelDecl::ComponentConfiguration {
                name: config.clone(),
                component,
                parameters: alloc::vec![param],
                priority: 1,
            });
            model.push(ModelDecl::Constraint {
                target_kind: TargetKind::Design,
                target: design,
                measure: qa.clone(),
                operator: CmpOp::Ge,
                value: qa_threshold,
            });
            model.push(ModelDecl::Constraint {
                target_kind: TargetKind::Config,
                target: config,
                measure: qa.clone(),
                operator: CmpOp::Ge,
                value: qa_threshold,
            });
        }

        // Parameter adaptations: alternative configurations of the base
        // component.
        for p in 0..n_pa {
            let config = format!("config_{i}_0_alt{p}");
            let param = format!("param_{i}_0_alt{p}");
            model.push(ModelDecl::Parameter {
                label: param.clone(),
                key: String::from("mode"),
                value: format!("alt{p}"),
            });
            model.push(ModelDecl::ComponentConfiguration {
                name: config.clone(),
                component: format!("component_{i}_0"),
                parameters: alloc::vec![param],
                priority: p as i64 + 2,
            });
            model.push(ModelDecl::Constraint {
                target_kind: TargetKind::Config,
                target: config,
                measure: qa.clone(),
                operator: CmpOp::Ge,
                value: qa_threshold,
            });
        }
    }

    ScenarioDocument { model, ..ScenarioDocument::default() }
}
