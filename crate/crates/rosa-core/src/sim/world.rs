use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bt::{BehaviorHost, TickResult};
use crate::kb::{Diagnostic, DiagnosticKind};
use crate::model::{types, PlantParams, ScenarioDocument, TimelineKind};

use super::process::ProcessTable;

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub name: String,
    pub from: String,
    pub to: String,
    pub cost: i64,
}

/// Typed plant parameters parsed from the scenario's plant section.
#[derive(Debug, Clone)]
pub struct PlantConfig {
    pub battery_start: f64,
    pub discharge_rate: f64,
    pub recharge_rate: f64,
    pub recharge_done: f64,
    pub measurement_period: i64,
    /// Measures reported periodically by the monitor.
    pub monitors: Vec<String>,
    /// Components whose running processes drain the battery.
    pub consumers: Vec<String>,
    /// The measure name the battery maps onto.
    pub battery_measure: String,
    /// Initial values of scripted measures.
    pub init: BTreeMap<String, f64>,
    pub search_process: Option<String>,
    pub search_target: f64,
    pub base_coverage_rate: f64,
    /// Coverage factor keyed by the search process's parameter value.
    pub coverage_param: String,
    pub coverage_factor: BTreeMap<String, f64>,
    pub inspect_process: Option<String>,
    pub inspect_rate: f64,
    pub inspect_target: f64,
    pub position_start: Option<String>,
    pub corridors: BTreeMap<String, Corridor>,
    pub start_failures: Vec<(String, i64)>,
    /// Optional seeded random-walk step for water visibility; soak-test
    /// mode only, never used by the bundled acceptance scenarios.
    pub visibility_walk: Option<(String, f64)>,
}

impl Default for PlantConfig {
    fn default() -> Self {
        PlantConfig {
            battery_start: 1.0,
            discharge_rate: 0.0,
            recharge_rate: 0.0,
            recharge_done: 1.0,
            measurement_period: 1,
            monitors: Vec::new(),
            consumers: Vec::new(),
            battery_measure: String::from("battery_level"),
            init: BTreeMap::new(),
            search_process: None,
            search_target: 1.0,
            base_coverage_rate: 0.0,
            coverage_param: String::from("altitude"),
            coverage_factor: BTreeMap::new(),
            inspect_process: None,
            inspect_rate: 0.0,
            inspect_target: 0.0,
            position_start: None,
            corridors: BTreeMap::new(),
            start_failures: Vec::new(),
            visibility_walk: None,
        }
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("plant parameter '{key}': bad number '{s}'"))
}

fn parse_i64(key: &str, s: &str) -> Result<i64, String> {
    s.parse::<i64>()
        .map_err(|_| format!("plant parameter '{key}': bad integer '{s}'"))
}

impl PlantConfig {
    pub fn parse(params: &PlantParams) -> Result<PlantConfig, String> {
        let mut c = PlantConfig::default();
        for (key, vals) in &params.lines {
            let one = || -> Result<&str, String> {
                match vals.as_slice() {
                    [v] => Ok(v.as_str()),
                    _ => Err(format!("plant parameter '{key}' expects one value")),
                }
            };
            match key.as_str() {
                "battery_start" => c.battery_start = parse_f64(key, one()?)?,
                "discharge_rate" => c.discharge_rate = parse_f64(key, one()?)?,
                "recharge_rate" => c.recharge_rate = parse_f64(key, one()?)?,
                "recharge_done" => c.recharge_done = parse_f64(key, one()?)?,
                "measurement_period" => {
                    c.measurement_period = parse_i64(key, one()?)?;
                    if c.measurement_period < 1 {
                        return Err(String::from("measurement_period must be >= 1"));
                    }
                }
                "monitors" => c.monitors = vals.clone(),
                "consumers" => c.consumers = vals.clone(),
                "battery_measure" => c.battery_measure = one()?.to_string(),
                "init" => match vals.as_slice() {
                    [name, value] => {
                        c.init.insert(name.clone(), parse_f64(key, value)?);
                    }
                    _ => return Err(String::from("init expects: init <measure> <value>")),
                },
                "search_process" => c.search_process = Some(one()?.to_string()),
                "search_target" => c.search_target = parse_f64(key, one()?)?,
                "base_coverage_rate" => c.base_coverage_rate = parse_f64(key, one()?)?,
                "coverage_param" => c.coverage_param = one()?.to_string(),
                "coverage_factor" => match vals.as_slice() {
                    [value, factor] => {
                        c.coverage_factor.insert(value.clone(), parse_f64(key, factor)?);
                    }
                    _ => {
                        return Err(String::from(
                            "coverage_factor expects: coverage_factor <param-value> <factor>",
                        ))
                    }
                },
                "inspect_process" => c.inspect_process = Some(one()?.to_string()),
                "inspect_rate" => c.inspect_rate = parse_f64(key, one()?)?,
                "inspect_target" => c.inspect_target = parse_f64(key, one()?)?,
                "position_start" => c.position_start = Some(one()?.to_string()),
                "corridor" => match vals.as_slice() {
                    [name, kw_from, from, kw_to, to, kw_cost, cost]
                        if kw_from == "from" && kw_to == "to" && kw_cost == "cost" =>
                    {
                        c.corridors.insert(
                            name.clone(),
                            Corridor {
                                name: name.clone(),
                                from: from.clone(),
                                to: to.clone(),
                                cost: parse_i64(key, cost)?,
                            },
                        );
                    }
                    _ => {
                        return Err(String::from(
                            "corridor expects: corridor <name> from <a> to <b> cost <n>",
                        ))
                    }
                },
                "start_failure" => match vals.as_slice() {
                    [component, tick] => {
                        c.start_failures.push((component.clone(), parse_i64(key, tick)?));
                    }
                    _ => {
                        return Err(String::from(
                            "start_failure expects: start_failure <component> <tick>",
                        ))
                    }
                },
                "visibility_walk" => match vals.as_slice() {
                    [measure, step] => {
                        c.visibility_walk = Some((measure.clone(), parse_f64(key, step)?));
                    }
                    _ => {
                        return Err(String::from(
                            "visibility_walk expects: visibility_walk <measure> <step>",
                        ))
                    }
                },
                other => return Err(format!("unknown plant parameter '{other}'")),
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Default)]
struct BehaviorMem {
    elapsed: i64,
    done: bool,
}

/// Per-tick behavior activity flags, consumed by the next plant step.
#[derive(Debug, Clone, Default)]
struct Flags {
    searching: bool,
    inspecting: bool,
    recharging: bool,
}

/// The managed world: plant state plus domain-behavior execution.
#[derive(Debug)]
pub struct World {
    pub config: PlantConfig,
    pub battery: f64,
    pub values: BTreeMap<String, f64>,
    pub pipeline_found: bool,
    pub found_at: Option<i64>,
    pub search_progress: f64,
    pub inspected_distance: f64,
    pub position: Option<String>,
    pub route: Vec<String>,
    /// Measure name -> diagnostic kind, resolved from the model.
    measure_kinds: BTreeMap<String, DiagnosticKind>,
    mem: BTreeMap<String, BehaviorMem>,
    flags: Flags,
    timeline: Vec<(i64, TimelineKind, Option<String>)>,
    next_event: usize,
    rng: u64,
}

/// One emitted diagnostic plus the uncertainty label when the injection
/// was a labeled timeline event.
pub type EmittedDiag = (Diagnostic, Option<String>);

impl World {
    pub fn new(
        doc: &ScenarioDocument,
        store: &crate::era::Store,
        seed: u64,
    ) -> Result<World, String> {
        let config = PlantConfig::parse(&doc.plant)?;

        let mut measure_kinds = BTreeMap::new();
        for inst in store.instances() {
            let kind = match inst.type_name.as_str() {
                t if t == types::ENVIRONMENTAL_ATTRIBUTE => DiagnosticKind::EaMeasurement,
                t if t == types::QUALITY_ATTRIBUTE || t == types::MEASURE => {
                    DiagnosticKind::QaMeasurement
                }
                _ => continue,
            };
            if let Some(name) = inst.latest(crate::model::attrs::NAME).and_then(|v| v.as_str()) {
                measure_kinds.insert(String::from(name), kind);
            }
        }
        for m in &config.monitors {
            if !measure_kinds.contains_key(m) {
                return Err(format!("monitored measure '{m}' not in model"));
            }
        }
        for comp in config
            .consumers
            .iter()
            .chain(config.search_process.iter())
            .chain(config.inspect_process.iter())
            .chain(config.start_failures.iter().map(|(c, _)| c))
        {
            if store
                .by_key(types::COMPONENT, &crate::era::Value::Str(comp.clone()))
                .is_none()
            {
                return Err(format!("plant references unknown component '{comp}'"));
            }
        }

        Ok(World {
            battery: clamp01(config.battery_start),
            values: config.init.clone(),
            pipeline_found: false,
            found_at: None,
            search_progress: 0.0,
            inspected_distance: 0.0,
            position: config.position_start.clone(),
            route: Vec::new(),
            measure_kinds,
            mem: BTreeMap::new(),
            flags: Flags::default(),
            timeline: doc
                .timeline
                .iter()
                .map(|e| (e.tick, e.kind.clone(), e.label.clone()))
                .collect(),
            next_event: 0,
            rng: seed ^ 0x9e37_79b9_7f4a_7c15,
            config,
        })
    }

    /// Checks a behavior name is one the world can run.
    pub fn validate_behavior(&self, name: &str) -> Result<(), String> {
        match name {
            "search" | "inspect" | "recharge" | "succeed" | "fail" => Ok(()),
            _ if name.starts_with("traverse_") => {
                let corridor = &name["traverse_".len()..];
                if self.config.corridors.contains_key(corridor) {
                    Ok(())
                } else {
                    Err(format!("behavior '{name}': unknown corridor '{corridor}'"))
                }
            }
            _ if name.starts_with("timed_") => name["timed_".len()..]
                .parse::<i64>()
                .ok()
                .filter(|d| *d >= 1)
                .map(|_| ())
                .ok_or_else(|| format!("behavior '{name}': bad duration")),
            _ => Err(format!("unknown behavior '{name}'")),
        }
    }

    fn next_rand_unit(&mut self) -> f64 {
        // splitmix64; soak-test visibility walk only.
        self.rng = self.rng.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.rng;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    fn measure_value(&self, name: &str) -> f64 {
        if name == self.config.battery_measure {
            self.battery
        } else {
            self.values.get(name).copied().unwrap_or(0.0)
        }
    }

    fn diag_for(&self, name: &str, value: f64, tick: i64) -> Diagnostic {
        Diagnostic {
            source: String::from("plant"),
            kind: self
                .measure_kinds
                .get(name)
                .copied()
                .unwrap_or(DiagnosticKind::QaMeasurement),
            key: String::from(name),
            value: format!("{value}"),
            tick,
        }
    }

    /// Advances the plant one tick and returns the diagnostics the
    /// monitors emit at this tick. Dynamics consume the previous tick's
    /// behavior flags and the current process states; then timeline events
    /// due now are injected; then periodic measurements are reported.
    pub fn step(&mut self, tick: i64, procs: &ProcessTable) -> Vec<EmittedDiag> {
        if tick > 0 {
            let draining = self.config.consumers.iter().any(|c| procs.is_running(c));
            if draining {
                self.battery -= self.config.discharge_rate;
            }
            if self.flags.recharging {
                self.battery += self.config.recharge_rate;
            }
            self.battery = clamp01(self.battery);

            if self.flags.searching && !self.pipeline_found {
                if let Some(sp) = &self.config.search_process {
                    if procs.is_running(sp) {
                        let factor = if self.config.coverage_factor.is_empty() {
                            1.0
                        } else {
                            procs
                                .param_of(sp, &self.config.coverage_param)
                                .and_then(|v| self.config.coverage_factor.get(v))
                                .copied()
                                .unwrap_or(0.0)
                        };
                        self.search_progress += self.config.base_coverage_rate * factor;
                        if self.search_progress >= self.config.search_target {
                            self.pipeline_found = true;
                            self.found_at = Some(tick);
                        }
                    }
                }
            }

            if self.flags.inspecting && self.pipeline_found {
                if let Some(ip) = &self.config.inspect_process {
                    if procs.is_running(ip) {
                        self.inspected_distance += self.config.inspect_rate;
                    }
                }
            }

            if let Some((measure, step)) = self.config.visibility_walk.clone() {
                let delta = (self.next_rand_unit() * 2.0 - 1.0) * step;
                let v = self.values.entry(measure).or_insert(0.0);
                *v = if *v + delta < 0.0 { 0.0 } else { *v + delta };
            }
        }

        let mut out = Vec::new();

        while self.next_event < self.timeline.len() && self.timeline[self.next_event].0 == tick {
            let (_, kind, label) = self.timeline[self.next_event].clone();
            self.next_event += 1;
            match kind {
                TimelineKind::Measure { name, value } => {
                    if name == self.config.battery_measure {
                        self.battery = clamp01(value);
                    }
                    self.values.insert(name.clone(), value);
                    out.push((self.diag_for(&name, self.measure_value(&name), tick), label));
                }
                TimelineKind::Fail { component } => {
                    out.push((
                        Diagnostic {
                            source: String::from("plant"),
                            kind: DiagnosticKind::ComponentStatus,
                            key: component,
                            value: String::from("failure"),
                            tick,
                        },
                        label,
                    ));
                }
                TimelineKind::Recover { component } => {
                    out.push((
                        Diagnostic {
                            source: String::from("plant"),
                            kind: DiagnosticKind::ComponentStatus,
                            key: component,
                            value: String::from("ok"),
                            tick,
                        },
                        label,
                    ));
                }
            }
        }

        if tick % self.config.measurement_period == 0 {
            for m in self.config.monitors.clone() {
                out.push((self.diag_for(&m, self.measure_value(&m), tick), None));
            }
        }

        out
    }

    /// Behavior flags are re-announced on every behavior tick.
    pub fn clear_flags(&mut self) {
        self.flags = Flags::default();
    }

    /// Plant state snapshot for the trace, sorted by key.
    pub fn snapshot(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = Vec::new();
        kv.push((String::from("battery"), format!("{}", self.battery)));
        for (name, v) in &self.values {
            if name != &self.config.battery_measure {
                kv.push((name.clone(), format!("{v}")));
            }
        }
        if self.config.search_process.is_some() {
            kv.push((String::from("search_progress"), format!("{}", self.search_progress)));
            kv.push((String::from("pipeline_found"), format!("{}", self.pipeline_found)));
        }
        if self.config.inspect_process.is_some() {
            kv.push((
                String::from("inspected_distance"),
                format!("{}", self.inspected_distance),
            ));
        }
        if let Some(p) = &self.position {
            kv.push((String::from("position"), p.clone()));
        }
        kv.sort();
        kv
    }

    fn tick_traverse(&mut self, corridor_name: &str, path: &str) -> TickResult {
        let Some(corridor) = self.config.corridors.get(corridor_name).cloned() else {
            return TickResult::Failure;
        };
        let key = format!("{path}#traverse_{corridor_name}");
        let mem = self.mem.entry(key).or_default();
        if mem.done {
            return TickResult::Success;
        }
        if self.position.as_deref() != Some(corridor.from.as_str()) {
            return TickResult::Failure;
        }
        mem.elapsed += 1;
        if mem.elapsed >= corridor.cost {
            mem.done = true;
            self.position = Some(corridor.to.clone());
            self.route.push(corridor.name.clone());
        }
        TickResult::Running
    }

    fn tick_timed(&mut self, duration: i64, path: &str, name: &str) -> TickResult {
        let key = format!("{path}#{name}");
        let mem = self.mem.entry(key).or_default();
        if mem.done {
            return TickResult::Success;
        }
        mem.elapsed += 1;
        if mem.elapsed >= duration {
            mem.done = true;
        }
        TickResult::Running
    }
}

impl BehaviorHost for World {
    fn tick_behavior(&mut self, behavior: &str, path: &str) -> TickResult {
        match behavior {
            "search" => {
                if self.pipeline_found {
                    TickResult::Success
                } else {
                    self.flags.searching = true;
                    TickResult::Running
                }
            }
            "inspect" => {
                if self.inspected_distance >= self.config.inspect_target {
                    TickResult::Success
                } else {
                    self.flags.inspecting = true;
                    TickResult::Running
                }
            }
            "recharge" => {
                if self.battery >= self.config.recharge_done {
                    TickResult::Success
                } else {
                    self.flags.recharging = true;
                    TickResult::Running
                }
            }
            "succeed" => TickResult::Success,
            "fail" => TickResult::Failure,
            _ if behavior.starts_with("traverse_") => {
                let corridor = String::from(&behavior["traverse_".len()..]);
                self.tick_traverse(&corridor, path)
            }
            _ if behavior.starts_with("timed_") => {
                match behavior["timed_".len()..].parse::<i64>() {
                    Ok(d) => self.tick_timed(d, path, behavior),
                    Err(_) => TickResult::Failure,
                }
            }
            _ => TickResult::Failure,
        }
    }

    fn halt_behavior(&mut self, behavior: &str, path: &str) {
        let key = format!("{path}#{behavior}");
        if behavior.starts_with("traverse_") || behavior.starts_with("timed_") {
            self.mem.remove(&key);
        }
        // Plant-backed behaviors carry no per-path state; their flags are
        // simply not re-announced next tick.
    }
}
