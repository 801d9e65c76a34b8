use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::mapek::{ProcessControl, StartRefused};

#[derive(Debug, Clone, PartialEq)]
pub enum ProcAudit {
    Start { component: String, pid: i64 },
    Stop { component: String },
    Params { component: String, params: Vec<(String, String)> },
}

#[derive(Debug, Clone, Default)]
struct SimProcess {
    pid: Option<i64>,
    params: BTreeMap<String, String>,
}

impl SimProcess {
    fn running(&self) -> bool {
        self.pid.is_some()
    }
}

/// The managed subsystem's process table: one simulated process per model
/// component. Pids are assigned monotonically; scripted start-failure
/// ticks make a component refuse to start, which the executor reports as
/// a component failure.
#[derive(Debug, Clone, Default)]
pub struct ProcessTable {
    procs: BTreeMap<String, SimProcess>,
    start_failures: BTreeMap<String, BTreeSet<i64>>,
    next_pid: i64,
    tick: i64,
    audit: Vec<ProcAudit>,
}

impl ProcessTable {
    pub fn new<I: IntoIterator<Item = String>>(components: I) -> Self {
        ProcessTable {
            procs: components
                .into_iter()
                .map(|c| (c, SimProcess::default()))
                .collect(),
            start_failures: BTreeMap::new(),
            next_pid: 1000,
            tick: 0,
            audit: Vec::new(),
        }
    }

    pub fn script_start_failure(&mut self, component: &str, tick: i64) {
        self.start_failures
            .entry(String::from(component))
            .or_default()
            .insert(tick);
    }

    pub fn set_tick(&mut self, tick: i64) {
        self.tick = tick;
    }

    pub fn is_running(&self, component: &str) -> bool {
        self.procs.get(component).map(|p| p.running()).unwrap_or(false)
    }

    pub fn pid_of(&self, component: &str) -> Option<i64> {
        self.procs.get(component).and_then(|p| p.pid)
    }

    pub fn param_of(&self, component: &str, key: &str) -> Option<&str> {
        self.procs
            .get(component)
            .and_then(|p| p.params.get(key))
            .map(String::as_str)
    }

    pub fn running_components(&self) -> impl Iterator<Item = &str> {
        self.procs.iter().filter(|(_, p)| p.running()).map(|(c, _)| c.as_str())
    }

    pub fn take_audit(&mut self) -> Vec<ProcAudit> {
        core::mem::take(&mut self.audit)
    }
}

impl ProcessControl for ProcessTable {
    fn start(
        &mut self,
        component: &str,
        params: &[(String, String)],
    ) -> Result<i64, StartRefused> {
        if self
            .start_failures
            .get(component)
            .map(|ticks| ticks.contains(&self.tick))
            .unwrap_or(false)
        {
            return Err(StartRefused { component: String::from(component) });
        }
        let Some(proc) = self.procs.get_mut(component) else {
            return Err(StartRefused { component: String::from(component) });
        };
        if let Some(pid) = proc.pid {
            return Ok(pid);
        }
        let pid = self.next_pid;
        self.next_pid += 1;
        proc.pid = Some(pid);
        proc.params = params.iter().cloned().collect();
        self.audit.push(ProcAudit::Start { component: String::from(component), pid });
        Ok(pid)
    }

    fn stop(&mut self, component: &str) {
        if let Some(proc) = self.procs.get_mut(component) {
            if proc.pid.take().is_some() {
                proc.params.clear();
                self.audit.push(ProcAudit::Stop { component: String::from(component) });
            }
        }
    }

    fn set_params(&mut self, component: &str, params: &[(String, String)]) {
        if let Some(proc) = self.procs.get_mut(component) {
            if proc.running() {
                proc.params = params.iter().cloned().collect();
                self.audit.push(ProcAudit::Params {
                    component: String::from(component),
                    params: params.to_vec(),
                });
            }
        }
    }
}
