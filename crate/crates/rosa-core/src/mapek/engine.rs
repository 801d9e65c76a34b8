use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::kb::{Event, EventKind, KbError, KnowledgeBase};

use super::executor::{Executor, ProcessControl};
use super::planner::Planner;

/// One line of the event log: tick, kind and the store epoch at which the
/// event was published.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventLogEntry {
    pub tick: i64,
    pub kind: EventKind,
    pub epoch: u64,
}

/// Deterministic event scheduler: events are processed in FIFO order, one
/// at a time, to completion. Each processed event may publish follow-up
/// events, which queue behind the ones already waiting.
#[derive(Debug, Default)]
pub struct Engine {
    queue: VecDeque<Event>,
    log: Vec<EventLogEntry>,
    /// When set, the planner and executor are rebuilt before every event.
    /// Behavior must not change: all their state lives in the KB.
    pub rebuild_components_each_event: bool,
    planner: Planner,
    executor: Executor,
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn log(&self) -> &[EventLogEntry] {
        &self.log
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Pulls freshly published events from the KB into the queue.
    pub fn collect(&mut self, kb: &mut KnowledgeBase) {
        self.queue.extend(kb.take_events());
    }

    /// Processes queued events until quiescence. Returns the number of
    /// engine cycles (events processed).
    pub fn drain(
        &mut self,
        kb: &mut KnowledgeBase,
        procs: &mut dyn ProcessControl,
        tick: i64,
    ) -> Result<u64, KbError> {
        self.collect(kb);
        let mut cycles = 0;
        while let Some(event) = self.queue.pop_front() {
            cycles += 1;
            self.log.push(EventLogEntry {
                tick: event.tick,
                kind: event.kind,
                epoch: event.epoch,
            });
            if self.rebuild_components_each_event {
                self.planner = Planner::new();
                self.executor = Executor::new();
            }
            match event.kind {
                EventKind::MonitoringData | EventKind::ActionUpdate => {
                    self.planner.on_event(kb, tick)?;
                }
                EventKind::ReconfigurationPlan => {
                    self.executor.on_event(kb, procs, tick)?;
                }
            }
            self.collect(kb);
        }
        Ok(cycles)
    }
}
