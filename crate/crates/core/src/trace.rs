//! Optional line-oriented simulation trace.
//!
//! Lines use the form `cycle,state,counter_i,counter_j,event`.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub cycle: u64,
    pub state: &'static str,
    pub counter_i: usize,
    pub counter_j: usize,
    pub event: String,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.cycle, self.state, self.counter_i, self.counter_j, self.event
        )
    }
}

pub const TRACE_HEADER: &str = "cycle,state,counter_i,counter_j,event";

/// Collects trace events when enabled; a disabled trace costs one branch.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    enabled: bool,
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn enabled() -> Self {
        Trace {
            enabled: true,
            events: Vec::new(),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn record<F>(&mut self, cycle: u64, state: &'static str, i: usize, j: usize, event: F)
    where
        F: FnOnce() -> String,
    {
        if self.enabled {
            self.events.push(TraceEvent {
                cycle,
                state,
                counter_i: i,
                counter_j: j,
                event: event(),
            });
        }
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn take(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.events)
    }

    pub fn render(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}
