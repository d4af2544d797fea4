use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{TaskGraph, TaskId};

/// Relative tolerance used when comparing event times.
pub const TIME_TOLERANCE: f64 = 1e-9;

pub(crate) fn tol(t: f64) -> f64 {
    TIME_TOLERANCE * t.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub start: f64,
    pub end: f64,
    pub procs: usize,
}

/// Non-preemptive schedule: one `(start, end, procs)` record per task.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub entries: BTreeMap<TaskId, ScheduleEntry>,
    pub makespan: f64,
}

#[derive(Serialize, Deserialize)]
struct WireEntry {
    id: TaskId,
    start: f64,
    end: f64,
    procs: usize,
}

#[derive(Serialize, Deserialize)]
struct WireSchedule {
    makespan: f64,
    entries: Vec<WireEntry>,
}

impl Serialize for Schedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WireSchedule {
            makespan: self.makespan,
            entries: self
                .entries
                .iter()
                .map(|(&id, e)| WireEntry {
                    id,
                    start: e.start,
                    end: e.end,
                    procs: e.procs,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = WireSchedule::deserialize(d)?;
        let mut entries = BTreeMap::new();
        for e in wire.entries {
            let entry = ScheduleEntry {
                start: e.start,
                end: e.end,
                procs: e.procs,
            };
            if entries.insert(e.id, entry).is_some() {
                return Err(serde::de::Error::custom(format!(
                    "duplicate schedule entry for task {}",
                    e.id
                )));
            }
        }
        Ok(Schedule {
            entries,
            makespan: wire.makespan,
        })
    }
}

impl Schedule {
    pub fn from_entries(entries: BTreeMap<TaskId, ScheduleEntry>) -> Self {
        let makespan = entries.values().map(|e| e.end).fold(0.0, f64::max);
        Self { entries, makespan }
    }

    pub fn get(&self, id: TaskId) -> Option<&ScheduleEntry> {
        self.entries.get(&id)
    }

    /// Peak number of processors in use at any instant.
    pub fn peak_usage(&self) -> usize {
        let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * self.entries.len());
        for e in self.entries.values() {
            if e.end > e.start {
                events.push((e.start, e.procs as i64));
                events.push((e.end, -(e.procs as i64)));
            }
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (mut cur, mut peak) = (0i64, 0i64);
        for (_, d) in events {
            cur += d;
            peak = peak.max(cur);
        }
        peak as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleViolation {
    MissingTask(TaskId),
    UnknownTask(TaskId),
    ProcsOutOfRange {
        task: TaskId,
        procs: usize,
    },
    /// `end - start` disagrees with the task's execution time.
    Duration {
        task: TaskId,
        expected: f64,
        actual: f64,
    },
    Precedence {
        pred: TaskId,
        succ: TaskId,
        pred_end: f64,
        succ_start: f64,
    },
    Capacity {
        time: f64,
        used: usize,
    },
    Makespan {
        recorded: f64,
        actual: f64,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::MissingTask(id) => write!(f, "task {id} is not scheduled"),
            ScheduleViolation::UnknownTask(id) => write!(f, "schedule mentions unknown task {id}"),
            ScheduleViolation::ProcsOutOfRange { task, procs } => {
                write!(f, "task {task} uses {procs} processors")
            }
            ScheduleViolation::Duration {
                task,
                expected,
                actual,
            } => {
                write!(f, "task {task} runs for {actual} instead of {expected}")
            }
            ScheduleViolation::Precedence {
                pred,
                succ,
                pred_end,
                succ_start,
            } => {
                write!(f, "task {succ} starts at {succ_start} before predecessor {pred} ends at {pred_end}")
            }
            ScheduleViolation::Capacity { time, used } => {
                write!(f, "{used} processors busy at t={time}")
            }
            ScheduleViolation::Makespan { recorded, actual } => {
                write!(
                    f,
                    "recorded makespan {recorded} differs from last completion {actual}"
                )
            }
        }
    }
}

/// Checks durations, precedences and the processor budget, returning every
/// violation found (empty means valid).
pub fn validate_schedule(
    graph: &TaskGraph,
    schedule: &Schedule,
    procs: usize,
) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    for task in graph.tasks() {
        let Some(e) = schedule.entries.get(&task.id) else {
            out.push(ScheduleViolation::MissingTask(task.id));
            continue;
        };
        if e.procs == 0 || e.procs > procs {
            out.push(ScheduleViolation::ProcsOutOfRange {
                task: task.id,
                procs: e.procs,
            });
            continue;
        }
        match task.spec.exec_time(e.procs, procs) {
            Ok(expected) => {
                let actual = e.end - e.start;
                if (actual - expected).abs() > tol(e.end) {
                    out.push(ScheduleViolation::Duration {
                        task: task.id,
                        expected,
                        actual,
                    });
                }
            }
            Err(_) => out.push(ScheduleViolation::ProcsOutOfRange {
                task: task.id,
                procs: e.procs,
            }),
        }
    }
    for &id in schedule.entries.keys() {
        if graph.index_of(id).is_none() {
            out.push(ScheduleViolation::UnknownTask(id));
        }
    }
    for &(a, b) in graph.edges() {
        if let (Some(ea), Some(eb)) = (schedule.entries.get(&a), schedule.entries.get(&b)) {
            if eb.start < ea.end - tol(ea.end) {
                out.push(ScheduleViolation::Precedence {
                    pred: a,
                    succ: b,
                    pred_end: ea.end,
                    succ_start: eb.start,
                });
            }
        }
    }

    // Sweep: an end within tolerance of a start releases its processors first.
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * schedule.entries.len());
    for e in schedule.entries.values() {
        if e.end > e.start {
            events.push((e.start, e.procs as i64));
            events.push((e.end - tol(e.end), -(e.procs as i64)));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut used = 0i64;
    let mut reported = false;
    for (t, d) in events {
        used += d;
        if used > procs as i64 && !reported {
            out.push(ScheduleViolation::Capacity {
                time: t,
                used: used as usize,
            });
            reported = true;
        } else if used <= procs as i64 {
            reported = false;
        }
    }

    let actual = schedule.entries.values().map(|e| e.end).fold(0.0, f64::max);
    if (actual - schedule.makespan).abs() > tol(actual) {
        out.push(ScheduleViolation::Makespan {
            recorded: schedule.makespan,
            actual,
        });
    }
    out
}
