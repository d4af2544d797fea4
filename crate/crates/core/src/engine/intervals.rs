use serde::{Deserialize, Serialize};

use super::schedule::Schedule;
use crate::model::{TaskGraph, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalClass {
    /// Utilization below `ceil((1 - mu) P)`.
    I0,
    /// Utilization at or above `ceil((1 - mu) P)`.
    I3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub start: f64,
    pub end: f64,
    pub utilization: usize,
    pub class: IntervalClass,
}

impl IntervalRecord {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub i0_time: f64,
    pub i3_time: f64,
    pub i0_count: usize,
    pub i3_count: usize,
}

impl IntervalSummary {
    pub fn of(records: &[IntervalRecord]) -> Self {
        let mut s = Self::default();
        for r in records {
            match r.class {
                IntervalClass::I0 => {
                    s.i0_time += r.duration();
                    s.i0_count += 1;
                }
                IntervalClass::I3 => {
                    s.i3_time += r.duration();
                    s.i3_count += 1;
                }
            }
        }
        s
    }
}

/// Utilization threshold separating the two interval classes.
pub fn high_utilization_threshold(procs: usize, mu: f64) -> usize {
    ((1.0 - mu) * procs as f64).ceil() as usize
}

/// Cuts `[0, makespan)` at every distinct start and end time and classifies
/// each piece by its constant utilization.
pub fn interval_profile(schedule: &Schedule, procs: usize, mu: f64) -> Vec<IntervalRecord> {
    let threshold = high_utilization_threshold(procs, mu);
    let mut cuts: Vec<f64> = vec![0.0, schedule.makespan];
    let mut deltas: Vec<(f64, i64)> = Vec::new();
    for e in schedule.entries.values() {
        cuts.push(e.start);
        cuts.push(e.end);
        if e.end > e.start {
            deltas.push((e.start, e.procs as i64));
            deltas.push((e.end, -(e.procs as i64)));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    deltas.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = Vec::with_capacity(cuts.len());
    let mut used = 0i64;
    let mut k = 0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        while k < deltas.len() && deltas[k].0 <= a {
            used += deltas[k].1;
            k += 1;
        }
        if b <= a || a >= schedule.makespan {
            continue;
        }
        let utilization = used.max(0) as usize;
        let class = if utilization >= threshold {
            IntervalClass::I3
        } else {
            IntervalClass::I0
        };
        out.push(IntervalRecord {
            start: a,
            end: b,
            utilization,
            class,
        });
    }
    out
}

/// Dependency path ending at a last-finishing task, built backwards by
/// always stepping to the predecessor that ends latest.
pub fn blocking_chain(graph: &TaskGraph, schedule: &Schedule) -> Vec<TaskId> {
    let end_of = |i: usize| schedule.get(graph.tasks()[i].id).map(|e| e.end);
    let latest = |cands: &mut dyn Iterator<Item = usize>| {
        let mut best: Option<(usize, f64)> = None;
        for i in cands {
            let Some(e) = end_of(i) else { continue };
            // Ties go to the smaller id.
            let better = match best {
                None => true,
                Some((j, be)) => e > be || (e == be && graph.tasks()[i].id < graph.tasks()[j].id),
            };
            if better {
                best = Some((i, e));
            }
        }
        best.map(|(i, _)| i)
    };
    let Some(mut cur) = latest(&mut (0..graph.len())) else {
        return Vec::new();
    };
    let mut chain = vec![graph.tasks()[cur].id];
    while let Some(prev) = latest(&mut graph.preds_of(cur).iter().copied()) {
        chain.push(graph.tasks()[prev].id);
        cur = prev;
    }
    chain.reverse();
    chain
}
