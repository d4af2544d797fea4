use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::policy::AllocationPolicy;
use super::schedule::{tol, Schedule, ScheduleEntry};
use crate::error::{Error, Result};
use crate::model::{SpeedupSpec, TaskGraph, TaskId};

/// Source of tasks for the event loop. Tasks are revealed at time zero and
/// whenever completions let new ones become available.
pub(crate) trait Workload {
    /// Upper bound on the number of tasks that will ever be revealed.
    fn capacity(&self) -> usize;
    fn initial(&mut self) -> Vec<TaskId>;
    fn spec(&self, id: TaskId) -> &SpeedupSpec;
    /// Reports a completion and returns the tasks it reveals.
    fn complete(&mut self, id: TaskId, time: f64) -> Vec<TaskId>;
}

struct GraphWorkload<'g> {
    graph: &'g TaskGraph,
    remaining: Vec<usize>,
}

impl Workload for GraphWorkload<'_> {
    fn capacity(&self) -> usize {
        self.graph.len()
    }

    fn initial(&mut self) -> Vec<TaskId> {
        (0..self.graph.len())
            .filter(|&i| self.remaining[i] == 0)
            .map(|i| self.graph.tasks()[i].id)
            .collect()
    }

    fn spec(&self, id: TaskId) -> &SpeedupSpec {
        &self.graph.task(id).expect("known task").spec
    }

    fn complete(&mut self, id: TaskId, _time: f64) -> Vec<TaskId> {
        let i = self.graph.index_of(id).expect("known task");
        let mut out = Vec::new();
        for &s in self.graph.succs_of(i) {
            self.remaining[s] -= 1;
            if self.remaining[s] == 0 {
                out.push(self.graph.tasks()[s].id);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Running {
    end: f64,
    id: TaskId,
    procs: usize,
}

impl PartialEq for Running {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Running {}

impl PartialOrd for Running {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Running {
    // Reversed so the max-heap pops the earliest end (then smallest id).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .end
            .total_cmp(&self.end)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Online list scheduling of `graph` on `procs` processors.
///
/// At time zero and after every batch of completions the newly available
/// tasks get their allocation and join the FIFO queue in ascending id order;
/// then the whole queue is scanned and every task that fits starts at once.
/// A task that does not fit does not block later ones.
pub fn simulate(graph: &TaskGraph, procs: usize, policy: &AllocationPolicy) -> Result<Schedule> {
    let mut remaining = vec![0usize; graph.len()];
    for (i, r) in remaining.iter_mut().enumerate() {
        *r = graph.preds_of(i).len();
    }
    let mut workload = GraphWorkload { graph, remaining };
    let schedule = run(&mut workload, procs, policy)?;
    if schedule.entries.len() != graph.len() {
        return Err(Error::InvalidGraph("not every task was scheduled".into()));
    }
    Ok(schedule)
}

pub(crate) fn run<W: Workload>(
    workload: &mut W,
    procs: usize,
    policy: &AllocationPolicy,
) -> Result<Schedule> {
    if procs == 0 {
        return Err(Error::Config(
            "platform needs at least one processor".into(),
        ));
    }
    let mut entries: BTreeMap<TaskId, ScheduleEntry> = BTreeMap::new();
    let mut queue: Vec<(TaskId, usize)> = Vec::new();
    let mut running: BinaryHeap<Running> = BinaryHeap::new();
    let mut free = procs;
    let mut time = 0.0f64;
    let mut pending = workload.initial();
    let round_cap = workload.capacity() + 1;

    loop {
        // Reveal, allocate and scan until no zero-length task completes.
        let mut rounds = 0;
        loop {
            if !pending.is_empty() {
                pending.sort_unstable();
                let batch: Vec<(TaskId, &SpeedupSpec)> =
                    pending.iter().map(|&id| (id, workload.spec(id))).collect();
                let alloc = policy.allocate_batch(&batch, free, procs)?;
                for (&id, p) in pending.iter().zip(alloc) {
                    if p == 0 || p > procs {
                        return Err(Error::PolicyOutOfRange {
                            task: id,
                            procs: p,
                            platform: procs,
                        });
                    }
                    queue.push((id, p));
                }
                pending.clear();
            }

            let mut instant = Vec::new();
            let mut waiting = Vec::with_capacity(queue.len());
            for (id, p) in queue.drain(..) {
                if p > free {
                    waiting.push((id, p));
                    continue;
                }
                let dur = workload.spec(id).exec_time(p, procs)?;
                entries.insert(
                    id,
                    ScheduleEntry {
                        start: time,
                        end: time + dur,
                        procs: p,
                    },
                );
                if dur > 0.0 {
                    free -= p;
                    running.push(Running {
                        end: time + dur,
                        id,
                        procs: p,
                    });
                } else {
                    instant.push(id);
                }
            }
            queue = waiting;
            if instant.is_empty() {
                break;
            }
            rounds += 1;
            if rounds > round_cap {
                return Err(Error::Config(
                    "zero-duration reveal loop did not settle".into(),
                ));
            }
            instant.sort_unstable();
            for id in instant {
                pending.extend(workload.complete(id, time));
            }
        }

        let Some(first) = running.pop() else { break };
        let horizon = first.end + tol(first.end);
        let mut done = vec![first];
        while running.peek().is_some_and(|r| r.end <= horizon) {
            done.push(running.pop().expect("peeked"));
        }
        time = done.iter().map(|r| r.end).fold(time, f64::max);
        done.sort_unstable_by_key(|r| r.id);
        for r in &done {
            free += r.procs;
        }
        for r in &done {
            pending.extend(workload.complete(r.id, time));
        }
    }

    if !queue.is_empty() {
        return Err(Error::Config(format!(
            "{} tasks never fit on the platform",
            queue.len()
        )));
    }
    Ok(Schedule::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Task;

    #[test]
    fn single_roofline_task() {
        let g = TaskGraph::new(
            vec![Task::new(1, SpeedupSpec::roofline(10.0, 4).unwrap())],
            vec![],
        )
        .unwrap();
        let s = simulate(&g, 10, &AllocationPolicy::Paper).unwrap();
        assert_eq!(s.makespan, 2.5);
        assert_eq!(s.entries[&1].procs, 4);
    }

    #[test]
    fn capacity_forces_serialization() {
        let spec = SpeedupSpec::roofline(8.0, 4).unwrap();
        let g =
            TaskGraph::new(vec![Task::new(1, spec.clone()), Task::new(2, spec)], vec![]).unwrap();
        let s = simulate(&g, 4, &AllocationPolicy::Fixed(4)).unwrap();
        assert_eq!(s.makespan, 4.0);
        assert_eq!(s.entries[&1].start, 0.0);
        assert_eq!(s.entries[&2].start, 2.0);
    }

    #[test]
    fn skipped_task_does_not_block() {
        // Task 1 holds 3 of 4 processors; 2 needs 2 and must wait, 3 needs 1 and starts.
        let tasks = vec![
            Task::new(1, SpeedupSpec::roofline(3.0, 3).unwrap()),
            Task::new(2, SpeedupSpec::roofline(2.0, 2).unwrap()),
            Task::new(3, SpeedupSpec::roofline(1.0, 1).unwrap()),
        ];
        let g = TaskGraph::new(tasks, vec![]).unwrap();
        let s = simulate(&g, 4, &AllocationPolicy::MinTime).unwrap();
        assert_eq!(s.entries[&2].start, 1.0);
        assert_eq!(s.entries[&3].start, 0.0);
    }

    #[test]
    fn zero_duration_tasks_cascade() {
        let z = SpeedupSpec::amdahl(0.0, 0.0).unwrap();
        let tasks = vec![
            Task::new(1, z.clone()),
            Task::new(2, z),
            Task::new(3, SpeedupSpec::amdahl(0.0, 1.0).unwrap()),
        ];
        let g = TaskGraph::new(tasks, vec![(1, 2), (2, 3)]).unwrap();
        let s = simulate(&g, 2, &AllocationPolicy::Paper).unwrap();
        assert_eq!(s.entries[&3].start, 0.0);
        assert_eq!(s.makespan, 1.0);
    }

    #[test]
    fn empty_graph() {
        let s = simulate(&TaskGraph::empty(), 3, &AllocationPolicy::Paper).unwrap();
        assert_eq!(s.makespan, 0.0);
        assert!(s.entries.is_empty());
    }

    #[test]
    fn bad_policy_is_configuration_error() {
        let g = TaskGraph::new(
            vec![Task::new(1, SpeedupSpec::amdahl(1.0, 1.0).unwrap())],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            simulate(&g, 2, &AllocationPolicy::Fixed(3)),
            Err(Error::PolicyOutOfRange { .. })
        ));
        assert!(simulate(&g, 0, &AllocationPolicy::Paper).is_err());
    }
}
