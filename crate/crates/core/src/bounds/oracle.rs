//! Exact minimum makespan for tiny instances by depth-first branch and bound.
//!
//! Some optimal schedule starts every task at time zero or at a completion
//! time, and never gives a task more than `p_max` processors. The search
//! walks those event times; at each one it decides, task by task, whether a
//! ready task starts now (and on how many processors) or waits for a later
//! event.

use serde::{Deserialize, Serialize};

use super::lower::lower_bound;
use crate::engine::{simulate, tol, AllocationPolicy, Schedule, ScheduleEntry};
use crate::error::{Error, Result};
use crate::model::TaskGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_procs: usize,
    /// Search nodes before giving up on a proof of optimality.
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_tasks: 6,
            max_procs: 8,
            node_budget: 20_000_000,
        }
    }
}

/// Order in which start decisions are explored. Both are exhaustive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchOrder {
    /// Start before wait, larger allocations first.
    #[default]
    AreaDescending,
    /// Wait before start, smaller allocations first.
    AreaAscending,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub schedule: Schedule,
    /// False when the node budget ran out before the search finished.
    pub optimal: bool,
    pub nodes: u64,
}

impl OracleResult {
    pub fn makespan(&self) -> f64 {
        self.schedule.makespan
    }
}

pub fn brute_force_optimal(
    graph: &TaskGraph,
    procs: usize,
    limits: &OracleLimits,
) -> Result<OracleResult> {
    brute_force_optimal_with(graph, procs, limits, SearchOrder::default())
}

pub fn brute_force_optimal_with(
    graph: &TaskGraph,
    procs: usize,
    limits: &OracleLimits,
    order: SearchOrder,
) -> Result<OracleResult> {
    if graph.len() > limits.max_tasks {
        return Err(Error::OracleSize(format!(
            "{} tasks exceed the limit of {}",
            graph.len(),
            limits.max_tasks
        )));
    }
    if procs > limits.max_procs {
        return Err(Error::OracleSize(format!(
            "{procs} processors exceed the limit of {}",
            limits.max_procs
        )));
    }
    if procs == 0 {
        return Err(Error::Config(
            "platform needs at least one processor".into(),
        ));
    }

    let mut best: Option<Schedule> = None;
    for policy in [
        AllocationPolicy::Paper,
        AllocationPolicy::MinTime,
        AllocationPolicy::Sequential,
    ] {
        let s = simulate(graph, procs, &policy)?;
        if best.as_ref().is_none_or(|b| s.makespan < b.makespan) {
            best = Some(s);
        }
    }
    let best = best.expect("at least one policy");
    if graph.is_empty() {
        return Ok(OracleResult {
            schedule: best,
            optimal: true,
            nodes: 0,
        });
    }

    let n = graph.len();
    let mut p_max = Vec::with_capacity(n);
    let mut t_min = Vec::with_capacity(n);
    let mut a_min = Vec::with_capacity(n);
    let mut times = Vec::with_capacity(n);
    for task in graph.tasks() {
        let st = task.spec.extremal_stats(procs)?;
        p_max.push(st.p_max);
        t_min.push(st.t_min);
        a_min.push(st.a_min);
        times.push(
            (1..=st.p_max)
                .map(|p| task.spec.exec_time(p, procs))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut tail = vec![0.0f64; n];
    for &i in graph.topo_order().iter().rev() {
        tail[i] = graph
            .succs_of(i)
            .iter()
            .map(|&s| t_min[s] + tail[s])
            .fold(0.0, f64::max);
    }

    let mut search = Search {
        graph,
        procs,
        order,
        times,
        t_min,
        a_min,
        tail,
        starts: vec![None; n],
        done: vec![false; n],
        free: procs,
        best_makespan: best.makespan,
        best_starts: None,
        nodes: 0,
        budget: limits.node_budget,
        exhausted: false,
    };
    // Nothing can beat the lower bound; skip the search when the incumbent meets it.
    let lb = lower_bound(graph, procs)?.value;
    if search.best_makespan > lb + 1e-12 * lb.max(1.0) {
        search.event(0.0);
    }

    let schedule = match &search.best_starts {
        Some(starts) => {
            let entries = starts
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let (start, end, p) = s.expect("complete schedule");
                    (
                        graph.tasks()[i].id,
                        ScheduleEntry {
                            start,
                            end,
                            procs: p,
                        },
                    )
                })
                .collect();
            Schedule::from_entries(entries)
        }
        None => best,
    };
    Ok(OracleResult {
        schedule,
        optimal: !search.exhausted,
        nodes: search.nodes,
    })
}

struct Search<'g> {
    graph: &'g TaskGraph,
    procs: usize,
    order: SearchOrder,
    /// `times[i][p - 1]` for `p` in `[1, p_max]`.
    times: Vec<Vec<f64>>,
    t_min: Vec<f64>,
    a_min: Vec<f64>,
    /// Longest `t_min` path strictly after each task.
    tail: Vec<f64>,
    starts: Vec<Option<(f64, f64, usize)>>,
    done: Vec<bool>,
    free: usize,
    best_makespan: f64,
    best_starts: Option<Vec<Option<(f64, f64, usize)>>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn bound(&self, t: f64) -> f64 {
        let mut lb = t;
        let mut area = 0.0;
        for i in 0..self.starts.len() {
            match self.starts[i] {
                Some((_, end, p)) if !self.done[i] => {
                    lb = lb.max(end + self.tail[i]);
                    area += p as f64 * (end - t).max(0.0);
                }
                Some(_) => {}
                None => {
                    lb = lb.max(t + self.t_min[i] + self.tail[i]);
                    area += self.a_min[i];
                }
            }
        }
        lb.max(t + area / self.procs as f64)
    }

    fn pruned(&self, t: f64) -> bool {
        self.bound(t) >= self.best_makespan - 1e-12 * self.best_makespan.max(1.0)
    }

    fn event(&mut self, t: f64) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if self.pruned(t) {
            return;
        }
        let ready: Vec<usize> = (0..self.starts.len())
            .filter(|&i| {
                self.starts[i].is_none() && self.graph.preds_of(i).iter().all(|&p| self.done[p])
            })
            .collect();
        self.choose(t, &ready, 0);
    }

    fn choose(&mut self, t: f64, ready: &[usize], k: usize) {
        if self.exhausted {
            return;
        }
        if k == ready.len() {
            self.advance();
            return;
        }
        let i = ready[k];
        let top = self.times[i].len().min(self.free);
        let options: Vec<usize> = match self.order {
            SearchOrder::AreaDescending => (1..=top).rev().collect(),
            SearchOrder::AreaAscending => (1..=top).collect(),
        };
        if self.order == SearchOrder::AreaAscending {
            self.choose(t, ready, k + 1);
        }
        for p in options {
            let end = t + self.times[i][p - 1];
            self.starts[i] = Some((t, end, p));
            self.free -= p;
            if !self.pruned(t) {
                self.choose(t, ready, k + 1);
            }
            self.free += p;
            self.starts[i] = None;
        }
        if self.order == SearchOrder::AreaDescending {
            self.choose(t, ready, k + 1);
        }
    }

    fn advance(&mut self) {
        let running: Vec<usize> = (0..self.starts.len())
            .filter(|&i| self.starts[i].is_some() && !self.done[i])
            .collect();
        if running.is_empty() {
            if self.starts.iter().all(Option::is_some) {
                let makespan = self
                    .starts
                    .iter()
                    .map(|s| s.expect("started").1)
                    .fold(0.0, f64::max);
                if makespan < self.best_makespan {
                    self.best_makespan = makespan;
                    self.best_starts = Some(self.starts.clone());
                }
            }
            // Otherwise every ready task was delayed with nothing running: a dead end.
            return;
        }
        let end_of = |i: usize| self.starts[i].expect("running").1;
        let first = running
            .iter()
            .map(|&i| end_of(i))
            .fold(f64::INFINITY, f64::min);
        let horizon = first + tol(first);
        let finished: Vec<usize> = running
            .iter()
            .copied()
            .filter(|&i| end_of(i) <= horizon)
            .collect();
        let next = finished.iter().map(|&i| end_of(i)).fold(first, f64::max);
        for &i in &finished {
            self.done[i] = true;
            self.free += self.starts[i].expect("running").2;
        }
        self.event(next);
        for &i in &finished {
            self.done[i] = false;
            self.free -= self.starts[i].expect("running").2;
        }
    }
}
