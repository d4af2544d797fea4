//! Independent chains of identical tasks with `t(p) = 1 / (lg p + 1)`, and
//! the adaptive adversary that decides chain lengths online.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::simulate::{run, Workload};
use crate::engine::{AllocationPolicy, Locality, Schedule, ScheduleEntry};
use crate::error::{Error, Result};
use crate::model::{SpeedupSpec, Task, TaskGraph, TaskId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainInfo {
    /// Group index `i`: the chain has `i` tasks.
    pub group: usize,
    pub tasks: Vec<TaskId>,
}

#[derive(Debug, Clone)]
pub struct ChainsInstance {
    pub ell: u32,
    /// Number of groups and length of the longest chain, `2^ell`.
    pub k: usize,
    pub procs: usize,
    pub graph: TaskGraph,
    /// Chains in id order: all of group 1, then group 2, and so on.
    pub chains: Vec<ChainInfo>,
}

impl ChainsInstance {
    /// Chains in group `i`: `2^(K - i)`.
    pub fn group_size(&self, i: usize) -> usize {
        1 << (self.k - i)
    }

    pub fn spec(&self) -> &SpeedupSpec {
        &self.graph.tasks()[0].spec
    }
}

/// `t(p) = 1 / (lg p + 1)` for `p` in `[1, procs]`.
pub fn log_speedup_table(procs: usize) -> Vec<f64> {
    (1..=procs)
        .map(|p| 1.0 / ((p as f64).log2() + 1.0))
        .collect()
}

pub fn gen_chains_instance(ell: u32) -> Result<ChainsInstance> {
    if ell < 2 {
        return Err(Error::Domain(format!(
            "chain instances need ell >= 2, got {ell}"
        )));
    }
    if ell > 5 {
        return Err(Error::Domain(format!(
            "ell = {ell} is far too large to build"
        )));
    }
    let k = 1usize << ell;
    let procs = k << (k - 1);
    let spec = SpeedupSpec::tabulated(log_speedup_table(procs))?;
    let mut tasks = Vec::with_capacity((1 << k) - 1);
    let mut edges = Vec::new();
    let mut chains = Vec::with_capacity((1 << k) - 1);
    let mut next: TaskId = 1;
    for group in 1..=k {
        for _ in 0..1usize << (k - group) {
            let ids: Vec<TaskId> = (next..next + group as TaskId).collect();
            next += group as TaskId;
            for &id in &ids {
                tasks.push(Task::new(id, spec.clone()));
            }
            edges.extend(ids.windows(2).map(|w| (w[0], w[1])));
            chains.push(ChainInfo { group, tasks: ids });
        }
    }
    let graph = TaskGraph::new(tasks, edges)?;
    Ok(ChainsInstance {
        ell,
        k,
        procs,
        graph,
        chains,
    })
}

/// Offline schedule: every chain of group `i` runs back to back on
/// `2^(i-1)` processors, all chains from time zero.
pub fn reference_chain_schedule(inst: &ChainsInstance) -> Result<Schedule> {
    let mut entries = BTreeMap::new();
    for chain in &inst.chains {
        let p = 1usize << (chain.group - 1);
        let dur = inst.spec().exec_time(p, inst.procs)?;
        let mut t = 0.0;
        for &id in &chain.tasks {
            entries.insert(
                id,
                ScheduleEntry {
                    start: t,
                    end: t + dur,
                    procs: p,
                },
            );
            t += dur;
        }
    }
    Ok(Schedule::from_entries(entries))
}

/// Completion times of the adversary's phases: `t[i]` is when a chain that
/// survives past `i` tasks finishes its `i`-th one; `t[K]` is the makespan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGap {
    pub phase: usize,
    pub gap: f64,
    /// `1 / (ell + i)`.
    pub bound: f64,
    pub holds: bool,
}

impl PhaseTrace {
    pub fn makespan(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    /// Checks `t_i - t_{i-1} >= 1 / (ell + i) - slack` for every phase.
    pub fn gaps(&self, ell: u32, slack: f64) -> Vec<PhaseGap> {
        (1..self.t.len())
            .map(|i| {
                let gap = self.t[i] - self.t[i - 1];
                let bound = 1.0 / (ell as f64 + i as f64);
                PhaseGap {
                    phase: i,
                    gap,
                    bound,
                    holds: gap >= bound - slack,
                }
            })
            .collect()
    }
}

/// `ln K - ln ell - 1/ell`: the makespan floor any local policy meets.
pub fn adversary_makespan_floor(ell: u32) -> f64 {
    let k = (1u64 << ell) as f64;
    k.ln() - (ell as f64).ln() - 1.0 / ell as f64
}

struct Adversary<'a> {
    spec: &'a SpeedupSpec,
    k: usize,
    chains: usize,
    /// Terminations still owed per length, index `i` for length `i`.
    quota: Vec<usize>,
    /// Final length per virtual chain, once known.
    length: Vec<usize>,
    t: Vec<Option<f64>>,
}

impl Adversary<'_> {
    fn id(&self, chain: usize, task: usize) -> TaskId {
        (chain * self.k + task - 1) as TaskId
    }

    fn split(&self, id: TaskId) -> (usize, usize) {
        let id = id as usize;
        (id / self.k, id % self.k + 1)
    }
}

impl Workload for Adversary<'_> {
    fn capacity(&self) -> usize {
        self.chains * self.k
    }

    fn initial(&mut self) -> Vec<TaskId> {
        (0..self.chains).map(|c| self.id(c, 1)).collect()
    }

    fn spec(&self, _id: TaskId) -> &SpeedupSpec {
        self.spec
    }

    fn complete(&mut self, id: TaskId, time: f64) -> Vec<TaskId> {
        let (chain, done) = self.split(id);
        if done == self.k {
            self.length[chain] = done;
            self.t[done].get_or_insert(time);
            return Vec::new();
        }
        if self.quota[done] > 0 {
            self.quota[done] -= 1;
            self.length[chain] = done;
            return Vec::new();
        }
        self.t[done].get_or_insert(time);
        vec![self.id(chain, done + 1)]
    }
}

/// Runs the engine against the adaptive adversary: every chain looks the
/// same until it finishes a task, and the first `2^(K-i)` chains to finish
/// `i` tasks are told they are done. Simultaneous completions are handled in
/// ascending chain order. The returned schedule is expressed on the
/// instance's own task ids.
pub fn chains_adversary_simulate(
    inst: &ChainsInstance,
    policy: &AllocationPolicy,
) -> Result<(Schedule, PhaseTrace)> {
    if policy.locality() == Locality::TaskSpecific {
        return Err(Error::PolicyRefused(format!(
            "policy `{}` can tell identical tasks apart, which defeats the adversary",
            policy.name()
        )));
    }
    let k = inst.k;
    let mut adv = Adversary {
        spec: inst.spec(),
        k,
        chains: inst.chains.len(),
        quota: (0..=k)
            .map(|i| if i == 0 { 0 } else { 1usize << (k - i) })
            .collect(),
        length: vec![0; inst.chains.len()],
        t: vec![None; k + 1],
    };
    let raw = run(&mut adv, inst.procs, policy)?;

    // Hand each realized chain the next unused instance chain of its length.
    let mut pools: Vec<Vec<&ChainInfo>> = vec![Vec::new(); k + 1];
    for chain in inst.chains.iter().rev() {
        pools[chain.group].push(chain);
    }
    let mut target = Vec::with_capacity(adv.chains);
    for (c, &len) in adv.length.iter().enumerate() {
        let chain = pools[len].pop().ok_or_else(|| {
            Error::Construction(format!(
                "virtual chain {c} ended with unexpected length {len}"
            ))
        })?;
        target.push(chain);
    }
    let mut entries = BTreeMap::new();
    for (&id, &e) in &raw.entries {
        let (chain, task) = adv.split(id);
        entries.insert(target[chain].tasks[task - 1], e);
    }
    let schedule = Schedule::from_entries(entries);

    let mut t = vec![0.0; k + 1];
    for (i, (slot, seen)) in t.iter_mut().zip(&adv.t).enumerate().skip(1) {
        *slot = seen.ok_or_else(|| Error::Construction(format!("phase {i} never completed")))?;
    }
    t[k] = schedule.makespan;
    Ok((schedule, PhaseTrace { t }))
}
