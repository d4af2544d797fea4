use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelKind, SpeedupSpec, Task, TaskGraph, TaskId};

/// Inclusive sampling ranges for spec parameters. Only the fields the model
/// uses are read; `pbar` is clamped to `[1, P]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub w: (f64, f64),
    pub d: (f64, f64),
    pub c: (f64, f64),
    pub pbar: (usize, usize),
}

impl ParamRanges {
    pub fn for_model(kind: ModelKind, procs: usize) -> Self {
        let pbar = (1, procs.max(1));
        match kind {
            ModelKind::Roofline => Self {
                w: (0.1, 100.0),
                d: (0.0, 0.0),
                c: (0.0, 0.0),
                pbar,
            },
            ModelKind::Communication => Self {
                w: (0.0, 100.0),
                d: (0.0, 0.0),
                c: (0.01, 2.0),
                pbar,
            },
            ModelKind::Amdahl => Self {
                w: (0.0, 100.0),
                d: (0.0, 10.0),
                c: (0.0, 0.0),
                pbar,
            },
            ModelKind::General => Self {
                w: (0.0, 100.0),
                d: (0.0, 10.0),
                c: (0.0, 2.0),
                pbar,
            },
            ModelKind::Tabulated => Self {
                w: (0.1, 10.0),
                d: (0.0, 0.0),
                c: (0.0, 0.0),
                pbar,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomDagConfig {
    pub seed: u64,
    pub n: usize,
    pub procs: usize,
    pub kind: ModelKind,
    pub ranges: ParamRanges,
    /// Probability of each edge between consecutive layers.
    pub density: f64,
    /// Layer sizes are drawn from `[1, max_width]`.
    pub max_width: usize,
}

impl RandomDagConfig {
    pub fn new(seed: u64, n: usize, procs: usize, kind: ModelKind, density: f64) -> Self {
        Self {
            seed,
            n,
            procs,
            kind,
            ranges: ParamRanges::for_model(kind, procs),
            density,
            max_width: n.clamp(1, 4),
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

fn draw_spec(rng: &mut ChaCha8Rng, cfg: &RandomDagConfig) -> Result<SpeedupSpec> {
    let r = &cfg.ranges;
    let pbar = |rng: &mut ChaCha8Rng| {
        let lo = r.pbar.0.clamp(1, cfg.procs);
        let hi = r.pbar.1.clamp(lo, cfg.procs);
        rng.gen_range(lo..=hi)
    };
    match cfg.kind {
        ModelKind::Roofline => {
            let w = draw(rng, r.w);
            SpeedupSpec::roofline(w, pbar(rng))
        }
        ModelKind::Communication => {
            let w = draw(rng, r.w);
            SpeedupSpec::communication(w, draw(rng, r.c))
        }
        ModelKind::Amdahl => {
            let w = draw(rng, r.w);
            SpeedupSpec::amdahl(w, draw(rng, r.d))
        }
        ModelKind::General => {
            let w = draw(rng, r.w);
            let d = draw(rng, r.d);
            let c = draw(rng, r.c);
            SpeedupSpec::general(w, d, c, pbar(rng))
        }
        ModelKind::Tabulated => {
            let table: Vec<f64> = (0..cfg.procs).map(|_| draw(rng, r.w)).collect();
            SpeedupSpec::tabulated(table)
        }
    }
}

/// Seeded layered DAG: consecutive layers of random width, each pair of
/// tasks in adjacent layers joined with probability `density`.
pub fn gen_random_dag(cfg: &RandomDagConfig) -> Result<TaskGraph> {
    if cfg.n == 0 {
        return Err(Error::Config("random DAG needs at least one task".into()));
    }
    if cfg.procs == 0 {
        return Err(Error::Config(
            "random DAG needs at least one processor".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cfg.density) {
        return Err(Error::Config(format!(
            "density must lie in [0, 1], got {}",
            cfg.density
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = cfg.max_width.max(1);
    let mut layers: Vec<Vec<TaskId>> = Vec::new();
    let mut next = 0usize;
    while next < cfg.n {
        let size = rng.gen_range(1..=width).min(cfg.n - next);
        layers.push((next..next + size).map(|i| i as TaskId).collect());
        next += size;
    }
    let mut tasks = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        tasks.push(Task::new(i as TaskId, draw_spec(&mut rng, cfg)?));
    }
    let mut edges = Vec::new();
    for pair in layers.windows(2) {
        for &a in &pair[0] {
            for &b in &pair[1] {
                if rng.gen_bool(cfg.density) {
                    edges.push((a, b));
                }
            }
        }
    }
    TaskGraph::new(tasks, edges)
}
