use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use moldsched::bounds::{brute_force_optimal, competitive_report, OracleLimits, CSV_HEADER};
use moldsched::engine::{validate_schedule, AllocationPolicy};
use moldsched::instances::{gen_random_dag, read_json, RandomDagConfig};
use moldsched::model::ModelKind;
use moldsched::par::{self, Execution};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::SweepArgs;
use crate::{default_seed, print_json, Verdict};

/// Half-open seed interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub models: Vec<ModelKind>,
    pub sizes: Vec<usize>,
    pub procs: Vec<usize>,
    /// Defaults to ten seeds starting at the default seed.
    #[serde(default)]
    pub seeds: Option<SeedRange>,
    pub policies: Vec<String>,
    /// Largest `n` handed to the exact oracle.
    #[serde(default)]
    pub oracle_limit: usize,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_density() -> f64 {
    0.3
}

struct Job {
    id: String,
    kind: ModelKind,
    n: usize,
    procs: usize,
    seed: u64,
}

struct Row {
    record: Vec<String>,
    violations: Vec<String>,
}

const SLACK: f64 = 1e-9;

fn run_job(
    job: &Job,
    policies: &[AllocationPolicy],
    oracle_limit: usize,
    density: f64,
) -> moldsched::Result<Vec<Row>> {
    let g = gen_random_dag(&RandomDagConfig::new(
        job.seed, job.n, job.procs, job.kind, density,
    ))?;
    let limits = OracleLimits::default();
    let opt = if job.n <= oracle_limit.min(limits.max_tasks) && job.procs <= limits.max_procs {
        Some(brute_force_optimal(&g, job.procs, &limits)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(policies.len());
    for policy in policies {
        let mut rep = competitive_report(&g, job.procs, policy, false)?;
        let mut violations = Vec::new();
        if !validate_schedule(&g, &rep.schedule, job.procs).is_empty() {
            violations.push("invalid schedule".to_string());
        }
        if rep.lower_bound.value > rep.makespan * (1.0 + SLACK) {
            violations.push(format!(
                "lower bound {} above makespan {}",
                rep.lower_bound.value, rep.makespan
            ));
        }
        if let Some(o) = &opt {
            let ratio = if o.makespan() > 0.0 {
                rep.makespan / o.makespan()
            } else {
                1.0
            };
            rep.oracle_opt = Some(o.makespan());
            rep.oracle_proved = Some(o.optimal);
            rep.ratio_vs_opt = Some(ratio);
            if o.optimal && o.makespan() > rep.makespan * (1.0 + SLACK) {
                violations.push("oracle above a policy makespan".into());
            }
            if o.optimal
                && matches!(policy, AllocationPolicy::Paper)
                && ratio > rep.model_ratio + SLACK
            {
                violations.push(format!("ratio {ratio} above {}", rep.model_ratio));
            }
        }
        let violations = violations
            .into_iter()
            .map(|v| format!("{} {}: {v}", job.id, policy.name()))
            .collect();
        rows.push(Row {
            record: rep.csv_record(&job.id),
            violations,
        });
    }
    Ok(rows)
}

pub(crate) fn run(a: SweepArgs) -> Result<Verdict> {
    let cfg: SweepConfig = read_json(&a.config)?;
    let Some(out) = a.csv.clone().or_else(|| cfg.output.clone()) else {
        bail!("no CSV path: pass --csv or set `output` in the config");
    };
    if cfg.models.is_empty()
        || cfg.sizes.is_empty()
        || cfg.procs.is_empty()
        || cfg.policies.is_empty()
    {
        bail!("every sweep axis (models, sizes, procs, policies) needs at least one value");
    }
    if cfg.sizes.contains(&0) || cfg.procs.contains(&0) {
        bail!("sizes and procs must be positive");
    }
    let seeds = match cfg.seeds {
        Some(r) => r,
        None => {
            let s = default_seed()?;
            SeedRange {
                start: s,
                end: s + 10,
            }
        }
    };
    if seeds.end <= seeds.start {
        bail!("empty seed range [{}, {})", seeds.start, seeds.end);
    }
    let policies = cfg
        .policies
        .iter()
        .map(|p| AllocationPolicy::parse(p))
        .collect::<moldsched::Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for &kind in &cfg.models {
        for &n in &cfg.sizes {
            for &procs in &cfg.procs {
                for seed in seeds.start..seeds.end {
                    let id = format!("{kind}-n{n:03}-p{procs:03}-s{seed:06}");
                    jobs.push(Job {
                        id,
                        kind,
                        n,
                        procs,
                        seed,
                    });
                }
            }
        }
    }
    let results = par::with_threads(a.jobs, || {
        par::map(Execution::default(), &jobs, |j| {
            run_job(j, &policies, cfg.oracle_limit, cfg.density)
        })
    })?;

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|x, y| {
        x.record[0]
            .cmp(&y.record[0])
            .then_with(|| x.record[4].cmp(&y.record[4]))
    });

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut w =
        csv::Writer::from_path(&out).with_context(|| format!("cannot write {}", out.display()))?;
    w.write_record(CSV_HEADER)?;
    for r in &rows {
        w.write_record(&r.record)?;
    }
    w.flush()?;

    let violations: Vec<&String> = rows.iter().flat_map(|r| &r.violations).collect();
    for v in &violations {
        eprintln!("violation: {v}");
    }
    print_json(&json!({
        "instances": jobs.len(),
        "rows": rows.len(),
        "violations": violations.len(),
        "csv": out,
    }))?;
    Ok(Verdict::from_ok(violations.is_empty()))
}
