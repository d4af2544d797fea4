use std::fs;

use anyhow::{Context, Result};
use moldsched::instances::{
    gen_chains_instance, gen_lb_graph, gen_random_dag, graph_to_json, write_graph,
    write_lb_instance, RandomDagConfig,
};
use serde_json::{json, Value};

use crate::args::GenerateCommand;
use crate::{default_seed, print_json, Verdict};

const FAMILY_CHAINS: &str = "chains";

/// `ell` of a graph file written by `generate chains`.
pub(crate) fn chains_tag(doc: &Value) -> Option<u32> {
    let tag = doc.get("instance")?;
    if tag.get("family")?.as_str()? != FAMILY_CHAINS {
        return None;
    }
    tag.get("ell")?.as_u64().and_then(|v| u32::try_from(v).ok())
}

pub(crate) fn run(cmd: GenerateCommand) -> Result<Verdict> {
    match cmd {
        GenerateCommand::Chains { ell, out } => {
            let inst = gen_chains_instance(ell)?;
            let mut doc: Value = serde_json::from_str(&graph_to_json(&inst.graph, inst.procs))?;
            doc["instance"] = json!({ "family": FAMILY_CHAINS, "ell": ell });
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
            }
            fs::write(&out, serde_json::to_string_pretty(&doc)?)
                .with_context(|| format!("cannot write {}", out.display()))?;
            print_json(&json!({
                "ell": ell,
                "k": inst.k,
                "procs": inst.procs,
                "chains": inst.chains.len(),
                "tasks": inst.graph.len(),
                "out": out,
            }))?;
        }
        GenerateCommand::Lb {
            model,
            procs,
            eps,
            policy,
            out,
        } => {
            let inst = gen_lb_graph(model, procs, eps, &policy)?;
            write_lb_instance(&inst, &out)?;
            let failed: Vec<&str> = inst
                .constraints
                .checks
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.label.as_str())
                .collect();
            print_json(&json!({
                "model": model,
                "procs": procs,
                "eps": eps,
                "policy": policy.name(),
                "tasks": inst.graph.len(),
                "x": inst.meta.x,
                "k": inst.meta.k,
                "y": inst.meta.y,
                "z": inst.meta.z,
                "w_bar": inst.meta.w_bar,
                "failed_constraints": failed,
                "out": out,
            }))?;
        }
        GenerateCommand::Random {
            seed,
            n,
            procs,
            model,
            density,
            out,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let g = gen_random_dag(&RandomDagConfig::new(seed, n, procs, model, density))?;
            write_graph(&g, procs, &out)?;
            print_json(
                &json!({ "seed": seed, "n": n, "procs": procs, "model": model, "edges": g.edges().len(), "out": out }),
            )?;
        }
    }
    Ok(Verdict::Pass)
}
