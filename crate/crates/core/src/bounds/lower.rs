use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::TaskGraph;

/// Makespan lower bound from minimal areas and minimal times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `sum a_min / P`.
    pub area_bound: f64,
    /// Longest path with every task weighted by `t_min`.
    pub cp_bound: f64,
    pub value: f64,
}

pub fn lower_bound(graph: &TaskGraph, procs: usize) -> Result<LowerBound> {
    let mut area = 0.0;
    let mut finish = vec![0.0f64; graph.len()];
    let mut cp = 0.0f64;
    for &i in graph.topo_order() {
        let st = graph.tasks()[i].spec.extremal_stats(procs)?;
        area += st.a_min;
        let ready = graph
            .preds_of(i)
            .iter()
            .map(|&p| finish[p])
            .fold(0.0, f64::max);
        finish[i] = ready + st.t_min;
        cp = cp.max(finish[i]);
    }
    let area_bound = area / procs as f64;
    Ok(LowerBound {
        area_bound,
        cp_bound: cp,
        value: area_bound.max(cp),
    })
}
