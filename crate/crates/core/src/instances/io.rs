//! JSON files for graphs, schedules and instance metadata.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lb::LbInstance;
use crate::error::{Error, Result};
use crate::model::{ModelKind, SpeedupSpec, Task, TaskGraph, TaskId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelWire {
    kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pbar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TaskWire {
    id: TaskId,
    model: ModelWire,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphWire {
    version: u32,
    procs: usize,
    tasks: Vec<TaskWire>,
    edges: Vec<(TaskId, TaskId)>,
}

impl From<&SpeedupSpec> for ModelWire {
    fn from(spec: &SpeedupSpec) -> Self {
        let base = Self {
            kind: spec.kind(),
            w: None,
            d: None,
            c: None,
            pbar: None,
            table: None,
        };
        match *spec {
            SpeedupSpec::Roofline { w, pbar } => Self {
                w: Some(w),
                pbar: Some(pbar),
                ..base
            },
            SpeedupSpec::Communication { w, c } => Self {
                w: Some(w),
                c: Some(c),
                ..base
            },
            SpeedupSpec::Amdahl { w, d } => Self {
                w: Some(w),
                d: Some(d),
                ..base
            },
            SpeedupSpec::General { w, d, c, pbar } => Self {
                w: Some(w),
                d: Some(d),
                c: Some(c),
                pbar: Some(pbar),
                ..base
            },
            SpeedupSpec::Tabulated(ref table) => Self {
                table: Some(table.to_vec()),
                ..base
            },
        }
    }
}

impl Serialize for SpeedupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelWire::from(self).serialize(s)
    }
}

impl ModelWire {
    fn into_spec(self, procs: usize) -> std::result::Result<SpeedupSpec, String> {
        let w = self.w.unwrap_or(0.0);
        let d = self.d.unwrap_or(0.0);
        let c = self.c.unwrap_or(0.0);
        let pbar = self.pbar.unwrap_or(procs);
        let zero = |name: &str, v: f64| {
            if v == 0.0 {
                Ok(())
            } else {
                Err(format!("field `{name}` must be 0 for {}", self.kind))
            }
        };
        let unbounded = || {
            if pbar >= procs {
                Ok(())
            } else {
                Err(format!(
                    "field `pbar` is not supported by the {} model",
                    self.kind
                ))
            }
        };
        if self.kind != ModelKind::Tabulated && self.table.is_some() {
            return Err(format!(
                "field `table` is only valid for tabulated models, not {}",
                self.kind
            ));
        }
        let spec = match self.kind {
            ModelKind::Roofline => {
                zero("d", d)?;
                zero("c", c)?;
                SpeedupSpec::roofline(w, pbar)
            }
            ModelKind::Communication => {
                zero("d", d)?;
                unbounded()?;
                SpeedupSpec::communication(w, c)
            }
            ModelKind::Amdahl => {
                zero("c", c)?;
                unbounded()?;
                SpeedupSpec::amdahl(w, d)
            }
            ModelKind::General => SpeedupSpec::general(w, d, c, pbar),
            ModelKind::Tabulated => {
                let table = self
                    .table
                    .ok_or("field `table` is required for tabulated models")?;
                if table.len() != procs {
                    return Err(format!(
                        "field `table` has {} entries but the platform has {procs}",
                        table.len()
                    ));
                }
                SpeedupSpec::tabulated(table)
            }
        };
        spec.map_err(|e| e.to_string())
    }
}

/// A graph together with the platform size it was written for.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDocument {
    pub procs: usize,
    pub graph: TaskGraph,
}

pub fn graph_to_json(graph: &TaskGraph, procs: usize) -> String {
    let wire = GraphWire {
        version: FORMAT_VERSION,
        procs,
        tasks: graph
            .tasks()
            .iter()
            .map(|t| TaskWire {
                id: t.id,
                model: ModelWire::from(&t.spec),
            })
            .collect(),
        edges: graph.edges().to_vec(),
    };
    serde_json::to_string_pretty(&wire).expect("graph serializes")
}

pub fn parse_graph(text: &str) -> Result<GraphDocument> {
    let wire: GraphWire = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if wire.version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            wire.version
        )));
    }
    if wire.procs == 0 {
        return Err(Error::Parse("field `procs` must be at least 1".into()));
    }
    let mut tasks = Vec::with_capacity(wire.tasks.len());
    for (i, t) in wire.tasks.into_iter().enumerate() {
        let spec = t
            .model
            .into_spec(wire.procs)
            .map_err(|e| Error::Parse(format!("tasks[{i}] (id {}): {e}", t.id)))?;
        tasks.push(Task::new(t.id, spec));
    }
    let graph = TaskGraph::new(tasks, wire.edges)?;
    Ok(GraphDocument {
        procs: wire.procs,
        graph,
    })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphDocument> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_graph(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_graph(graph: &TaskGraph, procs: usize, path: impl AsRef<Path>) -> Result<()> {
    write_text(path, &graph_to_json(graph, procs))
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Metadata and constraint evaluation of a layered instance as JSON.
pub fn lb_meta_json(inst: &LbInstance) -> serde_json::Value {
    serde_json::json!({
        "meta": inst.meta,
        "constraints": inst.constraints,
    })
}

/// Writes `graph.json` and `meta.json` into `dir`.
pub fn write_lb_instance(inst: &LbInstance, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    write_graph(&inst.graph, inst.meta.procs, dir.join("graph.json"))?;
    write_json(&lb_meta_json(inst), dir.join("meta.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let text = r#"{"version":1,"procs":4,"tasks":[
            {"id":1,"model":{"kind":"roofline","w":2}},
            {"id":2,"model":{"kind":"amdahl","w":1,"d":1}}],
            "edges":[[1,2]]}"#;
        let doc = parse_graph(text).unwrap();
        assert_eq!(doc.procs, 4);
        assert_eq!(
            doc.graph.task(1).unwrap().spec,
            SpeedupSpec::roofline(2.0, 4).unwrap()
        );
        assert_eq!(doc.graph.edges(), &[(1, 2)]);
    }

    #[test]
    fn malformed_inputs() {
        let missing =
            r#"{"version":1,"procs":4,"tasks":[{"id":1,"model":{"kind":"amdahl","w":1}}]}"#;
        let e = parse_graph(missing).unwrap_err().to_string();
        assert!(e.contains("edges") && e.contains("line"), "{e}");
        let unknown =
            r#"{"version":1,"procs":4,"tasks":[{"id":1,"model":{"kind":"linear"}}],"edges":[]}"#;
        assert!(parse_graph(unknown)
            .unwrap_err()
            .to_string()
            .contains("linear"));
        let bad = r#"{"version":1,"procs":4,"tasks":[{"id":7,"model":{"kind":"roofline","w":1,"c":2}}],"edges":[]}"#;
        let e = parse_graph(bad).unwrap_err().to_string();
        assert!(e.contains("id 7") && e.contains("`c`"), "{e}");
        let short = r#"{"version":1,"procs":4,"tasks":[{"id":1,"model":{"kind":"tabulated","table":[1,2]}}],"edges":[]}"#;
        assert!(parse_graph(short).is_err());
        let cyc = r#"{"version":1,"procs":2,"tasks":[{"id":1,"model":{"kind":"amdahl","w":1}},
            {"id":2,"model":{"kind":"amdahl","w":1}}],"edges":[[1,2],[2,1]]}"#;
        assert!(matches!(parse_graph(cyc), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn round_trip_all_kinds() {
        let tasks = vec![
            Task::new(1, SpeedupSpec::roofline(0.1, 3).unwrap()),
            Task::new(2, SpeedupSpec::communication(1.0 / 3.0, 0.7).unwrap()),
            Task::new(3, SpeedupSpec::amdahl(2.5, 1e-9).unwrap()),
            Task::new(4, SpeedupSpec::general(5.0, 0.25, 0.125, 2).unwrap()),
            Task::new(
                5,
                SpeedupSpec::tabulated(vec![1.0, 0.6180339887498949, 0.5, 0.4]).unwrap(),
            ),
        ];
        let g = TaskGraph::new(tasks, vec![(1, 2), (1, 3), (4, 5)]).unwrap();
        let back = parse_graph(&graph_to_json(&g, 4)).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.procs, 4);
    }
}
