//! JSON, CSV and dot encodings of the core types.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pedigree_core::game::Trajectory;
use pedigree_core::{CycleError, EdgeTag, Node, Pedigree, PedigreeGraph};
use serde::{Deserialize, Serialize};

/// `{"n":10,"insertions":[1,2,4,2,6,8,8]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedigreeJson {
    pub n: Node,
    pub insertions: Vec<Node>,
}

impl From<&Pedigree> for PedigreeJson {
    fn from(p: &Pedigree) -> Self {
        PedigreeJson { n: p.n(), insertions: p.choices().to_vec() }
    }
}

impl TryFrom<PedigreeJson> for Pedigree {
    type Error = CycleError;

    fn try_from(j: PedigreeJson) -> Result<Self, CycleError> {
        Pedigree::new(j.n, j.insertions)
    }
}

/// Reads a pedigree from its text form or its JSON form.
pub fn parse_pedigree(text: &str) -> Result<Pedigree, CycleError> {
    let t = text.trim();
    if t.starts_with('{') {
        let j: PedigreeJson = serde_json::from_str(t).map_err(|e| CycleError::Parse(e.to_string()))?;
        Pedigree::try_from(j)
    } else {
        t.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: Node,
    pub v: Node,
    pub tag: String,
}

impl EdgeJson {
    pub fn tag(&self) -> Result<EdgeTag, CycleError> {
        self.tag.parse().map_err(|_| CycleError::Parse(format!("unknown edge tag `{}`", self.tag)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: Node,
    pub vertices: Vec<Node>,
    pub edges: Vec<EdgeJson>,
    pub components: u32,
    pub connected: bool,
}

impl From<&PedigreeGraph> for GraphJson {
    fn from(g: &PedigreeGraph) -> Self {
        let mut edges = g.edges().to_vec();
        edges.sort();
        GraphJson {
            n: g.n(),
            vertices: g.vertices().collect(),
            edges: edges.into_iter().map(|e| EdgeJson { u: e.lo, v: e.hi, tag: e.tag.to_string() }).collect(),
            components: g.components(),
            connected: g.is_connected(),
        }
    }
}

/// Graphviz rendering; parallel typed edges stay separate.
pub fn graph_dot(g: &PedigreeGraph) -> String {
    let mut out = String::from("graph pedigree {\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  {v};");
    }
    let mut edges = g.edges().to_vec();
    edges.sort();
    for e in edges {
        let style = if e.tag.as_str().starts_with("T1") { "solid" } else { "dashed" };
        let _ = writeln!(out, "  {} -- {} [label=\"{}\", style={style}];", e.lo, e.hi, e.tag);
    }
    out.push_str("}\n");
    out
}

/// Human summary of a graph.
pub fn graph_text(g: &PedigreeGraph) -> String {
    let mut out = format!("n = {}, vertices = {:?}, components = {}\n", g.n(), g.vertices().collect::<Vec<_>>(), g.components());
    let mut edges = g.edges().to_vec();
    edges.sort();
    for e in edges {
        let _ = writeln!(out, "  {}–{} {}", e.hi, e.lo, e.tag);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryJson {
    pub seed: u64,
    pub strategy: String,
    pub n_max: Node,
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    #[serde(rename = "T")]
    pub t: Vec<u32>,
    pub dmoves: Vec<Node>,
    pub isolated_at: Vec<Node>,
    pub connected_at: BTreeMap<Node, bool>,
}

impl From<&Trajectory> for TrajectoryJson {
    fn from(t: &Trajectory) -> Self {
        TrajectoryJson {
            seed: t.seed,
            strategy: t.strategy.clone(),
            n_max: t.n_max,
            s: t.s.clone(),
            t: t.t.clone(),
            dmoves: t.dmoves.clone(),
            isolated_at: t.isolated_at.clone(),
            connected_at: t.connected_at.iter().copied().collect(),
        }
    }
}

/// JSON schemas of the stable outputs, keyed by format name.
pub fn schemas() -> serde_json::Value {
    let int = serde_json::json!({"type": "integer"});
    let ints = serde_json::json!({"type": "array", "items": {"type": "integer"}});
    serde_json::json!({
        "pedigree": {
            "type": "object",
            "required": ["n", "insertions"],
            "properties": {"n": int, "insertions": ints}
        },
        "graph": {
            "type": "object",
            "required": ["n", "vertices", "edges", "components", "connected"],
            "properties": {
                "n": int,
                "vertices": ints,
                "edges": {"type": "array", "items": {
                    "type": "object",
                    "required": ["u", "v", "tag"],
                    "properties": {"u": int, "v": int, "tag": {"enum": ["T1-AB", "T1-BA", "T2-AB", "T2-BA"]}}
                }},
                "components": int,
                "connected": {"type": "boolean"}
            }
        },
        "trajectory": {
            "type": "object",
            "required": ["seed", "strategy", "n_max", "S", "T", "dmoves", "isolated_at", "connected_at"],
            "properties": {
                "seed": int, "strategy": {"type": "string"}, "n_max": int,
                "S": ints, "T": ints, "dmoves": ints, "isolated_at": ints,
                "connected_at": {"type": "object", "additionalProperties": {"type": "boolean"}}
            }
        },
        "polytope_report": {
            "type": "object",
            "required": ["n", "vertices", "pairs", "disagreements", "complete", "min_degree", "max_degree"],
            "properties": {
                "n": int, "vertices": int, "pairs": int, "disagreements": int,
                "complete": {"type": ["boolean", "null"]},
                "min_degree": {"type": ["integer", "null"]},
                "max_degree": {"type": ["integer", "null"]}
            }
        },
        "aggregate_csv": {
            "columns": crate::harness::CSV_HEADER.split(',').collect::<Vec<_>>()
        }
    })
}
