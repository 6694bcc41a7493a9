//! Line-oriented text formats for graphs, complexes and trees, plus JSON
//! views.
//!
//! Grammar (UTF-8, `#` starts a comment):
//!
//! ```text
//! graph           complex            tree
//! v N             v N                v N
//! e u v [w]       t u v x [w]        e u v length
//! ```
//!
//! `v N` declares vertices `0..N-1`. Graph edges may repeat (parallel
//! items) and may be loops. Complex files carry faces only: edge and
//! vertex weights are always recomputed by propagation, so `e` lines are
//! rejected there. Omitted weights default to 1.

use std::path::Path;

use thiserror::Error;

use crate::cat0::{Cat0Error, MetricTree};
use crate::complex::{ComplexError, WeightedComplex, WeightedGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cat0(#[from] Cat0Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    /// (1-based line number, significant tokens).
    rows: Vec<(usize, Vec<&'a str>)>,
}

fn tokenize(text: &str) -> Lines<'_> {
    let rows = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let stripped = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = stripped.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect();
    Lines { rows }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, IoError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64, IoError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn expect_header(lines: &Lines<'_>, want: &str) -> Result<(), IoError> {
    match lines.rows.first() {
        Some((line, tokens)) => {
            if tokens.len() != 1 || tokens[0] != want {
                Err(parse_err(*line, format!("expected header `{want}`")))
            } else {
                Ok(())
            }
        }
        None => Err(parse_err(1, format!("empty file, expected header `{want}`"))),
    }
}

fn vertex_count(lines: &Lines<'_>) -> Result<(usize, usize), IoError> {
    match lines.rows.get(1) {
        Some((line, tokens)) if tokens.len() == 2 && tokens[0] == "v" => {
            Ok((parse_usize(tokens[1], *line, "vertex count")?, *line))
        }
        Some((line, _)) => Err(parse_err(*line, "expected `v N` after the header")),
        None => Err(parse_err(1, "missing `v N` declaration")),
    }
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph, IoError> {
    let lines = tokenize(text);
    expect_header(&lines, "graph")?;
    let (n, _) = vertex_count(&lines)?;
    let mut edges = Vec::new();
    for (line, tokens) in lines.rows.iter().skip(2) {
        match tokens[0] {
            "e" if tokens.len() == 3 || tokens.len() == 4 => {
                let u = parse_usize(tokens[1], *line, "vertex")?;
                let v = parse_usize(tokens[2], *line, "vertex")?;
                let w = if tokens.len() == 4 {
                    parse_f64(tokens[3], *line, "weight")?
                } else {
                    1.0
                };
                if u >= n || v >= n {
                    return Err(parse_err(*line, format!("vertex out of range 0..{n}")));
                }
                edges.push((u, v, w));
            }
            other => {
                return Err(parse_err(
                    *line,
                    format!("unexpected record `{other}` in a graph file"),
                ))
            }
        }
    }
    Ok(WeightedGraph::new(n, edges)?)
}

pub fn parse_complex(text: &str) -> Result<WeightedComplex, IoError> {
    let lines = tokenize(text);
    expect_header(&lines, "complex")?;
    let (n, _) = vertex_count(&lines)?;
    let mut faces = Vec::new();
    for (line, tokens) in lines.rows.iter().skip(2) {
        match tokens[0] {
            "t" if tokens.len() == 4 || tokens.len() == 5 => {
                let a = parse_usize(tokens[1], *line, "vertex")?;
                let b = parse_usize(tokens[2], *line, "vertex")?;
                let c = parse_usize(tokens[3], *line, "vertex")?;
                let w = if tokens.len() == 5 {
                    parse_f64(tokens[4], *line, "weight")?
                } else {
                    1.0
                };
                if a >= n || b >= n || c >= n {
                    return Err(parse_err(*line, format!("vertex out of range 0..{n}")));
                }
                faces.push(([a, b, c], w));
            }
            "e" => {
                return Err(parse_err(
                    *line,
                    "complex files carry faces only; edge weights are recomputed by propagation",
                ))
            }
            other => {
                return Err(parse_err(
                    *line,
                    format!("unexpected record `{other}` in a complex file"),
                ))
            }
        }
    }
    Ok(WeightedComplex::from_faces(faces, Some(n))?)
}

pub fn parse_tree(text: &str) -> Result<MetricTree, IoError> {
    let lines = tokenize(text);
    expect_header(&lines, "tree")?;
    let (n, _) = vertex_count(&lines)?;
    let mut edges = Vec::new();
    for (line, tokens) in lines.rows.iter().skip(2) {
        match tokens[0] {
            "e" if tokens.len() == 4 => {
                let u = parse_usize(tokens[1], *line, "vertex")?;
                let v = parse_usize(tokens[2], *line, "vertex")?;
                let len = parse_f64(tokens[3], *line, "length")?;
                if u >= n || v >= n {
                    return Err(parse_err(*line, format!("vertex out of range 0..{n}")));
                }
                edges.push((u, v, len));
            }
            other => {
                return Err(parse_err(
                    *line,
                    format!("unexpected record `{other}` in a tree file"),
                ))
            }
        }
    }
    Ok(MetricTree::new(n, edges)?)
}

pub fn graph_to_text(g: &WeightedGraph) -> String {
    let mut out = String::from("graph\n");
    out.push_str(&format!("v {}\n", g.vertex_count()));
    for e in g.edge_items() {
        out.push_str(&format!("e {} {} {}\n", e.u, e.v, e.weight));
    }
    out
}

pub fn complex_to_text(cx: &WeightedComplex) -> String {
    let mut out = String::from("complex\n");
    out.push_str(&format!("v {}\n", cx.vertex_count()));
    for (i, tri) in cx.faces().iter().enumerate() {
        out.push_str(&format!(
            "t {} {} {} {}\n",
            tri[0],
            tri[1],
            tri[2],
            cx.face_weight(i)
        ));
    }
    out
}

pub fn tree_to_text(tree: &MetricTree) -> String {
    let mut out = String::from("tree\n");
    out.push_str(&format!("v {}\n", tree.vertex_count()));
    for &(u, v, len) in tree.edges() {
        out.push_str(&format!("e {u} {v} {len}\n"));
    }
    out
}

/// JSON view mirroring the text-format fields plus derived weights.
pub fn graph_to_json(g: &WeightedGraph) -> serde_json::Value {
    serde_json::json!({
        "kind": "graph",
        "vertices": g.vertex_count(),
        "edges": g
            .edge_items()
            .iter()
            .map(|e| serde_json::json!({"u": e.u, "v": e.v, "weight": e.weight}))
            .collect::<Vec<_>>(),
        "vertex_weights": g.vertex_weights(),
        "total_vertex_weight": g.total_vertex_weight(),
    })
}

pub fn complex_to_json(cx: &WeightedComplex) -> serde_json::Value {
    serde_json::json!({
        "kind": "complex",
        "vertices": cx.vertex_count(),
        "faces": cx
            .faces()
            .iter()
            .enumerate()
            .map(|(i, t)| serde_json::json!({
                "vertices": t,
                "weight": cx.face_weight(i),
            }))
            .collect::<Vec<_>>(),
        "edges": cx
            .edges()
            .iter()
            .zip(cx.edge_weights())
            .map(|(&(u, v), &w)| serde_json::json!({"u": u, "v": v, "weight": w}))
            .collect::<Vec<_>>(),
        "vertex_weights": (0..cx.vertex_count())
            .map(|x| cx.vertex_weight(x))
            .collect::<Vec<_>>(),
    })
}

fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph, IoError> {
    parse_graph(&read_file(path)?)
}

pub fn read_complex(path: &Path) -> Result<WeightedComplex, IoError> {
    parse_complex(&read_file(path)?)
}

pub fn read_tree(path: &Path) -> Result<MetricTree, IoError> {
    parse_tree(&read_file(path)?)
}
