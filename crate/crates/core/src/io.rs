//! Graph serialization.
//!
//! Text format: a header line `n m max_degree`, then one `u v` line per edge,
//! 0-indexed, in edge-id order. The JSON variant additionally carries
//! optional vertex weights and torus dimensions. Both round-trip bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header says max degree {header}, edges give {actual}")]
    MaxDegreeMismatch { header: usize, actual: usize },
    #[error("header says {header} edges, file has {actual}")]
    EdgeCountMismatch { header: usize, actual: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("weights length {0} does not match vertex count {1}")]
    WeightLength(usize, usize),
}

/// JSON graph file. `weights` and `dims` are optional metadata.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub version: u32,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub max_degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn from_graph(g: &Graph) -> Self {
        GraphFile {
            version: 1,
            n: g.n_vertices(),
            edges: g.edge_list().to_vec(),
            max_degree: g.max_degree(),
            weights: None,
            dims: None,
        }
    }

    pub fn to_graph(&self) -> Result<Graph, IoError> {
        let g = Graph::from_edges(self.n, &self.edges)?;
        if g.max_degree() != self.max_degree {
            return Err(IoError::MaxDegreeMismatch {
                header: self.max_degree,
                actual: g.max_degree(),
            });
        }
        if let Some(ws) = &self.weights {
            if ws.len() != self.n {
                return Err(IoError::WeightLength(ws.len(), self.n));
            }
        }
        Ok(g)
    }
}

pub fn write_text(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} {}\n",
        g.n_vertices(),
        g.n_edges(),
        g.max_degree()
    ));
    for &(u, v) in g.edge_list() {
        out.push_str(&format!("{} {}\n", u, v));
    }
    out
}

pub fn read_text(s: &str) -> Result<Graph, IoError> {
    let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (lineno, header) = lines.next().ok_or(IoError::Parse {
        line: 0,
        message: "empty file".into(),
    })?;
    let parse_usize = |tok: &str, line: usize| {
        tok.parse::<usize>().map_err(|_| IoError::Parse {
            line,
            message: format!("expected integer, got '{}'", tok),
        })
    };
    let mut parts = header.split_whitespace();
    let mut next_header = |what: &str| {
        parts
            .next()
            .ok_or(IoError::Parse {
                line: lineno + 1,
                message: format!("header missing {}", what),
            })
            .and_then(|t| parse_usize(t, lineno + 1))
    };
    let n = next_header("vertex count")?;
    let m = next_header("edge count")?;
    let delta = next_header("max degree")?;
    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let mut toks = line.split_whitespace();
        let u = parse_usize(toks.next().unwrap_or(""), lineno + 1)?;
        let v = parse_usize(toks.next().unwrap_or(""), lineno + 1)?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(IoError::EdgeCountMismatch {
            header: m,
            actual: edges.len(),
        });
    }
    let g = Graph::from_edges(n, &edges)?;
    if g.max_degree() != delta {
        return Err(IoError::MaxDegreeMismatch {
            header: delta,
            actual: g.max_degree(),
        });
    }
    Ok(g)
}

pub fn write_json(file: &GraphFile) -> Result<String, IoError> {
    Ok(serde_json::to_string(file)?)
}

pub fn read_json(s: &str) -> Result<GraphFile, IoError> {
    Ok(serde_json::from_str(s)?)
}

/// Saves by extension: `.json` uses the JSON variant, anything else the text
/// format.
pub fn save_graph(path: &Path, file: &GraphFile) -> Result<(), IoError> {
    let body = if path.extension().is_some_and(|e| e == "json") {
        write_json(file)?
    } else {
        write_text(&file.to_graph()?)
    };
    std::fs::write(path, body)?;
    Ok(())
}

pub fn load_graph(path: &Path) -> Result<GraphFile, IoError> {
    let body = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let file = read_json(&body)?;
        file.to_graph()?;
        Ok(file)
    } else {
        let g = read_text(&body)?;
        Ok(GraphFile::from_graph(&g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Graph {
        Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap()
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let g = sample();
        let s = write_text(&g);
        let g2 = read_text(&s).unwrap();
        assert_eq!(g, g2);
        assert_eq!(write_text(&g2), s);
    }

    #[test]
    fn json_round_trip_with_weights_and_dims() {
        let g = sample();
        let mut file = GraphFile::from_graph(&g);
        file.weights = Some(vec![0.2; 5]);
        file.dims = Some(vec![5]);
        let s = write_json(&file).unwrap();
        let file2 = read_json(&s).unwrap();
        assert_eq!(file, file2);
        assert_eq!(write_json(&file2).unwrap(), s);
    }

    #[test]
    fn corrupt_header_is_rejected() {
        assert!(read_text("3 1 5\n0 1\n").is_err());
        assert!(read_text("3 2 1\n0 1\n").is_err());
        assert!(read_text("").is_err());
    }
}
