//! Input file formats.
//!
//! # Matrices
//!
//! JSON: `{"dim": d, "entries": [[re, im], ...]}` with `d * d` entries in
//! row-major order. Plain text: the first non-comment line holds `d`, then
//! one line per row with `2 d` numbers `re im re im ...`. `#` starts a
//! comment in text files.
//!
//! # Quadratic Hamiltonians
//!
//! JSON: `{"a": <matrix>, "b": <matrix>}`. Plain text: a line `A`, the text
//! matrix for `A`, a line `B`, the text matrix for `B`.
//!
//! # Graph automorphism instances
//!
//! ```text
//! vertices: 4
//! 0: 1 3
//! 1: 0 2
//! 2: 1 3
//! 3: 0 2
//! sigma: (0 1 2 3)
//! ```
//!
//! Adjacency lines list neighbours; each edge may appear once or twice.
//! `sigma` is in cycle notation; fixed points may be omitted and `()` is the
//! identity.

use std::fs;
use std::path::Path;

use ffwd_core::algorithms::{CgaInstance, Graph, Permutation};
use ffwd_core::zoo::QuadraticHamiltonian;
use ffwd_core::{DenseOperator, C64};
use serde::{Deserialize, Serialize};

use crate::LabError;

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Format(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_operator(m: &DenseOperator) -> Self {
        let d = m.dim();
        let entries = (0..d * d).map(|k| {
            let z = m.get(k / d, k % d);
            [z.re, z.im]
        });
        Self { dim: d, entries: entries.collect() }
    }

    pub fn to_operator(&self) -> Result<DenseOperator, LabError> {
        if self.entries.len() != self.dim * self.dim {
            return Err(bad(format!("matrix of dimension {} needs {} entries, found {}", self.dim, self.dim * self.dim, self.entries.len())));
        }
        Ok(DenseOperator::from_rows(self.dim, self.entries.iter().map(|[r, i]| C64::new(*r, *i)).collect())?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.dim);
        for row in self.entries.chunks(self.dim.max(1)) {
            let cells: Vec<String> = row.iter().map(|[r, i]| format!("{r:?} {i:?}")).collect();
            s.push_str(&cells.join("  "));
            s.push('\n');
        }
        s
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty())
}

fn parse_f64(tok: &str) -> Result<f64, LabError> {
    tok.parse().map_err(|_| bad(format!("not a number: {tok:?}")))
}

/// Text matrix from already-stripped lines.
fn matrix_from_lines<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<MatrixFile, LabError> {
    let head = lines.next().ok_or_else(|| bad("missing matrix dimension"))?;
    let dim: usize = head.parse().map_err(|_| bad(format!("bad matrix dimension {head:?}")))?;
    let mut entries = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        let line = lines.next().ok_or_else(|| bad(format!("missing matrix row {r}")))?;
        let nums = line.split_whitespace().map(parse_f64).collect::<Result<Vec<_>, _>>()?;
        if nums.len() != 2 * dim {
            return Err(bad(format!("row {r} has {} numbers, expected {}", nums.len(), 2 * dim)));
        }
        entries.extend(nums.chunks(2).map(|c| [c[0], c[1]]));
    }
    Ok(MatrixFile { dim, entries })
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile, LabError> {
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(text)?);
    }
    let mut lines = content_lines(text);
    let m = matrix_from_lines(&mut lines)?;
    if let Some(extra) = lines.next() {
        return Err(bad(format!("trailing content {extra:?}")));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFile {
    pub a: MatrixFile,
    pub b: MatrixFile,
}

pub fn parse_quadratic(text: &str) -> Result<QuadraticHamiltonian, LabError> {
    let f: QuadraticFile = if text.trim_start().starts_with('{') {
        serde_json::from_str(text)?
    } else {
        let mut lines = content_lines(text);
        let mut section = |name: &str| -> Result<MatrixFile, LabError> {
            match lines.next() {
                Some(l) if l.eq_ignore_ascii_case(name) => matrix_from_lines(&mut lines),
                other => Err(bad(format!("expected section {name}, found {other:?}"))),
            }
        };
        let a = section("A")?;
        let b = section("B")?;
        QuadraticFile { a, b }
    };
    Ok(QuadraticHamiltonian::new(f.a.to_operator()?, f.b.to_operator()?)?)
}

pub fn read_quadratic(path: &Path) -> Result<QuadraticHamiltonian, LabError> {
    parse_quadratic(&fs::read_to_string(path)?)
}

/// `(0 1 2)(3 4)`; fixed points are left out and the identity is `()`.
pub fn cycle_notation(p: &Permutation) -> String {
    let cycles: Vec<String> = p
        .cycles()
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
        .collect();
    if cycles.is_empty() {
        "()".into()
    } else {
        cycles.concat()
    }
}

pub fn parse_cycles(n: usize, text: &str) -> Result<Permutation, LabError> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| bad(format!("expected '(' in {text:?}")))?;
        let close = body.find(')').ok_or_else(|| bad(format!("unclosed cycle in {text:?}")))?;
        let items = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| bad(format!("bad vertex {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if !items.is_empty() {
            cycles.push(items);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(Permutation::from_cycles(n, &cycles)?)
}

pub fn write_cga(inst: &CgaInstance) -> String {
    let g = &inst.graph;
    let mut s = format!("vertices: {}\n", g.vertices());
    for (v, nbrs) in g.adjacency_lists().iter().enumerate() {
        let list: Vec<String> = nbrs.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("{v}: {}\n", list.join(" ")).replace(": \n", ":\n"));
    }
    s.push_str(&format!("sigma: {}\n", cycle_notation(&inst.sigma)));
    s
}

pub fn parse_cga(text: &str) -> Result<CgaInstance, LabError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut sigma_text: Option<String> = None;
    for line in content_lines(text) {
        let (key, val) = line.split_once(':').ok_or_else(|| bad(format!("expected 'key: value', found {line:?}")))?;
        let key = key.trim();
        match key {
            "vertices" => n = Some(val.trim().parse().map_err(|_| bad(format!("bad vertex count {val:?}")))?),
            "sigma" => sigma_text = Some(val.trim().to_string()),
            _ => {
                let u: usize = key.parse().map_err(|_| bad(format!("unknown key {key:?}")))?;
                for t in val.split_whitespace() {
                    let v: usize = t.parse().map_err(|_| bad(format!("bad neighbour {t:?}")))?;
                    if u < v {
                        edges.push((u, v));
                    } else if v < u {
                        edges.push((v, u));
                    } else {
                        return Err(bad(format!("self-loop at {u}")));
                    }
                }
            }
        }
    }
    let n = n.ok_or_else(|| bad("missing 'vertices:' line"))?;
    edges.sort_unstable();
    edges.dedup();
    let graph = Graph::from_edges(n, &edges)?;
    let sigma = parse_cycles(n, sigma_text.as_deref().ok_or_else(|| bad("missing 'sigma:' line"))?)?;
    Ok(CgaInstance::new(graph, sigma)?)
}

pub fn read_cga(path: &Path) -> Result<CgaInstance, LabError> {
    parse_cga(&fs::read_to_string(path)?)
}
