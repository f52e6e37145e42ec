//! Plain-text formats: matrix files, sample files and edge lists.
//!
//! Blank lines and lines starting with `#` are skipped everywhere. Node
//! labels in edge lists are 1-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ggmid::{Error, Graph, SymMatrix};

/// Mirror entries of an input matrix may differ by this much relative to the
/// largest entry.
const SYMMETRY_TOL: f64 = 1e-9;

/// Content lines of a file with their 1-based line numbers.
struct Lines<'a> {
    path: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(path: &'a str, text: &'a str) -> Self {
        Lines { path, inner: text.lines().enumerate(), last: 0 }
    }

    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn require(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_content()
            .ok_or_else(|| anyhow!("{}:{}: expected {what}, reached end of file", self.path, self.last + 1))
    }

    fn expect_end(&mut self, after: &str) -> Result<()> {
        match self.next_content() {
            Some((line, _)) => bail!("{}:{line}: unexpected content after {after}", self.path),
            None => Ok(()),
        }
    }
}

fn parse_reals(path: &str, line: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let values = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| anyhow!("{path}:{line}: '{tok}' is not a finite number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != expected {
        bail!("{path}:{line}: expected {expected} values, found {}", values.len());
    }
    Ok(values)
}

fn parse_count(path: &str, line: usize, tok: &str, name: &str) -> Result<usize> {
    match tok.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => bail!("{path}:{line}: {name} must be a positive integer, found '{tok}'"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Parses a matrix file: the dimension `p`, then `p` rows of `p` reals.
pub fn parse_matrix(path: &str, text: &str) -> Result<SymMatrix<f64>> {
    let mut lines = Lines::new(path, text);
    let (first, head) = lines.require("the matrix dimension")?;
    let p = parse_count(path, first, head, "the dimension")?;
    let mut data = Vec::with_capacity(p * p);
    let mut row_lines = Vec::with_capacity(p);
    for i in 0..p {
        let (line, row) = lines.require(&format!("row {} of {p}", i + 1))?;
        data.extend(parse_reals(path, line, row, p)?);
        row_lines.push(line);
    }
    lines.expect_end(&format!("{p} rows"))?;
    SymMatrix::from_row_major(p, &data, SYMMETRY_TOL).map_err(|e| match e {
        Error::NotSymmetric { row, col } => anyhow!(
            "{path}:{}: entry ({}, {}) does not match its mirror ({}, {})",
            row_lines[row],
            row + 1,
            col + 1,
            col + 1,
            row + 1
        ),
        other => anyhow!("{path}: {other}"),
    })
}

pub fn read_matrix(path: &Path) -> Result<SymMatrix<f64>> {
    parse_matrix(&path.display().to_string(), &read(path)?)
}

/// Parses a samples file: `n p`, then `n` rows of `p` reals.
pub fn parse_samples(path: &str, text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = Lines::new(path, text);
    let (first, head) = lines.require("the header 'n p'")?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 2 {
        bail!("{path}:{first}: header must be 'n p', found '{head}'");
    }
    let n = parse_count(path, first, fields[0], "n")?;
    let p = parse_count(path, first, fields[1], "p")?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (line, row) = lines.require(&format!("sample {} of {n}", i + 1))?;
        rows.push(parse_reals(path, line, row, p)?);
    }
    lines.expect_end(&format!("{n} samples"))?;
    Ok(rows)
}

pub fn read_samples(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_samples(&path.display().to_string(), &read(path)?)
}

/// Parses an edge list over `p` nodes.
pub fn parse_edges(path: &str, text: &str, p: usize) -> Result<Graph> {
    let mut lines = Lines::new(path, text);
    let mut edges = Vec::new();
    while let Some((line, row)) = lines.next_content() {
        let ends: Vec<usize> = row
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| anyhow!("{path}:{line}: '{t}' is not a node label")))
            .collect::<Result<_>>()?;
        match ends[..] {
            [u, v] if 1 <= u && u < v && v <= p => edges.push((u - 1, v - 1)),
            [_, _] => bail!("{path}:{line}: edge '{row}' needs 1 <= u < v <= {p}"),
            _ => bail!("{path}:{line}: expected 'u v', found '{row}'"),
        }
    }
    Graph::from_edges(p, edges).map_err(|e| anyhow!("{path}: {e}"))
}

pub fn read_edges(path: &Path, p: usize) -> Result<Graph> {
    parse_edges(&path.display().to_string(), &read(path)?, p)
}

/// Shortest text that parses back to the same `f64`.
fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn format_matrix(m: &SymMatrix<f64>) -> String {
    let mut out = format!("{}\n", m.dim());
    for row in m.to_rows() {
        out.push_str(&row.into_iter().map(real).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn format_samples(rows: &[Vec<f64>]) -> String {
    let p = rows.first().map_or(0, Vec::len);
    let mut out = format!("{} {p}\n", rows.len());
    for row in rows {
        out.push_str(&row.iter().copied().map(real).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn format_edges(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}
