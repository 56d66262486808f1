//! Digraphs, weight matrices, permutations, and canonical cycles.
//!
//! Vertices are labeled `1..n` in every external format and error message;
//! all in-memory indices are 0-based. Loops are rejected at parse time and
//! `n >= 2` is enforced everywhere.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rational::ExtRational;

pub const MIN_VERTICES: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count {0} is below the minimum of 2")]
    TooSmall(usize),
    #[error("adjacency row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("nonzero diagonal at row {0}: loops are not allowed")]
    NonzeroDiagonal(usize),
    #[error("adjacency entry at row {row}, column {col} is not 0 or 1")]
    NotBinary { row: usize, col: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header `{token}`, expected a vertex count")]
    MalformedHeader { line: usize, token: String },
    #[error("line {line}: vertex count {n} is below the minimum of 2")]
    TooSmall { line: usize, n: usize },
    #[error("line {line}: expected {expected} entries in row {row}, found {got}")]
    WrongEntryCount { line: usize, row: usize, expected: usize, got: usize },
    #[error("line {line}: entry `{token}` in row {row}, column {col} is not 0 or 1")]
    NotBinary { line: usize, row: usize, col: usize, token: String },
    #[error("line {line}: nonzero diagonal at row {row}: loops are not allowed")]
    NonzeroDiagonal { line: usize, row: usize },
    #[error("line {line}: `{token}` in row {row}, column {col} is not a weight (integer, p/q, or inf)")]
    BadWeight { line: usize, row: usize, col: usize, token: String },
    #[error("missing row {row}: file ends after line {line}")]
    MissingRow { line: usize, row: usize },
    #[error("line {line}: unexpected content after the matrix")]
    TrailingContent { line: usize },
    #[error("empty input")]
    EmptyInput,
}

/// A loop-free digraph on vertices `1..n` stored as a dense 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, GraphError> {
        let n = rows.len();
        if n < MIN_VERTICES {
            return Err(GraphError::TooSmall(n));
        }
        let mut adj = vec![false; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::RaggedRow { row: i + 1, got: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 if i == j => return Err(GraphError::NonzeroDiagonal(i + 1)),
                    1 => adj[i * n + j] = true,
                    _ => return Err(GraphError::NotBinary { row: i + 1, col: j + 1 }),
                }
            }
        }
        Ok(Digraph { n, adj })
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n < MIN_VERTICES {
            return Err(GraphError::TooSmall(n));
        }
        Ok(Digraph { n, adj: vec![false; n * n] })
    }

    /// All off-diagonal arcs present.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Digraph::empty(n)?;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.adj[i * n + j] = true;
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.adj[from * self.n + to]
    }

    /// Sets the presence of an off-diagonal arc. Panics on a loop.
    pub fn set_arc(&mut self, from: usize, to: usize, present: bool) {
        assert_ne!(from, to, "loops are not allowed");
        self.adj[from * self.n + to] = present;
    }

    pub fn without_arc(&self, from: usize, to: usize) -> Digraph {
        let mut g = self.clone();
        g.set_arc(from, to, false);
        g
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.has_arc(i, j))
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().filter(|&&a| a).count()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&j| self.has_arc(v, j)).count()
    }

    /// Canonical text form: header line with `n`, then `n` rows of 0/1.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.n.to_string());
        out.push('\n');
        for i in 0..self.n {
            let row: Vec<&str> =
                (0..self.n).map(|j| if self.has_arc(i, j) { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = data_lines(text);
        let (header_line, header) = lines.next().ok_or(ParseError::EmptyInput)?;
        let n: usize = header.trim().parse().map_err(|_| ParseError::MalformedHeader {
            line: header_line,
            token: header.trim().to_string(),
        })?;
        if n < MIN_VERTICES {
            return Err(ParseError::TooSmall { line: header_line, n });
        }
        let mut adj = vec![false; n * n];
        let mut last_line = header_line;
        for row in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or(ParseError::MissingRow { line: last_line, row: row + 1 })?;
            last_line = line_no;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != n {
                return Err(ParseError::WrongEntryCount {
                    line: line_no,
                    row: row + 1,
                    expected: n,
                    got: tokens.len(),
                });
            }
            for (col, token) in tokens.iter().enumerate() {
                match *token {
                    "0" => {}
                    "1" if row == col => {
                        return Err(ParseError::NonzeroDiagonal { line: line_no, row: row + 1 })
                    }
                    "1" => adj[row * n + col] = true,
                    _ => {
                        return Err(ParseError::NotBinary {
                            line: line_no,
                            row: row + 1,
                            col: col + 1,
                            token: token.to_string(),
                        })
                    }
                }
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(ParseError::TrailingContent { line: line_no });
        }
        Ok(Digraph { n, adj })
    }

    /// Hex SHA-256 of the domain-tagged canonical serialization: stable
    /// across runs and platforms, distinct matrices collide only with
    /// cryptographic improbability.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"hamlp-digraph-v1\n");
        hasher.update(self.to_text().as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Non-comment, non-blank lines with their 1-based file line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line))
        .filter(|(_, line)| {
            let t = line.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

/// The fixed circular-shift pattern: arc `i -> i+1` for each vertex and the
/// closing arc `n -> 1`. Exactly one 1 per row and per column.
pub fn standard_cycle(n: usize) -> Result<Digraph, GraphError> {
    let mut g = Digraph::empty(n)?;
    for i in 0..n {
        g.set_arc(i, (i + 1) % n, true);
    }
    Ok(g)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermutationError {
    #[error("mapping of length {0} is below the minimum of 2")]
    TooSmall(usize),
    #[error("entry {value} at position {position} is out of range 1..={n}")]
    OutOfRange { position: usize, value: usize, n: usize },
    #[error("value {0} appears more than once: not a bijection")]
    Duplicate(usize),
}

/// A bijection `position -> vertex` on `{1..n}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, PermutationError> {
        let n = map.len();
        if n < MIN_VERTICES {
            return Err(PermutationError::TooSmall(n));
        }
        let mut seen = vec![false; n];
        for (pos, &v) in map.iter().enumerate() {
            if v >= n {
                return Err(PermutationError::OutOfRange { position: pos + 1, value: v + 1, n });
            }
            if seen[v] {
                return Err(PermutationError::Duplicate(v + 1));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn from_one_based(map: &[usize]) -> Result<Self, PermutationError> {
        let zero_based: Vec<usize> = map.iter().map(|&v| v.wrapping_sub(1)).collect();
        Permutation::new(zero_based)
    }

    pub fn identity(n: usize) -> Result<Self, PermutationError> {
        Permutation::new((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// Vertex assigned to `position` (0-based).
    pub fn apply(&self, position: usize) -> usize {
        self.map[position]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }

    /// All permutations of size `n` in lexicographic order of their mapping.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == n {
                out.push(Permutation { map: current.clone() });
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    current.push(v);
                    rec(n, current, used, out);
                    current.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.to_one_based().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", labels.join(" "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("not a Hamiltonian cycle of the digraph: missing arc ({0}, {1})")]
    MissingArc(usize, usize),
    #[error("permutation size {perm} does not match digraph size {graph}")]
    SizeMismatch { perm: usize, graph: usize },
}

/// An oriented vertex cycle stored in canonical rotation: the sequence
/// starts at its smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCycle {
    vertices: Vec<usize>,
}

impl CanonicalCycle {
    /// Rotates `sequence` so it starts at its smallest element.
    pub fn from_sequence(sequence: &[usize]) -> CanonicalCycle {
        let start = sequence
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(idx, _)| idx)
            .unwrap_or(0);
        let mut vertices = Vec::with_capacity(sequence.len());
        vertices.extend_from_slice(&sequence[start..]);
        vertices.extend_from_slice(&sequence[..start]);
        CanonicalCycle { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.vertices.iter().map(|&v| v + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Exact total weight of the closed tour.
    pub fn tour_weight(&self, w: &WeightMatrix) -> ExtRational {
        let mut total = ExtRational::zero();
        for k in 0..self.vertices.len() {
            let from = self.vertices[k];
            let to = self.vertices[(k + 1) % self.vertices.len()];
            total = total.add(w.get(from, to));
        }
        total
    }
}

impl fmt::Display for CanonicalCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.to_one_based().iter().map(|v| v.to_string()).collect();
        write!(f, "{}", labels.join(","))
    }
}

/// The tour `p(1) -> p(2) -> ... -> p(n) -> p(1)`, canonically rotated.
/// Fails on the first consecutive pair that is not an arc of `g`.
pub fn permutation_to_cycle(p: &Permutation, g: &Digraph) -> Result<CanonicalCycle, CycleError> {
    if p.n() != g.n() {
        return Err(CycleError::SizeMismatch { perm: p.n(), graph: g.n() });
    }
    let n = g.n();
    for k in 0..n {
        let from = p.apply(k);
        let to = p.apply((k + 1) % n);
        if !g.has_arc(from, to) {
            return Err(CycleError::MissingArc(from + 1, to + 1));
        }
    }
    Ok(CanonicalCycle::from_sequence(p.mapping()))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight at ({from}, {to}) is finite but the digraph has no such arc")]
    FiniteOnMissingArc { from: usize, to: usize },
    #[error("weight at ({from}, {to}) is inf but the digraph has that arc")]
    InfiniteOnArc { from: usize, to: usize },
    #[error("weight matrix size {weights} does not match digraph size {graph}")]
    SizeMismatch { weights: usize, graph: usize },
}

/// Arc weights on the extended line; `inf` marks a missing arc. Negative
/// finite weights are allowed. The diagonal is unused and pinned to `inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<ExtRational>,
}

impl WeightMatrix {
    pub fn new(n: usize, entries: Vec<ExtRational>) -> Result<Self, GraphError> {
        if n < MIN_VERTICES {
            return Err(GraphError::TooSmall(n));
        }
        assert_eq!(entries.len(), n * n, "weight matrix must be n*n");
        let mut w = entries;
        for i in 0..n {
            w[i * n + i] = ExtRational::Infinite;
        }
        Ok(WeightMatrix { n, w })
    }

    /// Weight 1 on every arc of `g`, `inf` elsewhere.
    pub fn unit_for(g: &Digraph) -> WeightMatrix {
        let n = g.n();
        let mut w = vec![ExtRational::Infinite; n * n];
        for (i, j) in g.arcs() {
            w[i * n + j] = ExtRational::Finite(crate::rational::rat_int(1));
        }
        WeightMatrix { n, w }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> &ExtRational {
        &self.w[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, value: ExtRational) {
        assert_ne!(from, to, "diagonal weights are unused");
        self.w[from * self.n + to] = value;
    }

    pub fn without_arc(&self, from: usize, to: usize) -> WeightMatrix {
        let mut w = self.clone();
        w.set(from, to, ExtRational::Infinite);
        w
    }

    /// Finite exactly on arcs of `g`.
    pub fn check_consistent(&self, g: &Digraph) -> Result<(), WeightError> {
        if self.n != g.n() {
            return Err(WeightError::SizeMismatch { weights: self.n, graph: g.n() });
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let finite = self.get(i, j).is_finite();
                if finite && !g.has_arc(i, j) {
                    return Err(WeightError::FiniteOnMissingArc { from: i + 1, to: j + 1 });
                }
                if !finite && g.has_arc(i, j) {
                    return Err(WeightError::InfiniteOnArc { from: i + 1, to: j + 1 });
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.n.to_string());
        out.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Same layout as the digraph format with tokens integer, `p/q`, or `inf`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = data_lines(text);
        let (header_line, header) = lines.next().ok_or(ParseError::EmptyInput)?;
        let n: usize = header.trim().parse().map_err(|_| ParseError::MalformedHeader {
            line: header_line,
            token: header.trim().to_string(),
        })?;
        if n < MIN_VERTICES {
            return Err(ParseError::TooSmall { line: header_line, n });
        }
        let mut w = vec![ExtRational::Infinite; n * n];
        let mut last_line = header_line;
        for row in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or(ParseError::MissingRow { line: last_line, row: row + 1 })?;
            last_line = line_no;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != n {
                return Err(ParseError::WrongEntryCount {
                    line: line_no,
                    row: row + 1,
                    expected: n,
                    got: tokens.len(),
                });
            }
            for (col, token) in tokens.iter().enumerate() {
                let value = ExtRational::parse(token).map_err(|_| ParseError::BadWeight {
                    line: line_no,
                    row: row + 1,
                    col: col + 1,
                    token: token.to_string(),
                })?;
                if row != col {
                    w[row * n + col] = value;
                }
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(ParseError::TrailingContent { line: line_no });
        }
        Ok(WeightMatrix { n, w })
    }
}
