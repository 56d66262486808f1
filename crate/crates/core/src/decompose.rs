//! Convex decomposition of hull-feasible points over permutation guesses.
//!
//! Per-block machinery: for fixed `(j, nu)` the relabeling cells form an
//! `(n-1) x (n-1)` matrix whose row and column sums all equal `y(j, nu)`; a
//! scaled doubly stochastic matrix that Birkhoff-von Neumann decomposes into
//! permutation matrices. The per-block decompositions do not by themselves
//! align into global guesses, so the global procedure is greedy peeling:
//! find a permutation with strictly positive support everywhere, subtract
//! the largest multiple of its guess that keeps the residual nonnegative,
//! repeat. Success yields an exactly re-summable combination; failure yields
//! a residual on which the same search provably finds nothing, kept as a
//! machine-checkable witness.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::Permutation;
use crate::polytope::{
    build_hull_system, evaluate_point, guess_point, RationalPoint, VarIndex,
};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("point is not hull-feasible: {0}")]
    NotHullFeasible(String),
    #[error("block ({j}, {nu}) violates the equal-sum invariant")]
    BlockSumMismatch { j: usize, nu: usize },
    #[error("block index ({j}, {nu}) out of range 1..={n}")]
    BlockIndexOutOfRange { j: usize, nu: usize, n: usize },
    #[error("block entries must be nonnegative")]
    NegativeEntry,
    #[error("decomposition invariant broken mid-run: {0}")]
    Internal(String),
}

/// The `(n-1) x (n-1)` slice of a point at block `(j, nu)`: entry `(r, c)`
/// holds `x(col_positions[c], j, row_vertices[r], nu)`. Every row and column
/// sums to `scale = y(j, nu)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticBlock {
    pub j: usize,
    pub nu: usize,
    pub scale: Rational,
    pub size: usize,
    /// Row-major `size * size` entries.
    pub entries: Vec<Rational>,
    /// Vertex label per row: all `mu != nu` ascending.
    pub row_vertices: Vec<usize>,
    /// Position label per column: all `i != j` ascending.
    pub col_positions: Vec<usize>,
}

impl StochasticBlock {
    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.size + col]
    }

    fn validate(&self) -> Result<(), DecomposeError> {
        if self.entries.iter().any(|e| e.is_negative()) {
            return Err(DecomposeError::NegativeEntry);
        }
        for r in 0..self.size {
            let row_sum: Rational = (0..self.size).map(|c| self.entry(r, c).clone()).sum();
            if row_sum != self.scale {
                return Err(DecomposeError::BlockSumMismatch { j: self.j, nu: self.nu });
            }
        }
        for c in 0..self.size {
            let col_sum: Rational = (0..self.size).map(|r| self.entry(r, c).clone()).sum();
            if col_sum != self.scale {
                return Err(DecomposeError::BlockSumMismatch { j: self.j, nu: self.nu });
            }
        }
        Ok(())
    }
}

/// Extracts block `(j, nu)` and checks its equal-sum invariant, which is
/// exactly the hull constraint set restricted to that block. A zero scale
/// yields the zero block.
pub fn extract_block(
    pt: &RationalPoint,
    j: usize,
    nu: usize,
) -> Result<StochasticBlock, DecomposeError> {
    let n = pt.n();
    if j >= n || nu >= n {
        return Err(DecomposeError::BlockIndexOutOfRange { j: j + 1, nu: nu + 1, n });
    }
    let scale = pt.get(&VarIndex::y(j, nu));
    let row_vertices: Vec<usize> = (0..n).filter(|&mu| mu != nu).collect();
    let col_positions: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let size = n - 1;
    let mut entries = Vec::with_capacity(size * size);
    for &mu in &row_vertices {
        for &i in &col_positions {
            entries.push(pt.get(&VarIndex::x(i, j, mu, nu)));
        }
    }
    let block =
        StochasticBlock { j, nu, scale, size, entries, row_vertices, col_positions };
    block.validate().map_err(|e| match e {
        DecomposeError::BlockSumMismatch { .. } | DecomposeError::NegativeEntry => {
            DecomposeError::NotHullFeasible(format!(
                "block ({}, {}) sums do not match y({}, {})",
                j + 1,
                nu + 1,
                j + 1,
                nu + 1
            ))
        }
        other => other,
    })?;
    Ok(block)
}

/// Birkhoff-von Neumann: writes the block as a sum of scaled permutation
/// matrices (row -> column maps on local indices). Weights are positive, sum
/// to `scale`, and the term count is at most `(m-1)^2 + 1`.
pub fn birkhoff_decompose(
    block: &StochasticBlock,
) -> Result<Vec<(Rational, Vec<usize>)>, DecomposeError> {
    block.validate()?;
    let m = block.size;
    let mut remaining = block.entries.clone();
    let mut terms: Vec<(Rational, Vec<usize>)> = Vec::new();
    let term_limit = (m - 1) * (m - 1) + 1;
    while remaining.iter().any(|e| !e.is_zero()) {
        let matching = positive_matching(&remaining, m).ok_or_else(|| {
            DecomposeError::Internal(
                "support of a doubly stochastic block lost its perfect matching".to_string(),
            )
        })?;
        let weight = matching
            .iter()
            .enumerate()
            .map(|(r, &c)| remaining[r * m + c].clone())
            .min()
            .expect("matching covers every row");
        if !weight.is_positive() {
            return Err(DecomposeError::Internal("zero peel weight".to_string()));
        }
        for (r, &c) in matching.iter().enumerate() {
            let cell = &mut remaining[r * m + c];
            *cell -= &weight;
        }
        terms.push((weight, matching));
        if terms.len() > term_limit {
            return Err(DecomposeError::Internal(format!(
                "term count exceeded the bound {term_limit}"
            )));
        }
    }
    Ok(terms)
}

/// Lexicographically-first perfect matching on the positive support,
/// via augmenting paths.
fn positive_matching(entries: &[Rational], m: usize) -> Option<Vec<usize>> {
    let mut row_of_col: Vec<Option<usize>> = vec![None; m];
    for row in 0..m {
        let mut visited = vec![false; m];
        if !augment(entries, m, row, &mut visited, &mut row_of_col) {
            return None;
        }
    }
    let mut matching = vec![0usize; m];
    for (col, row) in row_of_col.iter().enumerate() {
        matching[row.expect("all rows matched")] = col;
    }
    Some(matching)
}

fn augment(
    entries: &[Rational],
    m: usize,
    row: usize,
    visited: &mut [bool],
    row_of_col: &mut [Option<usize>],
) -> bool {
    for col in 0..m {
        if visited[col] || entries[row * m + col].is_zero() {
            continue;
        }
        visited[col] = true;
        let free = match row_of_col[col] {
            None => true,
            Some(other) => augment(entries, m, other, visited, row_of_col),
        };
        if free {
            row_of_col[col] = Some(row);
            return true;
        }
    }
    false
}

/// Searches for a permutation whose guess has strictly positive support in
/// `pt`: `x(i, j, p(i), p(j)) > 0` for every position pair. Lexicographic
/// backtracking with pruning on the first empty candidate set; `None` means
/// the exhaustive search closed without a full assignment.
pub fn peel_guess(pt: &RationalPoint) -> Option<Permutation> {
    search_support(pt).found
}

struct SupportSearch {
    found: Option<Permutation>,
    deepest: usize,
    deepest_prefix: Vec<usize>,
}

fn search_support(pt: &RationalPoint) -> SupportSearch {
    let n = pt.n();
    let mut state = SupportSearch { found: None, deepest: 0, deepest_prefix: Vec::new() };
    let mut assignment: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        pt: &RationalPoint,
        n: usize,
        assignment: &mut Vec<usize>,
        used: &mut [bool],
        state: &mut SupportSearch,
    ) -> bool {
        let k = assignment.len();
        if k > state.deepest {
            state.deepest = k;
            state.deepest_prefix = assignment.clone();
        }
        if k == n {
            state.found =
                Some(Permutation::new(assignment.clone()).expect("search builds bijections"));
            return true;
        }
        'candidates: for v in 0..n {
            if used[v] {
                continue;
            }
            for (i, &w) in assignment.iter().enumerate() {
                if pt.get(&VarIndex::x(i, k, w, v)).is_zero() {
                    continue 'candidates;
                }
            }
            used[v] = true;
            assignment.push(v);
            if rec(pt, n, assignment, used, state) {
                return true;
            }
            assignment.pop();
            used[v] = false;
        }
        false
    }
    rec(pt, n, &mut assignment, &mut used, &mut state);
    state
}

/// A convex combination of guesses: positive weights summing to one whose
/// weighted guess points re-sum exactly to the decomposed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexCombination {
    pub terms: Vec<(Rational, Permutation)>,
}

/// Evidence that greedy peeling stopped: a nonzero residual on which the
/// support search finds no permutation, plus the deepest partial assignment
/// the search reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub residual: RationalPoint,
    /// Position (0-based) that could not be filled from the deepest prefix.
    pub dead_end_position: usize,
    pub dead_end_prefix: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionOutcome {
    Combination(ConvexCombination),
    Witness(DecompositionWitness),
}

/// Verifies hull feasibility, then greedily peels guesses. Each peel zeroes
/// at least one coordinate, so the loop ends within the support size.
pub fn decompose_point(pt: &RationalPoint) -> Result<DecompositionOutcome, DecomposeError> {
    let hull = build_hull_system(pt.n())
        .map_err(|e| DecomposeError::NotHullFeasible(e.to_string()))?;
    let report = evaluate_point(&hull, pt)
        .map_err(|e| DecomposeError::NotHullFeasible(e.to_string()))?;
    if !report.feasible {
        return Err(DecomposeError::NotHullFeasible(format!(
            "{} nonzero residuals, {} negative values",
            report.nonzero_residuals.len(),
            report.negative_values.len()
        )));
    }
    decompose_point_trusted(pt)
}

/// Same as [`decompose_point`] but trusts the caller's feasibility check.
pub fn decompose_point_trusted(
    pt: &RationalPoint,
) -> Result<DecompositionOutcome, DecomposeError> {
    let n = pt.n();
    let mut residual = pt.clone();
    let mut terms: Vec<(Rational, Permutation)> = Vec::new();
    while !residual.is_zero() {
        let search = search_support(&residual);
        let Some(p) = search.found else {
            return Ok(DecompositionOutcome::Witness(DecompositionWitness {
                residual,
                dead_end_position: search.deepest,
                dead_end_prefix: search.deepest_prefix,
            }));
        };
        let mut weight: Option<Rational> = None;
        let guess = guess_point(&p);
        for (var, _) in guess.support() {
            let value = residual.get(var);
            if weight.as_ref().map(|w| value < *w).unwrap_or(true) {
                weight = Some(value);
            }
        }
        let weight = weight.expect("guess support is nonempty");
        if !weight.is_positive() {
            return Err(DecomposeError::Internal(
                "support permutation with a zero minimum".to_string(),
            ));
        }
        for (var, value) in guess.support() {
            let updated = residual.get(var) - &weight * value;
            if updated.is_negative() {
                return Err(DecomposeError::Internal(
                    "residual went negative during a peel".to_string(),
                ));
            }
            residual.set(*var, updated);
        }
        terms.push((weight, p));
        if terms.len() > n * n * (n - 1) * (n - 1) / 2 + 1 {
            return Err(DecomposeError::Internal("peel count exceeded bound".to_string()));
        }
    }
    let total: Rational = terms.iter().map(|(w, _)| w.clone()).sum();
    if !total.is_one() {
        return Err(DecomposeError::Internal(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(DecompositionOutcome::Combination(ConvexCombination { terms }))
}

/// Exact check: positive weights summing to one whose weighted guesses
/// re-sum to `pt`.
pub fn verify_combination(pt: &RationalPoint, combination: &ConvexCombination) -> bool {
    if combination.terms.is_empty() {
        return false;
    }
    let mut weight_total = Rational::zero();
    let mut sum = RationalPoint::zero(pt.n());
    for (weight, p) in &combination.terms {
        if !weight.is_positive() || p.n() != pt.n() {
            return false;
        }
        weight_total += weight;
        for (var, value) in guess_point(p).support() {
            let updated = sum.get(var) + weight * value;
            sum.set(*var, updated);
        }
    }
    weight_total.is_one() && sum == *pt
}

/// Re-checks a witness residual with the same backtracking search.
pub fn verify_witness(witness: &DecompositionWitness) -> bool {
    !witness.residual.is_zero() && peel_guess(&witness.residual).is_none()
}

/// Exhaustive confirmation for small sizes: every permutation misses the
/// residual's support somewhere. Independent of the backtracking search.
pub fn witness_holds_exhaustive(residual: &RationalPoint) -> bool {
    let n = residual.n();
    Permutation::all(n).iter().all(|p| {
        (0..n).any(|i| {
            (0..n).any(|j| {
                i != j && residual.get(&VarIndex::x(i, j, p.apply(i), p.apply(j))).is_zero()
            })
        })
    })
}
