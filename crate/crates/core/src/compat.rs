//! Compatibility boxes and the n²×n² compatibility matrix.
//!
//! Box `(i, j)` records, per vertex pair `(μ, ν)`, whether that pair can be
//! relabeled onto positions `(i, j)` of the fixed circular pattern while
//! respecting adjacency. Entry `(μ, ν)` of box `(i, j)` is 1 iff
//! `s[i][j] <= g[μ][ν]` and `s[j][i] <= g[ν][μ]`, masked so diagonal boxes
//! keep only `μ = ν` and off-diagonal boxes only `μ != ν`. Both adjacency
//! conditions are spelled out here on purpose: the second is the first under
//! the swap `(i,j,μ,ν) -> (j,i,ν,μ)`, which is what makes the matrix
//! block-transpose symmetric.

use thiserror::Error;

use crate::graph::{standard_cycle, Digraph, Permutation};
use crate::guard::guards_overridden;

/// Hard ceiling for full grid enumeration without an explicit limit.
pub const GRID_ENUMERATION_GUARD: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompatError {
    #[error("box index ({i}, {j}) out of range 1..={n}")]
    BoxIndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("permutation size {perm} does not match compatibility matrix size {compat}")]
    SizeMismatch { perm: usize, compat: usize },
    #[error("grid enumeration needs n <= {guard} unless a limit is given; got n = {n}")]
    GuardExceeded { n: usize, guard: usize },
    #[error("pattern digraph size {pattern} does not match digraph size {graph}")]
    PatternMismatch { pattern: usize, graph: usize },
}

/// Dense 0/1 compatibility matrix, indexed by `(i, j, mu, nu)` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl CompatMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize, mu: usize, nu: usize) -> bool {
        let n = self.n;
        self.bits[((i * n + j) * n + mu) * n + nu]
    }

    /// One box as an n×n 0/1 matrix.
    pub fn box_matrix(&self, i: usize, j: usize) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|mu| (0..self.n).map(|nu| self.entry(i, j, mu, nu) as u8).collect())
            .collect()
    }

    /// Textual block dump: boxes separated by a blank column, block rows by
    /// a blank line.
    pub fn render_blocks(&self) -> String {
        let n = self.n;
        let mut out = String::new();
        for i in 0..n {
            for mu in 0..n {
                let mut cells: Vec<String> = Vec::with_capacity(n);
                for j in 0..n {
                    let row: Vec<&str> =
                        (0..n).map(|nu| if self.entry(i, j, mu, nu) { "1" } else { "0" }).collect();
                    cells.push(row.join(" "));
                }
                out.push_str(&cells.join("  "));
                out.push('\n');
            }
            if i + 1 < n {
                out.push('\n');
            }
        }
        out
    }
}

/// Single compatibility box for positions `(i, j)` against pattern `s`.
pub fn build_box(
    g: &Digraph,
    s: &Digraph,
    i: usize,
    j: usize,
) -> Result<Vec<Vec<u8>>, CompatError> {
    let n = g.n();
    if s.n() != n {
        return Err(CompatError::PatternMismatch { pattern: s.n(), graph: n });
    }
    if i >= n || j >= n {
        return Err(CompatError::BoxIndexOutOfRange { i: i + 1, j: j + 1, n });
    }
    let mut out = vec![vec![0u8; n]; n];
    for mu in 0..n {
        for nu in 0..n {
            out[mu][nu] = box_entry(g, s, i, j, mu, nu) as u8;
        }
    }
    Ok(out)
}

#[inline]
fn box_entry(g: &Digraph, s: &Digraph, i: usize, j: usize, mu: usize, nu: usize) -> bool {
    // Positions agree exactly when vertices do: diagonal boxes are identity
    // patterned, off-diagonal boxes have a zero diagonal.
    if (i == j) != (mu == nu) {
        return false;
    }
    let forward = !s.has_arc(i, j) || g.has_arc(mu, nu);
    let backward = !s.has_arc(j, i) || g.has_arc(nu, mu);
    forward && backward
}

/// Full compatibility matrix of `g` against the fixed circular pattern.
pub fn build_compat_matrix(g: &Digraph) -> CompatMatrix {
    let n = g.n();
    let s = standard_cycle(n).expect("digraph invariant guarantees n >= 2");
    let mut bits = vec![false; n * n * n * n];
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    bits[idx] = box_entry(g, &s, i, j, mu, nu);
                    idx += 1;
                }
            }
        }
    }
    CompatMatrix { n, bits }
}

/// True iff every off-diagonal box holds a 1 at `(p(i), p(j))`.
pub fn check_solution_grid(p: &Permutation, c: &CompatMatrix) -> Result<bool, CompatError> {
    if p.n() != c.n() {
        return Err(CompatError::SizeMismatch { perm: p.n(), compat: c.n() });
    }
    let n = c.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && !c.entry(i, j, p.apply(i), p.apply(j)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every permutation passing [`check_solution_grid`], in lexicographic order
/// of the mapping, found by backtracking with per-position pruning. With a
/// limit the enumeration stops early; without one `n` is guarded.
pub fn enumerate_solution_grids(
    c: &CompatMatrix,
    limit: Option<usize>,
) -> Result<Vec<Permutation>, CompatError> {
    let n = c.n();
    if limit.is_none() && n > GRID_ENUMERATION_GUARD && !guards_overridden() {
        return Err(CompatError::GuardExceeded { n, guard: GRID_ENUMERATION_GUARD });
    }
    let cap = limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let mut assignment = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search_grids(c, &mut assignment, &mut used, cap, &mut out);
    Ok(out)
}

fn search_grids(
    c: &CompatMatrix,
    assignment: &mut Vec<usize>,
    used: &mut [bool],
    cap: usize,
    out: &mut Vec<Permutation>,
) {
    if out.len() >= cap {
        return;
    }
    let n = c.n();
    let k = assignment.len();
    if k == n {
        let p = Permutation::new(assignment.clone()).expect("search builds bijections");
        out.push(p);
        return;
    }
    'candidates: for v in 0..n {
        if used[v] {
            continue;
        }
        for (i, &w) in assignment.iter().enumerate() {
            // Box symmetry makes the (k, i) check redundant.
            if !c.entry(i, k, w, v) {
                continue 'candidates;
            }
        }
        used[v] = true;
        assignment.push(v);
        search_grids(c, assignment, used, cap, out);
        assignment.pop();
        used[v] = false;
        if out.len() >= cap {
            return;
        }
    }
}

/// Quadruples `(i, j, mu, nu)` of zero entries in off-diagonal boxes with
/// `mu != nu` — the coordinates fixed to zero by the cut equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroIndexSet {
    n: usize,
    quads: Vec<(usize, usize, usize, usize)>,
}

impl ZeroIndexSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quads(&self) -> &[(usize, usize, usize, usize)] {
        &self.quads
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }
}

/// Scans off-diagonal boxes for zeros. The output is closed under the
/// orientation swap `(i,j,mu,nu) <-> (j,i,nu,mu)` because the matrix is
/// block-transpose symmetric.
pub fn zero_indices(c: &CompatMatrix) -> ZeroIndexSet {
    let n = c.n();
    let mut quads = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for mu in 0..n {
                for nu in 0..n {
                    if mu != nu && !c.entry(i, j, mu, nu) {
                        quads.push((i, j, mu, nu));
                    }
                }
            }
        }
    }
    ZeroIndexSet { n, quads }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::permutation_to_cycle;
    use proptest::prelude::*;

    fn three_cycle() -> Digraph {
        Digraph::parse("3\n0 1 0\n0 0 1\n1 0 0\n").unwrap()
    }

    fn identity_matrix(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|r| (0..n).map(|c| (r == c) as u8).collect()).collect()
    }

    fn ones_minus_identity(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|r| (0..n).map(|c| (r != c) as u8).collect()).collect()
    }

    #[test]
    fn diagonal_boxes_are_identity() {
        for g in [Digraph::complete(4).unwrap(), three_cycle(), Digraph::empty(3).unwrap()] {
            let s = standard_cycle(g.n()).unwrap();
            for i in 0..g.n() {
                assert_eq!(build_box(&g, &s, i, i).unwrap(), identity_matrix(g.n()));
            }
        }
    }

    #[test]
    fn complete_digraph_adjacent_boxes_are_all_ones_minus_identity() {
        let g = Digraph::complete(4).unwrap();
        let s = standard_cycle(4).unwrap();
        assert_eq!(build_box(&g, &s, 0, 1).unwrap(), ones_minus_identity(4));
        assert_eq!(build_box(&g, &s, 2, 0).unwrap(), ones_minus_identity(4));
    }

    #[test]
    fn adjacent_box_of_three_cycle_equals_its_adjacency_matrix() {
        let g = three_cycle();
        let s = standard_cycle(3).unwrap();
        let expected: Vec<Vec<u8>> =
            (0..3).map(|r| (0..3).map(|c| g.has_arc(r, c) as u8).collect()).collect();
        assert_eq!(build_box(&g, &s, 0, 1).unwrap(), expected);
    }

    #[test]
    fn box_index_out_of_range() {
        let g = three_cycle();
        let s = standard_cycle(3).unwrap();
        assert!(matches!(
            build_box(&g, &s, 0, 3),
            Err(CompatError::BoxIndexOutOfRange { .. })
        ));
    }

    fn assert_box_identities(c: &CompatMatrix) {
        let n = c.n();
        for i in 0..n {
            for j in 0..n {
                for mu in 0..n {
                    for nu in 0..n {
                        // block-transpose symmetry
                        assert_eq!(c.entry(i, j, mu, nu), c.entry(j, i, nu, mu));
                    }
                }
                if i == j {
                    for mu in 0..n {
                        for nu in 0..n {
                            assert_eq!(c.entry(i, i, mu, nu), mu == nu);
                        }
                    }
                } else {
                    for mu in 0..n {
                        assert!(!c.entry(i, j, mu, mu));
                    }
                }
            }
        }
    }

    #[test]
    fn compat_identities_on_fixed_instances() {
        for g in [
            three_cycle(),
            Digraph::complete(3).unwrap(),
            Digraph::complete(5).unwrap(),
            Digraph::empty(4).unwrap(),
            standard_cycle(6).unwrap(),
        ] {
            assert_box_identities(&build_compat_matrix(&g));
        }
    }

    #[test]
    fn complete_digraph_block_pattern() {
        // Blocks: identity on the diagonal, adjacency on pattern arcs,
        // transposed adjacency opposite them, all-ones-minus-identity
        // elsewhere. For a complete digraph the last three coincide.
        let g = Digraph::complete(3).unwrap();
        let c = build_compat_matrix(&g);
        for i in 0..3 {
            for j in 0..3 {
                let expected =
                    if i == j { identity_matrix(3) } else { ones_minus_identity(3) };
                assert_eq!(c.box_matrix(i, j), expected);
            }
        }
    }

    #[test]
    fn empty_digraph_pattern_adjacent_blocks_vanish() {
        let g = Digraph::empty(3).unwrap();
        let s = standard_cycle(3).unwrap();
        let c = build_compat_matrix(&g);
        for i in 0..3 {
            for j in 0..3 {
                if s.has_arc(i, j) || s.has_arc(j, i) {
                    assert_eq!(c.box_matrix(i, j), vec![vec![0; 3]; 3]);
                }
            }
        }
    }

    #[test]
    fn grid_check_on_standard_cycle_and_empty_digraph() {
        let n = 5;
        let c = build_compat_matrix(&standard_cycle(n).unwrap());
        assert!(check_solution_grid(&Permutation::identity(n).unwrap(), &c).unwrap());
        let empty = build_compat_matrix(&Digraph::empty(n).unwrap());
        for p in Permutation::all(4) {
            assert!(matches!(
                check_solution_grid(&p, &empty),
                Err(CompatError::SizeMismatch { .. })
            ));
        }
        assert!(!check_solution_grid(&Permutation::identity(n).unwrap(), &empty).unwrap());
    }

    #[test]
    fn three_cycle_grids_are_exactly_the_rotations() {
        let g = three_cycle();
        let c = build_compat_matrix(&g);
        let mut passing = Vec::new();
        for p in Permutation::all(3) {
            let expected = permutation_to_cycle(&p, &g).is_ok();
            let got = check_solution_grid(&p, &c).unwrap();
            assert_eq!(got, expected, "grid test must match direct arc lookup for {p}");
            if got {
                passing.push(p.to_one_based());
            }
        }
        assert_eq!(passing, vec![vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]]);
    }

    #[test]
    fn enumeration_counts_on_reference_instances() {
        // Independently counted by testing every permutation's tour arcs.
        let brute = |g: &Digraph| {
            Permutation::all(g.n())
                .into_iter()
                .filter(|p| permutation_to_cycle(p, g).is_ok())
                .count()
        };

        let three = three_cycle();
        let grids = enumerate_solution_grids(&build_compat_matrix(&three), None).unwrap();
        assert_eq!(grids.len(), brute(&three));
        assert_eq!(grids.len(), 3);

        let complete = Digraph::complete(4).unwrap();
        let grids = enumerate_solution_grids(&build_compat_matrix(&complete), None).unwrap();
        assert_eq!(grids.len(), brute(&complete));
        assert_eq!(grids.len(), 24);

        let acyclic = Digraph::parse("3\n0 1 1\n0 0 1\n0 0 0\n").unwrap();
        let grids = enumerate_solution_grids(&build_compat_matrix(&acyclic), None).unwrap();
        assert!(grids.is_empty());
    }

    #[test]
    fn enumeration_is_lexicographic_and_respects_limits() {
        let c = build_compat_matrix(&Digraph::complete(4).unwrap());
        let grids = enumerate_solution_grids(&c, None).unwrap();
        let mut sorted = grids.clone();
        sorted.sort();
        assert_eq!(grids, sorted);
        let capped = enumerate_solution_grids(&c, Some(5)).unwrap();
        assert_eq!(capped.len(), 5);
        assert_eq!(capped[..], grids[..5]);
    }

    #[test]
    fn zero_indices_on_reference_instances() {
        let complete = build_compat_matrix(&Digraph::complete(3).unwrap());
        assert!(zero_indices(&complete).is_empty());

        // Empty digraph: every off-diagonal slot of every pattern-adjacent
        // box; at n = 3 that is all 6 boxes x 6 slots.
        let empty = build_compat_matrix(&Digraph::empty(3).unwrap());
        assert_eq!(zero_indices(&empty).len(), 36);

        // Directed 3-cycle, counted by an independent scan of the defining
        // conditions rather than through CompatMatrix.
        let g = three_cycle();
        let s = standard_cycle(3).unwrap();
        let mut expected = 0usize;
        for i in 0..3 {
            for j in 0..3 {
                for mu in 0..3 {
                    for nu in 0..3 {
                        if i != j && mu != nu {
                            let ok = (!s.has_arc(i, j) || g.has_arc(mu, nu))
                                && (!s.has_arc(j, i) || g.has_arc(nu, mu));
                            if !ok {
                                expected += 1;
                            }
                        }
                    }
                }
            }
        }
        let z = zero_indices(&build_compat_matrix(&g));
        assert_eq!(z.len(), expected);
        assert_eq!(z.len(), 18);
    }

    #[test]
    fn zero_index_set_is_symmetry_closed_and_zero_valued() {
        for g in [three_cycle(), Digraph::empty(4).unwrap(), standard_cycle(5).unwrap()] {
            let c = build_compat_matrix(&g);
            let z = zero_indices(&c);
            let set: std::collections::HashSet<_> = z.quads().iter().copied().collect();
            for &(i, j, mu, nu) in z.quads() {
                assert!(!c.entry(i, j, mu, nu));
                assert!(set.contains(&(j, i, nu, mu)));
            }
        }
    }

    #[test]
    fn render_blocks_shape() {
        let c = build_compat_matrix(&three_cycle());
        let text = c.render_blocks();
        // 3 block rows of 3 lines each, separated by blank lines.
        assert_eq!(text.lines().count(), 3 * 3 + 2);
        assert!(text.lines().next().unwrap().contains("  "));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_compat_identities_hold(n in 2usize..6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = Digraph::empty(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen_bool(0.5) {
                        g.set_arc(i, j, true);
                    }
                }
            }
            assert_box_identities(&build_compat_matrix(&g));
        }

        #[test]
        fn prop_grid_check_matches_tour_arcs(n in 2usize..6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = Digraph::empty(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen_bool(0.5) {
                        g.set_arc(i, j, true);
                    }
                }
            }
            let c = build_compat_matrix(&g);
            for p in Permutation::all(n) {
                let grid = check_solution_grid(&p, &c).unwrap();
                let tour = permutation_to_cycle(&p, &g).is_ok();
                prop_assert_eq!(grid, tour);
            }
        }
    }
}
