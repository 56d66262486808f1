//! Exact toolkit for a linear-programming encoding of directed Hamiltonian
//! cycles and asymmetric TSP.
//!
//! The pipeline: a digraph is encoded as a compatibility matrix
//! ([`compat`]), whose zero entries cut a fixed polytope over relabeling
//! variables ([`polytope`]); an exact rational simplex solver decides the
//! resulting systems with machine-checkable certificates ([`solver`]);
//! feasible points are decomposed over permutation guesses ([`decompose`]);
//! and every linear-programming verdict is compared against brute-force
//! ground truth ([`oracle`]) by the verification harness ([`harness`]),
//! which reports per-claim verdicts with witnesses instead of assuming any
//! direction of the encoding's central claims.

pub mod compat;
pub mod decompose;
pub mod graph;
pub mod guard;
pub mod harness;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod solver;
