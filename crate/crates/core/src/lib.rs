//! Exact D-ary Huffman coding and the maxima of the minimum expected
//! length function.
//!
//! The crate builds minimum-expected-length D-ary prefix codes with
//! the classic merge procedure, verifies the structural properties
//! that characterize Huffman trees, rearranges optimal trees into
//! Huffman form, and decides — in O(n), with arbitrary-precision
//! rational arithmetic throughout — whether a PMF maximizes the
//! minimum expected length function over distributions of its size.
//! A brute-force oracle (Kraft-feasible length-sequence search,
//! exhaustive tree and tie-break enumeration, exact simplex grid
//! sweeps) provides independent ground truth for all of it.

// Error variants carry exact rational witnesses; the size is the point.
#![allow(clippy::result_large_err)]

pub mod dot;
pub mod huffman;
pub mod lengths;
pub mod maxima;
pub mod oracle;
pub mod pmf;
pub mod properties;
pub mod rational;
pub mod tree;

pub use huffman::{first_merge_size, huffman_tree, MergeStep, MergeTrace};
pub use lengths::LengthSequence;
pub use maxima::{
    build_uniform_tree, is_point_of_maximum, lowest_d_sum_criterion, min_expected_length,
    uniform_length_sequence, MaximaBranch, MaximaError, MaximaVerdict, UniformTreeShape,
};
pub use oracle::{
    enumerate_huffman_runs, enumerate_trees, oracle_min_expected_length, simplex_grid,
    sweep_simplex, OracleError, SimplexGrid, SweepReport,
};
pub use pmf::{majorizes, normalize, parse_pmf_text, MajorizationResult, Pmf, PmfError};
pub use properties::{canonicalize_to_huffman, verify_huffman, PropertiesError, PropertyReport};
pub use rational::{decimal_approx, format_rational, parse_rational, ratio, Rational};
pub use tree::{CodeTree, Node, NodeId, NodeSpec, TreeError};
