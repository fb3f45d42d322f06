//! Classification of the PMFs that maximize the minimum expected
//! length function, and the optimal code for the uniform distribution.
//!
//! The decision is O(n) and never runs the merge procedure on its
//! input: when `n` is a power of `D`, a PMF is a point of maximum iff
//! the sum of its `D` smallest probabilities is at least its largest;
//! otherwise the uniform distribution is the unique point of maximum.
//! The attained value is computed (once, on the uniform distribution)
//! rather than tabulated, so the classifier stays consistent with the
//! engine.

use serde::Serialize;
use thiserror::Error;

use crate::huffman::huffman_tree;
use crate::lengths::LengthSequence;
use crate::pmf::Pmf;
use crate::rational::{power_exponent, Rational};
use crate::tree::{CodeTree, NodeSpec, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaximaError {
    #[error("NotAPowerOfD: n = {n} is not a power of {d}")]
    NotAPowerOfD { n: usize, d: usize },
}

/// The unique tree shape that is optimal for the uniform distribution:
/// the perfect `d`-ary tree of the given depth when `n` is a power of
/// `d`, otherwise the two-level completion with all leaves at `depth`
/// and `depth + 1`, internal nodes at `depth` rightmost, and only the
/// leftmost of them possibly deficient.
#[derive(Debug, Clone)]
pub struct UniformTreeShape {
    pub n: usize,
    pub arity: usize,
    /// `depth` = m with `d^m <= n < d^(m+1)`.
    pub depth: usize,
    /// Internal nodes at level `depth` (0 when `n` is a power of `d`).
    pub internal_at_depth: usize,
    /// Child count of the leftmost internal node at level `depth`.
    pub leftmost_children: Option<usize>,
    children: Vec<Vec<usize>>,
    /// Leaf node ids in left-to-right order, shallow level first.
    leaves: Vec<usize>,
}

impl UniformTreeShape {
    pub fn leaf_count(&self) -> usize {
        self.n
    }

    /// Sorted leaf depths of the shape.
    pub fn length_sequence(&self) -> LengthSequence {
        let mut depths = vec![0usize; self.children.len()];
        for (id, kids) in self.children.iter().enumerate() {
            for &k in kids {
                depths[k] = depths[id] + 1;
            }
        }
        LengthSequence::new(self.leaves.iter().map(|&id| depths[id]).collect())
    }

    /// Attaches `p` with probabilities non-decreasing left to right:
    /// the deepest leaves take the smallest probabilities, and within a
    /// level probabilities do not decrease rightwards.
    pub fn assign_sorted(&self, p: &Pmf) -> Result<CodeTree, TreeError> {
        if p.len() != self.n {
            return Err(TreeError::LeafCountMismatch {
                expected: p.len(),
                got: self.n,
            });
        }
        let mut specs: Vec<NodeSpec> = self
            .children
            .iter()
            .map(|kids| NodeSpec {
                children: kids.clone(),
                leaf_index: None,
            })
            .collect();
        let mut depths = vec![0usize; self.children.len()];
        for (id, kids) in self.children.iter().enumerate() {
            for &k in kids {
                depths[k] = depths[id] + 1;
            }
        }
        // Deepest level first, left-to-right within a level (stable
        // sort keeps the planar order); probabilities ascend along
        // this walk, so each level reads non-decreasing left to right.
        let mut ordered = self.leaves.clone();
        ordered.sort_by_key(|&id| std::cmp::Reverse(depths[id]));
        for (k, &leaf_id) in ordered.iter().enumerate() {
            specs[leaf_id].leaf_index = Some(self.n - 1 - k);
        }
        CodeTree::assemble(self.arity, &specs, p)
    }
}

/// Builds the optimal-for-uniform tree shape for `n` symbols, arity `d`.
pub fn build_uniform_tree(n: usize, d: usize) -> UniformTreeShape {
    assert!(n >= 2 && d >= 2);
    // depth m with d^m <= n < d^(m+1)
    let mut depth = 0usize;
    let mut full = 1usize;
    while full * d <= n {
        full *= d;
        depth += 1;
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0usize]; // level-by-level, left to right
    for _ in 0..depth {
        let mut next = Vec::new();
        for &id in &frontier {
            for _ in 0..d {
                let child = children.len();
                children.push(Vec::new());
                children[id].push(child);
                next.push(child);
            }
        }
        frontier = next;
    }

    if full == n {
        return UniformTreeShape {
            n,
            arity: d,
            depth,
            internal_at_depth: 0,
            leftmost_children: None,
            children,
            leaves: frontier,
        };
    }

    // Two-level completion: the rightmost `internal` nodes of the full
    // level sprout the remaining leaves; only the leftmost of them may
    // have fewer than d children.
    let internal_at_depth = (n - full).div_ceil(d - 1);
    let shallow_leaves = full - internal_at_depth;
    let deep_leaves = n - shallow_leaves;
    let leftmost_children = deep_leaves - (internal_at_depth - 1) * d;
    debug_assert!((2..=d).contains(&leftmost_children));

    let mut leaves: Vec<usize> = frontier[..shallow_leaves].to_vec();
    for (pos, &id) in frontier[shallow_leaves..].iter().enumerate() {
        let count = if pos == 0 { leftmost_children } else { d };
        for _ in 0..count {
            let child = children.len();
            children.push(Vec::new());
            children[id].push(child);
            leaves.push(child);
        }
    }
    UniformTreeShape {
        n,
        arity: d,
        depth,
        internal_at_depth,
        leftmost_children: Some(leftmost_children),
        children,
        leaves,
    }
}

/// Optimal codeword lengths for the uniform distribution on `n`
/// symbols: all `m` when `n = d^m`, otherwise
/// `d^m - ceil((n - d^m)/(d-1))` copies of `m` and the rest `m + 1`.
pub fn uniform_length_sequence(n: usize, d: usize) -> LengthSequence {
    assert!(n >= 2 && d >= 2);
    let mut depth = 0usize;
    let mut full = 1usize;
    while full * d <= n {
        full *= d;
        depth += 1;
    }
    if full == n {
        return LengthSequence::new(vec![depth; n]);
    }
    let shallow = full - (n - full).div_ceil(d - 1);
    let mut lengths = vec![depth; shallow];
    lengths.extend(std::iter::repeat_n(depth + 1, n - shallow));
    LengthSequence::new(lengths)
}

/// Whether the sum of the `d` smallest probabilities is at least the
/// largest. Defined for `n` a power of `d`; equivalent to the perfect
/// depth-m tree being a Huffman tree for `p`.
pub fn lowest_d_sum_criterion(p: &Pmf, d: usize) -> Result<bool, MaximaError> {
    power_exponent(p.len(), d).ok_or(MaximaError::NotAPowerOfD { n: p.len(), d })?;
    Ok(p.lowest_sum(d) >= p[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MaximaBranch {
    /// `n = d^m`: membership is the lowest-d-sum criterion.
    PowerOfD,
    /// `n` within `d - 2` below a power of `d` (empty for `d = 2`).
    /// Every uniform-optimal codeword then has the same length, that
    /// constant sequence is feasible for every PMF of this size, and
    /// membership is again a lowest-sum criterion, over the
    /// first-merge-size smallest entries.
    JustBelowPowerOfD,
    /// The generic case: the uniform distribution is the unique point
    /// of maximum.
    NotPowerOfD,
}

/// Classification of one PMF against the maximum of the minimum
/// expected length function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximaVerdict {
    pub is_max: bool,
    pub branch: MaximaBranch,
    /// Exponent with `n = d^m`, when it exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// How many smallest probabilities the criterion sums: `d` on the
    /// power branch, the first-merge size just below a power.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion_size: Option<usize>,
    #[serde(
        with = "crate::rational::serde_exact::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub lowest_d_sum: Option<Rational>,
    #[serde(
        with = "crate::rational::serde_exact::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub highest: Option<Rational>,
    /// The maximum value itself: the minimum expected length at the
    /// uniform distribution.
    #[serde(with = "crate::rational::serde_exact")]
    pub max_value: Rational,
}

/// Decides whether `p` maximizes the minimum expected length function
/// over PMFs of its size. O(n); the merge procedure runs only on the
/// uniform distribution, to compute the attained value.
///
/// Membership when all uniform-optimal codewords share one length `l`:
/// the constant sequence reaches the maximum for any PMF, and the only
/// way below it is to trade a length-(l-1) word for the largest
/// probability against pushing the smallest sibling set to `l + 1`,
/// which pays off exactly when that set's total is below the largest
/// probability. Hence the lowest-sum test. In the generic case a
/// non-uniform PMF always admits a cheaper sequence, leaving the
/// uniform distribution as the unique point of maximum.
pub fn is_point_of_maximum(p: &Pmf, d: usize) -> MaximaVerdict {
    let n = p.len();
    let uniform = Pmf::uniform(n).expect("n >= 2");
    let max_value = min_expected_length(&uniform, d);
    if let Some(m) = power_exponent(n, d) {
        let lowest = p.lowest_sum(d);
        let highest = p[0].clone();
        return MaximaVerdict {
            is_max: lowest >= highest,
            branch: MaximaBranch::PowerOfD,
            m: Some(m),
            criterion_size: Some(d),
            lowest_d_sum: Some(lowest),
            highest: Some(highest),
            max_value,
        };
    }
    let uniform_lengths = uniform_length_sequence(n, d);
    let constant_lengths =
        uniform_lengths.as_slice().first() == uniform_lengths.as_slice().last();
    if constant_lengths {
        let size = crate::huffman::first_merge_size(n, d);
        let lowest = p.lowest_sum(size);
        let highest = p[0].clone();
        return MaximaVerdict {
            is_max: lowest >= highest,
            branch: MaximaBranch::JustBelowPowerOfD,
            m: None,
            criterion_size: Some(size),
            lowest_d_sum: Some(lowest),
            highest: Some(highest),
            max_value,
        };
    }
    MaximaVerdict {
        is_max: p.is_uniform(),
        branch: MaximaBranch::NotPowerOfD,
        m: None,
        criterion_size: None,
        lowest_d_sum: None,
        highest: None,
        max_value,
    }
}

/// Minimum expected length of a `d`-ary prefix code for `p`.
pub fn min_expected_length(p: &Pmf, d: usize) -> Rational {
    let (tree, _) = huffman_tree(p, d);
    tree.expected_length()
        .expect("engine trees satisfy the expected-length identity")
}
