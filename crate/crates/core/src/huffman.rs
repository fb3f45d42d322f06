//! The D-ary Huffman merge procedure.
//!
//! The first merge combines `m` roots, where `m` is the unique integer
//! in `[2, D]` with `D-1` dividing `n-m`; every later merge combines
//! exactly `D`. Ties on probability are broken by seniority: original
//! leaves in PMF index order first, then merged nodes in creation
//! order. Any tie-break yields an optimal tree; the fixed rule makes
//! runs reproducible.

use crate::pmf::Pmf;
use crate::rational::Rational;
use crate::tree::{CodeTree, NodeId, NodeSpec};

/// The unique `m` in `[2, d]` with `(n - m)` divisible by `d - 1`.
/// For binary trees this is always 2.
pub fn first_merge_size(n: usize, d: usize) -> usize {
    assert!(n >= 2 && d >= 2);
    2 + (n - 2) % (d - 1)
}

/// One merge step: the root ids combined and the node created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStep {
    pub merged: Vec<NodeId>,
    pub parent: NodeId,
    pub probability: Rational,
}

/// Record of an entire Huffman run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTrace {
    pub first_merge_size: usize,
    pub steps: Vec<MergeStep>,
}

/// Runs the Huffman procedure on `p` with alphabet size `d`.
///
/// Node ids: leaves are `0..n` in PMF index order, merged nodes follow
/// in creation order. Children of a merged node are ordered by
/// ascending probability, ties by seniority.
pub fn huffman_tree(p: &Pmf, d: usize) -> (CodeTree, MergeTrace) {
    assert!(d >= 2, "arity must be at least 2");
    let n = p.len();
    let mut specs: Vec<NodeSpec> = (0..n)
        .map(|i| NodeSpec {
            children: vec![],
            leaf_index: Some(i),
        })
        .collect();
    // (id, probability) of current roots; carried probabilities are
    // recomputed from the leaves by assembly as a self-check.
    let mut roots: Vec<(NodeId, Rational)> =
        (0..n).map(|i| (i, p[i].clone())).collect();
    let mut carried: Vec<Rational> = p.iter().cloned().collect();

    let m = first_merge_size(n, d);
    let mut steps = Vec::new();
    let mut merge_size = m;
    while roots.len() > 1 {
        roots.sort_by(|(ida, pa), (idb, pb)| pa.cmp(pb).then(ida.cmp(idb)));
        let chosen: Vec<(NodeId, Rational)> = roots.drain(..merge_size).collect();
        let probability = chosen
            .iter()
            .fold(Rational::from_integer(0.into()), |acc, (_, p)| acc + p);
        let parent = specs.len();
        specs.push(NodeSpec {
            children: chosen.iter().map(|(id, _)| *id).collect(),
            leaf_index: None,
        });
        carried.push(probability.clone());
        steps.push(MergeStep {
            merged: chosen.iter().map(|(id, _)| *id).collect(),
            parent,
            probability: probability.clone(),
        });
        roots.push((parent, probability));
        merge_size = d;
    }

    let tree = CodeTree::assemble(d, &specs, p).expect("merge procedure builds a valid tree");
    for (id, prob) in carried.iter().enumerate() {
        assert_eq!(
            &tree.node(id).probability,
            prob,
            "recomputed probability of node {id} disagrees with the carried value"
        );
    }
    let duality = tree.expected_length();
    assert!(
        duality.is_ok(),
        "internal-node sum must equal the depth-weighted sum: {duality:?}"
    );
    (
        tree,
        MergeTrace {
            first_merge_size: m,
            steps,
        },
    )
}
