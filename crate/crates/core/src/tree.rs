//! Code trees: rooted trees whose leaves carry PMF entries.
//!
//! Every node stores its subtree probability; internal nodes have
//! between 2 and `arity` children and child order is significant.
//! The expected length of a tree can be computed two ways — the sum of
//! internal-node probabilities, or the depth-weighted leaf sum — and
//! [`CodeTree::expected_length`] always computes both and refuses to
//! answer if they disagree.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lengths::LengthSequence;
use crate::pmf::Pmf;
use crate::rational::{format_rational, Rational};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("ArityTooSmall: arity {arity} < 2")]
    ArityTooSmall { arity: usize },
    #[error("NotATree: {reason}")]
    NotATree { reason: String },
    #[error("ChildCountOutOfRange: node {node} has {count} children, arity {arity} allows 2..={arity}")]
    ChildCountOutOfRange {
        node: NodeId,
        count: usize,
        arity: usize,
    },
    #[error("LeafIndexInvalid: node {node}: {reason}")]
    LeafIndexInvalid { node: NodeId, reason: String },
    #[error("LeafCountMismatch: tree has {got} leaves, PMF has {expected}")]
    LeafCountMismatch { expected: usize, got: usize },
    #[error("ProbabilityMismatch: node {node} claims {claimed}, children sum to {computed}",
        claimed = format_rational(claimed), computed = format_rational(computed))]
    ProbabilityMismatch {
        node: NodeId,
        claimed: Rational,
        computed: Rational,
    },
    #[error("LevelMismatch: node {node} claims level {claimed}, structure gives {computed}")]
    LevelMismatch {
        node: NodeId,
        claimed: usize,
        computed: usize,
    },
    #[error("RootProbabilityNotOne: root probability is {computed}", computed = format_rational(computed))]
    RootProbabilityNotOne { computed: Rational },
    #[error("InternalInconsistency: internal-node sum {via_internal} != depth-weighted sum {via_depths}",
        via_internal = format_rational(via_internal), via_depths = format_rational(via_depths))]
    InternalInconsistency {
        via_internal: Rational,
        via_depths: Rational,
    },
    #[error("AlphabetSizeMismatch: alphabet has {alphabet} letters, arity is {arity}")]
    AlphabetSizeMismatch { alphabet: usize, arity: usize },
    #[error("AlphabetNotDistinct: alphabet letters must be pairwise distinct")]
    AlphabetNotDistinct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub probability: Rational,
    pub level: usize,
    pub parent: Option<NodeId>,
    /// Left-to-right child order.
    pub children: Vec<NodeId>,
    /// For leaves, the 0-based index into the sorted PMF.
    pub leaf_index: Option<usize>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Structural description of one node, used to assemble a tree.
#[derive(Debug, Clone, Default)]
pub struct NodeSpec {
    pub children: Vec<NodeId>,
    pub leaf_index: Option<usize>,
}

/// Node description carrying claimed probability and level, e.g. read
/// back from a DOT file. Assembly recomputes both and rejects mismatches.
#[derive(Debug, Clone)]
pub struct ClaimedNode {
    pub children: Vec<NodeId>,
    pub leaf_index: Option<usize>,
    pub probability: Rational,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTree {
    arity: usize,
    root: NodeId,
    nodes: Vec<Node>,
    /// PMF index -> leaf node id.
    leaf_of: Vec<NodeId>,
}

impl CodeTree {
    /// Builds a tree from structure alone, taking leaf probabilities
    /// from `pmf` and computing internal probabilities bottom-up.
    pub fn assemble(arity: usize, specs: &[NodeSpec], pmf: &Pmf) -> Result<Self, TreeError> {
        let tree = Self::build(arity, specs, |node, leaf_index| {
            pmf.probs()
                .get(leaf_index)
                .cloned()
                .ok_or_else(|| TreeError::LeafIndexInvalid {
                    node,
                    reason: format!("index {leaf_index} out of range for PMF of size {}", pmf.len()),
                })
        })?;
        if tree.leaf_of.len() != pmf.len() {
            return Err(TreeError::LeafCountMismatch {
                expected: pmf.len(),
                got: tree.leaf_of.len(),
            });
        }
        Ok(tree)
    }

    /// Builds a tree from nodes carrying claimed probabilities and
    /// levels. Leaf probabilities are taken as claimed; internal
    /// probabilities and all levels are recomputed and compared.
    pub fn from_claimed(arity: usize, claimed: &[ClaimedNode]) -> Result<Self, TreeError> {
        let specs: Vec<NodeSpec> = claimed
            .iter()
            .map(|c| NodeSpec {
                children: c.children.clone(),
                leaf_index: c.leaf_index,
            })
            .collect();
        let tree = Self::build(arity, &specs, |node, _leaf_index| {
            Ok(claimed[node].probability.clone())
        })?;
        for (id, c) in claimed.iter().enumerate() {
            let computed = &tree.nodes[id];
            if computed.level != c.level {
                return Err(TreeError::LevelMismatch {
                    node: id,
                    claimed: c.level,
                    computed: computed.level,
                });
            }
            if computed.probability != c.probability {
                return Err(TreeError::ProbabilityMismatch {
                    node: id,
                    claimed: c.probability.clone(),
                    computed: computed.probability.clone(),
                });
            }
        }
        Ok(tree)
    }

    fn build(
        arity: usize,
        specs: &[NodeSpec],
        leaf_prob: impl Fn(NodeId, usize) -> Result<Rational, TreeError>,
    ) -> Result<Self, TreeError> {
        if arity < 2 {
            return Err(TreeError::ArityTooSmall { arity });
        }
        if specs.is_empty() {
            return Err(TreeError::NotATree {
                reason: "no nodes".into(),
            });
        }
        let n_nodes = specs.len();
        let mut parent: Vec<Option<NodeId>> = vec![None; n_nodes];
        for (id, spec) in specs.iter().enumerate() {
            for &child in &spec.children {
                if child >= n_nodes {
                    return Err(TreeError::NotATree {
                        reason: format!("node {id} references missing child {child}"),
                    });
                }
                if parent[child].is_some() {
                    return Err(TreeError::NotATree {
                        reason: format!("node {child} has two parents"),
                    });
                }
                parent[child] = Some(id);
            }
        }
        let mut roots = (0..n_nodes).filter(|&id| parent[id].is_none());
        let root = roots.next().ok_or_else(|| TreeError::NotATree {
            reason: "no root (cycle)".into(),
        })?;
        if let Some(extra) = roots.next() {
            return Err(TreeError::NotATree {
                reason: format!("multiple roots: {root} and {extra}"),
            });
        }

        // Levels via BFS; `order` doubles as a top-down traversal.
        let mut level = vec![0usize; n_nodes];
        let mut order = Vec::with_capacity(n_nodes);
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let id = order[head];
            head += 1;
            for &child in &specs[id].children {
                level[child] = level[id] + 1;
                order.push(child);
            }
        }
        if order.len() != n_nodes {
            return Err(TreeError::NotATree {
                reason: "unreachable nodes".into(),
            });
        }

        let n_leaves = specs.iter().filter(|s| s.children.is_empty()).count();
        let mut leaf_of: Vec<Option<NodeId>> = vec![None; n_leaves];
        let mut probs: Vec<Option<Rational>> = vec![None; n_nodes];
        for (id, spec) in specs.iter().enumerate() {
            if spec.children.is_empty() {
                let leaf_index = spec.leaf_index.ok_or_else(|| TreeError::LeafIndexInvalid {
                    node: id,
                    reason: "leaf node without a PMF index".into(),
                })?;
                if leaf_index >= n_leaves {
                    return Err(TreeError::LeafIndexInvalid {
                        node: id,
                        reason: format!("index {leaf_index} out of range for {n_leaves} leaves"),
                    });
                }
                if leaf_of[leaf_index].is_some() {
                    return Err(TreeError::LeafIndexInvalid {
                        node: id,
                        reason: format!("index {leaf_index} assigned twice"),
                    });
                }
                leaf_of[leaf_index] = Some(id);
                probs[id] = Some(leaf_prob(id, leaf_index)?);
            } else {
                if spec.leaf_index.is_some() {
                    return Err(TreeError::LeafIndexInvalid {
                        node: id,
                        reason: "internal node carries a PMF index".into(),
                    });
                }
                let count = spec.children.len();
                if count < 2 || count > arity {
                    return Err(TreeError::ChildCountOutOfRange {
                        node: id,
                        count,
                        arity,
                    });
                }
            }
        }
        // Bottom-up probability pass.
        for &id in order.iter().rev() {
            if probs[id].is_none() {
                let sum = specs[id]
                    .children
                    .iter()
                    .map(|&c| probs[c].clone().expect("children precede parents in reverse BFS"))
                    .fold(Rational::zero(), |acc, p| acc + p);
                probs[id] = Some(sum);
            }
        }
        let root_prob = probs[root].clone().unwrap();
        if !root_prob.is_one() {
            return Err(TreeError::RootProbabilityNotOne {
                computed: root_prob,
            });
        }

        let nodes = specs
            .iter()
            .enumerate()
            .map(|(id, spec)| Node {
                probability: probs[id].clone().unwrap(),
                level: level[id],
                parent: parent[id],
                children: spec.children.clone(),
                leaf_index: spec.leaf_index,
            })
            .collect();
        Ok(CodeTree {
            arity,
            root,
            nodes,
            leaf_of: leaf_of.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Number of leaves (= PMF size).
    pub fn leaf_count(&self) -> usize {
        self.leaf_of.len()
    }

    /// Leaf node carrying PMF index `i`.
    pub fn leaf_node(&self, i: usize) -> NodeId {
        self.leaf_of[i]
    }

    pub fn max_level(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    pub fn internal_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&id| !self.nodes[id].is_leaf())
    }

    pub fn ids_at_level(&self, level: usize) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&id| self.nodes[id].level == level)
    }

    /// Depth of each leaf, indexed by PMF position.
    pub fn leaf_depths(&self) -> Vec<usize> {
        self.leaf_of.iter().map(|&id| self.nodes[id].level).collect()
    }

    /// Sorted leaf depths.
    pub fn length_sequence(&self) -> LengthSequence {
        LengthSequence::new(self.leaf_depths())
    }

    /// Sum of internal-node probabilities, root included.
    pub fn expected_length_via_internal_nodes(&self) -> Rational {
        self.internal_ids()
            .map(|id| self.nodes[id].probability.clone())
            .fold(Rational::zero(), |acc, p| acc + p)
    }

    /// Depth-weighted leaf probability sum.
    pub fn expected_length_via_leaf_depths(&self) -> Rational {
        self.leaf_of
            .iter()
            .map(|&id| {
                let node = &self.nodes[id];
                &node.probability * Rational::from_integer((node.level as u64).into())
            })
            .fold(Rational::zero(), |acc, p| acc + p)
    }

    /// Expected length, computed both ways and cross-checked. A
    /// disagreement means the tree has been corrupted.
    pub fn expected_length(&self) -> Result<Rational, TreeError> {
        let via_internal = self.expected_length_via_internal_nodes();
        let via_depths = self.expected_length_via_leaf_depths();
        if via_internal != via_depths {
            return Err(TreeError::InternalInconsistency {
                via_internal,
                via_depths,
            });
        }
        Ok(via_internal)
    }

    /// Emits one codeword per PMF index by labeling edges left-to-right
    /// with the alphabet in the given order.
    pub fn emit_code(&self, alphabet: &[char]) -> Result<Vec<String>, TreeError> {
        if alphabet.len() != self.arity {
            return Err(TreeError::AlphabetSizeMismatch {
                alphabet: alphabet.len(),
                arity: self.arity,
            });
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(TreeError::AlphabetNotDistinct);
            }
        }
        let mut words = vec![String::new(); self.leaf_count()];
        let mut stack = vec![(self.root, String::new())];
        while let Some((id, prefix)) = stack.pop() {
            let node = &self.nodes[id];
            if let Some(i) = node.leaf_index {
                words[i] = prefix;
                continue;
            }
            for (pos, &child) in node.children.iter().enumerate() {
                let mut word = prefix.clone();
                word.push(alphabet[pos]);
                stack.push((child, word));
            }
        }
        Ok(words)
    }

    /// Canonical structural signature: probability plus sorted child
    /// signatures. Two trees get equal signatures iff they are
    /// isomorphic as probability-labeled trees (child order and node
    /// ids ignored).
    pub fn canonical_signature(&self) -> String {
        fn sig(tree: &CodeTree, id: NodeId) -> String {
            let node = &tree.nodes[id];
            let prob = format_rational(&node.probability);
            if node.is_leaf() {
                format!("L{prob}")
            } else {
                let mut parts: Vec<String> =
                    node.children.iter().map(|&c| sig(tree, c)).collect();
                parts.sort();
                format!("N{prob}({})", parts.join(","))
            }
        }
        sig(self, self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn leaf(i: usize) -> NodeSpec {
        NodeSpec {
            children: vec![],
            leaf_index: Some(i),
        }
    }

    fn internal(children: Vec<NodeId>) -> NodeSpec {
        NodeSpec {
            children,
            leaf_index: None,
        }
    }

    /// The running example: probabilities (1/2, 1/4, 1/8, 1/8) on the
    /// caterpillar tree with lengths (1, 2, 3, 3).
    fn caterpillar() -> (CodeTree, Pmf) {
        let pmf = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)]).unwrap();
        // node 4 = {2,3}, node 5 = {4, leaf1}, node 6 = root {leaf0, 5}
        let specs = vec![
            leaf(0),
            leaf(1),
            leaf(2),
            leaf(3),
            internal(vec![2, 3]),
            internal(vec![4, 1]),
            internal(vec![0, 5]),
        ];
        (CodeTree::assemble(2, &specs, &pmf).unwrap(), pmf)
    }

    #[test]
    fn assembles_and_computes_levels_and_probs() {
        let (tree, _) = caterpillar();
        assert_eq!(tree.root(), 6);
        assert_eq!(tree.node(6).probability, ratio(1, 1));
        assert_eq!(tree.node(5).probability, ratio(1, 2));
        assert_eq!(tree.node(4).probability, ratio(1, 4));
        assert_eq!(tree.node(0).level, 1);
        assert_eq!(tree.node(2).level, 3);
        assert_eq!(tree.max_level(), 3);
    }

    #[test]
    fn expected_length_agrees_both_ways() {
        let (tree, _) = caterpillar();
        assert_eq!(tree.expected_length_via_internal_nodes(), ratio(7, 4));
        assert_eq!(tree.expected_length_via_leaf_depths(), ratio(7, 4));
        assert_eq!(tree.expected_length().unwrap(), ratio(7, 4));
        assert_eq!(tree.length_sequence().as_slice(), &[1, 2, 3, 3]);
    }

    #[test]
    fn star_tree_expected_length_is_one() {
        let pmf = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let specs = vec![leaf(0), leaf(1), leaf(2), internal(vec![0, 1, 2])];
        let tree = CodeTree::assemble(3, &specs, &pmf).unwrap();
        assert_eq!(tree.expected_length().unwrap(), ratio(1, 1));
        assert_eq!(tree.length_sequence().as_slice(), &[1, 1, 1]);
        assert_eq!(tree.emit_code(&['a', 'b', 'c']).unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn emit_code_is_prefix_free_and_depth_matched() {
        let (tree, _) = caterpillar();
        let words = tree.emit_code(&['0', '1']).unwrap();
        assert_eq!(words, vec!["0", "11", "100", "101"]);
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.len(), tree.node(tree.leaf_node(i)).level);
            for (j, other) in words.iter().enumerate() {
                if i != j {
                    assert!(!other.starts_with(w), "{w} prefixes {other}");
                }
            }
        }
    }

    #[test]
    fn alphabet_errors() {
        let (tree, _) = caterpillar();
        assert!(matches!(
            tree.emit_code(&['0', '1', '2']).unwrap_err(),
            TreeError::AlphabetSizeMismatch { alphabet: 3, arity: 2 }
        ));
        assert!(matches!(
            tree.emit_code(&['0', '0']).unwrap_err(),
            TreeError::AlphabetNotDistinct
        ));
    }

    #[test]
    fn malformed_structures_are_rejected() {
        let pmf = Pmf::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        // child with two parents
        let double = vec![leaf(0), leaf(1), internal(vec![0, 1]), internal(vec![0, 2])];
        assert!(matches!(
            CodeTree::assemble(2, &double, &pmf).unwrap_err(),
            TreeError::NotATree { .. }
        ));
        // single child
        let unary = vec![leaf(0), internal(vec![0])];
        assert!(CodeTree::assemble(2, &unary, &pmf).is_err());
        // too many children for the arity
        let pmf3 = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let wide = vec![leaf(0), leaf(1), leaf(2), internal(vec![0, 1, 2])];
        assert!(matches!(
            CodeTree::assemble(2, &wide, &pmf3).unwrap_err(),
            TreeError::ChildCountOutOfRange { count: 3, .. }
        ));
        // duplicate leaf index
        let dup = vec![leaf(0), leaf(0), internal(vec![0, 1])];
        assert!(matches!(
            CodeTree::assemble(2, &dup, &pmf).unwrap_err(),
            TreeError::LeafIndexInvalid { .. }
        ));
    }

    #[test]
    fn claimed_probabilities_are_checked() {
        let good = vec![
            ClaimedNode {
                children: vec![1, 2],
                leaf_index: None,
                probability: ratio(1, 1),
                level: 0,
            },
            ClaimedNode {
                children: vec![],
                leaf_index: Some(0),
                probability: ratio(2, 3),
                level: 1,
            },
            ClaimedNode {
                children: vec![],
                leaf_index: Some(1),
                probability: ratio(1, 3),
                level: 1,
            },
        ];
        let tree = CodeTree::from_claimed(2, &good).unwrap();
        assert_eq!(tree.expected_length().unwrap(), ratio(1, 1));

        // wrong internal claim: children still sum to 1, claim differs
        let mut bad = good.clone();
        bad[0].probability = ratio(9, 10);
        assert!(matches!(
            CodeTree::from_claimed(2, &bad).unwrap_err(),
            TreeError::ProbabilityMismatch { node: 0, .. }
        ));

        // wrong leaf claim: recomputed root is no longer 1
        let mut bad_leaf = good.clone();
        bad_leaf[2].probability = ratio(1, 4);
        assert!(matches!(
            CodeTree::from_claimed(2, &bad_leaf).unwrap_err(),
            TreeError::RootProbabilityNotOne { .. }
        ));

        let mut bad_level = good;
        bad_level[2].level = 2;
        assert!(matches!(
            CodeTree::from_claimed(2, &bad_level).unwrap_err(),
            TreeError::LevelMismatch { node: 2, .. }
        ));
    }

    #[test]
    fn signature_ignores_child_order_and_ids() {
        let pmf = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        let a = CodeTree::assemble(
            2,
            &[leaf(0), leaf(1), leaf(2), internal(vec![1, 2]), internal(vec![0, 3])],
            &pmf,
        )
        .unwrap();
        let b = CodeTree::assemble(
            2,
            &[leaf(2), leaf(1), leaf(0), internal(vec![0, 1]), internal(vec![3, 2])],
            &pmf,
        )
        .unwrap();
        assert_eq!(a.canonical_signature(), b.canonical_signature());
    }
}
