//! Executable Huffman-tree properties and canonicalization.
//!
//! A tree associated with a PMF is a Huffman tree iff it satisfies all
//! three of:
//!
//! - level property: no deeper node has larger probability than a
//!   shallower one (exact `>=`, equal probabilities at different
//!   levels are legal);
//! - maximum-level sibling property: the deepest level contains a
//!   sibling set of size `m` (the first-merge size for `(n, D)`)
//!   holding the `m` smallest probabilities, and every other sibling
//!   set has exactly `D` nodes;
//! - sibling property: the nodes at each level can be listed with
//!   probabilities non-decreasing and siblings adjacent.
//!
//! The sibling property is existential over listings; it is decided
//! constructively by sorting each sibling set internally and ordering
//! the sets by (min, max) probability. The canonical listing succeeds
//! whenever any listing does (tested exhaustively against brute-force
//! permutation search).

use serde::Serialize;
use thiserror::Error;

use crate::huffman::first_merge_size;
use crate::pmf::Pmf;
use crate::rational::{format_rational, Rational};
use crate::tree::{CodeTree, NodeId, NodeSpec, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertiesError {
    #[error("TreeNotAssociatedWithPmf: {reason}")]
    TreeNotAssociatedWithPmf { reason: String },
    #[error("LevelPropertyViolated: node {shallow} at level {shallow_level} has probability {sp} < node {deep} at level {deep_level} with {dp}",
        sp = format_rational(shallow_prob), dp = format_rational(deep_prob))]
    LevelPropertyViolated {
        shallow: NodeId,
        shallow_level: usize,
        shallow_prob: Rational,
        deep: NodeId,
        deep_level: usize,
        deep_prob: Rational,
    },
    #[error("ShapeNotRepackable: level {level}: {reason}")]
    ShapeNotRepackable { level: usize, reason: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Witness for a level-property failure: a shallower node with smaller
/// probability than a deeper one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelViolation {
    pub shallow_node: NodeId,
    pub shallow_level: usize,
    #[serde(with = "crate::rational::serde_exact")]
    pub shallow_prob: Rational,
    pub deep_node: NodeId,
    pub deep_level: usize,
    #[serde(with = "crate::rational::serde_exact")]
    pub deep_prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelPropertyCheck {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<LevelViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MaxLevelSiblingViolation {
    /// A sibling set other than the designated smallest-m set does not
    /// have exactly `arity` nodes.
    WrongSetSize { parent: NodeId, size: usize },
    /// The single deficient set is not at the deepest level.
    SmallSetNotAtMaxLevel {
        parent: NodeId,
        level: usize,
        max_level: usize,
    },
    /// The candidate set does not hold the `m` smallest probabilities.
    SmallSetWrongProbabilities { parent: NodeId },
    /// No sibling set of size `m` at the deepest level holds the `m`
    /// smallest probabilities.
    NoQualifyingSet { max_level: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxLevelSiblingCheck {
    pub pass: bool,
    /// First-merge size recomputed from `(n, arity)`, never read from
    /// the tree.
    pub expected_m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<MaxLevelSiblingViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListedNode {
    pub node: NodeId,
    #[serde(with = "crate::rational::serde_exact")]
    pub probability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelListing {
    pub level: usize,
    pub listing: Vec<ListedNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SiblingPropertyCheck {
    pub pass: bool,
    /// Non-decreasing listings, one per level that admits one.
    pub listings: Vec<LevelListing>,
    /// First level where no listing exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_level: Option<usize>,
}

/// Outcome of checking all three Huffman-tree properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub level_property: LevelPropertyCheck,
    pub max_level_sibling_property: MaxLevelSiblingCheck,
    pub sibling_property: SiblingPropertyCheck,
    pub is_huffman: bool,
}

impl PropertyReport {
    /// Plain-text rendering used by the CLI.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "level property: {}\n",
            verdict(self.level_property.pass)
        ));
        if let Some(v) = &self.level_property.violation {
            out.push_str(&format!(
                "  witness: node n{} (level {}, p={}) < node n{} (level {}, p={})\n",
                v.shallow_node,
                v.shallow_level,
                format_rational(&v.shallow_prob),
                v.deep_node,
                v.deep_level,
                format_rational(&v.deep_prob),
            ));
        }
        out.push_str(&format!(
            "max-level sibling property: {} (m = {})\n",
            verdict(self.max_level_sibling_property.pass),
            self.max_level_sibling_property.expected_m
        ));
        if let Some(v) = &self.max_level_sibling_property.violation {
            out.push_str(&format!("  witness: {v:?}\n"));
        }
        out.push_str(&format!(
            "sibling property: {}\n",
            verdict(self.sibling_property.pass)
        ));
        match self.sibling_property.failed_level {
            Some(level) => out.push_str(&format!("  no listing at level {level}\n")),
            None => {
                for l in &self.sibling_property.listings {
                    let line = l
                        .listing
                        .iter()
                        .map(|e| format!("n{}({})", e.node, format_rational(&e.probability)))
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.push_str(&format!("  level {}: {}\n", l.level, line));
                }
            }
        }
        out.push_str(&format!(
            "huffman tree: {}\n",
            if self.is_huffman { "yes" } else { "no" }
        ));
        out
    }
}

fn check_association(t: &CodeTree, p: &Pmf) -> Result<(), PropertiesError> {
    if t.leaf_count() != p.len() {
        return Err(PropertiesError::TreeNotAssociatedWithPmf {
            reason: format!("tree has {} leaves, PMF has {}", t.leaf_count(), p.len()),
        });
    }
    for i in 0..p.len() {
        let leaf = t.node(t.leaf_node(i));
        if leaf.probability != p[i] {
            return Err(PropertiesError::TreeNotAssociatedWithPmf {
                reason: format!(
                    "leaf for PMF index {} carries {}, PMF says {}",
                    i,
                    format_rational(&leaf.probability),
                    format_rational(&p[i])
                ),
            });
        }
    }
    Ok(())
}

fn ids_per_level(t: &CodeTree) -> Vec<Vec<NodeId>> {
    let mut levels = vec![Vec::new(); t.max_level() + 1];
    for (id, node) in t.nodes().iter().enumerate() {
        levels[node.level].push(id);
    }
    levels
}

fn find_level_violation(t: &CodeTree, levels: &[Vec<NodeId>]) -> Option<LevelViolation> {
    // min over a level must dominate max over the next; chaining covers
    // all level pairs.
    for window in levels.windows(2) {
        let shallow = window[0]
            .iter()
            .min_by(|&&a, &&b| t.node(a).probability.cmp(&t.node(b).probability))
            .copied()
            .expect("levels 0..=max are non-empty");
        let deep = window[1]
            .iter()
            .max_by(|&&a, &&b| t.node(a).probability.cmp(&t.node(b).probability))
            .copied()
            .expect("levels 0..=max are non-empty");
        if t.node(shallow).probability < t.node(deep).probability {
            return Some(LevelViolation {
                shallow_node: shallow,
                shallow_level: t.node(shallow).level,
                shallow_prob: t.node(shallow).probability.clone(),
                deep_node: deep,
                deep_level: t.node(deep).level,
                deep_prob: t.node(deep).probability.clone(),
            });
        }
    }
    None
}

fn check_max_level_sibling(t: &CodeTree, p: &Pmf, m: usize) -> MaxLevelSiblingCheck {
    let d = t.arity();
    let max_level = t.max_level();
    let mut smallest: Vec<Rational> = p.probs()[p.len() - m..].to_vec();
    smallest.sort();

    let qualifies = |parent: NodeId| -> bool {
        let set = &t.node(parent).children;
        if set.len() != m || t.node(set[0]).level != max_level {
            return false;
        }
        let mut probs: Vec<Rational> =
            set.iter().map(|&c| t.node(c).probability.clone()).collect();
        probs.sort();
        probs == smallest
    };

    let deficient: Vec<NodeId> = t
        .internal_ids()
        .filter(|&id| t.node(id).children.len() != d)
        .collect();

    let fail = |violation: MaxLevelSiblingViolation| MaxLevelSiblingCheck {
        pass: false,
        expected_m: m,
        violation: Some(violation),
    };

    if m == d {
        if let Some(&parent) = deficient.first() {
            return fail(MaxLevelSiblingViolation::WrongSetSize {
                parent,
                size: t.node(parent).children.len(),
            });
        }
        let found = t
            .internal_ids()
            .any(|id| t.node(id).level + 1 == max_level && qualifies(id));
        if !found {
            return fail(MaxLevelSiblingViolation::NoQualifyingSet { max_level });
        }
    } else {
        match deficient.as_slice() {
            [] => return fail(MaxLevelSiblingViolation::NoQualifyingSet { max_level }),
            [parent] => {
                let set = &t.node(*parent).children;
                if set.len() != m {
                    return fail(MaxLevelSiblingViolation::WrongSetSize {
                        parent: *parent,
                        size: set.len(),
                    });
                }
                let set_level = t.node(set[0]).level;
                if set_level != max_level {
                    return fail(MaxLevelSiblingViolation::SmallSetNotAtMaxLevel {
                        parent: *parent,
                        level: set_level,
                        max_level,
                    });
                }
                if !qualifies(*parent) {
                    return fail(MaxLevelSiblingViolation::SmallSetWrongProbabilities {
                        parent: *parent,
                    });
                }
            }
            multiple => {
                let parent = multiple[0];
                return fail(MaxLevelSiblingViolation::WrongSetSize {
                    parent,
                    size: t.node(parent).children.len(),
                });
            }
        }
    }
    MaxLevelSiblingCheck {
        pass: true,
        expected_m: m,
        violation: None,
    }
}

/// Canonical listing attempt for one level: sibling blocks sorted
/// internally, blocks ordered by (min, max) probability. Returns the
/// listing iff globally non-decreasing.
fn canonical_level_listing(t: &CodeTree, ids: &[NodeId]) -> Option<Vec<NodeId>> {
    let mut blocks: Vec<Vec<NodeId>> = Vec::new();
    let mut seen_parent: Vec<Option<NodeId>> = Vec::new();
    for &id in ids {
        let parent = t.node(id).parent;
        match seen_parent.iter().position(|&p| p == parent) {
            Some(pos) => blocks[pos].push(id),
            None => {
                seen_parent.push(parent);
                blocks.push(vec![id]);
            }
        }
    }
    for block in &mut blocks {
        block.sort_by(|&a, &b| t.node(a).probability.cmp(&t.node(b).probability).then(a.cmp(&b)));
    }
    blocks.sort_by(|a, b| {
        let (amin, amax) = (&t.node(a[0]).probability, &t.node(*a.last().unwrap()).probability);
        let (bmin, bmax) = (&t.node(b[0]).probability, &t.node(*b.last().unwrap()).probability);
        amin.cmp(bmin).then(amax.cmp(bmax)).then(a[0].cmp(&b[0]))
    });
    let listing: Vec<NodeId> = blocks.into_iter().flatten().collect();
    let sorted = listing
        .windows(2)
        .all(|w| t.node(w[0]).probability <= t.node(w[1]).probability);
    sorted.then_some(listing)
}

fn check_sibling_property(t: &CodeTree, levels: &[Vec<NodeId>]) -> SiblingPropertyCheck {
    let mut listings = Vec::new();
    let mut failed_level = None;
    for (level, ids) in levels.iter().enumerate() {
        match canonical_level_listing(t, ids) {
            Some(listing) => listings.push(LevelListing {
                level,
                listing: listing
                    .into_iter()
                    .map(|node| ListedNode {
                        node,
                        probability: t.node(node).probability.clone(),
                    })
                    .collect(),
            }),
            None => {
                if failed_level.is_none() {
                    failed_level = Some(level);
                }
            }
        }
    }
    SiblingPropertyCheck {
        pass: failed_level.is_none(),
        listings,
        failed_level,
    }
}

/// Checks the three Huffman-tree properties of `t` against `p`.
pub fn verify_huffman(t: &CodeTree, p: &Pmf) -> Result<PropertyReport, PropertiesError> {
    check_association(t, p)?;
    let levels = ids_per_level(t);

    let violation = find_level_violation(t, &levels);
    let level_property = LevelPropertyCheck {
        pass: violation.is_none(),
        violation,
    };

    let m = first_merge_size(p.len(), t.arity());
    let max_level_sibling_property = check_max_level_sibling(t, p, m);
    let sibling_property = check_sibling_property(t, &levels);

    let is_huffman =
        level_property.pass && max_level_sibling_property.pass && sibling_property.pass;
    Ok(PropertyReport {
        level_property,
        max_level_sibling_property,
        sibling_property,
        is_huffman,
    })
}

/// Rearranges an optimal tree into a Huffman tree.
///
/// Processes levels deepest-first: the nodes at each level, taken with
/// their whole subtrees, are re-grouped in ascending probability order
/// into sibling sets of size `D` (plus the single first-merge-size set
/// at the deepest level) and handed to the internal nodes one level
/// up. Leaf depths never change, so the expected length is exactly
/// preserved. Requires the level property on input; a tree that cannot
/// be re-grouped this way is not the shape of any optimal tree.
pub fn canonicalize_to_huffman(t: &CodeTree, p: &Pmf) -> Result<CodeTree, PropertiesError> {
    check_association(t, p)?;
    let levels = ids_per_level(t);
    if let Some(v) = find_level_violation(t, &levels) {
        return Err(PropertiesError::LevelPropertyViolated {
            shallow: v.shallow_node,
            shallow_level: v.shallow_level,
            shallow_prob: v.shallow_prob,
            deep: v.deep_node,
            deep_level: v.deep_level,
            deep_prob: v.deep_prob,
        });
    }

    let d = t.arity();
    let m = first_merge_size(p.len(), d);
    let max_level = t.max_level();
    let mut children: Vec<Vec<NodeId>> =
        t.nodes().iter().map(|n| n.children.clone()).collect();
    let mut prob: Vec<Rational> = t.nodes().iter().map(|n| n.probability.clone()).collect();

    for level in (1..=max_level).rev() {
        let mut movable: Vec<NodeId> = levels[level].clone();
        movable.sort_by(|&a, &b| prob[a].cmp(&prob[b]).then(a.cmp(&b)));
        let parents: Vec<NodeId> = levels[level - 1]
            .iter()
            .copied()
            .filter(|&id| !t.node(id).is_leaf())
            .collect();

        let mut sizes = vec![d; parents.len()];
        if level == max_level {
            sizes[0] = m;
        }
        let wanted: usize = sizes.iter().sum();
        if wanted != movable.len() {
            return Err(PropertiesError::ShapeNotRepackable {
                level,
                reason: format!(
                    "{} nodes cannot fill {} sibling sets of sizes {:?}",
                    movable.len(),
                    parents.len(),
                    sizes
                ),
            });
        }
        let mut cursor = 0;
        for (&parent, &size) in parents.iter().zip(&sizes) {
            let block = &movable[cursor..cursor + size];
            cursor += size;
            children[parent] = block.to_vec();
            prob[parent] = block
                .iter()
                .map(|&id| prob[id].clone())
                .fold(Rational::from_integer(0.into()), |acc, q| acc + q);
        }
    }

    let specs: Vec<NodeSpec> = t
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| NodeSpec {
            children: children[id].clone(),
            leaf_index: node.leaf_index,
        })
        .collect();
    Ok(CodeTree::assemble(d, &specs, p)?)
}
