//! DOT export and re-import of code trees.
//!
//! The emitted subset is one node statement per tree node with
//! attributes `level`, `prob` (exact `"a/b"`), and `leaf` (1-based PMF
//! index, leaves only), followed by one edge statement per edge in
//! child left-to-right order. Node order is deterministic, so exports
//! are byte-identical across runs. A `graph [arity=D]` attribute makes
//! the files self-describing; the parser accepts files without it.

use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};
use crate::tree::{ClaimedNode, CodeTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("DotParse: line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("DotParse: {reason}")]
    Structure { reason: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Serializes `tree` to DOT.
pub fn export(tree: &CodeTree) -> String {
    let mut out = String::from("digraph code_tree {\n");
    out.push_str(&format!("  graph [arity={}];\n", tree.arity()));
    for (id, node) in tree.nodes().iter().enumerate() {
        let prob = format_rational(&node.probability);
        match node.leaf_index {
            Some(i) => out.push_str(&format!(
                "  n{id} [label=\"{level}:{prob} #{sym}\", level={level}, prob=\"{prob}\", leaf={sym}];\n",
                level = node.level,
                sym = i + 1,
            )),
            None => out.push_str(&format!(
                "  n{id} [label=\"{level}:{prob}\", level={level}, prob=\"{prob}\"];\n",
                level = node.level,
            )),
        }
    }
    for (id, node) in tree.nodes().iter().enumerate() {
        for &child in &node.children {
            out.push_str(&format!("  n{id} -> n{child};\n"));
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Default)]
struct RawNode {
    probability: Option<Rational>,
    level: Option<usize>,
    leaf_index: Option<usize>,
    children: Vec<usize>,
    declared: bool,
}

/// Parsed DOT content: claimed nodes plus the optional arity attribute.
#[derive(Debug, Clone)]
pub struct ParsedDot {
    pub arity: Option<usize>,
    nodes: Vec<ClaimedNode>,
}

impl ParsedDot {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Validates the claims and builds the tree with the given arity.
    pub fn into_tree(self, arity: usize) -> Result<CodeTree, DotError> {
        Ok(CodeTree::from_claimed(arity, &self.nodes)?)
    }
}

fn node_id(token: &str, line: usize) -> Result<usize, DotError> {
    token
        .strip_prefix('n')
        .and_then(|rest| rest.parse().ok())
        .ok_or_else(|| DotError::Parse {
            line,
            reason: format!("expected a node name like n0, got {token:?}"),
        })
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(v)
}

/// Parses the DOT subset written by [`export`].
pub fn parse(text: &str) -> Result<ParsedDot, DotError> {
    let mut raw: Vec<RawNode> = Vec::new();
    let mut arity = None;
    let mut seen_header = false;

    let ensure = |raw: &mut Vec<RawNode>, id: usize| {
        if raw.len() <= id {
            raw.resize_with(id + 1, RawNode::default);
        }
    };

    for (lineno, raw_line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw_line.trim().trim_end_matches(';').trim();
        if line.is_empty() || line.starts_with("//") || line.starts_with('#') {
            continue;
        }
        if line.starts_with("digraph") {
            seen_header = true;
            continue;
        }
        if line == "}" {
            continue;
        }
        if let Some(rest) = line.strip_prefix("graph") {
            let rest = rest.trim().trim_start_matches('[').trim_end_matches(']');
            for attr in rest.split(',') {
                if let Some((k, v)) = attr.split_once('=') {
                    if k.trim() == "arity" {
                        arity = Some(unquote(v.trim()).parse().map_err(|_| DotError::Parse {
                            line: lineno,
                            reason: format!("bad arity value {v:?}"),
                        })?);
                    }
                }
            }
            continue;
        }
        if let Some((from, to)) = line.split_once("->") {
            let from = node_id(from.trim(), lineno)?;
            let to = node_id(to.trim(), lineno)?;
            ensure(&mut raw, from.max(to));
            raw[from].children.push(to);
            continue;
        }
        // node statement: nK [k=v, k=v, ...]
        let (name, attrs) = match line.split_once('[') {
            Some((name, rest)) => (name.trim(), rest.trim_end_matches(']')),
            None => (line, ""),
        };
        let id = node_id(name, lineno)?;
        ensure(&mut raw, id);
        raw[id].declared = true;
        // values never contain commas: probabilities are "a/b" and the
        // label is "level:prob #k"
        for attr in attrs.split(',') {
            let attr = attr.trim();
            if attr.is_empty() {
                continue;
            }
            let Some((k, v)) = attr.split_once('=') else {
                return Err(DotError::Parse {
                    line: lineno,
                    reason: format!("expected key=value, got {attr:?}"),
                });
            };
            let (k, v) = (k.trim(), unquote(v.trim()));
            match k {
                "level" => {
                    raw[id].level = Some(v.parse().map_err(|_| DotError::Parse {
                        line: lineno,
                        reason: format!("bad level {v:?}"),
                    })?)
                }
                "prob" => {
                    raw[id].probability =
                        Some(parse_rational(v).map_err(|e| DotError::Parse {
                            line: lineno,
                            reason: e.to_string(),
                        })?)
                }
                "leaf" => {
                    let sym: usize = v.parse().map_err(|_| DotError::Parse {
                        line: lineno,
                        reason: format!("bad leaf index {v:?}"),
                    })?;
                    if sym == 0 {
                        return Err(DotError::Parse {
                            line: lineno,
                            reason: "leaf indices are 1-based".into(),
                        });
                    }
                    raw[id].leaf_index = Some(sym - 1);
                }
                _ => {} // label and layout attributes are informational
            }
        }
    }

    if !seen_header {
        return Err(DotError::Structure {
            reason: "missing digraph header".into(),
        });
    }
    if raw.is_empty() {
        return Err(DotError::Structure {
            reason: "no nodes".into(),
        });
    }
    let mut nodes = Vec::with_capacity(raw.len());
    for (id, node) in raw.into_iter().enumerate() {
        if !node.declared {
            return Err(DotError::Structure {
                reason: format!("node n{id} referenced but never declared"),
            });
        }
        let probability = node.probability.ok_or_else(|| DotError::Structure {
            reason: format!("node n{id} has no prob attribute"),
        })?;
        let level = node.level.ok_or_else(|| DotError::Structure {
            reason: format!("node n{id} has no level attribute"),
        })?;
        nodes.push(ClaimedNode {
            children: node.children,
            leaf_index: node.leaf_index,
            probability,
            level,
        });
    }
    Ok(ParsedDot { arity, nodes })
}
