//! Independent brute-force ground truth.
//!
//! Nothing here reuses the merge procedure's search: the optimum comes
//! from exhaustive enumeration of Kraft-feasible length sequences, the
//! tree enumerator builds every code tree associated with a PMF, the
//! run enumerator explores every tie-breaking branch of the merge
//! procedure, and the simplex sweep locates points of maximum
//! empirically on exact rational grids.

use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lengths::LengthSequence;
use crate::maxima::{is_point_of_maximum, min_expected_length};
use crate::pmf::Pmf;
use crate::rational::{format_rational, Rational};
use crate::tree::{CodeTree, NodeSpec};

/// Largest `n` accepted by the exhaustive tree and run enumerators.
pub const ENUMERATION_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("InfeasibleBound: no {d}-ary prefix code with {n} words fits within length {max_len}")]
    InfeasibleBound { n: usize, d: usize, max_len: usize },
    #[error("InstanceTooLarge: n = {n} exceeds the enumeration limit {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("GridInfeasible: n = {n}, denominator = {denominator}: {reason}")]
    GridInfeasible {
        n: usize,
        denominator: u64,
        reason: String,
    },
    #[error("BudgetExceeded: grid needs more than {budget} points")]
    BudgetExceeded { budget: usize },
}

/// Minimum expected length over all non-decreasing, Kraft-feasible
/// length sequences with entries at most `max_len`, paired with `p`
/// anti-monotonically (largest probability takes the shortest word).
/// Returns the minimizing sequence. Depth-first with exact running
/// Kraft and cost bounds; `max_len = n - 1` is always feasible.
pub fn oracle_min_expected_length(
    p: &Pmf,
    d: usize,
    max_len: usize,
) -> Result<(Rational, LengthSequence), OracleError> {
    assert!(d >= 2, "arity must be at least 2");
    let n = p.len();
    let infeasible = OracleError::InfeasibleBound { n, d, max_len };
    if max_len == 0 {
        return Err(infeasible);
    }
    // n <= d^max_len, grown without overflow
    let mut capacity = 1usize;
    let mut feasible = false;
    for _ in 0..max_len {
        capacity = match capacity.checked_mul(d) {
            Some(c) => c,
            None => {
                feasible = true;
                break;
            }
        };
        if capacity >= n {
            feasible = true;
            break;
        }
    }
    if !feasible {
        return Err(infeasible);
    }

    let base = BigInt::from(d as u64);
    let inv: Vec<Rational> = (0..=max_len)
        .map(|l| Rational::new(BigInt::one(), base.pow(l as u32)))
        .collect();
    // suffix[i] = sum of probabilities from position i on
    let mut suffix = vec![Rational::zero(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = &suffix[i + 1] + &p[i];
    }

    struct Search<'a> {
        p: &'a Pmf,
        n: usize,
        max_len: usize,
        inv: Vec<Rational>,
        suffix: Vec<Rational>,
        best: Option<(Rational, Vec<usize>)>,
    }

    impl Search<'_> {
        fn dfs(&mut self, pos: usize, min_len: usize, kraft: Rational, cost: Rational, lengths: &mut Vec<usize>) {
            if pos == self.n {
                if kraft <= Rational::one()
                    && self.best.as_ref().is_none_or(|(b, _)| cost < *b)
                {
                    self.best = Some((cost, lengths.clone()));
                }
                return;
            }
            if let Some((bound, _)) = &self.best {
                let floor = &cost
                    + &self.suffix[pos] * Rational::from_integer((min_len as u64).into());
                if floor >= *bound {
                    return;
                }
            }
            let remaining_after = (self.n - pos - 1) as u64;
            for l in min_len..=self.max_len {
                let kraft_next = &kraft + &self.inv[l];
                let kraft_floor = &kraft_next
                    + &self.inv[self.max_len] * Rational::from_integer(remaining_after.into());
                if kraft_floor > Rational::one() {
                    continue; // longer words shrink the Kraft term
                }
                let cost_next =
                    &cost + &self.p[pos] * Rational::from_integer((l as u64).into());
                if let Some((bound, _)) = &self.best {
                    let floor = &cost_next
                        + &self.suffix[pos + 1] * Rational::from_integer((l as u64).into());
                    if floor >= *bound {
                        break; // cost floor only grows with l
                    }
                }
                lengths.push(l);
                self.dfs(pos + 1, l, kraft_next, cost_next, lengths);
                lengths.pop();
            }
        }
    }

    let mut search = Search {
        p,
        n,
        max_len,
        inv,
        suffix,
        best: None,
    };
    search.dfs(0, 1, Rational::zero(), Rational::zero(), &mut Vec::new());
    match search.best {
        Some((value, lengths)) => Ok((value, LengthSequence::new(lengths))),
        None => Err(infeasible),
    }
}

// --- exhaustive tree enumeration -----------------------------------

#[derive(Debug)]
enum ShapeNode {
    Leaf,
    Internal(Vec<Rc<ShapeNode>>),
}

fn shape_sig(s: &ShapeNode) -> String {
    match s {
        ShapeNode::Leaf => "L".to_string(),
        ShapeNode::Internal(children) => {
            let mut parts: Vec<String> = children.iter().map(|c| shape_sig(c)).collect();
            parts.sort();
            format!("({})", parts.join(""))
        }
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=(total - (parts - 1)) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn shapes(n: usize, d: usize, memo: &mut Vec<Option<Rc<Vec<Rc<ShapeNode>>>>>) -> Rc<Vec<Rc<ShapeNode>>> {
    if let Some(cached) = &memo[n] {
        return cached.clone();
    }
    let mut out: Vec<Rc<ShapeNode>> = Vec::new();
    if n == 1 {
        out.push(Rc::new(ShapeNode::Leaf));
    } else {
        for k in 2..=d.min(n) {
            for parts in compositions(n, k) {
                let choices: Vec<Rc<Vec<Rc<ShapeNode>>>> =
                    parts.iter().map(|&part| shapes(part, d, memo)).collect();
                let mut prefixes: Vec<Vec<Rc<ShapeNode>>> = vec![Vec::new()];
                for options in &choices {
                    let mut next = Vec::new();
                    for prefix in &prefixes {
                        for option in options.iter() {
                            let mut extended = prefix.clone();
                            extended.push(option.clone());
                            next.push(extended);
                        }
                    }
                    prefixes = next;
                }
                out.extend(prefixes.into_iter().map(|c| Rc::new(ShapeNode::Internal(c))));
            }
        }
    }
    let rc = Rc::new(out);
    memo[n] = Some(rc.clone());
    rc
}

/// Unordered shapes with `n` leaves and child counts in `2..=d`.
fn distinct_shapes(n: usize, d: usize) -> Vec<Rc<ShapeNode>> {
    let mut memo = vec![None; n + 1];
    let all = shapes(n, d, &mut memo);
    let mut seen = HashSet::new();
    all.iter()
        .filter(|s| seen.insert(shape_sig(s)))
        .cloned()
        .collect()
}

fn shape_to_specs(shape: &ShapeNode, assignment: &[usize]) -> Vec<NodeSpec> {
    fn walk(s: &ShapeNode, assignment: &[usize], next_leaf: &mut usize, specs: &mut Vec<NodeSpec>) -> usize {
        match s {
            ShapeNode::Leaf => {
                let leaf_index = assignment[*next_leaf];
                *next_leaf += 1;
                specs.push(NodeSpec {
                    children: vec![],
                    leaf_index: Some(leaf_index),
                });
                specs.len() - 1
            }
            ShapeNode::Internal(children) => {
                let ids: Vec<usize> = children
                    .iter()
                    .map(|c| walk(c, assignment, next_leaf, specs))
                    .collect();
                specs.push(NodeSpec {
                    children: ids,
                    leaf_index: None,
                });
                specs.len() - 1
            }
        }
    }
    let mut specs = Vec::new();
    walk(shape, assignment, &mut 0, &mut specs);
    specs
}

/// Distinct ways to hand the PMF indices to `n` leaf positions, where
/// assignments that only swap equal probabilities count once (indices
/// within an equal-probability group are always used in ascending
/// order).
fn distinct_assignments(p: &Pmf) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Rational, Vec<usize>)> = Vec::new();
    for i in 0..p.len() {
        match groups.last_mut() {
            Some((prob, members)) if *prob == p[i] => members.push(i),
            _ => groups.push((p[i].clone(), vec![i])),
        }
    }
    let mut out = Vec::new();
    let mut used = vec![0usize; groups.len()];
    fn rec(
        groups: &[(Rational, Vec<usize>)],
        used: &mut Vec<usize>,
        acc: &mut Vec<usize>,
        n: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if acc.len() == n {
            out.push(acc.clone());
            return;
        }
        for (g, (_, members)) in groups.iter().enumerate() {
            if used[g] < members.len() {
                acc.push(members[used[g]]);
                used[g] += 1;
                rec(groups, used, acc, n, out);
                used[g] -= 1;
                acc.pop();
            }
        }
    }
    rec(&groups, &mut used, &mut Vec::new(), p.len(), &mut out);
    out
}

/// Every code tree associated with `p` (child counts `2..=d`), one
/// representative per isomorphism class, in signature order.
pub fn enumerate_trees(p: &Pmf, d: usize) -> Result<Vec<CodeTree>, OracleError> {
    let n = p.len();
    if n > ENUMERATION_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let assignments = distinct_assignments(p);
    let mut found: BTreeMap<String, CodeTree> = BTreeMap::new();
    for shape in distinct_shapes(n, d) {
        for assignment in &assignments {
            let specs = shape_to_specs(&shape, assignment);
            let tree = CodeTree::assemble(d, &specs, p)
                .expect("enumerated shapes are valid code trees");
            found.entry(tree.canonical_signature()).or_insert(tree);
        }
    }
    Ok(found.into_values().collect())
}

// --- exhaustive merge-procedure branches ----------------------------

#[derive(Clone)]
struct Sub {
    prob: Rational,
    sig: String,
    leaf_index: Option<usize>,
    children: Vec<Sub>,
}

impl Sub {
    fn leaf(index: usize, prob: Rational) -> Self {
        let sig = format!("L{}", format_rational(&prob));
        Sub {
            prob,
            sig,
            leaf_index: Some(index),
            children: vec![],
        }
    }

    fn merge(mut chosen: Vec<Sub>) -> Self {
        chosen.sort_by(|a, b| a.prob.cmp(&b.prob).then(a.sig.cmp(&b.sig)));
        let prob = chosen
            .iter()
            .fold(Rational::zero(), |acc, s| acc + &s.prob);
        let mut sigs: Vec<&str> = chosen.iter().map(|s| s.sig.as_str()).collect();
        sigs.sort();
        let sig = format!("N{}({})", format_rational(&prob), sigs.join(","));
        Sub {
            prob,
            sig,
            leaf_index: None,
            children: chosen,
        }
    }

    fn to_tree(&self, d: usize, p: &Pmf) -> CodeTree {
        fn walk(s: &Sub, specs: &mut Vec<NodeSpec>) -> usize {
            let ids: Vec<usize> = s.children.iter().map(|c| walk(c, specs)).collect();
            specs.push(NodeSpec {
                children: ids,
                leaf_index: s.leaf_index,
            });
            specs.len() - 1
        }
        let mut specs = Vec::new();
        walk(self, &mut specs);
        CodeTree::assemble(d, &specs, p).expect("merge branches build valid trees")
    }
}

/// All ways to pick `needed` members from groups of interchangeable
/// (same-signature) candidates, as per-group counts.
fn group_count_choices(capacities: &[usize], needed: usize) -> Vec<Vec<usize>> {
    fn rec(capacities: &[usize], needed: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if capacities.is_empty() {
            if needed == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let first = capacities[0].min(needed);
        for take in 0..=first {
            acc.push(take);
            rec(&capacities[1..], needed - take, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(capacities, needed, &mut Vec::new(), &mut out);
    out
}

/// Every tree obtainable from the merge procedure on `p` by exploring
/// all tie-breaking choices, one representative per isomorphism class,
/// in signature order. Guarded: refuses `n > 10`.
pub fn enumerate_huffman_runs(p: &Pmf, d: usize) -> Result<Vec<CodeTree>, OracleError> {
    let n = p.len();
    if n > ENUMERATION_LIMIT {
        return Err(OracleError::InstanceTooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let first_size = crate::huffman::first_merge_size(n, d);

    let mut visited: HashSet<String> = HashSet::new();
    let mut found: BTreeMap<String, CodeTree> = BTreeMap::new();

    fn explore(
        roots: Vec<Sub>,
        n: usize,
        d: usize,
        first_size: usize,
        visited: &mut HashSet<String>,
        found: &mut BTreeMap<String, CodeTree>,
        p: &Pmf,
    ) {
        if roots.len() == 1 {
            let tree = roots[0].to_tree(d, p);
            found.entry(tree.canonical_signature()).or_insert(tree);
            return;
        }
        let mut sorted = roots;
        sorted.sort_by(|a, b| a.prob.cmp(&b.prob).then(a.sig.cmp(&b.sig)));
        let state_key: String = sorted
            .iter()
            .map(|s| s.sig.as_str())
            .collect::<Vec<_>>()
            .join("|");
        if !visited.insert(state_key) {
            return;
        }

        let size = if sorted.len() == n { first_size } else { d };
        let boundary = sorted[size - 1].prob.clone();
        let mandatory: Vec<usize> = (0..sorted.len())
            .filter(|&i| sorted[i].prob < boundary)
            .collect();
        let tied: Vec<usize> = (0..sorted.len())
            .filter(|&i| sorted[i].prob == boundary)
            .collect();
        let needed = size - mandatory.len();

        // Tied candidates with identical signatures are interchangeable;
        // enumerate per-signature counts instead of raw subsets.
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for &i in &tied {
            match groups.last_mut() {
                Some((sig, members)) if *sig == sorted[i].sig => members.push(i),
                _ => groups.push((sorted[i].sig.clone(), vec![i])),
            }
        }
        let capacities: Vec<usize> = groups.iter().map(|(_, m)| m.len()).collect();
        for counts in group_count_choices(&capacities, needed) {
            let mut chosen_idx: Vec<usize> = mandatory.clone();
            for (g, &take) in counts.iter().enumerate() {
                chosen_idx.extend(&groups[g].1[..take]);
            }
            let chosen_set: HashSet<usize> = chosen_idx.iter().copied().collect();
            let chosen: Vec<Sub> = chosen_idx.iter().map(|&i| sorted[i].clone()).collect();
            let mut next: Vec<Sub> = (0..sorted.len())
                .filter(|i| !chosen_set.contains(i))
                .map(|i| sorted[i].clone())
                .collect();
            next.push(Sub::merge(chosen));
            explore(next, n, d, first_size, visited, found, p);
        }
    }

    let leaves: Vec<Sub> = (0..n).map(|i| Sub::leaf(i, p[i].clone())).collect();
    explore(leaves, n, d, first_size, &mut visited, &mut found, p);
    Ok(found.into_values().collect())
}

// --- simplex grid sweeps --------------------------------------------

/// All PMFs with common denominator `denominator` on `n` symbols:
/// compositions into positive parts, sorted non-increasing and
/// deduplicated (i.e. partitions into exactly `n` parts).
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    pub n: usize,
    pub denominator: u64,
    pub points: Vec<Pmf>,
}

/// Builds the grid. Requires `n` to divide `denominator` so the
/// uniform distribution is a grid point; `budget` caps the point count.
pub fn simplex_grid(
    n: usize,
    denominator: u64,
    budget: Option<usize>,
) -> Result<SimplexGrid, OracleError> {
    if n < 2 {
        return Err(OracleError::GridInfeasible {
            n,
            denominator,
            reason: "need at least 2 symbols".into(),
        });
    }
    if denominator == 0 || !denominator.is_multiple_of(n as u64) {
        return Err(OracleError::GridInfeasible {
            n,
            denominator,
            reason: "n must divide the denominator so the uniform distribution is on the grid"
                .into(),
        });
    }

    fn gen(
        remaining: u64,
        slots: usize,
        max_part: u64,
        acc: &mut Vec<u64>,
        denominator: u64,
        budget: Option<usize>,
        out: &mut Vec<Pmf>,
    ) -> Result<(), OracleError> {
        if slots == 0 {
            debug_assert_eq!(remaining, 0);
            if let Some(b) = budget {
                if out.len() >= b {
                    return Err(OracleError::BudgetExceeded { budget: b });
                }
            }
            let probs = acc
                .iter()
                .map(|&a| Rational::new(a.into(), denominator.into()))
                .collect();
            out.push(Pmf::new(probs).expect("grid points are valid PMFs"));
            return Ok(());
        }
        let hi = max_part.min(remaining - (slots as u64 - 1));
        let lo = remaining.div_ceil(slots as u64);
        for part in (lo..=hi).rev() {
            acc.push(part);
            gen(remaining - part, slots - 1, part, acc, denominator, budget, out)?;
            acc.pop();
        }
        Ok(())
    }

    let mut points = Vec::new();
    gen(
        denominator,
        n,
        denominator,
        &mut Vec::new(),
        denominator,
        budget,
        &mut points,
    )?;
    Ok(SimplexGrid {
        n,
        denominator,
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(with = "crate::rational::serde_exact::vec")]
    pub probs: Vec<Rational>,
    #[serde(with = "crate::rational::serde_exact")]
    pub value: Rational,
    pub classifier_is_max: bool,
    pub oracle_is_argmax: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    #[serde(with = "crate::rational::serde_exact::vec")]
    pub probs: Vec<Rational>,
    pub classifier_verdict: bool,
    pub oracle_verdict: bool,
}

/// Result of sweeping the whole grid: empirical maximum, its attaining
/// points, and agreement with the O(n) classifier at every point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub arity: usize,
    pub denominator: u64,
    pub point_count: usize,
    #[serde(with = "crate::rational::serde_exact")]
    pub max_value: Rational,
    pub argmax_count: usize,
    pub classifier_agreement: bool,
    pub disagreements: Vec<Disagreement>,
    #[serde(skip)]
    pub argmax_points: Vec<Pmf>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// One CSV row per grid point: probabilities (exact), the minimum
    /// expected length, the classifier verdict, and whether the point
    /// attains the sweep maximum.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.n)
            .map(|i| format!("p{i}"))
            .chain(["value".into(), "classifier_is_max".into(), "oracle_is_argmax".into()])
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .probs
                .iter()
                .map(format_rational)
                .chain([
                    format_rational(&row.value),
                    row.classifier_is_max.to_string(),
                    row.oracle_is_argmax.to_string(),
                ])
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Evaluates the minimum expected length at every grid point, finds
/// the argmax set, and checks the classifier's membership verdict at
/// every point.
pub fn sweep_simplex(
    n: usize,
    d: usize,
    denominator: u64,
    budget: Option<usize>,
) -> Result<SweepReport, OracleError> {
    let grid = simplex_grid(n, denominator, budget)?;
    let values: Vec<Rational> = grid
        .points
        .iter()
        .map(|p| min_expected_length(p, d))
        .collect();
    let max_value = values.iter().max().cloned().expect("grid is non-empty");

    let mut rows = Vec::with_capacity(grid.points.len());
    let mut argmax_points = Vec::new();
    let mut disagreements = Vec::new();
    for (point, value) in grid.points.iter().zip(&values) {
        let oracle_is_argmax = *value == max_value;
        let classifier_is_max = is_point_of_maximum(point, d).is_max;
        if oracle_is_argmax {
            argmax_points.push(point.clone());
        }
        if classifier_is_max != oracle_is_argmax {
            disagreements.push(Disagreement {
                probs: point.probs().to_vec(),
                classifier_verdict: classifier_is_max,
                oracle_verdict: oracle_is_argmax,
            });
        }
        rows.push(SweepRow {
            probs: point.probs().to_vec(),
            value: value.clone(),
            classifier_is_max,
            oracle_is_argmax,
        });
    }
    Ok(SweepReport {
        n,
        arity: d,
        denominator,
        point_count: grid.points.len(),
        max_value,
        argmax_count: argmax_points.len(),
        classifier_agreement: disagreements.is_empty(),
        disagreements,
        argmax_points,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::huffman_tree;
    use crate::properties::verify_huffman;
    use crate::rational::ratio;

    #[test]
    fn dyadic_optimum_cross_checked_by_tree_enumeration() {
        let p = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)]).unwrap();
        let (value, lengths) = oracle_min_expected_length(&p, 2, 3).unwrap();
        assert_eq!(value, ratio(7, 4));
        assert_eq!(lengths.as_slice(), &[1, 2, 3, 3]);

        // Independent route: minimum over all 4-leaf binary trees.
        let trees = enumerate_trees(&p, 2).unwrap();
        let tree_min = trees
            .iter()
            .map(|t| t.expected_length().unwrap())
            .min()
            .unwrap();
        assert_eq!(tree_min, ratio(7, 4));
    }

    #[test]
    fn uniform_six_optimum() {
        let p = Pmf::uniform(6).unwrap();
        let (value, lengths) = oracle_min_expected_length(&p, 2, 5).unwrap();
        assert_eq!(value, ratio(8, 3));
        assert_eq!(lengths.as_slice(), &[2, 2, 3, 3, 3, 3]);
    }

    #[test]
    fn star_is_optimal_when_n_equals_d() {
        for d in 2..=5 {
            let p = Pmf::uniform(d).unwrap();
            let (value, lengths) = oracle_min_expected_length(&p, d, d - 1).unwrap();
            assert_eq!(value, ratio(1, 1));
            assert!(lengths.as_slice().iter().all(|&l| l == 1));
        }
    }

    #[test]
    fn infeasible_bound_is_detected() {
        let p = Pmf::uniform(5).unwrap();
        assert!(matches!(
            oracle_min_expected_length(&p, 2, 2),
            Err(OracleError::InfeasibleBound { .. })
        ));
        assert!(oracle_min_expected_length(&p, 2, 3).is_ok());
    }

    #[test]
    fn engine_matches_oracle_at_arity_four() {
        let mut pmfs: Vec<Pmf> = Vec::new();
        for (n, den) in [(2usize, 6u64), (3, 6), (4, 8), (5, 10), (6, 6)] {
            pmfs.extend(simplex_grid(n, den, None).unwrap().points);
        }
        pmfs.push(Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)]).unwrap());
        for p in pmfs {
            let (tree, _) = huffman_tree(&p, 4);
            let engine = tree.expected_length().unwrap();
            let (oracle, _) = oracle_min_expected_length(&p, 4, p.len().max(3) - 1).unwrap();
            assert_eq!(engine, oracle, "p={p:?}");
        }
    }

    #[test]
    fn oracle_uniform_value_is_monotone_in_n() {
        for d in [2usize, 3] {
            let mut prev = Rational::zero();
            for n in 2..=8 {
                let p = Pmf::uniform(n).unwrap();
                let (value, _) = oracle_min_expected_length(&p, d, n - 1).unwrap();
                assert!(value >= prev, "n={n} d={d}");
                prev = value;
            }
        }
    }

    #[test]
    fn run_enumeration_on_ties_yields_single_length_sequence() {
        let p = Pmf::uniform(4).unwrap();
        let runs = enumerate_huffman_runs(&p, 2).unwrap();
        assert!(!runs.is_empty());
        for tree in &runs {
            assert_eq!(tree.length_sequence().as_slice(), &[2, 2, 2, 2]);
        }
        // The engine's own tie-break is one of the explored branches.
        let (engine, _) = huffman_tree(&p, 2);
        let sigs: Vec<String> = runs.iter().map(|t| t.canonical_signature()).collect();
        assert!(sigs.contains(&engine.canonical_signature()));
    }

    #[test]
    fn every_run_branch_passes_verification() {
        let p = Pmf::new(vec![ratio(2, 5), ratio(1, 5), ratio(1, 5), ratio(1, 5)]).unwrap();
        let runs = enumerate_huffman_runs(&p, 2).unwrap();
        assert!(!runs.is_empty());
        for tree in &runs {
            assert!(verify_huffman(tree, &p).unwrap().is_huffman);
        }
    }

    #[test]
    fn enumeration_guard() {
        let p = Pmf::uniform(11).unwrap();
        assert!(matches!(
            enumerate_huffman_runs(&p, 2),
            Err(OracleError::InstanceTooLarge { n: 11, limit: 10 })
        ));
        assert!(matches!(
            enumerate_trees(&p, 2),
            Err(OracleError::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn grid_contains_uniform_and_respects_divisibility() {
        let grid = simplex_grid(4, 12, None).unwrap();
        let uniform = Pmf::uniform(4).unwrap();
        assert!(grid.points.contains(&uniform));
        // partitions of 12 into 4 positive parts: 15 of them
        assert_eq!(grid.points.len(), 15);

        assert!(matches!(
            simplex_grid(4, 10, None),
            Err(OracleError::GridInfeasible { .. })
        ));
        assert!(matches!(
            simplex_grid(4, 12, Some(5)),
            Err(OracleError::BudgetExceeded { budget: 5 })
        ));
    }

    #[test]
    fn sweep_four_two_twelve_matches_classifier() {
        let report = sweep_simplex(4, 2, 12, None).unwrap();
        assert_eq!(report.max_value, ratio(2, 1));
        assert!(report.classifier_agreement, "{:?}", report.disagreements);
        // The argmax set is exactly the points whose lowest-two sum
        // dominates the highest probability.
        for row in &report.rows {
            let lowest_two: Rational = row.probs[2..].iter().sum();
            assert_eq!(row.oracle_is_argmax, lowest_two >= row.probs[0]);
        }
    }

    #[test]
    fn sweep_three_two_twelve_has_unique_argmax() {
        let report = sweep_simplex(3, 2, 12, None).unwrap();
        assert!(report.classifier_agreement);
        assert_eq!(report.argmax_count, 1);
        assert_eq!(report.argmax_points[0], Pmf::uniform(3).unwrap());
    }

    #[test]
    fn sweep_two_symbols_everything_is_max() {
        let report = sweep_simplex(2, 2, 8, None).unwrap();
        assert!(report.classifier_agreement);
        assert_eq!(report.max_value, ratio(1, 1));
        assert_eq!(report.argmax_count, report.point_count);
        assert!(report.rows.iter().all(|r| r.classifier_is_max));
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let report = sweep_simplex(3, 2, 6, None).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + report.point_count);
        assert_eq!(lines[0], "p1,p2,p3,value,classifier_is_max,oracle_is_argmax");
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 6));
    }
}
