//! Validated probability mass functions and the majorization order.
//!
//! A [`Pmf`] stores strictly positive rationals that sum to exactly 1,
//! kept in non-increasing order. Input order is forgotten on
//! construction; callers that need to report per-symbol results keep
//! the permutation returned by [`Pmf::with_permutation`].

use serde::Serialize;
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, InvalidRational, Rational};
use num_traits::{One, Zero};

/// Validation and shape errors for PMFs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PmfError {
    #[error("ZeroOrNegativeProbability: entry {index} is {value}, all probabilities must be > 0",
        value = format_rational(value))]
    ZeroOrNegativeProbability { index: usize, value: Rational },
    #[error("SumNotOne: entries sum to {sum}, deficit {deficit}",
        sum = format_rational(sum), deficit = format_rational(deficit))]
    SumNotOne { sum: Rational, deficit: Rational },
    #[error("TooFewSymbols: need at least 2 symbols, got {n}")]
    TooFewSymbols { n: usize },
    #[error("DimensionMismatch: left has {left} entries, right has {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// A probability mass function with positive entries summing to 1,
/// stored non-increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pmf {
    probs: Vec<Rational>,
}

impl Pmf {
    /// Validates and sorts `raw` into a PMF. Input order is forgotten.
    pub fn new(raw: Vec<Rational>) -> Result<Self, PmfError> {
        Self::with_permutation(raw).map(|(pmf, _)| pmf)
    }

    /// Like [`Pmf::new`], but also returns the permutation mapping each
    /// sorted position to the original index (`perm[k]` is the input
    /// position of the k-th largest probability; ties keep input order).
    pub fn with_permutation(raw: Vec<Rational>) -> Result<(Self, Vec<usize>), PmfError> {
        if raw.len() < 2 {
            return Err(PmfError::TooFewSymbols { n: raw.len() });
        }
        for (index, value) in raw.iter().enumerate() {
            if *value <= Rational::zero() {
                return Err(PmfError::ZeroOrNegativeProbability {
                    index,
                    value: value.clone(),
                });
            }
        }
        let sum: Rational = raw.iter().sum();
        if !sum.is_one() {
            let deficit = Rational::one() - &sum;
            return Err(PmfError::SumNotOne { sum, deficit });
        }
        let mut perm: Vec<usize> = (0..raw.len()).collect();
        perm.sort_by(|&a, &b| raw[b].cmp(&raw[a]).then(a.cmp(&b)));
        let probs = perm.iter().map(|&i| raw[i].clone()).collect();
        Ok((Pmf { probs }, perm))
    }

    /// The uniform distribution on `n` symbols, every entry exactly `1/n`.
    pub fn uniform(n: usize) -> Result<Self, PmfError> {
        if n < 2 {
            return Err(PmfError::TooFewSymbols { n });
        }
        let entry = Rational::new(1.into(), (n as u64).into());
        Ok(Pmf {
            probs: vec![entry; n],
        })
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty() // never true: n >= 2 by construction
    }

    /// Entries in non-increasing order.
    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.probs.iter()
    }

    /// True iff every entry equals `1/n`.
    pub fn is_uniform(&self) -> bool {
        let first = &self.probs[0];
        self.probs.iter().all(|p| p == first)
    }

    /// Sum of the `d` smallest entries. Requires `d <= n`.
    pub fn lowest_sum(&self, d: usize) -> Rational {
        assert!(d <= self.len());
        self.probs[self.len() - d..].iter().sum()
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.probs[i]
    }
}

/// Rescales entries by their exact sum so they total 1.
/// Positivity is still checked later by PMF validation.
pub fn normalize(raw: Vec<Rational>) -> Result<Vec<Rational>, PmfError> {
    let sum: Rational = raw.iter().sum();
    if sum <= Rational::zero() {
        return Err(PmfError::SumNotOne {
            deficit: Rational::one() - &sum,
            sum,
        });
    }
    Ok(raw.into_iter().map(|v| v / &sum).collect())
}

/// Outcome of a majorization comparison between two equally sized PMFs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MajorizationResult {
    pub holds: bool,
    /// 1-based k of the first prefix sum where domination fails.
    pub first_violation_index: Option<usize>,
    #[serde(with = "crate::rational::serde_exact::vec")]
    pub prefix_sums_left: Vec<Rational>,
    #[serde(with = "crate::rational::serde_exact::vec")]
    pub prefix_sums_right: Vec<Rational>,
}

/// Whether `p` majorizes `q`: every top-k prefix sum of `p` dominates
/// that of `q`. Both PMFs are already sorted non-increasing, so prefix
/// sums are the top-k sums.
pub fn majorizes(p: &Pmf, q: &Pmf) -> Result<MajorizationResult, PmfError> {
    if p.len() != q.len() {
        return Err(PmfError::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut left = Vec::with_capacity(p.len());
    let mut right = Vec::with_capacity(q.len());
    let mut acc_l = Rational::zero();
    let mut acc_r = Rational::zero();
    let mut first_violation_index = None;
    for k in 0..p.len() {
        acc_l += &p[k];
        acc_r += &q[k];
        if first_violation_index.is_none() && acc_l < acc_r {
            first_violation_index = Some(k + 1);
        }
        left.push(acc_l.clone());
        right.push(acc_r.clone());
    }
    Ok(MajorizationResult {
        holds: first_violation_index.is_none(),
        first_violation_index,
        prefix_sums_left: left,
        prefix_sums_right: right,
    })
}

/// Error for the line-oriented PMF text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PmfParseError {
    #[error("PmfParse: line {line}: {source}")]
    BadValue {
        line: usize,
        source: InvalidRational,
    },
    #[error("PmfParse: no values found")]
    Empty,
}

/// Parses the shared PMF text format: one value per line, `a/b` or a
/// decimal literal; blank lines and lines beginning with `#` ignored.
pub fn parse_pmf_text(text: &str) -> Result<Vec<Rational>, PmfParseError> {
    let mut values = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = parse_rational(line).map_err(|source| PmfParseError::BadValue {
            line: idx + 1,
            source,
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(PmfParseError::Empty);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn already_sorted_input_is_kept() {
        let p = Pmf::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.probs()[0], ratio(1, 2));
        assert_eq!(p.probs()[3], ratio(1, 8));
    }

    #[test]
    fn unsorted_uniform_input_becomes_uniform() {
        let sixth = ratio(1, 6);
        let p = Pmf::new(vec![sixth.clone(); 6]).unwrap();
        assert_eq!(p, Pmf::uniform(6).unwrap());
    }

    #[test]
    fn sum_not_one_reports_exact_deficit() {
        let err = Pmf::new(vec![ratio(1, 2), ratio(1, 3)]).unwrap_err();
        match err {
            PmfError::SumNotOne { sum, deficit } => {
                assert_eq!(sum, ratio(5, 6));
                assert_eq!(deficit, ratio(1, 6));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_negative_and_short_inputs_rejected() {
        assert!(matches!(
            Pmf::new(vec![ratio(1, 1), ratio(0, 1)]).unwrap_err(),
            PmfError::ZeroOrNegativeProbability { index: 1, .. }
        ));
        assert!(matches!(
            Pmf::new(vec![ratio(3, 2), ratio(-1, 2)]).unwrap_err(),
            PmfError::ZeroOrNegativeProbability { index: 1, .. }
        ));
        assert!(matches!(
            Pmf::new(vec![ratio(1, 1)]).unwrap_err(),
            PmfError::TooFewSymbols { n: 1 }
        ));
        assert!(matches!(
            Pmf::uniform(1).unwrap_err(),
            PmfError::TooFewSymbols { n: 1 }
        ));
    }

    #[test]
    fn uniform_entries_are_exact() {
        let p = Pmf::uniform(4).unwrap();
        assert!(p.iter().all(|v| *v == ratio(1, 4)));
        let p6 = Pmf::uniform(6).unwrap();
        assert!(p6.iter().all(|v| *v == ratio(1, 6)));
    }

    #[test]
    fn permutation_tracks_input_positions() {
        let (p, perm) = Pmf::with_permutation(vec![ratio(1, 8), ratio(1, 2), ratio(1, 8), ratio(1, 4)])
            .unwrap();
        assert_eq!(p.probs(), &[ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)]);
        assert_eq!(perm, vec![1, 3, 0, 2]);
    }

    #[test]
    fn majorization_examples() {
        let p = Pmf::new(vec![ratio(1, 2), ratio(3, 10), ratio(1, 5)]).unwrap();
        let q = Pmf::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap();
        let r = majorizes(&p, &q).unwrap();
        assert!(r.holds);
        assert_eq!(r.prefix_sums_left.last().unwrap(), &ratio(1, 1));
        assert_eq!(r.prefix_sums_right.last().unwrap(), &ratio(1, 1));

        // Reverse direction fails at the first prefix.
        let rev = majorizes(&q, &p).unwrap();
        assert!(!rev.holds);
        assert_eq!(rev.first_violation_index, Some(1));

        // Reflexivity.
        assert!(majorizes(&p, &p).unwrap().holds);
    }

    #[test]
    fn majorization_is_transitive_along_a_chain() {
        let p = Pmf::new(vec![ratio(1, 2), ratio(3, 10), ratio(1, 5)]).unwrap();
        let q = Pmf::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap();
        let r = Pmf::uniform(3).unwrap();
        assert!(majorizes(&p, &q).unwrap().holds);
        assert!(majorizes(&q, &r).unwrap().holds);
        assert!(majorizes(&p, &r).unwrap().holds);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = Pmf::uniform(3).unwrap();
        let q = Pmf::uniform(4).unwrap();
        assert!(matches!(
            majorizes(&p, &q).unwrap_err(),
            PmfError::DimensionMismatch { left: 3, right: 4 }
        ));
    }

    #[test]
    fn normalize_rescales_by_exact_sum() {
        let scaled = normalize(vec![ratio(3, 1), ratio(2, 1), ratio(1, 1)]).unwrap();
        let p = Pmf::new(scaled).unwrap();
        assert_eq!(p.probs(), &[ratio(1, 2), ratio(1, 3), ratio(1, 6)]);
    }

    #[test]
    fn text_format_accepts_fractions_decimals_and_comments() {
        let text = "# header\n1/2\n\n0.25\n  # note\n1/4\n";
        let values = parse_pmf_text(text).unwrap();
        assert_eq!(values, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]);
        assert!(matches!(
            parse_pmf_text("# nothing\n").unwrap_err(),
            PmfParseError::Empty
        ));
        assert!(matches!(
            parse_pmf_text("1/2\nnope\n").unwrap_err(),
            PmfParseError::BadValue { line: 2, .. }
        ));
    }

    /// Random PMFs as integer masses over their exact sum.
    fn arb_pmf(max_n: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(1u32..30, 2..=max_n).prop_map(|masses| {
            let total: u32 = masses.iter().sum();
            let raw = masses
                .iter()
                .map(|&m| Rational::new(m.into(), total.into()))
                .collect();
            Pmf::new(raw).unwrap()
        })
    }

    proptest! {
        #[test]
        fn generated_pmfs_hold_invariants(p in arb_pmf(8)) {
            let sum: Rational = p.iter().sum();
            prop_assert!(sum.is_one());
            prop_assert!(p.iter().all(|v| *v > Rational::zero()));
            prop_assert!(p.probs().windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn every_pmf_majorizes_uniform(p in arb_pmf(8)) {
            let u = Pmf::uniform(p.len()).unwrap();
            prop_assert!(majorizes(&p, &u).unwrap().holds);
        }

        #[test]
        fn mutual_majorization_implies_equality(p in arb_pmf(6), q_masses in prop::collection::vec(1u32..20, 2..=6)) {
            let total: u32 = q_masses.iter().sum();
            let q = Pmf::new(
                q_masses.iter().map(|&m| Rational::new(m.into(), total.into())).collect()
            ).unwrap();
            if p.len() == q.len() {
                let pq = majorizes(&p, &q).unwrap().holds;
                let qp = majorizes(&q, &p).unwrap().holds;
                if pq && qp {
                    prop_assert_eq!(p, q);
                }
            }
        }
    }
}
