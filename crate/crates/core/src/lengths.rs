//! Codeword length sequences and the Kraft inequality.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::pmf::Pmf;
use crate::rational::Rational;

/// Positive codeword lengths in non-decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LengthSequence(Vec<usize>);

impl LengthSequence {
    /// Sorts `lengths` non-decreasingly. Panics on a zero length, which
    /// no construction path produces.
    pub fn new(mut lengths: Vec<usize>) -> Self {
        assert!(lengths.iter().all(|&l| l >= 1), "codeword lengths are positive");
        lengths.sort_unstable();
        LengthSequence(lengths)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Exact value of `sum(d^-l_i)`.
    pub fn kraft_sum(&self, d: usize) -> Rational {
        let base = BigInt::from(d as u64);
        self.0
            .iter()
            .map(|&l| Rational::new(BigInt::one(), base.pow(l as u32)))
            .fold(Rational::zero(), |acc, term| acc + term)
    }

    /// Kraft inequality: a `d`-ary prefix code with these lengths exists
    /// iff the sum is at most 1.
    pub fn satisfies_kraft(&self, d: usize) -> bool {
        self.kraft_sum(d) <= Rational::one()
    }

    /// Expected length under the anti-monotone assignment: the largest
    /// probability takes the shortest length. `p` is sorted
    /// non-increasing and these lengths non-decreasing, so the pairing
    /// is positional.
    pub fn expected_length_for(&self, p: &Pmf) -> Rational {
        assert_eq!(self.len(), p.len(), "length/PMF size mismatch");
        self.0
            .iter()
            .zip(p.iter())
            .map(|(&l, prob)| prob * Rational::from_integer(BigInt::from(l as u64)))
            .fold(Rational::zero(), |acc, term| acc + term)
    }

    /// Space-separated rendering, e.g. `2 2 3 3 3 3`.
    pub fn display(&self) -> String {
        self.0
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}
