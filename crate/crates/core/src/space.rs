//! Finite product probability spaces and mixed-radix point indexing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default maximum number of points an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 26;

/// Default maximum number of unordered pairs a pairwise scan may visit.
pub const DEFAULT_PAIR_CAP: u128 = 1 << 34;

const PROB_TOLERANCE: f64 = 1e-12;

/// Resource caps for exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_points: u64,
    pub max_pairs: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_points: DEFAULT_ENUMERATION_CAP,
            max_pairs: DEFAULT_PAIR_CAP,
        }
    }
}

/// A point of the product space, stored as per-coordinate symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<usize>);

impl Point {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<usize>> for Point {
    fn from(coords: Vec<usize>) -> Self {
        Point(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Independent coordinates `X_1, ..., X_n`, coordinate `i` taking values in
/// `0..k_i` with law `probs[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    alphabet_sizes: Vec<usize>,
    probs: Vec<Vec<f64>>,
    limits: Limits,
}

impl ProductSpace {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        for (i, law) in probs.iter().enumerate() {
            if law.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "coordinate {i} has an empty alphabet"
                )));
            }
            if let Some(j) = law.iter().position(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "probs[{i}][{j}] = {} is not a non-negative real",
                    law[j]
                )));
            }
            let total: f64 = law.iter().sum();
            if (total - 1.0).abs() > PROB_TOLERANCE {
                return Err(Error::InvalidSpace(format!(
                    "probs[{i}] sums to {total}, expected 1"
                )));
            }
        }
        let alphabet_sizes = probs.iter().map(Vec::len).collect();
        Ok(Self {
            alphabet_sizes,
            probs,
            limits: Limits::default(),
        })
    }

    pub fn uniform(alphabet_sizes: &[usize]) -> Result<Self> {
        if let Some(i) = alphabet_sizes.iter().position(|&k| k == 0) {
            return Err(Error::InvalidSpace(format!(
                "coordinate {i} has an empty alphabet"
            )));
        }
        Self::new(
            alphabet_sizes
                .iter()
                .map(|&k| vec![1.0 / k as f64; k])
                .collect(),
        )
    }

    /// `{0,1}^n` with fair coordinates.
    pub fn binary(n: usize) -> Self {
        Self::uniform(&vec![2; n]).expect("binary alphabets are valid")
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn n(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// Total number of points, or `None` if it overflows `u128`.
    pub fn point_count(&self) -> Option<u128> {
        self.alphabet_sizes
            .iter()
            .try_fold(1u128, |acc, &k| acc.checked_mul(k as u128))
    }

    /// Point count as a `u64`, failing when it exceeds the enumeration cap.
    pub fn enumerable_count(&self) -> Result<u64> {
        let cap = self.limits.max_points;
        match self.point_count() {
            Some(points) if points <= cap as u128 => Ok(points as u64),
            Some(points) => Err(Error::SpaceTooLarge { points, cap }),
            None => Err(Error::SpaceTooLarge {
                points: u128::MAX,
                cap,
            }),
        }
    }

    /// Rank stride of each coordinate (big-endian: the last coordinate
    /// varies fastest).
    pub fn strides(&self) -> Vec<u64> {
        let mut strides = vec![1u64; self.n()];
        for i in (0..self.n().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1].saturating_mul(self.alphabet_sizes[i + 1] as u64);
        }
        strides
    }

    pub fn validate(&self, x: &Point) -> Result<()> {
        if x.arity() != self.n() {
            return Err(Error::ArityMismatch {
                expected: self.n(),
                found: x.arity(),
            });
        }
        for (i, (&c, &k)) in x.0.iter().zip(&self.alphabet_sizes).enumerate() {
            if c >= k {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {i} is {c}, alphabet size is {k}"
                )));
            }
        }
        Ok(())
    }

    pub fn rank(&self, x: &Point) -> Result<u64> {
        self.validate(x)?;
        let points = self.point_count().unwrap_or(u128::MAX);
        if points > u64::MAX as u128 {
            return Err(Error::SpaceTooLarge {
                points,
                cap: u64::MAX,
            });
        }
        Ok(self.rank_unchecked(x.coords()))
    }

    pub(crate) fn rank_unchecked(&self, coords: &[usize]) -> u64 {
        coords
            .iter()
            .zip(&self.alphabet_sizes)
            .fold(0u64, |acc, (&c, &k)| acc * k as u64 + c as u64)
    }

    pub fn unrank(&self, rank: u64) -> Result<Point> {
        match self.point_count() {
            Some(points) if (rank as u128) < points => {}
            _ => {
                return Err(Error::InvalidPoint(format!(
                    "rank {rank} is outside the space"
                )))
            }
        }
        let mut coords = vec![0usize; self.n()];
        self.unrank_into(rank, &mut coords);
        Ok(Point(coords))
    }

    pub(crate) fn unrank_into(&self, mut rank: u64, coords: &mut [usize]) {
        for (slot, &k) in coords.iter_mut().zip(&self.alphabet_sizes).rev() {
            *slot = (rank % k as u64) as usize;
            rank /= k as u64;
        }
    }

    /// `P[X = x]` under the product law.
    pub fn point_probability(&self, x: &Point) -> Result<f64> {
        self.validate(x)?;
        Ok(self.probability_unchecked(x.coords()))
    }

    pub(crate) fn probability_unchecked(&self, coords: &[usize]) -> f64 {
        coords
            .iter()
            .zip(&self.probs)
            .fold(1.0, |acc, (&c, law)| acc * law[c])
    }

    /// All points in ascending rank order.
    pub fn enumerate_points(&self) -> Result<Vec<Point>> {
        let mut points = Vec::with_capacity(self.enumerable_count()? as usize);
        self.for_each_point(|_, coords| points.push(Point(coords.to_vec())))?;
        Ok(points)
    }

    /// Visits every point in ascending rank order without allocating per point.
    pub fn for_each_point<F: FnMut(u64, &[usize])>(&self, mut visit: F) -> Result<()> {
        let count = self.enumerable_count()?;
        let mut coords = vec![0usize; self.n()];
        for rank in 0..count {
            visit(rank, &coords);
            for (slot, &k) in coords.iter_mut().zip(&self.alphabet_sizes).rev() {
                *slot += 1;
                if *slot < k {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(())
    }

    /// Point probabilities indexed by rank.
    pub fn probability_table(&self) -> Result<Vec<f64>> {
        let mut table = Vec::with_capacity(self.enumerable_count()? as usize);
        self.for_each_point(|_, coords| table.push(self.probability_unchecked(coords)))?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::pairwise_sum;
    use proptest::prelude::*;

    fn pts(space: &ProductSpace) -> Vec<Vec<usize>> {
        space
            .enumerate_points()
            .unwrap()
            .into_iter()
            .map(|p| p.0)
            .collect()
    }

    #[test]
    fn enumerates_binary_square_in_rank_order() {
        let space = ProductSpace::uniform(&[2, 2]).unwrap();
        assert_eq!(
            pts(&space),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn empty_product_has_one_point() {
        let space = ProductSpace::uniform(&[]).unwrap();
        assert_eq!(pts(&space), vec![Vec::<usize>::new()]);
        assert_eq!(space.point_probability(&Point(vec![])).unwrap(), 1.0);
        assert_eq!(space.rank(&Point(vec![])).unwrap(), 0);
    }

    #[test]
    fn mixed_sizes_end_at_last_point() {
        let space = ProductSpace::uniform(&[2, 3]).unwrap();
        let points = pts(&space);
        assert_eq!(points.len(), 6);
        assert_eq!(points.last().unwrap(), &vec![1, 2]);
    }

    #[test]
    fn point_probabilities() {
        let space = ProductSpace::uniform(&[2, 2]).unwrap();
        for x in space.enumerate_points().unwrap() {
            assert_eq!(space.point_probability(&x).unwrap(), 0.25);
        }
        let skewed = ProductSpace::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let p = skewed.point_probability(&Point(vec![1, 0])).unwrap();
        assert!((p - 0.05).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_points_and_laws() {
        let space = ProductSpace::uniform(&[2, 3]).unwrap();
        assert!(matches!(
            space.point_probability(&Point(vec![0])),
            Err(Error::ArityMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            space.point_probability(&Point(vec![0, 3])),
            Err(Error::InvalidPoint(_))
        ));
        assert!(ProductSpace::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(ProductSpace::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(ProductSpace::new(vec![vec![]]).is_err());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let space = ProductSpace::binary(30);
        assert!(matches!(
            space.enumerate_points(),
            Err(Error::SpaceTooLarge { .. })
        ));
        let small = ProductSpace::binary(4).with_limits(Limits {
            max_points: 8,
            ..Limits::default()
        });
        assert!(small.probability_table().is_err());
    }

    fn space_and_ranks() -> impl Strategy<Value = (Vec<usize>, Vec<u64>)> {
        prop::collection::vec(1usize..=5, 0..=8).prop_flat_map(|sizes| {
            let total: u64 = sizes.iter().map(|&k| k as u64).product();
            (Just(sizes), prop::collection::vec(0..total, 1..=20))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_unrank_round_trip((sizes, ranks) in space_and_ranks()) {
            let space = ProductSpace::uniform(&sizes).unwrap();
            for r in ranks {
                let x = space.unrank(r).unwrap();
                prop_assert_eq!(space.rank(&x).unwrap(), r);
            }
        }

        #[test]
        fn probabilities_sum_to_one(
            laws in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 1..=4), 0..=6)
        ) {
            let probs: Vec<Vec<f64>> = laws
                .into_iter()
                .map(|w| {
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect();
            let space = ProductSpace::new(probs).unwrap();
            let total = pairwise_sum(space.probability_table().unwrap());
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
