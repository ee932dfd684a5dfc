//! The good set `Y ⊂ X` on which bounded differences are assumed.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::space::{Point, ProductSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetRule {
    /// Y = X.
    All,
    /// Y = X minus the all-zero point.
    ExcludeZero,
    /// Y = X minus the all-zero and the all-maximal points.
    ExcludeExtremes,
}

impl SubsetRule {
    pub fn name(&self) -> &'static str {
        match self {
            SubsetRule::All => "all",
            SubsetRule::ExcludeZero => "exclude_zero",
            SubsetRule::ExcludeExtremes => "exclude_extremes",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubsetY {
    Exclude(BTreeSet<Vec<usize>>),
    Include(BTreeSet<Vec<usize>>),
    Builtin(SubsetRule),
}

impl SubsetY {
    pub fn all() -> Self {
        SubsetY::Builtin(SubsetRule::All)
    }

    pub fn exclude<I: IntoIterator<Item = Point>>(points: I) -> Self {
        SubsetY::Exclude(points.into_iter().map(|p| p.0).collect())
    }

    pub fn include<I: IntoIterator<Item = Point>>(points: I) -> Self {
        SubsetY::Include(points.into_iter().map(|p| p.0).collect())
    }

    /// Checks that every listed point belongs to the space.
    pub fn check(&self, space: &ProductSpace) -> Result<()> {
        if let SubsetY::Exclude(points) | SubsetY::Include(points) = self {
            for (i, coords) in points.iter().enumerate() {
                space
                    .validate(&Point(coords.clone()))
                    .map_err(|e| Error::field(format!("Y.points[{i}]"), e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn contains(&self, space: &ProductSpace, coords: &[usize]) -> bool {
        match self {
            SubsetY::Exclude(points) => !points.contains(coords),
            SubsetY::Include(points) => points.contains(coords),
            SubsetY::Builtin(SubsetRule::All) => true,
            SubsetY::Builtin(SubsetRule::ExcludeZero) => !coords.iter().all(|&v| v == 0),
            SubsetY::Builtin(SubsetRule::ExcludeExtremes) => {
                !coords.iter().all(|&v| v == 0)
                    && !coords
                        .iter()
                        .zip(space.alphabet_sizes())
                        .all(|(&v, &k)| v + 1 == k)
            }
        }
    }

    pub fn materialize(&self, space: &ProductSpace) -> Result<Membership> {
        self.check(space)?;
        let count = space.enumerable_count()? as usize;
        let mut mask = Vec::with_capacity(count);
        let mut ranks = Vec::new();
        space.for_each_point(|rank, coords| {
            let inside = self.contains(space, coords);
            mask.push(inside);
            if inside {
                ranks.push(rank);
            }
        })?;
        Ok(Membership { mask, ranks })
    }
}

/// Y resolved against an enumerable space: a rank mask plus the sorted
/// list of member ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    mask: Vec<bool>,
    ranks: Vec<u64>,
}

impl Membership {
    pub fn contains_rank(&self, rank: u64) -> bool {
        self.mask[rank as usize]
    }

    /// Member ranks in ascending order.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.ranks.len() == self.mask.len()
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySubset)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representations_agree() {
        let space = ProductSpace::binary(3);
        let zero = Point(vec![0, 0, 0]);
        let ones = Point(vec![1, 1, 1]);
        let by_rule = SubsetY::Builtin(SubsetRule::ExcludeExtremes)
            .materialize(&space)
            .unwrap();
        let by_list = SubsetY::exclude([zero, ones]).materialize(&space).unwrap();
        assert_eq!(by_rule, by_list);
        assert_eq!(by_rule.ranks(), &[1, 2, 3, 4, 5, 6]);
        let include = SubsetY::include((1..7).map(|r| space.unrank(r).unwrap()))
            .materialize(&space)
            .unwrap();
        assert_eq!(include, by_rule);
    }

    #[test]
    fn full_and_empty() {
        let space = ProductSpace::binary(2);
        assert!(SubsetY::all().materialize(&space).unwrap().is_full());
        let empty = SubsetY::include([]).materialize(&space).unwrap();
        assert!(empty.is_empty());
        assert!(matches!(empty.require_non_empty(), Err(Error::EmptySubset)));
    }

    #[test]
    fn rejects_foreign_points() {
        let space = ProductSpace::binary(2);
        let err = SubsetY::exclude([Point(vec![0, 2])])
            .materialize(&space)
            .unwrap_err();
        assert!(err.to_string().contains("Y.points[0]"), "{err}");
    }
}
