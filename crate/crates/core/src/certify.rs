//! Certification of bounded differences on Y.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::TabulatedFunction;
use crate::metric::WeightedMetric;
use crate::space::{Point, ProductSpace};
use crate::subset::SubsetY;
use crate::TOLERANCE;

/// A pair of points of Y on which `|f(x) - f(y)| > d_c(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationWitness {
    pub x: Point,
    pub y: Point,
    pub delta_f: f64,
    pub distance: f64,
}

impl fmt::Display for ViolationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|f{} - f{}| = {} > d_c = {}",
            self.x, self.y, self.delta_f, self.distance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    Certified,
    Violated(ViolationWitness),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Certification::Certified => Ok(()),
            Certification::Violated(w) => Err(Error::NotCertified(w)),
        }
    }
}

pub(crate) fn check_arity(metric: &WeightedMetric, space: &ProductSpace) -> Result<()> {
    if metric.n() != space.n() {
        return Err(Error::ArityMismatch {
            expected: space.n(),
            found: metric.n(),
        });
    }
    Ok(())
}

/// Checks `|f(x) - f(y)| ≤ d_c(x, y) + 1e-9` for all pairs of Y.
///
/// When Y is the whole space only coordinate-neighbor pairs are scanned,
/// which is equivalent on a product space. Otherwise every unordered pair
/// of Y is visited and the lowest-rank violating pair is reported.
pub fn check_bounded_differences(
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    space: &ProductSpace,
) -> Result<Certification> {
    check_arity(metric, space)?;
    let values = f.tabulate(space)?;
    let members = y.materialize(space)?;
    members.require_non_empty()?;

    if members.is_full() {
        return Ok(match first_neighbor_violation(&values, metric, space) {
            Some(w) => Certification::Violated(w),
            None => Certification::Certified,
        });
    }

    let count = members.len() as u128;
    let pairs = count * (count - 1) / 2;
    let cap = space.limits().max_pairs;
    if pairs > cap {
        return Err(Error::ScanTooLarge { pairs, cap });
    }

    let n = space.n();
    let mut coords = vec![0usize; members.len() * n];
    let mut fy = Vec::with_capacity(members.len());
    for (slot, &rank) in coords.chunks_mut(n.max(1)).zip(members.ranks()) {
        space.unrank_into(rank, &mut slot[..n]);
        fy.push(values[rank as usize]);
    }
    let point = |i: usize| &coords[i * n..(i + 1) * n];

    let witness = (0..members.len()).into_par_iter().find_map_first(|a| {
        let xa = point(a);
        (a + 1..members.len()).find_map(|b| {
            let delta_f = (fy[a] - fy[b]).abs();
            let distance = metric.distance_unchecked(xa, point(b));
            (delta_f > distance + TOLERANCE).then(|| ViolationWitness {
                x: Point(xa.to_vec()),
                y: Point(point(b).to_vec()),
                delta_f,
                distance,
            })
        })
    });
    Ok(match witness {
        Some(w) => Certification::Violated(w),
        None => Certification::Certified,
    })
}

/// Calls `visit(rank, i, neighbor_rank)` for every neighbor of `rank`
/// that differs in coordinate `i` and has a larger symbol there.
fn for_each_upper_neighbor<F: FnMut(usize, u64) -> bool>(
    space: &ProductSpace,
    strides: &[u64],
    rank: u64,
    coords: &[usize],
    mut visit: F,
) -> bool {
    for (i, (&xi, &k)) in coords.iter().zip(space.alphabet_sizes()).enumerate() {
        for v in xi + 1..k {
            if !visit(i, rank + (v - xi) as u64 * strides[i]) {
                return false;
            }
        }
    }
    true
}

fn first_neighbor_violation(
    values: &[f64],
    metric: &WeightedMetric,
    space: &ProductSpace,
) -> Option<ViolationWitness> {
    let strides = space.strides();
    let n = space.n();
    let c = metric.weights();
    (0..values.len() as u64).into_par_iter().find_map_first(|rank| {
        let mut coords = vec![0usize; n];
        space.unrank_into(rank, &mut coords);
        let mut found = None;
        for_each_upper_neighbor(space, &strides, rank, &coords, |i, other| {
            let delta_f = (values[rank as usize] - values[other as usize]).abs();
            if delta_f > c[i] + TOLERANCE {
                let mut y = coords.clone();
                space.unrank_into(other, &mut y);
                found = Some(ViolationWitness {
                    x: Point(coords.clone()),
                    y: Point(y),
                    delta_f,
                    distance: c[i],
                });
                false
            } else {
                true
            }
        });
        found
    })
}

/// Per-coordinate maxima of `|f(x) - f(y)|` over pairs differing only in
/// that coordinate: the smallest `c` with bounded differences on all of X.
pub fn tightest_full_space_c(f: &TabulatedFunction, space: &ProductSpace) -> Result<WeightedMetric> {
    let values = f.tabulate(space)?;
    Ok(WeightedMetric::new(neighbor_maxima(&values, space, |_| true))
        .expect("maxima of absolute differences are non-negative"))
}

/// Per-coordinate maxima over neighbor pairs whose ranks both pass `keep`.
pub(crate) fn neighbor_maxima<K: Fn(u64) -> bool + Sync>(
    values: &[f64],
    space: &ProductSpace,
    keep: K,
) -> Vec<f64> {
    let strides = space.strides();
    let n = space.n();
    (0..values.len() as u64)
        .into_par_iter()
        .fold(
            || vec![0.0f64; n],
            |mut acc, rank| {
                if keep(rank) {
                    let mut coords = vec![0usize; n];
                    space.unrank_into(rank, &mut coords);
                    for_each_upper_neighbor(space, &strides, rank, &coords, |i, other| {
                        if keep(other) {
                            let d = (values[rank as usize] - values[other as usize]).abs();
                            acc[i] = acc[i].max(d);
                        }
                        true
                    });
                }
                acc
            },
        )
        .reduce(
            || vec![0.0f64; n],
            |a, b| a.into_iter().zip(b).map(|(u, v)| u.max(v)).collect(),
        )
}
