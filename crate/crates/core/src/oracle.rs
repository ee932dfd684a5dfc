//! Exact ground truth by enumeration of the product space.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::hp_bound;
use crate::certify::{check_arity, check_bounded_differences};
use crate::error::{Error, Result};
use crate::extension::{extend, ExtendOptions};
use crate::function::TabulatedFunction;
use crate::metric::WeightedMetric;
use crate::space::ProductSpace;
use crate::subset::SubsetY;
use crate::sum::PairwiseSum;
use crate::{format_real, TOLERANCE};

/// Exact moments of `f(X)` and of its extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    /// `P[X ∉ Y]`.
    pub p: f64,
    /// `E[f(X)]`.
    pub mu: f64,
    /// `E[f(X) | X ∈ Y]`.
    pub m: f64,
    /// `E[f̄(X)]`, when the extension was requested.
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub extension_mean: Option<f64>,
    pub c_bar: f64,
    pub y_count: u64,
    pub point_count: u64,
}

/// Computes `p`, `μ`, `m` (and `M = E[f̄]` when `with_extension`) by
/// summing over every point in rank order.
///
/// A declared `sup_bound` on `f` is checked against every value visited.
pub fn exact_stats(
    space: &ProductSpace,
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    with_extension: bool,
) -> Result<ExactReport> {
    check_arity(metric, space)?;
    f.check(space)?;
    y.check(space)?;
    let point_count = space.enumerable_count()?;

    let mut mass_out = PairwiseSum::new();
    let mut mass_in = PairwiseSum::new();
    let mut weighted_all = PairwiseSum::new();
    let mut weighted_in = PairwiseSum::new();
    let mut y_count = 0u64;
    let mut sup_violation = None;
    space.for_each_point(|rank, coords| {
        let prob = space.probability_unchecked(coords);
        let value = f.eval_at(space, rank, coords);
        if let Some(bound) = f.sup_bound {
            if sup_violation.is_none() && value.abs() > bound + TOLERANCE {
                sup_violation = Some(Error::SupBoundViolated { bound, value: value.abs(), rank });
            }
        }
        weighted_all.push(prob * value);
        if y.contains(space, coords) {
            y_count += 1;
            mass_in.push(prob);
            weighted_in.push(prob * value);
        } else {
            mass_out.push(prob);
        }
    })?;
    if let Some(err) = sup_violation {
        return Err(err);
    }
    if y_count == 0 {
        return Err(Error::EmptySubset);
    }

    let mu = weighted_all.total();
    // no conditioning happens when nothing is excluded
    let m = if y_count == point_count {
        mu
    } else {
        weighted_in.total() / mass_in.total()
    };

    let extension_mean = if with_extension {
        let table = extend(f, y, metric, space, ExtendOptions::default())?;
        let probs = space.probability_table()?;
        let mut acc = PairwiseSum::new();
        acc.extend(probs.iter().zip(&table.values).map(|(p, v)| p * v));
        Some(acc.total())
    } else {
        None
    };

    Ok(ExactReport {
        p: mass_out.total(),
        mu,
        m,
        extension_mean,
        c_bar: metric.c_bar(),
        y_count,
        point_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `P[f(X) - center ≥ ε]`.
    Upper,
    /// `P[|f(X) - center| ≥ ε]`.
    TwoSided,
}

impl Side {
    fn hits(self, value: f64, center: f64, epsilon: f64) -> bool {
        match self {
            Side::Upper => value - center >= epsilon,
            Side::TwoSided => (value - center).abs() >= epsilon,
        }
    }
}

/// Exact probability that `f(X)` deviates from `center` by at least `epsilon`.
pub fn exact_tail(
    space: &ProductSpace,
    f: &TabulatedFunction,
    center: f64,
    epsilon: f64,
    side: Side,
) -> Result<f64> {
    exact_probability(space, f, |value| side.hits(value, center, epsilon))
}

/// Exact `P[event(f(X))]`.
pub fn exact_probability<E: Fn(f64) -> bool>(
    space: &ProductSpace,
    f: &TabulatedFunction,
    event: E,
) -> Result<f64> {
    f.check(space)?;
    let mut acc = PairwiseSum::new();
    space.for_each_point(|rank, coords| {
        if event(f.eval_at(space, rank, coords)) {
            acc.push(space.probability_unchecked(coords));
        }
    })?;
    Ok(acc.total())
}

/// One grid point of a dominance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPoint {
    pub epsilon: f64,
    /// `P[f(X) - m ≥ ε]`.
    pub exact_tail: f64,
    pub p: f64,
    pub exp_term: f64,
    pub bound_total: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub stats: ExactReport,
    pub points: Vec<TailPoint>,
}

impl DominanceReport {
    pub fn all_dominated(&self) -> bool {
        self.points.iter().all(|t| t.dominated)
    }

    pub fn violations(&self) -> impl Iterator<Item = &TailPoint> {
        self.points.iter().filter(|t| !t.dominated)
    }

    pub const CSV_HEADER: &'static str = "epsilon,exact_tail,p,exp_term,bound_total,dominated";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for t in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_real(t.epsilon),
                format_real(t.exact_tail),
                format_real(t.p),
                format_real(t.exp_term),
                format_real(t.bound_total),
                t.dominated
            );
        }
        out
    }
}

/// Compares the exact upper tail around `m` with [`hp_bound`] at every
/// grid point. Bounded differences on Y are certified first; a failed
/// certification is an error since the bound is then not claimed to hold.
pub fn dominance_check(
    space: &ProductSpace,
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    eps_grid: &[f64],
) -> Result<DominanceReport> {
    check_bounded_differences(f, y, metric, space)?.into_result()?;
    let stats = exact_stats(space, f, y, metric, false)?;
    let values = f.tabulate(space)?;
    let probs = space.probability_table()?;

    let points = eps_grid
        .iter()
        .map(|&epsilon| {
            let bound = hp_bound(epsilon, stats.p.clamp(0.0, 1.0), metric)?;
            let mut acc = PairwiseSum::new();
            acc.extend(
                values
                    .iter()
                    .zip(&probs)
                    .filter(|(v, _)| Side::Upper.hits(**v, stats.m, epsilon))
                    .map(|(_, p)| *p),
            );
            let exact_tail = acc.total();
            Ok(TailPoint {
                epsilon,
                exact_tail,
                p: stats.p,
                exp_term: bound.exp_term,
                bound_total: bound.total,
                dominated: exact_tail <= bound.total + 1e-12,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DominanceReport { stats, points })
}
