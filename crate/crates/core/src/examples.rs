//! Instance builders: the all-zero spike, the two-spike toy, and seeded
//! random instances with certified bounded differences on Y.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{check_bounded_differences, neighbor_maxima};
use crate::error::{Error, Result};
use crate::function::{BuiltinFunction, TabulatedFunction};
use crate::metric::WeightedMetric;
use crate::space::{Point, ProductSpace, DEFAULT_ENUMERATION_CAP};
use crate::subset::{SubsetRule, SubsetY};

/// Largest `n` for the binary builders: `2^n` stays within the default
/// enumeration cap.
pub const MAX_BINARY_N: usize = DEFAULT_ENUMERATION_CAP.trailing_zeros() as usize;

const RANDOM_Y_ATTEMPTS: usize = 8;

/// Added to each generated `c_i` so that `f(y) + d_c(x, y) ≥ f(x)` survives
/// rounding when a pair attains the maximum difference.
const C_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceBundle {
    pub space: ProductSpace,
    pub f: TabulatedFunction,
    pub y: SubsetY,
    pub metric: WeightedMetric,
    pub label: String,
    pub params: BTreeMap<String, f64>,
    /// Set when the builder ran the pairwise certification on Y.
    pub certified: bool,
}

fn check_binary_n(n: usize) -> Result<()> {
    if (1..=MAX_BINARY_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "n must lie in 1..={MAX_BINARY_N}, got {n}"
        )))
    }
}

/// `X = {0,1}^n` uniform, `Y = X \ {0}`, `f = 2^n 1{x ∉ Y}`, `c = 0`.
///
/// `f` is constant on Y, so it concentrates at `m = 0` while `μ = 1`.
pub fn counterexample1(n: usize) -> Result<InstanceBundle> {
    check_binary_n(n)?;
    Ok(InstanceBundle {
        space: ProductSpace::binary(n),
        f: TabulatedFunction::builtin(BuiltinFunction::Counterexample)
            .with_sup_bound((n as f64).exp2()),
        y: SubsetY::Builtin(SubsetRule::ExcludeZero),
        metric: WeightedMetric::zeros(n),
        label: "counterexample1".into(),
        params: BTreeMap::from([("n".into(), n as f64)]),
        certified: false,
    })
}

/// `X = {0,1}^n` uniform, `Y = X` minus the all-zero and all-one points,
/// `f = b` at zero, `-b` at one and `(1/n) Σ 2(x_i - 1)` on Y (shifted by
/// one when `centered`), `c_i = 2/n`.
pub fn toy_example(n: usize, b: f64, centered: bool) -> Result<InstanceBundle> {
    check_binary_n(n)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "B must be a finite non-negative real, got {b}"
        )));
    }
    Ok(InstanceBundle {
        space: ProductSpace::binary(n),
        f: TabulatedFunction::builtin(BuiltinFunction::Toy { b, centered })
            .with_sup_bound(b.max(2.0)),
        y: SubsetY::Builtin(SubsetRule::ExcludeExtremes),
        metric: WeightedMetric::constant(n, 2.0 / n as f64)?,
        label: "toy".into(),
        params: BTreeMap::from([
            ("n".into(), n as f64),
            ("B".into(), b),
            ("centered".into(), if centered { 1.0 } else { 0.0 }),
        ]),
        certified: false,
    })
}

/// A seeded random instance with certified bounded differences on Y.
///
/// Draws a space with `n ≤ max_n` coordinates and alphabets of size at
/// most `max_alphabet` (at least two when allowed), a table `f` with values
/// in `[-1, 1]` built as a random additive function of the coordinates plus
/// independent noise, and a random non-empty Y. `c` is (up to a `1e-12` pad) the per-coordinate maximum of `|Δf|` over neighbor
/// pairs inside Y; when that fails the pairwise check on Y a new Y is
/// drawn, and after a bounded number of attempts the full-space maxima are
/// used, which always certify. Finally `f` is overwritten off Y with values
/// of a random scale up to `10^3`.
pub fn random_certified_instance(seed: u64, max_n: usize, max_alphabet: usize) -> Result<InstanceBundle> {
    if max_n == 0 || max_alphabet == 0 {
        return Err(Error::InvalidArgument(
            "max_n and max_alphabet must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let min_alphabet = max_alphabet.min(2);
    let probs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let k = rng.gen_range(min_alphabet..=max_alphabet);
            let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.into_iter().map(|w| w / total).collect()
        })
        .collect();
    let space = ProductSpace::new(probs)?;
    let count = space.enumerable_count()? as usize;

    // additive part in [-0.8, 0.8] plus noise in [-0.2, 0.2]
    let width = 1.0 / n as f64;
    let effects: Vec<Vec<f64>> = space
        .alphabet_sizes()
        .iter()
        .map(|&k| (0..k).map(|_| rng.gen_range(-0.8..=0.8) * width).collect())
        .collect();
    let mut values = Vec::with_capacity(count);
    space.for_each_point(|_, coords| {
        let additive: f64 = coords.iter().zip(&effects).map(|(&v, g)| g[v]).sum();
        values.push(additive + rng.gen_range(-0.2..=0.2) * width);
    })?;

    let mut chosen = None;
    let mut mask = Vec::new();
    for _ in 0..RANDOM_Y_ATTEMPTS {
        let density = rng.gen_range(0.5..0.95);
        mask = (0..count).map(|_| rng.gen_bool(density)).collect();
        if !mask.iter().any(|&m| m) {
            let r = rng.gen_range(0..count);
            mask[r] = true;
        }
        let keep = |r: u64| mask[r as usize];
        let metric = padded(neighbor_maxima(&values, &space, keep))?;
        let f = TabulatedFunction::table(values.clone());
        let y = subset_from_mask(&space, &mask)?;
        if check_bounded_differences(&f, &y, &metric, &space)?.is_certified() {
            chosen = Some(metric);
            break;
        }
    }
    let metric = match chosen {
        Some(metric) => metric,
        None => padded(neighbor_maxima(&values, &space, |_| true))?,
    };

    let scale = [1.0, 10.0, 1000.0][rng.gen_range(0..3)];
    for (value, &inside) in values.iter_mut().zip(&mask) {
        if !inside {
            *value = scale * rng.gen_range(-1.0..=1.0);
        }
    }
    let sup = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let f = TabulatedFunction::table(values).with_sup_bound(sup);
    let y = subset_from_mask(&space, &mask)?;
    check_bounded_differences(&f, &y, &metric, &space)?.into_result()?;

    Ok(InstanceBundle {
        space,
        f,
        y,
        metric,
        label: "random".into(),
        params: BTreeMap::from([
            ("seed".into(), seed as f64),
            ("n".into(), n as f64),
        ]),
        certified: true,
    })
}

fn padded(c: Vec<f64>) -> Result<WeightedMetric> {
    WeightedMetric::new(c.into_iter().map(|v| v + C_MARGIN).collect())
}

fn subset_from_mask(space: &ProductSpace, mask: &[bool]) -> Result<SubsetY> {
    let members = mask
        .iter()
        .enumerate()
        .filter(|(_, &inside)| inside)
        .map(|(r, _)| space.unrank(r as u64))
        .collect::<Result<Vec<Point>>>()?;
    Ok(SubsetY::include(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_probability, exact_stats};

    #[test]
    fn counterexample_small_cases() {
        let one = counterexample1(1).unwrap();
        let r = exact_stats(&one.space, &one.f, &one.y, &one.metric, false).unwrap();
        assert_eq!(r.p, 0.5);
        for n in [3, 7, 12] {
            let b = counterexample1(n).unwrap();
            let zero = exact_probability(&b.space, &b.f, |v| v == 0.0).unwrap();
            assert_eq!(zero, 1.0 - (-(n as f64)).exp2());
        }
        assert!(counterexample1(0).is_err());
        assert!(counterexample1(MAX_BINARY_N + 1).is_err());
    }

    #[test]
    fn toy_two_coordinates() {
        let b = toy_example(2, 1.0, false).unwrap();
        let members = b.y.materialize(&b.space).unwrap();
        assert_eq!(members.ranks(), &[1, 2]);
        let values = b.f.tabulate(&b.space).unwrap();
        assert_eq!((values[1], values[2]), (-1.0, -1.0));
        let r = exact_stats(&b.space, &b.f, &b.y, &b.metric, false).unwrap();
        assert_eq!(r.m, -1.0);
    }

    #[test]
    fn toy_four_coordinates_certifies() {
        let b = toy_example(4, 7.0, false).unwrap();
        assert_eq!(b.metric.weights(), &[0.5; 4]);
        assert!(check_bounded_differences(&b.f, &b.y, &b.metric, &b.space).unwrap().is_certified());
        let r = exact_stats(&b.space, &b.f, &b.y, &b.metric, false).unwrap();
        assert_eq!(r.p, 0.125);
    }

    #[test]
    fn random_instances_are_deterministic_and_certified() {
        for seed in 0..30 {
            let a = random_certified_instance(seed, 6, 3).unwrap();
            let b = random_certified_instance(seed, 6, 3).unwrap();
            assert_eq!(a, b);
            assert!(a.certified);
            assert!(a.space.n() <= 6 && a.space.alphabet_sizes().iter().all(|&k| k <= 3));
            assert!(check_bounded_differences(&a.f, &a.y, &a.metric, &a.space).unwrap().is_certified());
        }
        assert!(random_certified_instance(1, 0, 3).is_err());
    }
}
