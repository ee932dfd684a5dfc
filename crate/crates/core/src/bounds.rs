//! Closed-form tail bounds.
//!
//! For `f` with `c`-bounded differences on a set `Y` of probability `1 - p`
//! and `m = E[f(X) | X ∈ Y]`:
//!
//! ```text
//! P[f(X) - m ≥ ε]   ≤ p + exp(-2 ((ε - p c̄)⁺)² / Σ c_i²)
//! P[|f(X) - m| ≥ ε] ≤ 2 (p + exp(-2 ((ε - p c̄)⁺)² / Σ c_i²))
//! ```
//!
//! With `p = 0` the one-sided form is McDiarmid's inequality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::WeightedMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Mcdiarmid,
    HpOneSided,
    HpTwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula: Formula,
    pub epsilon: f64,
    pub p: f64,
    pub c_bar: f64,
    pub sum_c_sq: f64,
    pub exp_term: f64,
    /// Right-hand side before clamping to `[0, 1]`.
    pub raw: f64,
    pub total: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon >= 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "epsilon must be a finite non-negative real, got {epsilon}"
        )))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")))
    }
}

/// `exp(-2 t² / Σ c_i²)`, with the `Σ c_i² = 0` limit taken pointwise:
/// `1` when `t = 0`, `0` otherwise.
fn exponential_term(t: f64, sum_sq: f64) -> f64 {
    if sum_sq == 0.0 {
        if t == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (-2.0 * t * t / sum_sq).exp()
    }
}

fn report(formula: Formula, epsilon: f64, p: f64, metric: &WeightedMetric) -> BoundReport {
    let shifted = (epsilon - p * metric.c_bar()).max(0.0);
    let exp_term = exponential_term(shifted, metric.sum_sq());
    let raw = match formula {
        Formula::Mcdiarmid => exp_term,
        Formula::HpOneSided => p + exp_term,
        Formula::HpTwoSided => 2.0 * (p + exp_term),
    };
    BoundReport {
        formula,
        epsilon,
        p,
        c_bar: metric.c_bar(),
        sum_c_sq: metric.sum_sq(),
        exp_term,
        raw,
        total: raw.clamp(0.0, 1.0),
    }
}

/// McDiarmid: `P[f(X) - μ ≥ ε] ≤ exp(-2ε² / Σ c_i²)`.
pub fn mcdiarmid_bound(epsilon: f64, metric: &WeightedMetric) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    Ok(report(Formula::Mcdiarmid, epsilon, 0.0, metric))
}

pub fn hp_bound(epsilon: f64, p: f64, metric: &WeightedMetric) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    check_probability(p)?;
    Ok(report(Formula::HpOneSided, epsilon, p, metric))
}

pub fn hp_bound_two_sided(epsilon: f64, p: f64, metric: &WeightedMetric) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    check_probability(p)?;
    Ok(report(Formula::HpTwoSided, epsilon, p, metric))
}

/// `|μ - m| ≤ 2pF` for `sup |f| ≤ F`.
pub fn mean_gap_bound(p: f64, sup_bound: f64) -> Result<f64> {
    check_probability(p)?;
    if !(sup_bound >= 0.0 && sup_bound.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "F must be a finite non-negative real, got {sup_bound}"
        )));
    }
    Ok(2.0 * p * sup_bound)
}

/// The closed form printed alongside the binary toy instance,
/// `2^{-n} + exp(-2n ((ε - 2^{1-n})⁺)²)`, kept for side-by-side comparison
/// with [`hp_bound`]. It is not an instantiation of the general bound.
pub fn printed_toy_bound(n: usize, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let n = n as f64;
    let shifted = (epsilon - (1.0 - n).exp2()).max(0.0);
    Ok((-n).exp2() + (-2.0 * n * shifted * shifted).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn metric(c: &[f64]) -> WeightedMetric {
        WeightedMetric::new(c.to_vec()).unwrap()
    }

    #[test]
    fn mcdiarmid_examples() {
        assert_eq!(mcdiarmid_bound(0.0, &metric(&[0.3, 2.0])).unwrap().total, 1.0);
        let r = mcdiarmid_bound(2.0, &metric(&[1.0; 4])).unwrap();
        // exp(-2) to 10 digits
        assert!((r.total - 0.1353352832).abs() < 1e-10);
        assert_eq!(mcdiarmid_bound(0.1, &metric(&[0.0, 0.0])).unwrap().total, 0.0);
        assert!(mcdiarmid_bound(-0.1, &metric(&[1.0])).is_err());
    }

    #[test]
    fn hp_examples() {
        let m = metric(&[0.5, 1.5, 0.25]);
        for eps in [0.0, 0.3, 1.0, 4.0] {
            assert_eq!(
                hp_bound(eps, 0.0, &m).unwrap().total.to_bits(),
                mcdiarmid_bound(eps, &m).unwrap().total.to_bits()
            );
        }
        assert_eq!(hp_bound(0.0, 0.2, &m).unwrap().total, 1.0);
        assert!(hp_bound(0.1, 1.5, &m).is_err());
        assert!(hp_bound(0.1, -0.1, &m).is_err());
        assert!(hp_bound(f64::NAN, 0.1, &m).is_err());
    }

    #[test]
    fn hp_ten_coordinate_value() {
        let m = WeightedMetric::constant(10, 0.2).unwrap();
        let p = 2f64.powi(-10);
        let r = hp_bound(0.5, p, &m).unwrap();
        // reference: exp(-2 (0.5 - 2^-10 * 2)^2 / 0.4) evaluated with mpmath at 30 digits
        let expected_exp = 0.289_310_883_240_723_4;
        assert!((r.exp_term - expected_exp).abs() < 1e-12, "{}", r.exp_term);
        assert!((r.total - (p + expected_exp)).abs() < 1e-12);
    }

    #[test]
    fn two_sided_examples() {
        let m = metric(&[0.1; 5]);
        let one = hp_bound(0.4, 0.01, &m).unwrap();
        let two = hp_bound_two_sided(0.4, 0.01, &m).unwrap();
        assert_eq!(two.total, (2.0 * one.raw).min(1.0));
        assert_eq!(hp_bound_two_sided(0.0, 0.0, &m).unwrap().total, 1.0);
        let big = metric(&[100.0, 100.0]);
        let r = hp_bound_two_sided(1.0, 0.5, &big).unwrap();
        assert_eq!(r.exp_term, 1.0);
        assert_eq!(r.raw, 3.0);
        assert_eq!(r.total, 1.0);
    }

    #[test]
    fn mean_gap_examples() {
        assert_eq!(mean_gap_bound(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(mean_gap_bound(0.125, 8.0).unwrap(), 2.0);
        assert!((mean_gap_bound(0.01, 100.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(mean_gap_bound(1.1, 1.0).is_err());
        assert!(mean_gap_bound(0.1, -1.0).is_err());
    }

    #[test]
    fn zero_weights_follow_the_limit() {
        let zero = WeightedMetric::zeros(3);
        assert_eq!(hp_bound(0.0, 0.1, &zero).unwrap().exp_term, 1.0);
        assert_eq!(hp_bound(0.2, 0.1, &zero).unwrap().exp_term, 0.0);
        assert_eq!(hp_bound(0.2, 0.1, &zero).unwrap().total, 0.1);
    }

    proptest! {
        #[test]
        fn totals_in_unit_interval(
            eps in 0.0f64..5.0,
            p in 0.0f64..=1.0,
            c in prop::collection::vec(0.0f64..2.0, 0..6),
        ) {
            let m = WeightedMetric::new(c).unwrap();
            for r in [
                mcdiarmid_bound(eps, &m).unwrap(),
                hp_bound(eps, p, &m).unwrap(),
                hp_bound_two_sided(eps, p, &m).unwrap(),
            ] {
                prop_assert!((0.0..=1.0).contains(&r.total));
                prop_assert!((0.0..=1.0).contains(&r.exp_term));
            }
        }

        #[test]
        fn monotone_in_eps_p_and_c(
            eps in 0.0f64..3.0,
            d_eps in 0.0f64..1.0,
            p in 0.0f64..0.5,
            d_p in 0.0f64..0.5,
            c in prop::collection::vec(0.01f64..1.0, 1..6),
            i in 0usize..6,
            d_c in 0.0f64..1.0,
        ) {
            let m = WeightedMetric::new(c.clone()).unwrap();
            let base = hp_bound(eps, p, &m).unwrap().total;
            prop_assert!(hp_bound(eps + d_eps, p, &m).unwrap().total <= base);
            prop_assert!(hp_bound(eps, p + d_p, &m).unwrap().total >= base);
            let mut wider = c;
            let k = i % wider.len();
            wider[k] += d_c;
            let w = WeightedMetric::new(wider).unwrap();
            prop_assert!(hp_bound(eps, p, &w).unwrap().total >= base);
        }
    }
}
