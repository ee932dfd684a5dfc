use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Point;

/// Weighted Hamming distance `d_c(x, y) = Σ c_i 1{x_i ≠ y_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightedMetric {
    c: Vec<f64>,
    c_bar: f64,
    sum_sq: f64,
}

impl WeightedMetric {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if let Some(i) = c.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidMetric(format!(
                "c[{i}] = {} is not a non-negative real",
                c[i]
            )));
        }
        let c_bar = c.iter().sum();
        let sum_sq = c.iter().map(|v| v * v).sum();
        Ok(Self { c, c_bar, sum_sq })
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n]).expect("zero weights are valid")
    }

    pub fn constant(n: usize, weight: f64) -> Result<Self> {
        Self::new(vec![weight; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// `Σ c_i`.
    pub fn c_bar(&self) -> f64 {
        self.c_bar
    }

    /// `Σ c_i²`.
    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        for p in [x, y] {
            if p.arity() != self.n() {
                return Err(Error::ArityMismatch {
                    expected: self.n(),
                    found: p.arity(),
                });
            }
        }
        Ok(self.distance_unchecked(x.coords(), y.coords()))
    }

    pub(crate) fn distance_unchecked(&self, x: &[usize], y: &[usize]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.c)
            .filter(|((a, b), _)| a != b)
            .map(|(_, w)| w)
            .sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn dominated_by(&self, other: &WeightedMetric) -> bool {
        self.n() == other.n() && self.c.iter().zip(&other.c).all(|(a, b)| a <= b)
    }
}

impl TryFrom<Vec<f64>> for WeightedMetric {
    type Error = Error;

    fn try_from(c: Vec<f64>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<WeightedMetric> for Vec<f64> {
    fn from(metric: WeightedMetric) -> Self {
        metric.c
    }
}

/// Free-function form of [`WeightedMetric::distance`].
pub fn weighted_hamming(metric: &WeightedMetric, x: &Point, y: &Point) -> Result<f64> {
    metric.distance(x, y)
}
