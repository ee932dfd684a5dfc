//! Real-valued functions on a product space, either tabulated densely or
//! given by a named rule.

use crate::error::{Error, Result};
use crate::space::ProductSpace;

/// Closed-form rules that can be evaluated on spaces too large to tabulate.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinFunction {
    /// `2^n` at the all-zero point, `0` elsewhere.
    Counterexample,
    /// `b` at the all-zero point, `-b` at the all-maximal point, and
    /// `(1/n) Σ 2(x_i - 1)` elsewhere (plus one when `centered`).
    Toy { b: f64, centered: bool },
    /// `scale · (1/n) Σ x_i`.
    Mean { scale: f64 },
    /// `scale · x_index`.
    Coordinate { index: usize, scale: f64 },
    Constant { value: f64 },
}

impl BuiltinFunction {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinFunction::Counterexample => "counterexample1",
            BuiltinFunction::Toy { .. } => "toy",
            BuiltinFunction::Mean { .. } => "mean",
            BuiltinFunction::Coordinate { .. } => "coordinate",
            BuiltinFunction::Constant { .. } => "constant",
        }
    }

    fn eval(&self, sizes: &[usize], x: &[usize]) -> f64 {
        let n = x.len();
        match *self {
            BuiltinFunction::Counterexample => {
                if x.iter().all(|&v| v == 0) {
                    (n as f64).exp2()
                } else {
                    0.0
                }
            }
            BuiltinFunction::Toy { b, centered } => {
                if x.iter().all(|&v| v == 0) {
                    b
                } else if x.iter().zip(sizes).all(|(&v, &k)| v + 1 == k) {
                    -b
                } else {
                    let total: f64 = x.iter().map(|&v| 2.0 * (v as f64 - 1.0)).sum();
                    let value = total / n as f64;
                    if centered {
                        value + 1.0
                    } else {
                        value
                    }
                }
            }
            BuiltinFunction::Mean { scale } => {
                if n == 0 {
                    0.0
                } else {
                    scale * x.iter().map(|&v| v as f64).sum::<f64>() / n as f64
                }
            }
            BuiltinFunction::Coordinate { index, scale } => scale * x[index] as f64,
            BuiltinFunction::Constant { value } => value,
        }
    }

    fn check(&self, space: &ProductSpace) -> Result<()> {
        match *self {
            BuiltinFunction::Coordinate { index, .. } if index >= space.n() => Err(Error::field(
                "f.params.index",
                format!("index {index} out of range for n = {}", space.n()),
            )),
            BuiltinFunction::Toy { b, .. } if !(b >= 0.0 && b.is_finite()) => {
                Err(Error::field("f.params.B", "B must be a finite non-negative real"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSource {
    /// Values in ascending mixed-radix rank order.
    Table(Vec<f64>),
    Builtin(BuiltinFunction),
}

/// The function `f` together with an optional declared bound `sup |f| ≤ F`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunction {
    pub source: FunctionSource,
    pub sup_bound: Option<f64>,
}

impl TabulatedFunction {
    pub fn table(values: Vec<f64>) -> Self {
        Self {
            source: FunctionSource::Table(values),
            sup_bound: None,
        }
    }

    pub fn builtin(rule: BuiltinFunction) -> Self {
        Self {
            source: FunctionSource::Builtin(rule),
            sup_bound: None,
        }
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    /// Checks that the function is total on `space`.
    pub fn check(&self, space: &ProductSpace) -> Result<()> {
        if let Some(bound) = self.sup_bound {
            if bound.is_nan() || bound < 0.0 {
                return Err(Error::field("sup_bound", "must be a non-negative real"));
            }
        }
        match &self.source {
            FunctionSource::Table(values) => {
                let expected = space.point_count();
                if expected != Some(values.len() as u128) {
                    return Err(Error::field(
                        "f.values",
                        format!(
                            "table has {} entries, space has {} points",
                            values.len(),
                            expected.map_or("too many".to_string(), |c| c.to_string())
                        ),
                    ));
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::field(
                        format!("f.values[{i}]"),
                        "value is not a finite real",
                    ));
                }
                Ok(())
            }
            FunctionSource::Builtin(rule) => rule.check(space),
        }
    }

    /// Evaluates at a point given by its coordinates and rank.
    pub(crate) fn eval_at(&self, space: &ProductSpace, rank: u64, coords: &[usize]) -> f64 {
        match &self.source {
            FunctionSource::Table(values) => values[rank as usize],
            FunctionSource::Builtin(rule) => rule.eval(space.alphabet_sizes(), coords),
        }
    }

    /// Evaluates at a point given only by its coordinates.
    pub(crate) fn eval_coords(&self, space: &ProductSpace, coords: &[usize]) -> f64 {
        match &self.source {
            FunctionSource::Table(values) => values[space.rank_unchecked(coords) as usize],
            FunctionSource::Builtin(rule) => rule.eval(space.alphabet_sizes(), coords),
        }
    }

    pub fn eval(&self, space: &ProductSpace, x: &crate::space::Point) -> Result<f64> {
        self.check(space)?;
        space.validate(x)?;
        Ok(self.eval_coords(space, x.coords()))
    }

    /// Dense values over the whole space in rank order.
    pub fn tabulate(&self, space: &ProductSpace) -> Result<Vec<f64>> {
        self.check(space)?;
        let count = space.enumerable_count()?;
        if let FunctionSource::Table(values) = &self.source {
            return Ok(values.clone());
        }
        let mut out = Vec::with_capacity(count as usize);
        space.for_each_point(|rank, coords| out.push(self.eval_at(space, rank, coords)))?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;

    #[test]
    fn counterexample_values() {
        let space = ProductSpace::binary(3);
        let f = TabulatedFunction::builtin(BuiltinFunction::Counterexample);
        let t = f.tabulate(&space).unwrap();
        assert_eq!(t, vec![8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn toy_values() {
        let space = ProductSpace::binary(2);
        let f = TabulatedFunction::builtin(BuiltinFunction::Toy { b: 1.0, centered: false });
        assert_eq!(f.tabulate(&space).unwrap(), vec![1.0, -1.0, -1.0, -1.0]);
        let c = TabulatedFunction::builtin(BuiltinFunction::Toy { b: 3.0, centered: true });
        assert_eq!(c.tabulate(&space).unwrap(), vec![3.0, 0.0, 0.0, -3.0]);
    }

    #[test]
    fn table_length_must_match() {
        let space = ProductSpace::binary(2);
        let f = TabulatedFunction::table(vec![0.0; 3]);
        let err = f.tabulate(&space).unwrap_err();
        assert!(err.to_string().contains("f.values"), "{err}");
    }

    #[test]
    fn coordinate_rule() {
        let space = ProductSpace::uniform(&[2, 3]).unwrap();
        let f = TabulatedFunction::builtin(BuiltinFunction::Coordinate { index: 1, scale: 0.5 });
        assert_eq!(f.eval(&space, &Point(vec![1, 2])).unwrap(), 1.0);
        let bad = TabulatedFunction::builtin(BuiltinFunction::Coordinate { index: 2, scale: 1.0 });
        assert!(bad.tabulate(&space).is_err());
    }
}
