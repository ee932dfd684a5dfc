//! The McShane-type extension of `f` from Y to the whole space.
//!
//! `f̄(x) = min_{y ∈ Y} { f(y) + d_c(x, y) }` agrees with `f` on Y and has
//! `c`-bounded differences on all of X whenever `f` has them on Y. The dual
//! `ĝ(x) = max_{y ∈ Y} { f(y) - d_c(x, y) }` is the smallest such extension;
//! every `c`-Lipschitz extension lies between the two.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::certify::{check_arity, check_bounded_differences};
use crate::error::Result;
use crate::function::TabulatedFunction;
use crate::metric::WeightedMetric;
use crate::space::ProductSpace;
use crate::subset::SubsetY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Envelope {
    Upper,
    Lower,
}

/// An extension tabulated over the whole space in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionTable {
    pub values: Vec<f64>,
    pub metric: WeightedMetric,
    /// `min_{y ∈ Y} f(y)`.
    pub y_min: f64,
}

impl ExtensionTable {
    pub fn into_function(self) -> TabulatedFunction {
        TabulatedFunction::table(self.values)
    }
}

/// Serializes with the dense-table layout used for functions in instance files.
impl Serialize for ExtensionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ExtensionTable", 2)?;
        s.serialize_field("type", "table")?;
        s.serialize_field("values", &self.values)?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendOptions {
    /// Certify bounded differences on Y before extending.
    pub verify: bool,
}

/// `f̄(x) = min_{y ∈ Y} { f(y) + d_c(x, y) }`, computed exactly over Y.
///
/// The bounded-differences hypothesis on Y is the caller's contract unless
/// `options.verify` is set; without it the formula is still evaluated but
/// `f̄` need not agree with `f` on Y.
pub fn extend(
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    space: &ProductSpace,
    options: ExtendOptions,
) -> Result<ExtensionTable> {
    build(f, y, metric, space, options, Envelope::Upper)
}

/// `ĝ(x) = max_{y ∈ Y} { f(y) - d_c(x, y) }`.
pub fn lower_extend(
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    space: &ProductSpace,
    options: ExtendOptions,
) -> Result<ExtensionTable> {
    build(f, y, metric, space, options, Envelope::Lower)
}

fn build(
    f: &TabulatedFunction,
    y: &SubsetY,
    metric: &WeightedMetric,
    space: &ProductSpace,
    options: ExtendOptions,
    envelope: Envelope,
) -> Result<ExtensionTable> {
    check_arity(metric, space)?;
    if options.verify {
        check_bounded_differences(f, y, metric, space)?.into_result()?;
    }
    let values = f.tabulate(space)?;
    let members = y.materialize(space)?;
    members.require_non_empty()?;

    let n = space.n();
    let mut coords = vec![0usize; members.len() * n];
    let mut fy = Vec::with_capacity(members.len());
    for (i, &rank) in members.ranks().iter().enumerate() {
        space.unrank_into(rank, &mut coords[i * n..(i + 1) * n]);
        fy.push(values[rank as usize]);
    }
    let y_min = fy.iter().copied().fold(f64::INFINITY, f64::min);

    let table = (0..values.len() as u64)
        .into_par_iter()
        .map_init(
            || vec![0usize; n],
            |x, rank| {
                space.unrank_into(rank, x);
                let candidates = fy.iter().enumerate().map(|(j, &fj)| {
                    let d = metric.distance_unchecked(x, &coords[j * n..(j + 1) * n]);
                    match envelope {
                        Envelope::Upper => fj + d,
                        Envelope::Lower => fj - d,
                    }
                });
                match envelope {
                    Envelope::Upper => candidates.fold(f64::INFINITY, f64::min),
                    Envelope::Lower => candidates.fold(f64::NEG_INFINITY, f64::max),
                }
            },
        )
        .collect();

    Ok(ExtensionTable {
        values: table,
        metric: metric.clone(),
        y_min,
    })
}
