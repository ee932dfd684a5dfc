//! The JSON instance file format.
//!
//! ```json
//! {
//!   "n": 2,
//!   "alphabet_sizes": [2, 2],
//!   "probs": [[0.5, 0.5], [0.5, 0.5]],
//!   "c": [1.0, 1.0],
//!   "f": {"type": "table", "values": [0.0, 1.0, 1.0, 2.0]},
//!   "Y": {"type": "exclude", "points": [[0, 0]]},
//!   "sup_bound": 2.0
//! }
//! ```
//!
//! `f` may also be `{"type": "builtin", "name": ..., "params": {...}}` and
//! `Y` may be `include` or `builtin`. The canonical form has sorted keys,
//! two-space indentation and shortest round-trip reals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::examples::InstanceBundle;
use crate::function::{BuiltinFunction, FunctionSource, TabulatedFunction};
use crate::metric::WeightedMetric;
use crate::space::{Limits, ProductSpace};
use crate::subset::{SubsetRule, SubsetY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Table {
        values: Vec<f64>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SubsetSpec {
    Exclude {
        points: Vec<Vec<usize>>,
    },
    Include {
        points: Vec<Vec<usize>>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub alphabet_sizes: Vec<usize>,
    pub probs: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub f: FunctionSpec,
    #[serde(rename = "Y")]
    pub y: SubsetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_bound: Option<f64>,
}

fn param(params: &BTreeMap<String, f64>, name: &str, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(&v), _) => Ok(v),
        (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::field(
            format!("f.params.{key}"),
            format!("builtin `{name}` requires parameter `{key}`"),
        )),
    }
}

fn builtin_function(name: &str, params: &BTreeMap<String, f64>) -> Result<BuiltinFunction> {
    let rule = match name {
        "counterexample1" => BuiltinFunction::Counterexample,
        "toy" => BuiltinFunction::Toy {
            b: param(params, name, "B", None)?,
            centered: param(params, name, "centered", Some(0.0))? != 0.0,
        },
        "mean" => BuiltinFunction::Mean {
            scale: param(params, name, "scale", Some(1.0))?,
        },
        "coordinate" => {
            let index = param(params, name, "index", None)?;
            if index < 0.0 || index.fract() != 0.0 {
                return Err(Error::field("f.params.index", "must be a non-negative integer"));
            }
            BuiltinFunction::Coordinate {
                index: index as usize,
                scale: param(params, name, "scale", Some(1.0))?,
            }
        }
        "constant" => BuiltinFunction::Constant {
            value: param(params, name, "value", None)?,
        },
        other => return Err(Error::UnknownBuiltin(format!("f.name = {other}"))),
    };
    Ok(rule)
}

fn builtin_params(rule: &BuiltinFunction) -> BTreeMap<String, f64> {
    let mut params = BTreeMap::new();
    match *rule {
        BuiltinFunction::Counterexample => {}
        BuiltinFunction::Toy { b, centered } => {
            params.insert("B".into(), b);
            params.insert("centered".into(), if centered { 1.0 } else { 0.0 });
        }
        BuiltinFunction::Mean { scale } => {
            params.insert("scale".into(), scale);
        }
        BuiltinFunction::Coordinate { index, scale } => {
            params.insert("index".into(), index as f64);
            params.insert("scale".into(), scale);
        }
        BuiltinFunction::Constant { value } => {
            params.insert("value".into(), value);
        }
    }
    params
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Sorted keys, pretty-printed, newline-terminated.
    pub fn to_canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_bundle(bundle: &InstanceBundle) -> Self {
        let space = &bundle.space;
        let f = match &bundle.f.source {
            FunctionSource::Table(values) => FunctionSpec::Table { values: values.clone() },
            FunctionSource::Builtin(rule) => FunctionSpec::Builtin {
                name: rule.name().to_string(),
                params: builtin_params(rule),
            },
        };
        let y = match &bundle.y {
            SubsetY::Exclude(points) => SubsetSpec::Exclude {
                points: points.iter().cloned().collect(),
            },
            SubsetY::Include(points) => SubsetSpec::Include {
                points: points.iter().cloned().collect(),
            },
            SubsetY::Builtin(rule) => SubsetSpec::Builtin {
                name: rule.name().to_string(),
                params: BTreeMap::new(),
            },
        };
        InstanceFile {
            n: space.n(),
            alphabet_sizes: space.alphabet_sizes().to_vec(),
            probs: space.probs().to_vec(),
            c: bundle.metric.weights().to_vec(),
            f,
            y,
            sup_bound: bundle.f.sup_bound,
        }
    }

    /// Validates every field and builds the in-memory instance.
    pub fn into_bundle(self, limits: Limits) -> Result<InstanceBundle> {
        if self.alphabet_sizes.len() != self.n {
            return Err(Error::field(
                "alphabet_sizes",
                format!("has {} entries, n = {}", self.alphabet_sizes.len(), self.n),
            ));
        }
        if self.probs.len() != self.n {
            return Err(Error::field(
                "probs",
                format!("has {} entries, n = {}", self.probs.len(), self.n),
            ));
        }
        for (i, (law, &k)) in self.probs.iter().zip(&self.alphabet_sizes).enumerate() {
            if law.len() != k {
                return Err(Error::field(
                    format!("probs[{i}]"),
                    format!("has {} entries, alphabet_sizes[{i}] = {k}", law.len()),
                ));
            }
        }
        let space = ProductSpace::new(self.probs)
            .map_err(|e| Error::field("probs", e.to_string()))?
            .with_limits(limits);
        if self.c.len() != self.n {
            return Err(Error::field("c", format!("has {} entries, n = {}", self.c.len(), self.n)));
        }
        let metric = WeightedMetric::new(self.c).map_err(|e| Error::field("c", e.to_string()))?;

        let source = match self.f {
            FunctionSpec::Table { values } => FunctionSource::Table(values),
            FunctionSpec::Builtin { name, params } => {
                FunctionSource::Builtin(builtin_function(&name, &params)?)
            }
        };
        let f = TabulatedFunction {
            source,
            sup_bound: self.sup_bound,
        };
        f.check(&space)?;

        let y = match self.y {
            SubsetSpec::Exclude { points } => SubsetY::Exclude(points.into_iter().collect()),
            SubsetSpec::Include { points } => SubsetY::Include(points.into_iter().collect()),
            SubsetSpec::Builtin { name, .. } => SubsetY::Builtin(match name.as_str() {
                "all" => SubsetRule::All,
                "exclude_zero" => SubsetRule::ExcludeZero,
                "exclude_extremes" => SubsetRule::ExcludeExtremes,
                other => return Err(Error::UnknownBuiltin(format!("Y.name = {other}"))),
            }),
        };
        y.check(&space)?;

        Ok(InstanceBundle {
            space,
            f,
            y,
            metric,
            label: "file".to_string(),
            params: BTreeMap::new(),
            certified: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{counterexample1, random_certified_instance, toy_example};

    const SAMPLE: &str = r#"{
        "n": 2, "alphabet_sizes": [2, 2], "probs": [[0.5, 0.5], [0.25, 0.75]],
        "c": [1, 1],
        "f": {"type": "table", "values": [0, 1, 1, 2]},
        "Y": {"type": "exclude", "points": [[0, 0]]},
        "sup_bound": 2
    }"#;

    #[test]
    fn loads_sample() {
        let bundle = InstanceFile::from_json(SAMPLE)
            .unwrap()
            .into_bundle(Limits::default())
            .unwrap();
        assert_eq!(bundle.space.alphabet_sizes(), &[2, 2]);
        assert_eq!(bundle.metric.c_bar(), 2.0);
        assert_eq!(bundle.f.sup_bound, Some(2.0));
    }

    #[test]
    fn canonical_form_is_stable() {
        let bundles = [
            counterexample1(4).unwrap(),
            toy_example(5, 1e9, true).unwrap(),
            random_certified_instance(3, 4, 3).unwrap(),
        ];
        for bundle in &bundles {
            let text = InstanceFile::from_bundle(bundle).to_canonical_json().unwrap();
            let again = InstanceFile::from_json(&text)
                .unwrap()
                .into_bundle(Limits::default())
                .unwrap();
            assert_eq!(again.space, bundle.space);
            assert_eq!(again.f, bundle.f);
            assert_eq!(again.y, bundle.y);
            assert_eq!(again.metric, bundle.metric);
            let text2 = InstanceFile::from_bundle(&again).to_canonical_json().unwrap();
            assert_eq!(text, text2);
        }
        let loaded = InstanceFile::from_json(SAMPLE).unwrap();
        let canonical = loaded.to_canonical_json().unwrap();
        assert_eq!(InstanceFile::from_json(&canonical).unwrap().to_canonical_json().unwrap(), canonical);
    }

    fn error_for(edit: impl Fn(&mut serde_json::Value)) -> String {
        let mut value: serde_json::Value = serde_json::from_str(SAMPLE).unwrap();
        edit(&mut value);
        let text = value.to_string();
        match InstanceFile::from_json(&text).and_then(|f| f.into_bundle(Limits::default())) {
            Ok(_) => panic!("expected an error"),
            Err(e) => e.to_string(),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert!(error_for(|v| v["probs"][1] = serde_json::json!([0.3, 0.3])).contains("probs"));
        assert!(error_for(|v| v["probs"][1] = serde_json::json!([1.0])).contains("probs[1]"));
        assert!(error_for(|v| v["c"] = serde_json::json!([1.0])).contains("`c`"));
        assert!(error_for(|v| v["c"] = serde_json::json!([1.0, -1.0])).contains("`c`"));
        assert!(error_for(|v| v["alphabet_sizes"] = serde_json::json!([2])).contains("alphabet_sizes"));
        assert!(error_for(|v| v["f"]["values"] = serde_json::json!([1.0])).contains("f.values"));
        assert!(error_for(|v| v["Y"]["points"] = serde_json::json!([[0, 5]])).contains("Y.points[0]"));
        assert!(error_for(|v| {
            v.as_object_mut().unwrap().remove("c");
        })
        .contains("missing field `c`"));
        assert!(error_for(|v| v["f"] = serde_json::json!({"type": "builtin", "name": "nope"})).contains("nope"));
        assert!(error_for(|v| v["f"] = serde_json::json!({"type": "builtin", "name": "toy"})).contains("f.params.B"));
    }
}
