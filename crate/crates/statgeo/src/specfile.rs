//! Structure spec files.
//!
//! The CLI ingests a small JSON document describing a structure: either a
//! named gallery fixture with parameters, or explicit component maps for
//! `g` and `A` keyed by 1-based, comma-separated, order-insensitive index
//! strings ("2,1" and "1,2" address the same symmetric slot).  Unspecified
//! metric components default to the identity, unspecified cubic components
//! to zero.  An optional `alpha` applies the cubic rescaling after the
//! structure is built.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::chart::{Chart, StatStructure, StructureBuilder};
use crate::error::Error;
use crate::expr;
use crate::gallery::{self, FixtureParams, FixtureSpec};
use crate::Result;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpecFile {
    pub dimension: usize,
    /// Chart box, one `[lo, hi]` pair per axis.  Required for explicit
    /// structures; overrides the fixture's default box otherwise.
    #[serde(default)]
    pub domain: Option<Vec<(f64, f64)>>,
    /// Per-axis grid counts; the chart's default when omitted.
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
    #[serde(default)]
    pub fixture: Option<FixtureRef>,
    #[serde(default)]
    pub explicit: Option<ExplicitComponents>,
    /// Cubic rescaling `A ↦ alpha·A` applied after construction.
    #[serde(default)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureRef {
    pub name: String,
    #[serde(default)]
    pub params: FixtureFileParams,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFileParams {
    #[serde(default)]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitComponents {
    #[serde(default)]
    pub g: BTreeMap<String, String>,
    #[serde(default, rename = "A")]
    pub a: BTreeMap<String, String>,
}

/// Parse a 1-based component key like `"1,3,2"` into sorted zero-based
/// indices, validating arity and range.
fn parse_key(key: &str, arity: usize, dim: usize) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != arity {
        return Err(Error::spec(format!(
            "component key \"{key}\" has {} indices, expected {arity}",
            parts.len()
        )));
    }
    let mut idx = Vec::with_capacity(arity);
    for part in parts {
        let v: usize = part.parse().map_err(|_| {
            Error::spec(format!("component key \"{key}\" has a non-integer index \"{part}\""))
        })?;
        if v == 0 || v > dim {
            return Err(Error::spec(format!(
                "component key \"{key}\": index {v} outside 1..={dim}"
            )));
        }
        idx.push(v - 1);
    }
    idx.sort_unstable();
    Ok(idx)
}

impl StructureSpecFile {
    pub fn from_str(src: &str) -> Result<StructureSpecFile> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<StructureSpecFile> {
        let src = std::fs::read_to_string(path)?;
        StructureSpecFile::from_str(&src)
    }

    /// Validate and build the structure the file describes.
    pub fn build(&self) -> Result<StatStructure> {
        if self.dimension == 0 {
            return Err(Error::spec("dimension must be at least 1"));
        }
        let s = match (&self.fixture, &self.explicit) {
            (Some(_), Some(_)) => {
                return Err(Error::spec(
                    "give either a fixture or explicit components, not both",
                ))
            }
            (None, None) => {
                return Err(Error::spec(
                    "give either a fixture or explicit components",
                ))
            }
            (Some(f), None) => self.build_fixture(f)?,
            (None, Some(e)) => self.build_explicit(e)?,
        };
        match self.alpha {
            Some(alpha) if !alpha.is_finite() => Err(Error::spec("alpha must be finite")),
            Some(alpha) => Ok(gallery::alpha_transform(&s, alpha)),
            None => Ok(s),
        }
    }

    fn build_fixture(&self, f: &FixtureRef) -> Result<StatStructure> {
        let spec = FixtureSpec {
            name: f.name.clone(),
            n: self.dimension,
            params: FixtureParams {
                c: f.params.c,
                bounds: self.domain.clone(),
            },
        };
        let s = gallery::build(&spec)?;
        match &self.grid {
            Some(grid) => s.with_grid(grid.clone()),
            None => Ok(s),
        }
    }

    fn build_explicit(&self, e: &ExplicitComponents) -> Result<StatStructure> {
        let n = self.dimension;
        let bounds = self.domain.clone().ok_or_else(|| {
            Error::spec("explicit structures need a domain box, one [lo, hi] pair per axis")
        })?;
        let grid = self
            .grid
            .clone()
            .unwrap_or_else(|| Chart::default_grid(n));
        let chart = Chart::new(bounds, grid)?;
        let mut builder = StructureBuilder::new(chart);

        let mut seen_g = BTreeSet::new();
        for (key, src) in &e.g {
            let idx = parse_key(key, 2, n)?;
            if !seen_g.insert(idx.clone()) {
                return Err(Error::spec(format!(
                    "metric component \"{key}\" specified more than once (keys are order-insensitive)"
                )));
            }
            let parsed = expr::parse(src, n)
                .map_err(|err| Error::spec(format!("g[\"{key}\"]: {err}")))?;
            builder = builder.metric(idx[0], idx[1], parsed)?;
        }

        let mut seen_a = BTreeSet::new();
        for (key, src) in &e.a {
            let idx = parse_key(key, 3, n)?;
            if !seen_a.insert(idx.clone()) {
                return Err(Error::spec(format!(
                    "cubic component \"{key}\" specified more than once (keys are order-insensitive)"
                )));
            }
            let parsed = expr::parse(src, n)
                .map_err(|err| Error::spec(format!("A[\"{key}\"]: {err}")))?;
            builder = builder.cubic(idx[0], idx[1], idx[2], parsed)?;
        }

        builder.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build_err(spec: &StructureSpecFile) -> Error {
        match spec.build() {
            Ok(_) => panic!("expected the build to fail"),
            Err(e) => e,
        }
    }

    #[test]
    fn fixture_specs_round_trip_through_the_gallery() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 4,
                "fixture": {"name": "constant_distinct", "params": {"c": 1.0}}
            }"#,
        )
        .unwrap();
        let s = spec.build().unwrap();
        let a = s.cubic_at(&[0.0; 4]).unwrap();
        assert_eq!(a.get(&[0, 1, 2]), 1.0);
        assert_eq!(a.get(&[0, 1, 1]), 0.0);
    }

    #[test]
    fn explicit_keys_are_one_based_and_order_insensitive() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 3,
                "domain": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
                "explicit": {
                    "g": {"2,2": "2"},
                    "A": {"3,1,2": "x1"}
                }
            }"#,
        )
        .unwrap();
        let s = spec.build().unwrap();
        let p = [0.5, 0.1, -0.3];
        let (g, _) = s.metric_at(&p).unwrap();
        assert_eq!(g.get(&[1, 1]), 2.0);
        assert_eq!(g.get(&[0, 0]), 1.0);
        assert_eq!(g.get(&[0, 1]), 0.0);
        let a = s.cubic_at(&p).unwrap();
        assert_eq!(a.get(&[0, 1, 2]), 0.5);
        assert_eq!(a.get(&[2, 1, 0]), 0.5);
    }

    #[test]
    fn duplicate_components_are_rejected_after_canonicalization() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 2,
                "domain": [[-1.0, 1.0], [-1.0, 1.0]],
                "explicit": {"g": {"1,2": "0.1", "2,1": "0.1"}}
            }"#,
        )
        .unwrap();
        let err = build_err(&spec);
        assert!(err.to_string().contains("more than once"), "{err}");
    }

    #[test]
    fn malformed_keys_are_rejected() {
        for key in ["1", "1,2,3", "0,1", "1,3", "a,b"] {
            let json = format!(
                r#"{{
                    "dimension": 2,
                    "domain": [[-1.0, 1.0], [-1.0, 1.0]],
                    "explicit": {{"g": {{"{key}": "1"}}}}
                }}"#
            );
            let spec = StructureSpecFile::from_str(&json).unwrap();
            assert!(spec.build().is_err(), "key {key:?} was accepted");
        }
    }

    #[test]
    fn expression_errors_carry_the_component_context() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 2,
                "domain": [[-1.0, 1.0], [-1.0, 1.0]],
                "explicit": {"A": {"1,1,2": "x1 +"}}
            }"#,
        )
        .unwrap();
        let err = build_err(&spec);
        let msg = err.to_string();
        assert!(msg.contains("A[\"1,1,2\"]"), "{msg}");
    }

    #[test]
    fn fixture_and_explicit_are_mutually_exclusive() {
        let both = StructureSpecFile::from_str(
            r#"{
                "dimension": 3,
                "fixture": {"name": "trivial"},
                "explicit": {"g": {}}
            }"#,
        )
        .unwrap();
        assert!(both.build().is_err());

        let neither =
            StructureSpecFile::from_str(r#"{"dimension": 3}"#).unwrap();
        assert!(neither.build().is_err());
    }

    #[test]
    fn alpha_rescales_the_cubic_form() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 3,
                "fixture": {"name": "constant_distinct", "params": {"c": 1.0}},
                "alpha": -2.0
            }"#,
        )
        .unwrap();
        let s = spec.build().unwrap();
        let a = s.cubic_at(&[0.0; 3]).unwrap();
        assert_eq!(a.get(&[0, 1, 2]), -2.0);
    }

    #[test]
    fn domain_and_grid_overrides_reach_the_chart() {
        let spec = StructureSpecFile::from_str(
            r#"{
                "dimension": 3,
                "domain": [[-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]],
                "grid": [3, 3, 3],
                "fixture": {"name": "trivial"}
            }"#,
        )
        .unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.chart().bounds()[0], (-2.0, 2.0));
        assert_eq!(s.chart().grid(), &[3, 3, 3]);
    }

    #[test]
    fn explicit_structures_need_a_domain() {
        let spec = StructureSpecFile::from_str(
            r#"{"dimension": 2, "explicit": {"g": {}}}"#,
        )
        .unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn unknown_fields_and_broken_json_fail_to_parse() {
        assert!(StructureSpecFile::from_str(r#"{"dimension": 2, "bogus": 1}"#).is_err());
        assert!(matches!(
            StructureSpecFile::from_str("{not json"),
            Err(Error::Json(_))
        ));
    }
}
