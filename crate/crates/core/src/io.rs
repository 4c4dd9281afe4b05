//! JSON documents read and written by the command-line tool.
//!
//! Triangulation:
//! ```json
//! { "num_vertices": 4, "faces": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] }
//! ```
//! Targets:
//! ```json
//! { "L_hat": [1.0, 1.0, 1.0, 1.0] }
//! ```
//! Unknown fields are rejected. Errors carry the offending field path and the
//! line and column in the source text.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{FlowConfig, FlowStatus, SolveOutcome, Stepper};
use crate::realize::{RealizedMetric, VertexRecord};
use crate::surface::{TargetCurvature, Triangulation};

/// Version of the solve report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDoc {
    pub num_vertices: usize,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsDoc {
    #[serde(rename = "L_hat")]
    pub l_hat: Vec<f64>,
}

/// Solver settings file; every field is optional and overrides the default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsDoc {
    pub residual_tol: Option<f64>,
    pub class_tol: Option<f64>,
    pub stepper: Option<Stepper>,
    pub newton: Option<bool>,
    pub newton_switch_tol: Option<f64>,
    pub newton_damping: Option<f64>,
    pub max_newton_iterations: Option<usize>,
    pub max_steps: Option<usize>,
    pub max_time: Option<f64>,
    pub step_tol: Option<f64>,
    pub initial_step: Option<f64>,
    pub rk4_step: Option<f64>,
    pub check_admissibility: Option<bool>,
    /// Initial log-curvatures; all zero when absent.
    pub initial_k_log: Option<Vec<f64>>,
}

impl SettingsDoc {
    /// Copies the fields that are set into `config`.
    pub fn apply(&self, config: &mut FlowConfig<f64>) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = self.$f { config.$f = v; }
            )*};
        }
        set!(
            residual_tol,
            stepper,
            newton,
            newton_switch_tol,
            newton_damping,
            max_newton_iterations,
            max_steps,
            max_time,
            step_tol,
            initial_step,
            rk4_step,
            check_admissibility
        );
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, col)
}

/// Line and column of the first occurrence of `"key"` in `text`.
fn key_position(text: &str, key: &str) -> (usize, usize) {
    text.find(&format!("\"{key}\""))
        .map_or((0, 0), |p| line_col(text, p))
}

/// Deserializes `text`, reporting failures with field path, line and column.
pub fn parse_document<D: DeserializeOwned>(text: &str, source_name: &str) -> Result<D> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            source_name: source_name.to_string(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        field: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

fn semantic(text: &str, source_name: &str, key: &str, field: String, message: String) -> Error {
    let (line, column) = key_position(text, key);
    Error::Parse {
        source_name: source_name.to_string(),
        field,
        line,
        column,
        message,
    }
}

/// Parses a triangulation document without checking the surface invariants.
pub fn parse_triangulation_unchecked(text: &str, source_name: &str) -> Result<Triangulation> {
    let doc: TriangulationDoc = parse_document(text, source_name)?;
    if doc.num_vertices == 0 {
        return Err(semantic(
            text,
            source_name,
            "num_vertices",
            "num_vertices".into(),
            "must be positive".into(),
        ));
    }
    if let Some((i, f)) = doc
        .faces
        .iter()
        .enumerate()
        .find(|(_, f)| f.iter().any(|&v| v >= doc.num_vertices))
    {
        return Err(semantic(
            text,
            source_name,
            "faces",
            format!("faces[{i}]"),
            format!(
                "face {f:?} references a vertex >= num_vertices = {}",
                doc.num_vertices
            ),
        ));
    }
    Ok(Triangulation::unchecked(doc.num_vertices, doc.faces))
}

/// Parses and validates a triangulation document.
pub fn parse_triangulation(text: &str, source_name: &str) -> Result<Triangulation> {
    let t = parse_triangulation_unchecked(text, source_name)?;
    let defects = t.validate();
    if defects.is_empty() {
        Ok(t)
    } else {
        Err(Error::InvalidTriangulation(defects))
    }
}

pub fn parse_targets(text: &str, source_name: &str) -> Result<TargetCurvature<f64>> {
    let doc: TargetsDoc = parse_document(text, source_name)?;
    if let Some((i, v)) = doc
        .l_hat
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v > 0.0) || !v.is_finite())
    {
        return Err(semantic(
            text,
            source_name,
            "L_hat",
            format!("L_hat[{i}]"),
            format!("target curvatures must be positive, got {v}"),
        ));
    }
    TargetCurvature::new(doc.l_hat)
}

pub fn parse_settings(text: &str, source_name: &str) -> Result<SettingsDoc> {
    parse_document(text, source_name)
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn read_triangulation(path: &Path) -> Result<Triangulation> {
    parse_triangulation(&read(path)?, &path.display().to_string())
}

pub fn read_targets(path: &Path) -> Result<TargetCurvature<f64>> {
    parse_targets(&read(path)?, &path.display().to_string())
}

pub fn read_settings(path: &Path) -> Result<SettingsDoc> {
    parse_settings(&read(path)?, &path.display().to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateDoc {
    pub lambda: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GlobalDoc {
    #[serde(rename = "chi_S")]
    pub chi_s: i64,
    pub chi_realized: i64,
    pub total_area: f64,
    pub interstice_area: f64,
    pub audit_residual: f64,
}

/// Machine-readable result of a solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub status: FlowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_max: Option<f64>,
    pub flow_steps: usize,
    pub newton_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<VertexRecord<f64>>>,
    #[serde(rename = "global", skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalDoc>,
}

impl SolveReport {
    pub fn new(outcome: &SolveOutcome<f64>, metric: Option<&RealizedMetric<f64>>) -> Self {
        SolveReport {
            schema_version: SCHEMA_VERSION,
            status: outcome.status,
            witness: outcome.witness.clone(),
            residual_max: outcome
                .residual_max
                .is_finite()
                .then_some(outcome.residual_max),
            flow_steps: outcome.trace.samples.len().saturating_sub(1),
            newton_iterations: outcome.trace.newton.len(),
            rate: outcome.trace.rate.map(|r| RateDoc {
                lambda: r.lambda,
                r_squared: r.r_squared,
                samples: r.samples,
            }),
            vertices: metric.map(|m| m.vertices.clone()),
            global: metric.map(|m| GlobalDoc {
                chi_s: m.chi_surface,
                chi_realized: m.audit.chi_realized,
                total_area: m.audit.total_area,
                interstice_area: m.interstice_area,
                audit_residual: m.audit.residual,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = r#"{
  "num_vertices": 4,
  "faces": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
}"#;

    #[test]
    fn reads_tetrahedron() {
        let t = parse_triangulation(TETRA, "tetra.json").unwrap();
        assert_eq!(t, Triangulation::tetrahedron());
        let l = parse_targets(r#"{"L_hat": [1, 1, 1.5, 2]}"#, "l.json").unwrap();
        assert_eq!(l.as_slice(), &[1.0, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn type_errors_report_field_and_line() {
        let text = "{\n  \"num_vertices\": 4,\n  \"faces\": [[0, 1, 2], [0, \"x\", 3]]\n}";
        match parse_triangulation(text, "bad.json") {
            Err(Error::Parse {
                field,
                line,
                source_name,
                ..
            }) => {
                assert_eq!(field, "faces[1][1]");
                assert_eq!(line, 3);
                assert_eq!(source_name, "bad.json");
            }
            other => panic!("{other:?}"),
        }
        match parse_targets("{\n\"L_hat\": [1, 2],\n\"extra\": 1}", "l.json") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_targets("{\"L_hat\": [1, 2]", "l.json") {
            Err(Error::Parse { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_point_at_the_field() {
        match parse_targets("{\n\n  \"L_hat\": [1, -2]\n}", "l.json") {
            Err(Error::Parse { field, line, .. }) => {
                assert_eq!(field, "L_hat[1]");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        match parse_triangulation(r#"{"num_vertices": 3, "faces": [[0, 1, 5]]}"#, "t") {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "faces[0]"),
            other => panic!("{other:?}"),
        }
        let open = r#"{"num_vertices": 4, "faces": [[0, 1, 2], [0, 1, 3], [0, 2, 3]]}"#;
        assert!(matches!(
            parse_triangulation(open, "t"),
            Err(Error::InvalidTriangulation(_))
        ));
        assert!(parse_triangulation_unchecked(open, "t").is_ok());
    }

    #[test]
    fn settings_override_defaults() {
        let s = parse_settings(
            r#"{"residual_tol": 1e-8, "stepper": "rk4", "newton": false}"#,
            "c",
        )
        .unwrap();
        let mut c = FlowConfig::default();
        s.apply(&mut c);
        assert_eq!(c.residual_tol, 1e-8);
        assert_eq!(c.stepper, Stepper::Rk4);
        assert!(!c.newton);
        assert_eq!(c.newton_switch_tol, 1e-3);
        assert!(parse_settings(r#"{"stepper": "euler"}"#, "c").is_err());
    }
}
