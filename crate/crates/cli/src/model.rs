//! Model persistence.

use std::path::Path;

use metric_margin_core::ann::NnMode;
use metric_margin_core::bounds::BoundValue;
use metric_margin_core::classifier::LipschitzClassifier;
use metric_margin_core::metric::{DoublingEstimate, MetricOracle, Point};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::LabelTable;
use crate::error::{CliError, Result};

pub const MODEL_SCHEMA: u64 = 1;

/// A stored point. Strings are kept as JSON strings rather than byte arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StoredPoint {
    Vector(Vec<f64>),
    Text(String),
}

impl StoredPoint {
    fn from_point(p: &Point) -> Self {
        match p {
            Point::Vector(v) => StoredPoint::Vector(v.clone()),
            // ingestion only produces text from UTF-8 input
            Point::Text(b) => StoredPoint::Text(String::from_utf8_lossy(b).into_owned()),
        }
    }

    fn to_point(&self) -> Point {
        match self {
            StoredPoint::Vector(v) => Point::Vector(v.clone()),
            StoredPoint::Text(s) => Point::text(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredExample {
    pub label: usize,
    pub point: StoredPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub schema: u64,
    /// Metric kind and the scale that normalizes the training sample to
    /// unit diameter.
    pub metric: MetricOracle,
    pub lipschitz: f64,
    pub nn_mode: NnMode,
    /// Label names; a label id is its position.
    pub labels: Vec<String>,
    pub s1: Vec<StoredExample>,
    pub ddim: DoublingEstimate,
    pub bound: BoundValue,
}

impl Model {
    pub fn from_classifier(
        c: &LipschitzClassifier<MetricOracle>,
        labels: &LabelTable,
        ddim: DoublingEstimate,
        bound: BoundValue,
    ) -> Self {
        Self {
            schema: MODEL_SCHEMA,
            metric: *c.metric(),
            lipschitz: c.lipschitz(),
            nn_mode: c.mode(),
            labels: labels.names().to_vec(),
            s1: c
                .points()
                .iter()
                .zip(c.labels())
                .map(|(p, &label)| StoredExample {
                    label,
                    point: StoredPoint::from_point(p),
                })
                .collect(),
            ddim,
            bound,
        }
    }

    pub fn label_table(&self) -> LabelTable {
        LabelTable::from_stored(self.labels.clone())
    }

    /// Rebuilds the classifier, optionally with a different search mode.
    pub fn classifier(&self, mode: Option<NnMode>) -> Result<LipschitzClassifier<MetricOracle>> {
        let points = self.s1.iter().map(|e| e.point.to_point()).collect();
        let ys = self.s1.iter().map(|e| e.label).collect();
        LipschitzClassifier::new(
            points,
            ys,
            self.labels.len(),
            self.lipschitz,
            self.metric,
            mode.unwrap_or(self.nn_mode),
        )
        .map_err(|e| CliError::validation(format!("model is inconsistent: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::validation(format!("model is not valid JSON: {e}")))?;
        match value.get("schema").and_then(Value::as_u64) {
            None => return Err(CliError::validation("model has no integer `schema` field")),
            Some(v) if v > MODEL_SCHEMA => {
                return Err(CliError::validation(format!(
                    "model schema {v} is newer than the supported schema {MODEL_SCHEMA}"
                )))
            }
            Some(_) => {}
        }
        serde_json::from_value(value).map_err(|e| CliError::validation(format!("malformed model: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read model {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
