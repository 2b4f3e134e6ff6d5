//! JSON metric, frame and expectation files.
//!
//! Expressions are stored as strings in the expression grammar. Writing is
//! canonical (normalized expressions, fixed field order, two-space
//! indentation, trailing newline), so writing a loaded file reproduces it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{ExpectedTier, FamilyInstance};
use crate::expr::{display, parse_expression, ExprError, RationalFunction, VariableContext};
use crate::frame::{validate_frame, FrameError, NullFrame, PairingViolation, Role};
use crate::tensor::{Metric, TensorError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Expr { field: String, source: ExprError },
    #[error("{0}")]
    Context(ExprError),
    #[error("{0}")]
    Shape(String),
    #[error("metric is not symmetric: [{row}][{col}] and [{col}][{row}] differ")]
    Asymmetric { row: usize, col: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("frame fails the pairing conditions: {}", describe(.0))]
    InvalidFrame(Vec<PairingViolation>),
}

fn describe(v: &[PairingViolation]) -> String {
    v.iter()
        .map(|p| format!("g({}, {}) = {} (expected {})", p.first, p.second, p.actual, p.expected))
        .collect::<Vec<_>>()
        .join("; ")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn parse_at(text: &str, ctx: &VariableContext, field: impl FnOnce() -> String) -> Result<RationalFunction, IoError> {
    parse_expression(text, ctx).map_err(|source| IoError::Expr { field: field(), source })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    /// `[k, m]` for signature `(k, k+m)`.
    pub signature: [usize; 2],
    /// Row `a` holds either `a + 1` entries (lower triangle) or all of them.
    pub metric: Vec<Vec<String>>,
}

impl MetricFile {
    /// Full symmetric matrix of normalized expressions.
    pub fn from_metric(metric: &Metric) -> Self {
        let ctx = metric.ctx();
        let dim = metric.dim();
        MetricFile {
            coordinates: ctx.coordinate_names().iter().map(|s| s.to_string()).collect(),
            parameters: ctx.parameter_names().iter().map(|s| s.to_string()).collect(),
            signature: [ctx.signature().0, ctx.signature().1],
            metric: (0..dim)
                .map(|a| (0..dim).map(|b| display(metric.component(a, b), ctx)).collect())
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn context(&self) -> Result<Arc<VariableContext>, IoError> {
        let sig = (self.signature[0], self.signature[1]);
        VariableContext::new(&self.coordinates, &self.parameters, sig)
            .map(Arc::new)
            .map_err(IoError::Context)
    }

    pub fn to_metric(&self) -> Result<Metric, IoError> {
        let ctx = self.context()?;
        let dim = ctx.dim();
        if self.metric.len() != dim {
            return Err(IoError::Shape(format!("metric has {} rows, expected {dim}", self.metric.len())));
        }
        let mut rows: Vec<Vec<RationalFunction>> = Vec::with_capacity(dim);
        for (a, row) in self.metric.iter().enumerate() {
            if row.len() != a + 1 && row.len() != dim {
                return Err(IoError::Shape(format!(
                    "metric row {a} has {} entries, expected {} or {dim}",
                    row.len(),
                    a + 1
                )));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(b, t)| parse_at(t, &ctx, || format!("metric[{a}][{b}]")))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        for a in 0..dim {
            for b in a + 1..dim {
                if rows[a].len() == dim && rows[a][b] != rows[b][a] {
                    return Err(IoError::Asymmetric { row: a, col: b });
                }
            }
        }
        Ok(Metric::from_lower_triangle(ctx, &rows)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Vectors,
    Covectors,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameEntry {
    pub role: Role,
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub frame: Vec<FrameEntry>,
    pub frame_kind: FrameKind,
}

impl FrameFile {
    /// Vector components of each frame field, in frame order.
    pub fn from_frame(frame: &NullFrame) -> Self {
        let ctx = frame.ctx();
        FrameFile {
            frame: frame
                .roles()
                .iter()
                .zip(frame.vectors())
                .map(|(role, v)| FrameEntry {
                    role: *role,
                    components: v.iter().map(|c| display(c, ctx)).collect(),
                })
                .collect(),
            frame_kind: FrameKind::Vectors,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Builds the frame against `metric` and checks every pairing.
    pub fn to_frame(&self, metric: &Metric) -> Result<NullFrame, IoError> {
        let frame = self.to_frame_unchecked(metric)?;
        let report = validate_frame(&frame, metric);
        if report.is_valid() {
            Ok(frame)
        } else {
            Err(IoError::InvalidFrame(report.violations))
        }
    }

    /// Builds the frame without checking the pairings.
    pub fn to_frame_unchecked(&self, metric: &Metric) -> Result<NullFrame, IoError> {
        let ctx = metric.ctx();
        let dim = metric.dim();
        if self.frame.len() != dim {
            return Err(IoError::Shape(format!("frame has {} fields, expected {dim}", self.frame.len())));
        }
        let roles = self.frame.iter().map(|e| e.role).collect();
        let mut comps = Vec::with_capacity(dim);
        for (i, e) in self.frame.iter().enumerate() {
            if e.components.len() != dim {
                return Err(IoError::Shape(format!(
                    "frame field {} has {} components, expected {dim}",
                    e.role,
                    e.components.len()
                )));
            }
            comps.push(
                e.components
                    .iter()
                    .enumerate()
                    .map(|(j, t)| parse_at(t, ctx, || format!("frame[{i}] ({}) component {j}", e.role)))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(match self.frame_kind {
            FrameKind::Vectors => NullFrame::from_vectors(ctx.clone(), roles, comps)?,
            FrameKind::Covectors => NullFrame::from_covectors(metric, roles, comps)?,
        })
    }
}

/// What a catalog instance is expected to satisfy, written next to its
/// metric and frame files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFile {
    pub family: String,
    pub bindings: BTreeMap<String, String>,
    pub walker: Option<bool>,
    pub kundt: Option<bool>,
    /// `"vsi"`, `"exactly:j"`, `"at_least:j"` or `"unspecified"`.
    pub tier: String,
    pub description: String,
}

impl ExpectedFile {
    pub fn from_instance(inst: &FamilyInstance) -> Self {
        let ctx = inst.ctx();
        ExpectedFile {
            family: inst.id.clone(),
            bindings: inst.bindings.iter().map(|b| (b.name.clone(), display(&b.value, ctx))).collect(),
            walker: inst.flags.walker,
            kundt: inst.flags.kundt,
            tier: tier_code(inst.tier),
            description: inst.tier.to_string(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn expected_tier(&self) -> Option<ExpectedTier> {
        parse_tier_code(&self.tier)
    }
}

pub fn tier_code(t: ExpectedTier) -> String {
    match t {
        ExpectedTier::Vsi => "vsi".into(),
        ExpectedTier::Exactly(j) => format!("exactly:{j}"),
        ExpectedTier::AtLeast(j) => format!("at_least:{j}"),
        ExpectedTier::Unspecified => "unspecified".into(),
    }
}

pub fn parse_tier_code(s: &str) -> Option<ExpectedTier> {
    match s.split_once(':') {
        None if s == "vsi" => Some(ExpectedTier::Vsi),
        None if s == "unspecified" => Some(ExpectedTier::Unspecified),
        Some(("exactly", j)) => j.parse().ok().map(ExpectedTier::Exactly),
        Some(("at_least", j)) => j.parse().ok().map(ExpectedTier::AtLeast),
        _ => None,
    }
}
