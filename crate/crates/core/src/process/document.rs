use serde::{Deserialize, Serialize};

use super::ProcessTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDocument {
    pub eps: f64,
    pub v: Vec<f64>,
}

/// Text form of a trace: `n`, `eps_lo`, `eps_hi`, and the ordered
/// `segments` as `{eps, v}` records. Floats are written in shortest
/// round-trip form, so a document re-serializes byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub n: usize,
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub segments: Vec<SegmentDocument>,
}

impl From<&ProcessTrace> for TraceDocument {
    fn from(t: &ProcessTrace) -> Self {
        Self {
            n: t.dimension(),
            eps_lo: t.eps_lo(),
            eps_hi: t.eps_hi(),
            segments: t
                .segments()
                .map(|s| SegmentDocument {
                    eps: s.level,
                    v: s.value.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<TraceDocument> for ProcessTrace {
    type Error = Error;

    fn try_from(doc: TraceDocument) -> Result<Self> {
        if doc.n == 0 {
            return Err(Error::Invariant("n: dimension must be >= 1".into()));
        }
        if let Some(i) = doc.segments.iter().position(|s| s.v.len() != doc.n) {
            return Err(Error::Invariant(format!(
                "segments[{i}].v: expected n = {} components, got {}",
                doc.n,
                doc.segments[i].v.len()
            )));
        }
        if !(doc.eps_lo > 0.0) || !(doc.eps_lo <= doc.eps_hi) || !doc.eps_hi.is_finite() {
            return Err(Error::Invariant(format!(
                "eps_lo/eps_hi: need 0 < eps_lo <= eps_hi, got [{}, {}]",
                doc.eps_lo, doc.eps_hi
            )));
        }
        ProcessTrace::new(
            doc.eps_lo,
            doc.eps_hi,
            doc.segments.into_iter().map(|s| (s.eps, s.v)).collect(),
        )
    }
}

impl ProcessTrace {
    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(&TraceDocument::from(self)).expect("trace values are finite")
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let doc: TraceDocument = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        ProcessTrace::try_from(doc)
    }
}
